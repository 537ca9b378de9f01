"""Boundary systems of polynomial model hypersurfaces.

Given r = c * Re z1 + p(z_2..z_n, conj), the construction computes the Levi
rank at 0, tangential (1,0) vector fields with exact polynomial
coefficients, and then, slot by slot, minimal ordered admissible lists of
fields whose iterated derivative of the (1,0) differential,

    list_derivative: L^1 ... L^{l-2} dr([L^{l-1}, L^l]),

does not vanish at the origin.  The list lengths produce the commutator
multitype (1, c_2, ..., c_n); the associated real functions r_j and fields
L_j form the boundary system.  The first equal-value block beyond the Levi
slots can be normalized to r_j = Re z_j exactly by a holomorphic change of
coordinates; the failure of the same normalization at the next slot is the
torsion obstruction, detected as non-pluriharmonic content of r_j.

Field coefficients are polynomials.  Tangency constraints are solved by an
exact triangular elimination whose matrix inverse is expanded as a Neumann
series; because the nonconstant part raises degrees, the series is exact up
to the stored truncation degree, which exceeds every derivative order that
can influence a value at the origin.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .exact import CRat, CZERO, rat_str
from .poly import CoordChange, Poly, PolyError, require_real
from .weights import INF, Entry, InverseWeight, Weight, entry_str, recip


class ModelShapeError(PolyError):
    """Input is not of the model shape c * Re z1 + p(z_2..z_n)."""


class BoundaryConstructionError(PolyError):
    """The boundary-system construction hit an inconsistent state."""


# ----------------------------------------------------------------------
# fields and derivations
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class VField:
    """Type (1,0) vector field sum_k hol[k-1] d/dz_k with polynomial
    coefficients; the conjugate field is formed on demand."""

    hol: Tuple[Poly, ...]

    @property
    def n(self) -> int:
        return len(self.hol)

    def to_json(self) -> dict:
        return {"hol": [f.to_json_dict() for f in self.hol]}


@dataclass(frozen=True)
class _Mixed:
    """Internal field of mixed type: sum hol_k d/dz_k + anti_k d/dzbar_k."""

    hol: Tuple[Poly, ...]
    anti: Tuple[Poly, ...]

    def conj(self) -> "_Mixed":
        return _Mixed(tuple(f.conj() for f in self.anti),
                      tuple(f.conj() for f in self.hol))

    def derive(self, f: Poly, cap: Optional[int] = None) -> Poly:
        n = f.n
        out = Poly.zero(n)
        for k in range(1, n + 1):
            if not self.hol[k - 1].is_zero():
                out = out + self.hol[k - 1] * f.wirtinger(k)
            if not self.anti[k - 1].is_zero():
                out = out + self.anti[k - 1] * f.wirtinger(k, conjugate=True)
        if cap is not None:
            out = _truncate(out, cap)
        return out

    def bracket(self, other: "_Mixed") -> "_Mixed":
        hol = tuple(self.derive(other.hol[k]) - other.derive(self.hol[k])
                    for k in range(len(self.hol)))
        anti = tuple(self.derive(other.anti[k]) - other.derive(self.anti[k])
                     for k in range(len(self.anti)))
        return _Mixed(hol, anti)


def _as_mixed(vf: VField, conjugated: bool) -> _Mixed:
    n = vf.n
    zero = tuple(Poly.zero(n) for _ in range(n))
    plain = _Mixed(vf.hol, zero)
    return plain.conj() if conjugated else plain


def _truncate(p: Poly, degree: int) -> Poly:
    return Poly(p.n, {k: c for k, c in p.terms.items()
                      if sum(k[0]) + sum(k[1]) <= degree})


ListEntry = Tuple[int, bool]  # (slot index, conjugated?)


def list_derivative(r: Poly, fields: Dict[int, VField],
                    entries: Sequence[ListEntry]) -> Poly:
    """The function L^1 ... L^{l-2} dr([L^{l-1}, L^l]) for an ordered list.

    ``entries`` reference ``fields`` by slot; True marks the conjugate field.
    The result is a polynomial on the ambient space; callers evaluate at 0."""
    if len(entries) < 2:
        raise PolyError("a list needs at least two fields")
    mixed = [_as_mixed(fields[slot], conj) for slot, conj in entries]
    seed = _pair_with_dr(r, mixed[-2].bracket(mixed[-1]))
    for fld in reversed(mixed[:-2]):
        seed = fld.derive(seed)
    return seed


def _pair_with_dr(r: Poly, v: _Mixed) -> Poly:
    out = Poly.zero(r.n)
    for k in range(1, r.n + 1):
        if not v.hol[k - 1].is_zero():
            out = out + v.hol[k - 1] * r.wirtinger(k)
    return out


def _list_value_at_origin(r: Poly, fields: Dict[int, VField],
                          entries: Sequence[ListEntry]) -> CRat:
    """Value of the list derivative at 0, with degree-capped intermediates
    (a term of degree d needs at least d further derivations to reach 0)."""
    mixed = [_as_mixed(fields[slot], conj) for slot, conj in entries]
    remaining = len(mixed) - 2
    seed = _truncate(_pair_with_dr(r, mixed[-2].bracket(mixed[-1])), remaining)
    for i, fld in enumerate(reversed(mixed[:-2])):
        seed = fld.derive(seed, cap=remaining - i - 1)
        if seed.is_zero():
            return CZERO
    zero = (0,) * r.n
    return seed.terms.get((zero, zero), CZERO)


class _ListSearcher:
    """Shared-state search for flag patterns with nonzero list derivative.

    Brackets are cached per (entry, entry) pair and the applications walk the
    skeleton from its tail, so sibling patterns reuse every suffix state;
    intermediates are degree-capped by the number of derivations left."""

    def __init__(self, r: Poly, fields: Dict[int, VField]):
        self.r = r
        self.fields = fields
        self._mixed: Dict[ListEntry, _Mixed] = {}
        self._seeds: Dict[Tuple[ListEntry, ListEntry, int], Poly] = {}

    def mixed(self, entry: ListEntry) -> _Mixed:
        if entry not in self._mixed:
            self._mixed[entry] = _as_mixed(self.fields[entry[0]], entry[1])
        return self._mixed[entry]

    def seed(self, e1: ListEntry, e2: ListEntry, cap: int) -> Poly:
        key = (e1, e2, cap)
        if key not in self._seeds:
            bracket = self.mixed(e1).bracket(self.mixed(e2))
            self._seeds[key] = _truncate(_pair_with_dr(self.r, bracket), cap)
        return self._seeds[key]

    def first_nonzero(self, skeleton: Sequence[int]
                      ) -> Optional[List[ListEntry]]:
        """First (in canonical flag order, tail varying slowest) conjugation
        pattern over the skeleton whose list derivative at 0 is nonzero."""
        length = len(skeleton)
        zero = (0,) * self.r.n

        def rec(pos: int, current: Poly) -> Optional[List[ListEntry]]:
            if current.is_zero():
                return None
            if pos < 0:
                c = current.terms.get((zero, zero), CZERO)
                return [] if not c.is_zero() else None
            for flag in (False, True):
                entry = (skeleton[pos], flag)
                nxt = self.mixed(entry).derive(current, cap=pos)
                res = rec(pos - 1, nxt)
                if res is not None:
                    res.append(entry)  # ascending positions 0..pos
                    return res
            return None

        for f1 in (False, True):
            for f2 in (False, True):
                e1 = (skeleton[length - 2], f1)
                e2 = (skeleton[length - 1], f2)
                if e1 == e2:
                    continue  # bracket of a field with itself vanishes
                res = rec(length - 3, self.seed(e1, e2, length - 2))
                if res is not None:
                    return res + [e1, e2]
        return None


# ----------------------------------------------------------------------
# Hermitian congruence (exact Gram-Schmidt with hyperbolic pairs)
# ----------------------------------------------------------------------


def hermitian_reduce(h: List[List[CRat]]) -> List[Tuple[List[CRat], Fraction]]:
    """Basis vectors q_i with form(q_i, q_j) = 0 for i != j; returns
    (vector, form(q_i, q_i)) pairs, nonzero values first."""
    dim = len(h)

    def form(u: List[CRat], v: List[CRat]) -> CRat:
        total = CZERO
        for k in range(dim):
            if u[k].is_zero():
                continue
            for l in range(dim):
                total = total + h[k][l] * u[k] * v[l].conj()
        return total

    basis = [[CRat(1 if i == k else 0) for k in range(dim)] for i in range(dim)]
    done: List[Tuple[List[CRat], Fraction]] = []
    remaining = list(basis)
    while remaining:
        for v in remaining:
            for q, d in done:
                if d != 0:
                    coef = form(v, q) / CRat(d)
                    for k in range(dim):
                        v[k] = v[k] - coef * q[k]
        pick = next((v for v in remaining if not form(v, v).is_zero()), None)
        if pick is None:
            hyper = None
            for v, w in itertools.combinations(remaining, 2):
                if not form(v, w).is_zero():
                    hyper = (v, w)
                    break
            if hyper is None:
                done.extend((v, Fraction(0)) for v in remaining)
                break
            v, w = hyper
            cand = [v[k] + w[k] for k in range(dim)]
            if form(cand, cand).is_zero():
                cand = [v[k] + CRat(0, 1) * w[k] for k in range(dim)]
            remaining[remaining.index(v)] = cand
            continue
        val = form(pick, pick)
        if not val.is_real():
            raise BoundaryConstructionError("Hermitian form value not real")
        done.append((pick, val.re))
        remaining.remove(pick)
    done.sort(key=lambda t: t[1] == 0)  # stable: nonzero first
    return done


# ----------------------------------------------------------------------
# boundary system construction
# ----------------------------------------------------------------------


@dataclass
class SlowSlot:
    slot: int
    direction: Tuple[CRat, ...]       # tangential direction over z_2..z_n
    fld: VField
    entries: List[ListEntry]
    counts: Dict[int, int]            # slot -> number of its fields in the list
    c: Fraction
    r_func: Poly                      # normalized real function r_j
    g_raw: Poly                       # the list derivative before Re/Im
    used_im: bool
    scale: CRat = CZERO               # linear coefficient divided out of g_raw

    def to_json(self) -> dict:
        return {"slot": self.slot,
                "direction": [str(c) for c in self.direction],
                "list": [[s, bool(c)] for s, c in self.entries],
                "c": rat_str(self.c),
                "r": self.r_func.to_json_dict(),
                "field": self.fld.to_json()}


@dataclass
class BoundarySystem:
    n: int
    r: Poly
    rank: int                         # Levi rank s_0
    levi_fields: List[VField]
    levi_values: List[Fraction]
    slow: Dict[int, SlowSlot]
    c_entries: Tuple[Entry, ...]      # full (1, c_2, ..., c_n)
    list_bound: int
    trunc_degree: int
    transform: Optional[CoordChange] = None

    @property
    def nu(self) -> int:
        return max((j for j in range(1, self.n + 1)
                    if self.c_entries[j - 1] != INF), default=1)

    def commutator_multitype(self) -> InverseWeight:
        return InverseWeight(self.c_entries)

    def r_function(self, j: int) -> Poly:
        if j == 1:
            return self.r
        return self.slow[j].r_func

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "c": [entry_str(e) for e in self.c_entries],
            "nu": self.nu,
            "levi_fields": [f.to_json() for f in self.levi_fields],
            "slots": {str(j): s.to_json() for j, s in sorted(self.slow.items())},
            "r1": self.r.to_json_dict(),
            "list_bound": self.list_bound,
        }


def _model_split(r: Poly) -> Tuple[CRat, Poly]:
    """Validate the model shape and return (z1 coefficient, tangential p)."""
    require_real(r, "model")
    n = r.n
    e1 = tuple(1 if i == 0 else 0 for i in range(n))
    zero = (0,) * n
    c1 = r.terms.get((e1, zero), CZERO)
    if c1.is_zero() or not c1.is_real():
        raise ModelShapeError("model needs a nonzero real multiple of Re z1")
    p_terms = {}
    for (a, b), c in r.terms.items():
        if a[0] or b[0]:
            if (a, b) not in ((e1, zero), (zero, e1)):
                raise ModelShapeError("z1 appears beyond the linear head")
            continue
        p_terms[(a, b)] = c
    return c1, Poly(n, p_terms)


def _tangential_hessian(p: Poly) -> List[List[Poly]]:
    return [[p.wirtinger(j).wirtinger(k, conjugate=True)
             for k in range(2, p.n + 1)] for j in range(2, p.n + 1)]


def _field_from_vector(r: Poly, c1: CRat, vec: Sequence[Poly]) -> VField:
    """Tangential field with given z_2..z_n coefficients; the z_1 coefficient
    is solved from L(r) = 0."""
    n = r.n
    a1 = Poly.zero(n)
    for k in range(2, n + 1):
        if not vec[k - 2].is_zero():
            a1 = a1 + vec[k - 2] * r.wirtinger(k)
    a1 = a1 * (CRat(-1) / c1)
    return VField((a1,) + tuple(vec))


def _const_vec(n: int, direction: Sequence[CRat]) -> List[Poly]:
    return [Poly.const(n, c) if not CRat.of(c).is_zero() else Poly.zero(n)
            for c in direction]


def _neumann_solve(matrix: List[List[Poly]], rhs: List[Poly], n: int,
                   cap: int) -> Optional[List[Poly]]:
    """Solve M x = rhs over polynomials, exactly modulo degree > cap.

    Requires M(0) invertible; the series terminates because the nonconstant
    part of M raises the minimum degree at each iteration."""
    dim = len(matrix)
    zero_key = ((0,) * n, (0,) * n)
    m0 = [[matrix[i][j].terms.get(zero_key, CZERO) for j in range(dim)]
          for i in range(dim)]
    m0inv = _invert_matrix(m0)
    if m0inv is None:
        return None
    npart = [[_truncate(matrix[i][j] - Poly.const(n, m0[i][j]), cap)
              for j in range(dim)] for i in range(dim)]

    def apply_const(mat: List[List[CRat]], vec: List[Poly]) -> List[Poly]:
        return [sum((vec[j] * mat[i][j] for j in range(dim)), Poly.zero(n))
                for i in range(dim)]

    def apply_poly(mat: List[List[Poly]], vec: List[Poly]) -> List[Poly]:
        return [_truncate(sum((mat[i][j] * vec[j] for j in range(dim)),
                              Poly.zero(n)), cap) for i in range(dim)]

    x = apply_const(m0inv, rhs)
    acc = list(x)
    for _ in range(cap + 2):
        x = apply_const(m0inv, apply_poly(npart, x))
        x = [_truncate(-f, cap) for f in x]
        if all(f.is_zero() for f in x):
            break
        acc = [a + b for a, b in zip(acc, x)]
    return acc


def _invert_matrix(m: List[List[CRat]]) -> Optional[List[List[CRat]]]:
    dim = len(m)
    if dim == 0:
        return []
    a = [row[:] + [CRat(1 if i == j else 0) for j in range(dim)]
         for i, row in enumerate(m)]
    for col in range(dim):
        piv = next((r for r in range(col, dim) if not a[r][col].is_zero()), None)
        if piv is None:
            return None
        a[col], a[piv] = a[piv], a[col]
        inv = CRat(1) / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(dim):
            if r != col and not a[r][col].is_zero():
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[dim:] for row in a]


def _build_slow_field(r: Poly, c1: CRat, p_hess: List[List[Poly]],
                      direction: Sequence[CRat],
                      levi: List[VField], prior: List[SlowSlot],
                      cap: int) -> Optional[VField]:
    """Field along ``direction`` corrected to annihilate the Levi pairings
    with the block fields and the earlier slow functions r_k."""
    n = r.n
    base = _const_vec(n, direction)
    columns: List[List[Poly]] = []
    for lf in levi:
        columns.append([lf.hol[k - 1] for k in range(2, n + 1)])
    for sl in prior:
        columns.append(_const_vec(n, sl.direction))

    def levi_row(vec: List[Poly], lf: VField) -> Poly:
        out = Poly.zero(n)
        for k in range(2, n + 1):
            if vec[k - 2].is_zero():
                continue
            for l in range(2, n + 1):
                conj_l = lf.hol[l - 1].conj()
                if conj_l.is_zero():
                    continue
                out = out + p_hess[k - 2][l - 2] * vec[k - 2] * conj_l
        return out

    def slow_row(vec: List[Poly], sl: SlowSlot) -> Poly:
        out = Poly.zero(n)
        for k in range(2, n + 1):
            if not vec[k - 2].is_zero():
                out = out + vec[k - 2] * sl.r_func.wirtinger(k)
        return out

    rows = [lambda v, lf=lf: levi_row(v, lf) for lf in levi]
    rows += [lambda v, sl=sl: slow_row(v, sl) for sl in prior]
    if not rows:
        return _field_from_vector(r, c1, base)
    matrix = [[row(col) for col in columns] for row in rows]
    rhs = [-row(base) for row in rows]
    sol = _neumann_solve(matrix, rhs, n, cap)
    if sol is None:
        return None
    vec = list(base)
    for coefficient, col in zip(sol, columns):
        for k in range(n - 1):
            vec[k] = vec[k] + _truncate(coefficient * col[k], cap)
    return _field_from_vector(r, c1, vec)


def _compositions(total: int, slots: List[int], c_prev: Dict[int, Fraction]
                  ) -> List[Dict[int, int]]:
    """Count vectors l_k >= 0 (l_last >= 1) over ``slots`` summing to total
    with the admissibility constraint sum_{k < last} l_k / c_k < 1."""
    last = slots[-1]
    earlier = slots[:-1]
    out = []

    def rec(idx: int, left: int, acc: Dict[int, int], frac: Fraction):
        if idx == len(earlier):
            if left >= 1:
                out.append({**acc, last: left})
            return
        k = earlier[idx]
        for lk in range(0, left + 1):
            nf = frac + Fraction(lk) / c_prev[k]
            if nf >= 1:
                break
            rec(idx + 1, left - lk, {**acc, k: lk}, nf)

    rec(0, total, {}, Fraction(0))
    return out


def build_boundary_system(r: Poly, list_bound: Optional[int] = None
                          ) -> BoundarySystem:
    """Construct a boundary system and the commutator multitype of the model.

    The search frontier for list lengths defaults to the total degree of the
    tangential polynomial; at the first slot where every admissible ordered
    list within the frontier vanishes at 0, the remaining entries are +inf."""
    c1, p = _model_split(r)
    n = r.n
    if n < 2:
        raise ModelShapeError("boundary systems need dimension >= 2")
    bound = list_bound if list_bound is not None else max(2, p.total_degree())
    cap = max(2, p.total_degree()) + 2
    p_hess = _tangential_hessian(p)
    h0 = [[p_hess[j][k].terms.get(((0,) * n, (0,) * n), CZERO)
           for k in range(n - 1)] for j in range(n - 1)]
    reduced = hermitian_reduce(h0)
    rank = sum(1 for _v, d in reduced if d != 0)
    levi_fields = [_field_from_vector(r, c1, _const_vec(n, vec))
                   for vec, d in reduced if d != 0]
    levi_values = [d for _v, d in reduced if d != 0]
    kernel_dirs = [tuple(vec) for vec, d in reduced if d == 0]
    catalog: List[Tuple[CRat, ...]] = list(kernel_dirs)
    if len(kernel_dirs) > 1:
        for t in (1, 2, -1):
            combo = tuple(
                sum((kernel_dirs[i][k] * (CRat(t) ** i)
                     for i in range(len(kernel_dirs))), CZERO)
                for k in range(n - 1))
            catalog.append(combo)
    c_entries: List[Entry] = [Fraction(1)] + [Fraction(2)] * rank
    slow: Dict[int, SlowSlot] = {}
    fields_by_slot: Dict[int, VField] = {}
    c_by_slot: Dict[int, Fraction] = {}
    used_dirs: List[Tuple[CRat, ...]] = []
    slot = rank + 2
    while slot <= n:
        found = None
        field_cache: Dict[Tuple[CRat, ...], Optional[VField]] = {}
        searcher_cache: Dict[Tuple[CRat, ...], _ListSearcher] = {}
        for total in range(2, bound + 1):
            for direction in catalog:
                if _in_span(direction, used_dirs):
                    continue
                if direction not in field_cache:
                    field_cache[direction] = _build_slow_field(
                        r, c1, p_hess, direction, levi_fields,
                        [slow[j] for j in sorted(slow)], cap)
                fld = field_cache[direction]
                if fld is None:
                    continue
                if direction not in searcher_cache:
                    searcher_cache[direction] = _ListSearcher(
                        r, {**fields_by_slot, slot: fld})
                searcher = searcher_cache[direction]
                slots_in_play = sorted(slow) + [slot]
                for counts in _compositions(total, slots_in_play, c_by_slot):
                    skeleton: List[int] = []
                    for s in sorted(counts, reverse=True):
                        skeleton.extend([s] * counts[s])
                    entries = searcher.first_nonzero(skeleton)
                    if entries is not None:
                        found = (direction, fld, entries, counts)
                        break
                if found:
                    break
            if found:
                break
        if not found:
            c_entries.extend([INF] * (n - slot + 1))
            break
        direction, fld, entries, counts = found
        frac = sum((Fraction(counts.get(k, 0)) / c_by_slot[k]
                    for k in sorted(slow)), Fraction(0))
        c_j = Fraction(counts[slot]) / (1 - frac)
        if len(entries) < 3:
            raise BoundaryConstructionError(
                f"slot {slot}: minimal list of length {len(entries)} cannot "
                "carry a boundary-system function")
        g = list_derivative(r, {**fields_by_slot, slot: fld}, entries[1:])
        r_func, used_im, scale = _normalize_r(g, direction, n)
        sl = SlowSlot(slot=slot, direction=tuple(direction), fld=fld,
                      entries=list(entries), counts=dict(counts), c=c_j,
                      r_func=r_func, g_raw=g, used_im=used_im, scale=scale)
        slow[slot] = sl
        fields_by_slot[slot] = fld
        c_by_slot[slot] = c_j
        used_dirs.append(tuple(direction))
        c_entries.append(c_j)
        slot += 1
    while len(c_entries) < n:
        c_entries.append(INF)
    return BoundarySystem(n=n, r=r, rank=rank, levi_fields=levi_fields,
                          levi_values=levi_values, slow=slow,
                          c_entries=tuple(c_entries), list_bound=bound,
                          trunc_degree=cap)


def _in_span(direction: Sequence[CRat], used: List[Tuple[CRat, ...]]) -> bool:
    if not used:
        return False
    rows = [list(u) for u in used] + [list(direction)]
    return _crat_rank(rows) == _crat_rank([list(u) for u in used])


def _crat_rank(rows: List[List[CRat]]) -> int:
    m = [row[:] for row in rows]
    rank = 0
    cols = len(m[0]) if m else 0
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, len(m)) if not m[i][c].is_zero()), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(len(m)):
            if i != r and not m[i][c].is_zero():
                f = m[i][c] / m[r][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        r += 1
        rank += 1
    return rank


def _normalize_r(g: Poly, direction: Sequence[CRat], n: int
                 ) -> Tuple[Poly, bool, CRat]:
    """Canonical real function from the list derivative: scale so the linear
    part along the slot direction is exactly Re z_dir; prefer Re over Im.
    Also returns the scale (the linear coefficient that was divided out)."""
    dirvar = next((k + 2 for k, c in enumerate(direction) if not c.is_zero()),
                  None)
    if dirvar is None:
        raise BoundaryConstructionError("slow slot without a direction")
    e = tuple(1 if i == dirvar - 1 else 0 for i in range(n))
    zero = (0,) * n
    c_plus = g.terms.get((e, zero), CZERO)
    c_minus = g.terms.get((zero, e), CZERO)
    a_re = c_plus + c_minus.conj()
    if not a_re.is_zero():
        scaled = g * (CRat(1) / a_re)
        return (scaled + scaled.conj()) * Fraction(1, 2), False, a_re
    a_im = (c_plus - c_minus.conj()) * CRat(0, -1)
    if not a_im.is_zero():
        scaled = g * (CRat(1) / a_im)
        im = (scaled - scaled.conj()) * CRat(0, Fraction(-1, 2))
        return im, True, a_im
    re_part = (g + g.conj()) * Fraction(1, 2)
    if not re_part.is_zero():
        return re_part, False, CZERO
    return (g - g.conj()) * CRat(0, Fraction(-1, 2)), True, CZERO


# ----------------------------------------------------------------------
# first-block normalization and torsion
# ----------------------------------------------------------------------


def first_block_slots(bs: BoundarySystem) -> List[int]:
    """Slots carrying the first finite c-value above 2."""
    above = [j for j in range(2, bs.n + 1)
             if bs.c_entries[j - 1] != INF and bs.c_entries[j - 1] > 2]
    if not above:
        return []
    lead = bs.c_entries[above[0] - 1]
    return [j for j in above if bs.c_entries[j - 1] == lead]


def _mu_from_c(c_entries: Sequence[Entry]) -> Weight:
    return Weight(tuple(recip(e) for e in c_entries))


def normalize_first_block(bs: BoundarySystem, r0: Poly) -> BoundarySystem:
    """Normalize the first slow block to r_j = Re z_j exactly (model level).

    For each slot j in the block, the (k-1, k) Wirtinger derivative of the
    model (k = lambda_j / 2) has the shape c_+ z_j + c_- zbar_j + T with T a
    harmonic polynomial in the later variables; the change
    z_j -> (z_j - phi - psi)/(c_+ + conj(c_-)) with T = phi + conj(psi)
    straightens r_j.  A non-harmonic T is reported as a pseudoconvexity
    violation; a vanishing scale factor as inconsistent input."""
    block = first_block_slots(bs)
    if not block:
        raise BoundaryConstructionError("no finite slow block to normalize")
    lam = bs.c_entries[block[0] - 1]
    if lam != int(lam) or int(lam) % 2 != 0:
        raise BoundaryConstructionError(
            f"first block value {lam} is not an even integer")
    k = int(lam) // 2
    mu = _mu_from_c(bs.c_entries)
    n = bs.n
    r_cur = r0
    trace = CoordChange.identity(n, mu.entries)
    for j in block:
        support = [i + 2 for i, c in enumerate(bs.slow[j].direction)
                   if not c.is_zero()]
        if len(support) != 1:
            raise BoundaryConstructionError(
                f"slot {j}: direction {bs.slow[j].direction} is not aligned "
                "with a coordinate axis; apply an aligning linear change first")
        dirvar = support[0]
        alpha = [0] * n
        beta = [0] * n
        alpha[dirvar - 1] = k - 1
        beta[dirvar - 1] = k
        norm = Fraction(1, math.factorial(k - 1) * math.factorial(k))
        g = r_cur.deriv_multi(alpha, beta) * norm
        e = tuple(1 if i == dirvar - 1 else 0 for i in range(n))
        zero = (0,) * n
        c_plus = g.terms.get((e, zero), CZERO)
        c_minus = g.terms.get((zero, e), CZERO)
        tail = g - Poly.monomial(n, e, zero, c_plus) \
                 - Poly.monomial(n, zero, e, c_minus)
        if tail.degree_in(dirvar) > 0:
            raise BoundaryConstructionError(
                f"slot {j}: derivative tail depends on z_{dirvar}; the input "
                "is not weight-graded")
        non_harmonic = tail - tail.pure_part()
        if not non_harmonic.is_zero():
            raise PseudoconvexityViolation(
                f"slot {j}: harmonic tail certificate fails; offending part "
                f"{non_harmonic}", non_harmonic)
        a = c_plus + c_minus.conj()
        if a.is_zero():
            raise BoundaryConstructionError(
                f"slot {j}: scale factor C+ + conj(C-) vanishes; "
                "inconsistent input")
        phi = tail.holomorphic_part()
        psi = tail.antiholomorphic_part().conj()
        maps = [Poly.variable(n, v) for v in range(1, n + 1)]
        maps[dirvar - 1] = (Poly.variable(n, dirvar) - phi - psi) * (CRat(1) / a)
        change = CoordChange(n, maps, mu.entries)
        r_cur = change.apply(r_cur)
        trace = trace.compose(change)
    rebuilt = build_boundary_system(r_cur, bs.list_bound)
    rebuilt.transform = trace
    return rebuilt


class PseudoconvexityViolation(PolyError):
    """A harmonicity certificate failed; carries the offending polynomial."""

    def __init__(self, message: str, offending: Poly):
        super().__init__(message)
        self.offending = offending


@dataclass
class TorsionReport:
    applicable: bool
    slot: Optional[int] = None
    torsion: bool = False
    linear_coeff: Optional[CRat] = None
    obstruction: Optional[Poly] = None
    detail: str = ""

    def to_json(self) -> dict:
        return {
            "applicable": self.applicable,
            "slot": self.slot,
            "torsion": self.torsion,
            "linear_coeff": str(self.linear_coeff) if self.linear_coeff else None,
            "obstruction": self.obstruction.to_json_dict()
            if self.obstruction is not None else None,
            "detail": self.detail,
        }


def detect_torsion(bs: BoundarySystem, r0: Poly) -> TorsionReport:
    """Obstruction to straightening the boundary-system function after the
    first block: any non-pluriharmonic content of r_j beyond its linear term."""
    block = first_block_slots(bs)
    if not block:
        return TorsionReport(False, detail="no slow block present")
    beyond = [j for j in range(block[-1] + 1, bs.n + 1)
              if bs.c_entries[j - 1] != INF]
    if not beyond:
        return TorsionReport(False, detail="no finite slot beyond the first "
                                           "block")
    j = beyond[0]
    sl = bs.slow[j]
    zero = (0,) * bs.n
    c1 = sl.scale
    mixed = Poly(bs.n, {key: c for key, c in sl.r_func.terms.items()
                        if key[0] != zero and key[1] != zero})
    if mixed.is_zero():
        return TorsionReport(True, slot=j, torsion=False, linear_coeff=c1,
                             obstruction=Poly.zero(bs.n),
                             detail=f"r_{j} has pluriharmonic tail only")
    return TorsionReport(True, slot=j, torsion=True, linear_coeff=c1,
                         obstruction=mixed,
                         detail=f"r_{j} carries non-pluriharmonic content")


# ----------------------------------------------------------------------
# property audit
# ----------------------------------------------------------------------


def audit_boundary_system(bs: BoundarySystem) -> List[str]:
    """Independent re-check of the construction invariants; returns the list
    of violations (empty when sound)."""
    problems: List[str] = []
    fields = {j: s.fld for j, s in bs.slow.items()}
    for i, lf in enumerate(bs.levi_fields):
        if not _field_poly_derive(lf, bs.r).is_zero():
            problems.append(f"Levi field {i + 2}: L(r) != 0")
    for j, sl in sorted(bs.slow.items()):
        if not _field_poly_derive(sl.fld, bs.r).is_zero():
            problems.append(f"slot {j}: L_{j}(r) != 0")
        value = _list_value_at_origin(bs.r, fields, sl.entries)
        if value.is_zero():
            problems.append(f"slot {j}: list derivative vanishes at 0")
        if sl.entries[0][0] != j:
            problems.append(f"slot {j}: list does not start in S_{j}")
        groups = [s for s, _c in sl.entries]
        if groups != sorted(groups, reverse=True):
            problems.append(f"slot {j}: list is not ordered")
        frac = sum((Fraction(sl.counts.get(k, 0)) / bs.slow[k].c
                    for k in bs.slow if k < j), Fraction(0))
        if frac >= 1:
            problems.append(f"slot {j}: admissibility sum {frac} >= 1")
        total = frac + Fraction(sl.counts[j]) / sl.c
        if total != 1:
            problems.append(f"slot {j}: property-(5) sum {total} != 1")
        lrj = _apply_field_at_origin(sl.fld, sl.r_func)
        if lrj.is_zero():
            problems.append(f"slot {j}: L_j r_j vanishes at 0")
        for k, other in bs.slow.items():
            if k < j:
                lr = _truncate(_field_poly_derive(sl.fld, other.r_func),
                               bs.trunc_degree)
                if not lr.is_zero():
                    problems.append(
                        f"slot {j}: L_{j} r_{k} != 0 (up to degree "
                        f"{bs.trunc_degree})")
        shorter = _shorter_lists_all_vanish(bs, j)
        if shorter:
            problems.append(shorter)
    return problems


def _field_poly_derive(fld: VField, f: Poly) -> Poly:
    out = Poly.zero(f.n)
    for k in range(1, f.n + 1):
        if not fld.hol[k - 1].is_zero():
            out = out + fld.hol[k - 1] * f.wirtinger(k)
    return out


def _apply_field_at_origin(fld: VField, f: Poly) -> CRat:
    val = _field_poly_derive(fld, f)
    zero = (0,) * f.n
    return val.terms.get((zero, zero), CZERO)


def _shorter_lists_all_vanish(bs: BoundarySystem, j: int) -> Optional[str]:
    sl = bs.slow[j]
    fields = {k: s.fld for k, s in bs.slow.items()}
    searcher = _ListSearcher(bs.r, fields)
    length = len(sl.entries)
    c_prev = {k: bs.slow[k].c for k in bs.slow if k < j}
    slots_in_play = sorted(c_prev) + [j]
    for total in range(2, length):
        for counts in _compositions(total, slots_in_play, c_prev):
            skeleton: List[int] = []
            for s in sorted(counts, reverse=True):
                skeleton.extend([s] * counts[s])
            entries = searcher.first_nonzero(skeleton)
            if entries is not None:
                return (f"slot {j}: shorter admissible list {entries} has "
                        "nonzero derivative; minimality broken")
    return None
