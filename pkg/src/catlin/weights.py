"""Weights, inverse weights, admissibility, and multitype computation.

A weight mu = (1, mu_2, ..., mu_n) grades monomials by (alpha+beta | mu); the
inverse weight Lambda holds the reciprocals with the conventions 0^-1 = +inf
and inf^-1 = 0.  Infinite entries are represented by ``math.inf``, which
compares correctly against ``Fraction`` values, so tuples of entries order
lexicographically out of the box.

The multitype of a polynomial model is approximated by a bounded search: in
fixed coordinates the lexicographically largest admissible inverse weight
making the model distinguished is computed exactly from the supporting values
of the Newton diagram; a finite catalog of holomorphic coordinate changes
(permutations, linear mixes, triangular shears up to a degree bound) is then
hill-climbed.  The result is flagged ``search-lower-bound`` unless the caller
corroborates it with the commutator multitype.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .exact import rat_str
from .poly import (DimensionMismatch, Poly, PolyError, eliminate_harmonic,
                   require_real)

INF = math.inf
Entry = Union[Fraction, float]  # float only ever +inf

STATUS_EXACT = "exact-commutator"
STATUS_LOWER_BOUND = "search-lower-bound"


def entry_str(x: Entry) -> str:
    return "inf" if x == INF else rat_str(x)


def entry_from_str(s: str) -> Entry:
    s = s.strip()
    return INF if s in ("inf", "+inf", "Inf") else Fraction(s)


def recip(x: Entry) -> Entry:
    """Reciprocal with 0 <-> +inf."""
    if x == INF:
        return Fraction(0)
    x = Fraction(x)
    if x == 0:
        return INF
    return 1 / x


@dataclass(frozen=True, order=True)
class Weight:
    """mu = (1, mu_2, ..., mu_n) with 1 > mu_2 >= ... >= mu_n >= 0."""

    entries: Tuple[Fraction, ...]

    def __init__(self, entries: Sequence[Fraction]):
        es = tuple(Fraction(e) for e in entries)
        if not es or es[0] != 1:
            raise PolyError("weight must start with mu_1 = 1")
        if len(es) >= 2 and es[1] >= 1:
            raise PolyError("weight requires mu_1 > mu_2")
        for a, b in zip(es[1:], es[2:]):
            if b > a:
                raise PolyError("weight entries must be nonincreasing")
        if es[-1] < 0:
            raise PolyError("weight entries must be nonnegative")
        object.__setattr__(self, "entries", es)

    @property
    def n(self) -> int:
        return len(self.entries)

    def inverse(self) -> "InverseWeight":
        return InverseWeight(tuple(recip(e) for e in self.entries))

    def to_json(self) -> dict:
        return {"mu": [entry_str(e) for e in self.entries]}

    def __str__(self) -> str:
        return "(" + ", ".join(entry_str(e) for e in self.entries) + ")"


@dataclass(frozen=True, order=True)
class InverseWeight:
    """Lambda = (1, lambda_2, ..., lambda_n), nondecreasing, entries in Q>0 or +inf."""

    entries: Tuple[Entry, ...]

    def __init__(self, entries: Sequence[Entry]):
        es = tuple(e if e == INF else Fraction(e) for e in entries)
        if not es or es[0] != 1:
            raise PolyError("inverse weight must start with lambda_1 = 1")
        for a, b in zip(es, es[1:]):
            if b < a:
                raise PolyError("inverse weight entries must be nondecreasing")
        if any(e != INF and e <= 0 for e in es):
            raise PolyError("inverse weight entries must be positive")
        object.__setattr__(self, "entries", es)

    @property
    def n(self) -> int:
        return len(self.entries)

    def weight(self) -> Weight:
        return Weight(tuple(recip(e) for e in self.entries))

    def to_json(self) -> dict:
        return {"lambda": [entry_str(e) for e in self.entries]}

    @staticmethod
    def from_json(d: dict) -> "InverseWeight":
        return InverseWeight(tuple(entry_from_str(s) for s in d["lambda"]))

    def __str__(self) -> str:
        return "(" + ", ".join(entry_str(e) for e in self.entries) + ")"


@dataclass
class Multitype:
    value: InverseWeight
    status: str = STATUS_LOWER_BOUND
    witness: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = self.value.to_json()
        out["status"] = self.status
        out["witness"] = self.witness
        return out


# ----------------------------------------------------------------------
# admissibility
# ----------------------------------------------------------------------


def is_admissible(lam: InverseWeight) -> Tuple[bool, Dict[int, List[Tuple[int, ...]]]]:
    """Check admissibility; on success the dict maps each finite slot i (1-based)
    to all integer witness tuples (a_1..a_i) with a_i > 0 and sum a_j/lambda_j = 1.

    On failure the dict maps the first failing slot to an empty list.
    """
    witnesses: Dict[int, List[Tuple[int, ...]]] = {}
    for i, lam_i in enumerate(lam.entries, start=1):
        if lam_i == INF:
            continue
        sols = _slot_witnesses(lam.entries[:i])
        if not sols:
            return False, {i: []}
        witnesses[i] = sols
    return True, witnesses


def _slot_witnesses(lams: Sequence[Entry]) -> List[Tuple[int, ...]]:
    """All (a_1..a_i) >= 0, a_i > 0, sum a_j/lambda_j = 1 (infinite slots take 0)."""
    i = len(lams)
    out: List[Tuple[int, ...]] = []

    def rec(idx: int, remaining: Fraction, acc: Tuple[int, ...]):
        if idx == i - 1:
            if remaining <= 0:
                return
            a = remaining * lams[idx] if lams[idx] != INF else None
            if a is not None and a == int(a) and int(a) >= 1:
                out.append(acc + (int(a),))
            return
        if lams[idx] == INF:
            rec(idx + 1, remaining, acc + (0,))
            return
        top = math.floor(remaining * lams[idx])
        for a in range(0, top + 1):
            rec(idx + 1, remaining - Fraction(a) / lams[idx], acc + (a,))

    rec(0, Fraction(1), ())
    return sorted(out)


def _admissible_slot(lams: Sequence[Entry]) -> bool:
    return bool(_slot_witnesses(lams))


# ----------------------------------------------------------------------
# distinguishedness in fixed coordinates
# ----------------------------------------------------------------------


def is_distinguished(r: Poly, lam: InverseWeight) -> bool:
    """True iff every term of r has total inverse-weighted order >= 1
    (infinite slots contribute zero) in the given coordinates."""
    if lam.n != r.n:
        raise DimensionMismatch("inverse weight length != dimension")
    for (a, b) in r.terms:
        total = Fraction(0)
        ok = False
        for e, lam_i in zip((x + y for x, y in zip(a, b)), lam.entries):
            if e and lam_i != INF:
                total += Fraction(e) / lam_i
            if total >= 1:
                ok = True
                break
        if not ok and total < 1:
            return False
    return True


def _evecs(p: Poly) -> List[Tuple[int, ...]]:
    """Exponent vectors alpha+beta of p's terms over variables 2..n."""
    return sorted({tuple(x + y for x, y in zip(a[1:], b[1:]))
                   for (a, b) in p.terms})


def _best_distinguished(evecs: Sequence[Tuple[int, ...]],
                        nvars: int) -> Optional[Tuple[Entry, ...]]:
    """Lex-max admissible nondecreasing (lambda_2..lambda_n) with every
    exponent vector weighted >= 1; None when infeasible."""

    def slot_bound(prefix: Tuple[Entry, ...]) -> Optional[Entry]:
        j = len(prefix)
        bound: Entry = INF
        for e in evecs:
            pre = Fraction(0)
            for x, lam in zip(e[:j], prefix):
                if x and lam != INF:
                    pre += Fraction(x) / lam
            if pre >= 1:
                continue
            tail = sum(e[j:])
            if tail == 0:
                return None
            cand = Fraction(tail) / (1 - pre)
            if cand < bound:
                bound = cand
        return bound

    def candidates(prefix: Tuple[Entry, ...], hi: Fraction,
                   lo: Fraction) -> List[Fraction]:
        lams = (Fraction(1),) + prefix
        vals = set()

        def rec(idx: int, remaining: Fraction, _acc):
            if remaining <= 0:
                return
            if idx == len(lams):
                a_lo = max(1, math.ceil(lo * remaining))
                a_hi = math.floor(hi * remaining)
                for a in range(a_lo, a_hi + 1):
                    lamv = Fraction(a) / remaining
                    if lo <= lamv <= hi:
                        vals.add(lamv)
                return
            if lams[idx] == INF:
                rec(idx + 1, remaining, None)
                return
            top = math.floor(remaining * lams[idx])
            for a in range(0, top + 1):
                rec(idx + 1, remaining - Fraction(a) / lams[idx], None)

        rec(0, Fraction(1), None)
        return sorted(vals, reverse=True)

    def rec(prefix: Tuple[Entry, ...]) -> Optional[Tuple[Entry, ...]]:
        if len(prefix) == nvars:
            return prefix
        bound = slot_bound(prefix)
        if bound is None:
            return None
        if bound == INF:
            return prefix + (INF,) * (nvars - len(prefix))
        lo = Fraction(1)
        for x in reversed(prefix):
            if x != INF:
                lo = x
                break
        else:
            lo = Fraction(1)
        if prefix and prefix[-1] == INF:
            return None  # finite after infinite would break monotonicity
        for lam in candidates(prefix, bound, lo):
            res = rec(prefix + (lam,))
            if res is not None:
                return res
        return None

    return rec(())


def best_distinguished_weight(p: Poly) -> Optional[InverseWeight]:
    """Lex-max admissible distinguished inverse weight of the model part p
    (variables 2..n) in its given coordinates."""
    tail = _best_distinguished(_evecs(p), p.n - 1)
    if tail is None:
        return None
    return InverseWeight((Fraction(1),) + tail)


# ----------------------------------------------------------------------
# multitype search over a bounded coordinate catalog
# ----------------------------------------------------------------------


def _catalog_maps(n: int, degree_bound: int) -> List[Tuple[str, List[Poly]]]:
    """Candidate holomorphic changes of z_2..z_n: permutations, pairwise
    linear mixes, and triangular monomial shears of degree <= degree_bound."""
    out: List[Tuple[str, List[Poly]]] = []
    idx = list(range(2, n + 1))
    for perm in itertools.permutations(idx):
        if list(perm) == idx:
            continue
        maps = [Poly.variable(n, 1)]
        for tgt in idx:
            src = perm[tgt - 2]
            maps.append(Poly.variable(n, src))
        out.append((f"perm{perm}", maps))
    for i in idx:
        for j in idx:
            if i == j:
                continue
            for k in range(1, degree_bound + 1):
                for c in (1, -1):
                    maps = [Poly.variable(n, v) for v in range(1, n + 1)]
                    maps[i - 1] = maps[i - 1] + Poly.variable(n, j) ** k * c
                    out.append((f"shear z{i} += {c}*z{j}^{k}", maps))
    return out


def multitype_search(r: Poly, degree_bound: int = 4,
                     max_rounds: int = 40) -> Multitype:
    """Bounded search for the multitype of the model r = c*Re(z1) + p.

    Returns the lexicographic supremum of admissible distinguished weights
    found over the coordinate catalog, flagged search-lower-bound.  The
    witness records the applied composed maps and the admissibility rows.
    """
    if r.n < 2:
        raise DimensionMismatch("multitype needs dimension >= 2")
    require_real(r, "model")
    r0, _h = eliminate_harmonic(r)
    p = _model_part(r0)
    best = best_distinguished_weight(p)
    if best is None:
        raise PolyError("no admissible distinguished weight found in given "
                        "coordinates; input is not a graded model")
    applied: List[str] = []
    for _ in range(max_rounds):
        improved = False
        for name, maps in _catalog_maps(r.n, degree_bound):
            q = p.substitute_maps(maps)
            cand = best_distinguished_weight(q)
            if cand is not None and cand.entries > best.entries:
                p, best, improved = q, cand, True
                applied.append(name)
                break
        if not improved:
            break
    ok, wit = is_admissible(best)
    witness = {
        "changes": applied,
        "admissibility": {str(i): [list(a) for a in rows]
                          for i, rows in wit.items()} if ok else {},
        "coordinates_polynomial": p.to_json_dict(),
    }
    return Multitype(best, STATUS_LOWER_BOUND, witness)


def corroborate(mt: Multitype, commutator: InverseWeight) -> Multitype:
    """Upgrade the search result to exact-commutator when the commutator
    multitype agrees (Catlin's theorem for pseudoconvex models)."""
    if mt.value.entries == commutator.entries:
        mt.status = STATUS_EXACT
        mt.witness["commutator"] = [entry_str(e) for e in commutator.entries]
    return mt


def _model_part(r0: Poly) -> Poly:
    out = {}
    for (a, b), c in r0.terms.items():
        if a[0] == 0 and b[0] == 0:
            out[(a, b)] = c
    return Poly(r0.n, out)


# ----------------------------------------------------------------------
# counting and enumeration of multitypes
# ----------------------------------------------------------------------


def counting_bound(n: int, m) -> int:
    """Upper bound (floor(m/2)+1)^((n-2)(n-1)/2) * floor(m/2)^(n-1) on the
    number of multitypes of finite-type-m pseudoconvex models in dimension n."""
    if n < 2:
        raise PolyError("counting bound needs n >= 2")
    m = Fraction(m)
    if m < 2:
        raise PolyError("counting bound needs type m >= 2")
    half = math.floor(m / 2)
    return (half + 1) ** (((n - 2) * (n - 1)) // 2) * half ** (n - 1)


def enumerate_multitypes(n: int, m) -> List[InverseWeight]:
    """All inverse weights (1, m_2..m_n) realizable by balanced exponent rows:
    m_2 even, 2 <= m_2 <= ... <= m_n <= m, and for each j some integer row
    k_{j2}..k_{jj} >= 0 with k_{jj} >= 1 and sum_l 2 k_{jl} / m_l = 1."""
    if n < 2:
        raise PolyError("enumerate_multitypes needs n >= 2")
    m = Fraction(m)
    results = set()

    def extend(prefix: Tuple[Fraction, ...]):
        j = len(prefix) + 2  # next slot
        if j > n:
            results.add((Fraction(1),) + prefix)
            return
        seen = set()

        def rows(idx: int, remaining: Fraction):
            if idx == len(prefix):
                if remaining <= 0:
                    return
                # 2 k_jj / m_j = remaining, m_j in [prefix[-1], m]
                kmax = math.floor(m * remaining / 2)
                for kjj in range(1, kmax + 1):
                    mj = 2 * kjj / remaining
                    if mj >= prefix[-1] and mj <= m and mj not in seen:
                        seen.add(mj)
                        extend(prefix + (mj,))
                return
            ml = prefix[idx]
            top = math.floor(remaining * ml / 2)
            for k in range(0, top + 1):
                rows(idx + 1, remaining - Fraction(2 * k) / ml)

        rows(0, Fraction(1))

    top2 = math.floor(m)
    for m2 in range(2, top2 + 1, 2):
        if n == 2:
            results.add((Fraction(1), Fraction(m2)))
        else:
            extend((Fraction(m2),))
    return [InverseWeight(t) for t in sorted(results)]


# ----------------------------------------------------------------------
# weight descent for the normal-form pipeline
# ----------------------------------------------------------------------


def lower_weight_at(mu: Weight, j: int, q: Poly) -> Optional[Weight]:
    """Largest weight lexicographically below mu obtained by dropping mu_j
    (and every later slot) to a supporting value of q's Newton diagram.

    Candidates t are the values making some term of q have weight exactly 1
    under (mu_2..mu_{j-1}, t, ..., t); the largest candidate keeping every
    term at weight >= 1 wins.  None when no such value exists."""
    entries = mu.entries
    if not 2 <= j <= mu.n:
        raise DimensionMismatch(f"slot {j} out of range")
    pres_tails = []
    candidates = set()
    for (a, b) in q.terms:
        e = tuple(x + y for x, y in zip(a, b))
        pre = sum((Fraction(e[i]) * entries[i] for i in range(j - 1)),
                  Fraction(0))
        tail = sum(e[j - 1:])
        pres_tails.append((pre, tail))
        if pre >= 1 or tail == 0:
            continue
        t = (1 - pre) / tail
        if t >= entries[j - 1] or t <= 0:
            continue
        if j > 2 and t > entries[j - 2]:
            continue
        candidates.add(t)
    for t in sorted(candidates, reverse=True):
        if all(pre + tail * t >= 1 or (pre >= 1)
               for pre, tail in pres_tails):
            return Weight(entries[:j - 1] + (t,) * (mu.n - j + 1))
    return None
