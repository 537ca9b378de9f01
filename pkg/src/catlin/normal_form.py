"""Constructive extraction of the balanced sum-of-squares normal form.

Given a model r = -2 Re z1 + p with p weighted homogeneous of weight 1, the
pipeline extracts, step by step, balanced monomials

    A_2 |z2|^{2 k_22},  A_3 |z2|^{2 k_32} |z3|^{2 k_33},  ...

after weighted homogeneous polynomial coordinate changes.  Step 2 restricts
to the leading equal-weight block and normalizes a direction in which the
restriction does not vanish; step m takes the top (z_m, zbar_m)-degree part
of the remainder among terms supported in z_2..z_m and filters down to its
revlex-maximal balanced monomial.  Pseudoconvexity forces every extracted
degree to be even and every extracted coefficient to be positive; when the
caller asserts pseudoconvexity, a violation raises PseudoconvexityError,
otherwise it is recorded as a warning and the remaining rows stay
unrealized.

When a step degenerates (the required restriction vanishes identically) the
weight is lowered lexicographically to the next supporting value of the
Newton diagram and the pipeline restarts, recording the descent.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Sequence, Tuple

from .exact import CRat, CZERO, rat_str
from .poly import (CoordChange, Poly, PolyError, eliminate_harmonic,
                   require_real, revlex_max_balanced)
from .weights import Weight, lower_weight_at


class PseudoconvexityError(PolyError):
    """A positivity side condition failed while pseudoconvexity was asserted."""


class _Degenerate(Exception):
    """Internal: a step's nonvanishing hypothesis failed; carries the slot."""

    def __init__(self, slot: int, remaining: Poly):
        self.slot = slot
        self.remaining = remaining


class _Contradiction(Exception):
    """Internal: a positivity side condition failed."""

    def __init__(self, detail: str):
        self.detail = detail


# Complex rational direction parameters tried when a restriction vanishes in
# the given coordinates; enough to hit a nonvanishing direction for any
# nonzero polynomial (grown with the degree by _directions).
_BASE_DIRECTIONS = [0, 1, -1, 2, -2, 3, -3]


def _directions(degree: int) -> List[CRat]:
    out = [CRat.of(Fraction(t)) for t in _BASE_DIRECTIONS]
    out += [CRat(1, 1), CRat(1, -1), CRat(2, 1), CRat(-1, 1), CRat(2, -1),
            CRat(1, 2), CRat(-2, 1), CRat(3, 1), CRat(-1, -2), CRat(3, -2)]
    extra = max(0, degree + 2 - len(out))
    out += [CRat.of(Fraction(4 + k)) for k in range(extra)]
    return out


@dataclass
class NormalRow:
    j: int
    ks: Tuple[int, ...]          # (k_{j2}, ..., k_{jj})
    coeff: Fraction              # A_j
    realized: bool

    @property
    def monomial_alpha(self) -> Tuple[int, ...]:
        return self.ks

    def to_json(self) -> dict:
        return {"j": self.j, "k": list(self.ks), "A": rat_str(self.coeff),
                "realized": self.realized}


@dataclass
class NormalForm:
    n: int
    mu_initial: Weight
    mu_final: Weight
    rows: List[NormalRow]
    transform: CoordChange
    transformed: Poly            # full transformed defining function
    model: Poly                  # weight-1 tangential part after transform
    residual: Poly               # model minus the realized balanced rows
    lowered: bool = False
    descent: List[str] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)

    @property
    def K(self) -> List[List[int]]:
        return [list(row.ks) for row in self.rows if row.realized]

    @property
    def A(self) -> List[Fraction]:
        return [row.coeff for row in self.rows if row.realized]

    def to_json(self) -> dict:
        return {
            "mu_initial": self.mu_initial.to_json(),
            "mu_final": self.mu_final.to_json(),
            "lowered": self.lowered,
            "descent": self.descent,
            "rows": [r.to_json() for r in self.rows],
            "residual": self.residual.to_json_dict(),
            "model": self.model.to_json_dict(),
            "transform": self.transform.to_json_dict(),
            "warnings": self.warnings,
        }


def _block_end(mu: Sequence[Fraction], m: int) -> int:
    """Largest s with mu_m = ... = mu_s (1-based slots)."""
    s = m
    while s + 1 <= len(mu) and mu[s] == mu[m - 1]:
        s += 1
    return s


def _bal_monomial_alpha(n: int, ks: Sequence[int]) -> Tuple[int, ...]:
    alpha = [0] * n
    for offset, k in enumerate(ks):
        alpha[1 + offset] = k
    return tuple(alpha)


def _direction_change(n: int, block: Sequence[int], d: Sequence[CRat],
                      mu: Sequence[Fraction]) -> CoordChange:
    """Invertible linear change inside an equal-weight block sending the new
    z_{block[0]} direction to d: old z_j = d_j * new z_lead (+ new z_j off the
    pivot), expressed as substitution targets (old in terms of new)."""
    lead = block[0]
    pivot = next(i for i, c in enumerate(d) if not c.is_zero())
    maps = [Poly.variable(n, j) for j in range(1, n + 1)]
    for i, j in enumerate(block):
        f = Poly.variable(n, lead) * d[i]
        if i != pivot:
            f = f + Poly.variable(n, j)
        maps[j - 1] = f
    return CoordChange(n, maps, mu)


def step_first(p: Poly, mu: Weight, assert_psc: bool = False
               ) -> Tuple[CoordChange, Poly, int, Fraction, List[str]]:
    """First extraction step on the leading equal-weight block.

    Returns (change, p2, k22, C20, warnings); p2 is the one-variable
    restriction of the changed polynomial.  Raises _Degenerate when the block
    restriction vanishes identically (weight-lowering path)."""
    entries = mu.entries
    n = p.n
    s = _block_end(entries, 2)
    block = list(range(2, s + 1))
    p_block = p.restrict_support(block)
    if p_block.is_zero():
        raise _Degenerate(2, p)
    change, p2 = _restrict_to_direction(p, p_block, block, entries, var=2)
    warnings: List[str] = []
    deg = p2.total_degree()
    expected = 1 / entries[1]
    if Fraction(deg) != expected:
        raise PolyError(f"restriction degree {deg} != 1/mu_2 = {expected}; "
                        "input is not weight-1 homogeneous")
    if deg % 2 != 0:
        raise _Contradiction(
            f"one-variable restriction has odd degree {deg}; a nonzero "
            "plurisubharmonic restriction must have even degree")
    k22 = deg // 2
    alpha = _bal_monomial_alpha(n, (k22,))
    c20 = p2.coeff(alpha, alpha)
    if not c20.is_real():
        raise PolyError("balanced coefficient not real")
    if c20.re <= 0:
        raise _Contradiction(
            f"balanced coefficient C_20 = {c20} of the restriction is not "
            "positive")
    bound = Fraction(k22) * c20.re
    for (a, b), c in p2.terms.items():
        if a == alpha and b == alpha:
            continue
        if c.abs2() >= bound * bound:
            msg = (f"coefficient bound |C| < k22*C20 violated at {(a, b)}")
            if assert_psc:
                raise _Contradiction(msg)
            warnings.append(msg)
    return change, p2, k22, c20.re, warnings


def _restrict_to_direction(p: Poly, p_block: Poly, block: List[int],
                           entries: Sequence[Fraction], var: int
                           ) -> Tuple[CoordChange, Poly]:
    """Find a block direction in which the restriction to z_var survives and
    return (change, one-variable restriction of the changed p)."""
    n = p.n
    direct = p_block.restrict_support([var])
    if not direct.is_zero():
        ident = CoordChange.identity(n, entries)
        return ident, direct
    deg = p_block.total_degree()
    for t in _directions(deg):
        d = [CRat(1)] + [CRat(1) * t ** (i) for i in range(1, len(block))]
        maps = [Poly.variable(n, j) for j in range(1, n + 1)]
        for i, j in enumerate(block):
            maps[j - 1] = Poly.variable(n, var) * d[i] + (
                Poly.variable(n, j) if j != var else Poly.zero(n))
        probe = p_block.substitute_maps(maps).restrict_support([var])
        if not probe.is_zero():
            change = _direction_change(n, block, d, entries)
            restricted = change.apply(p).restrict_support([var])
            return change, restricted
    raise PolyError("no nonvanishing direction found inside the block; "
                    "the restriction should be reachable")


def step_inductive(q: Poly, mu: Weight, m: int, assert_psc: bool = False
                   ) -> Tuple[CoordChange, Poly, Tuple[int, ...], Fraction, List[str]]:
    """Extraction step for slot m >= 3.

    q is the remainder after the previous steps.  Returns (change, p_m, row,
    C, warnings) with row = (k_{m2}, ..., k_{mm}).  Raises _Degenerate when
    the block restriction adds nothing beyond the earlier variables."""
    entries = mu.entries
    n = q.n
    s = _block_end(entries, m)
    block = list(range(m, s + 1))
    sub = q.restrict_support(list(range(2, s + 1)))
    if sub.is_zero() or all(
            all(a[j - 1] + b[j - 1] == 0 for j in block) for (a, b) in sub.terms):
        raise _Degenerate(m, q)
    change, q_changed = _block_direction(q, sub, block, entries, m)
    scoped = q_changed.restrict_support(list(range(2, m + 1)))
    dm = scoped.degree_in(m)
    if dm <= 0:
        raise _Degenerate(m, q)
    warnings: List[str] = []
    pm = scoped.top_degree_part(m)
    row, coeff, row_warn = _extract_row(pm, m, assert_psc)
    warnings.extend(row_warn)
    return change, pm, row, coeff, warnings


def _block_direction(q: Poly, sub: Poly, block: List[int],
                     entries: Sequence[Fraction], m: int
                     ) -> Tuple[CoordChange, Poly]:
    """Linear change within the block making the z_m direction active in the
    restriction q(z_2..z_m, 0)."""
    n = q.n
    probe = sub.restrict_support(list(range(2, m + 1)))
    if not probe.is_zero() and probe.degree_in(m) > 0:
        return CoordChange.identity(n, entries), q
    deg = sub.total_degree()
    for t in _directions(deg):
        d = [CRat(1)] + [CRat(1) * t ** i for i in range(1, len(block))]
        maps = [Poly.variable(n, j) for j in range(1, n + 1)]
        for i, j in enumerate(block):
            maps[j - 1] = Poly.variable(n, m) * d[i] + (
                Poly.variable(n, j) if j != m else Poly.zero(n))
        trial = sub.substitute_maps(maps).restrict_support(list(range(2, m + 1)))
        if not trial.is_zero() and trial.degree_in(m) > 0:
            change = _direction_change(n, block, d, entries)
            return change, change.apply(q)
    raise PolyError("no nonvanishing block direction found")


def _extract_row(pm: Poly, m: int, assert_psc: bool
                 ) -> Tuple[Tuple[int, ...], Fraction, List[str]]:
    """Filter p_m down to its revlex-maximal balanced monomial by the
    top-degree / balanced-part chain, validating evenness and positivity."""
    warnings: List[str] = []
    dm = pm.degree_in(m)
    if dm % 2 != 0:
        raise _Contradiction(
            f"top degree {dm} in (z_{m}, zbar_{m}) is odd")
    ks = {m: dm // 2}
    i = m - 1
    current = Poly(pm.n, {k: c for k, c in pm.terms.items()
                          if k[0][m - 1] == k[1][m - 1] == dm // 2})
    if current.is_zero():
        raise _Contradiction(
            f"no balanced part in the top (z_{m}, zbar_{m}) block")
    for l in range(m - 1, 1, -1):
        dl = current.degree_in(l)
        if dl <= 0:
            ks[l] = 0
            continue
        current = current.top_degree_part(l)
        if dl % 2 != 0:
            raise _Contradiction(
                f"top degree {dl} in (z_{l}, zbar_{l}) is odd during row "
                "extraction")
        bal = Poly(current.n, {k: c for k, c in current.terms.items()
                               if k[0][l - 1] == k[1][l - 1] == dl // 2})
        if bal.is_zero():
            raise _Contradiction(
                f"no balanced component in the top (z_{l}, zbar_{l}) part")
        ks[l] = dl // 2
        current = bal
    if len(current.terms) != 1:
        raise PolyError("row extraction did not reduce to a single monomial")
    ((alpha, beta), c), = current.terms.items()
    if alpha != beta:
        raise PolyError("row extraction produced a non-balanced monomial")
    if not c.is_real() or c.re <= 0:
        raise _Contradiction(
            f"extracted balanced coefficient {c} is not positive")
    row = tuple(ks.get(l, 0) for l in range(2, m + 1))
    return row, c.re, warnings


def normalize(r: Poly, mu: Weight, assert_psc: bool = False,
              max_descents: int = 64) -> NormalForm:
    """Full pipeline: harmonic elimination, truncation to the weight-1 model,
    then the extraction steps with lexicographic weight descent on
    degeneracy."""
    require_real(r, "defining function")
    n = r.n
    if n < 2:
        raise PolyError("normalization needs dimension >= 2")
    if mu.n != n:
        raise PolyError("weight length != dimension")
    _require_model_head(r)
    r_work, _h = eliminate_harmonic(r)
    if r_work.min_weight(mu.entries) is not None and \
            r_work.min_weight(mu.entries) < 1:
        raise PolyError("input has terms of weight below 1; not O_mu(1)")
    harmonic_maps = [Poly.variable(n, j) for j in range(1, n + 1)]
    if not _h.is_zero():
        harmonic_maps[0] = harmonic_maps[0] + _h
    mu_init = mu
    descent: List[str] = []
    warnings: List[str] = []
    for _ in range(max_descents):
        trace = _shift_change(n, harmonic_maps, mu) if not _h.is_zero() \
            else CoordChange.identity(n, mu.entries)
        graded = r_work.grade(mu.entries)
        model = Poly.zero(n)
        tail = Poly.zero(n)
        for w, part in graded.items():
            if w == 1:
                model = model + part
            elif w > 1:
                tail = tail + part
            else:
                raise PolyError(f"weight {w} < 1 term after harmonic elimination")
        p = _strip_z1(model)
        rows: List[NormalRow] = []
        try:
            change, p2, k22, c20, warn = step_first(p, mu, assert_psc)
            warnings.extend(warn)
            p = change.apply(p)
            tail = change.apply(tail)
            trace = trace.compose(change)
            rows.append(NormalRow(2, (k22,), c20, True))
            q = p - p2
            for m in range(3, n + 1):
                change, pm, row, coeff, warn = step_inductive(
                    q, mu, m, assert_psc)
                warnings.extend(warn)
                p = change.apply(p)
                q = change.apply(q)
                tail = change.apply(tail)
                trace = trace.compose(change)
                rows.append(NormalRow(m, row, coeff, True))
                q = q - pm
        except _Degenerate as deg:
            # Candidates come from the whole working polynomial: under a
            # lowered weight, former o_mu(1) terms may join the model.
            lowered = lower_weight_at(mu, deg.slot, r_work)
            if lowered is None:
                if not deg.remaining.is_zero():
                    warnings.append(
                        f"slot {deg.slot}: restriction vanishes and no lower "
                        "supporting weight exists; remaining rows unrealized")
                for mm in range(deg.slot, n + 1):
                    rows.append(NormalRow(mm, (0,) * (mm - 1), Fraction(0), False))
                return _finish(r, n, mu_init, mu, rows, trace, p, tail,
                               descent, warnings)
            descent.append(f"slot {deg.slot}: {mu} -> {lowered}")
            mu = lowered
            continue
        except _Contradiction as con:
            if assert_psc:
                raise PseudoconvexityError(con.detail) from None
            warnings.append(f"pseudoconvexity side condition failed: "
                            f"{con.detail}; remaining rows unrealized")
            start = rows[-1].j + 1 if rows else 2
            for mm in range(start, n + 1):
                rows.append(NormalRow(mm, (0,) * (mm - 1), Fraction(0), False))
            return _finish(r, n, mu_init, mu, rows, trace, p, tail,
                           descent, warnings)
        return _finish(r, n, mu_init, mu, rows, trace, p, tail,
                       descent, warnings)
    raise PolyError("weight descent did not terminate within the cap")


def _shift_change(n: int, maps, mu: Weight) -> CoordChange:
    """Harmonic-absorption shift; graded when the absorbed terms keep weight
    >= 1 under mu, otherwise recorded as an ungraded preliminary change."""
    try:
        return CoordChange(n, maps, mu.entries)
    except PolyError:
        return CoordChange(n, maps, mu.entries, graded=False)


def _strip_z1(model: Poly) -> Poly:
    out = {}
    for (a, b), c in model.terms.items():
        if a[0] == 0 and b[0] == 0:
            out[(a, b)] = c
    return Poly(model.n, out)


def _require_model_head(r: Poly):
    n = r.n
    e1 = tuple(1 if i == 0 else 0 for i in range(n))
    zero = (0,) * n
    c1 = r.terms.get((e1, zero), CZERO)
    if c1 != CRat(-1):
        raise PolyError("model must start with -2 Re z1 "
                        "(coefficient -1 on z1)")
    for (a, b) in r.terms:
        if (a[0] or b[0]) and (a, b) not in ((e1, zero), (zero, e1)):
            raise PolyError("z1 may only appear in the leading -2 Re z1")


def _finish(r: Poly, n: int, mu_init: Weight, mu: Weight,
            rows: List[NormalRow], trace: CoordChange, p: Poly, tail: Poly,
            descent: List[str], warnings: List[str]) -> NormalForm:
    bal = Poly.zero(n)
    for row in rows:
        if row.realized:
            alpha = _bal_monomial_alpha(n, row.ks)
            bal = bal + Poly.monomial(n, alpha, alpha, row.coeff)
    residual = p - bal
    head = Poly.monomial(n, tuple(1 if i == 0 else 0 for i in range(n)),
                         (0,) * n, -1)
    transformed = head + head.conj() + p + tail
    return NormalForm(
        n=n, mu_initial=mu_init, mu_final=mu, rows=rows, transform=trace,
        transformed=transformed, model=p, residual=residual,
        lowered=bool(descent), descent=descent, warnings=warnings)


def verify_normal_form(nf: NormalForm, r: Poly, mu: Weight) -> Tuple[bool, List[str]]:
    """Independent re-check of a normal form against the original input.

    Clauses: (i) every realized balanced monomial appears in the transformed
    model with coefficient A_j; (ii) the weighted homogeneity identities
    sum_l 2 k_{jl} mu_l = 1 hold under the final weight; (iii) the degree of
    the transformed model among terms supported in z_2..z_j is at most
    2 k_{jj} in (z_j, zbar_j); (iv) each row is the revlex-maximal balanced
    monomial supported in z_2..z_j; (v) applying the recorded transform to r
    reproduces the transformed polynomial exactly."""
    violations: List[str] = []
    entries = nf.mu_final.entries
    for row in nf.rows:
        if not row.realized:
            continue
        j = row.j
        alpha = _bal_monomial_alpha(nf.n, row.ks)
        c = nf.model.coeff(alpha, alpha)
        if not (c.is_real() and c.re == row.coeff and row.coeff > 0):
            violations.append(f"row {j}: balanced monomial coefficient "
                              f"{c} != A_j = {row.coeff}")
        total = sum((Fraction(2 * k) * entries[1 + i]
                     for i, k in enumerate(row.ks)), Fraction(0))
        if total != 1:
            violations.append(f"row {j}: weighted homogeneity sum {total} != 1")
        if row.ks[-1] <= 0:
            violations.append(f"row {j}: k_jj must be positive")
        scoped = nf.model.restrict_support(list(range(2, j + 1)))
        if scoped.degree_in(j) > 2 * row.ks[-1]:
            violations.append(
                f"row {j}: degree {scoped.degree_in(j)} in (z_{j}, zbar_{j}) "
                f"exceeds 2 k_jj = {2 * row.ks[-1]}")
        best = revlex_max_balanced(nf.model, range(2, j + 1))
        if best is None or best[0] != alpha:
            violations.append(f"row {j}: not revlex-maximal (expected "
                              f"{best[0] if best else None}, row gives {alpha})")
    reconstructed = nf.transform.apply(r)
    if reconstructed != nf.transformed:
        violations.append("transform applied to the input does not reproduce "
                          "the transformed polynomial")
    return not violations, violations
