"""Complex Hessian machinery and exact positivity certification.

The Levi form of a model -2 Re z1 + p is positive semidefinite iff the
restricted complex Hessian form

    sum_{j,k>=2} p_{z_j zbar_k} a_j abar_k  >=  0   for all z, a,

i.e. iff p is plurisubharmonic.  Deciding this exactly for arbitrary real
polynomials is out of scope; instead psd_verdict produces one of three
answers:

* CertifiedPSD with a machine-checkable certificate.  Tier 1 recognizes
  literal nonnegative combinations of balanced monomials and complete
  squares; tier 2 runs the Cauchy-Schwarz pairing engine: every mixed
  Hermitian pair is absorbed into balanced budget terms along splittings
  gamma' + gamma'' = alpha + beta, the per-term majorant kernels must
  intersect trivially, and the analysis recurses through coordinate
  hyperplanes.  All inequalities are exact rational comparisons (moduli are
  compared through their squares).
* Refuted with an exact rational witness making the Hessian form negative.
* Unknown with the number of samples tried.

verify_psd_certificate replays a certificate from scratch against the
polynomial, re-deriving every inequality with exact arithmetic.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .exact import CRat, CZERO, rat_str
from .poly import Poly, PolyError, require_real, term_sort_key
from .weights import Weight

KIND_CERTIFIED = "CertifiedPSD"
KIND_REFUTED = "Refuted"
KIND_UNKNOWN = "Unknown"

Gamma = Tuple[int, ...]


@dataclass
class PositivityVerdict:
    kind: str
    tier: Optional[int] = None
    certificate: Optional[dict] = None
    witness: Optional[dict] = None
    samples_tried: int = 0

    def to_json(self) -> dict:
        return {"kind": self.kind, "tier": self.tier,
                "certificate": self.certificate, "witness": self.witness,
                "samples_tried": self.samples_tried}


# ----------------------------------------------------------------------
# Hessian
# ----------------------------------------------------------------------


def complex_hessian(p: Poly) -> List[List[Poly]]:
    """Matrix of second Wirtinger derivatives; entry [j-1][k-1] is
    d^2 p / dz_j dzbar_k.  Hermitian as a polynomial matrix when p is real."""
    return [[p.wirtinger(j).wirtinger(k, conjugate=True)
             for k in range(1, p.n + 1)] for j in range(1, p.n + 1)]


def hessian_form_value(hess: Sequence[Sequence[Poly]],
                       z: Sequence[CRat], a: Sequence[CRat]) -> Fraction:
    """Exact value of sum H_jk(z) a_j conj(a_k) over the tangential slots 2..n.

    ``a`` has length n-1 (components for z_2..z_n).  The value of a Hermitian
    form is real; this is asserted."""
    n = len(hess)
    entries = {}
    total = CZERO
    for j in range(2, n + 1):
        for k in range(2, n + 1):
            key = (j, k)
            if key not in entries:
                entries[key] = hess[j - 1][k - 1].evaluate(z)
            total = total + entries[key] * a[j - 2] * a[k - 2].conj()
    if not total.is_real():
        raise PolyError("Hessian form value is not real; input was not real-valued")
    return total.re


# ----------------------------------------------------------------------
# structural helpers
# ----------------------------------------------------------------------


def _check_tangential(p: Poly):
    require_real(p, "Hessian input")
    for (a, b) in p.terms:
        if a[0] or b[0]:
            raise PolyError("polynomial must depend only on z_2..z_n")


def _balanced_budget(p: Poly) -> Tuple[Dict[Gamma, Fraction], Optional[Gamma]]:
    """Balanced coefficients as rationals; returns (budget, offending_gamma)
    where offending is a balanced exponent with negative coefficient."""
    budget: Dict[Gamma, Fraction] = {}
    for (a, b), c in p.terms.items():
        if a == b:
            if c.re < 0:
                return {}, a
            budget[a] = c.re
    return budget, None


def _mixed_pairs(p: Poly) -> List[Tuple[Gamma, Gamma, CRat]]:
    """Canonical representatives (alpha, beta, coeff) of non-balanced
    Hermitian pairs, sorted canonically."""
    out = []
    for (a, b), c in p.terms.items():
        if a == b:
            continue
        if term_sort_key((a, b)) < term_sort_key((b, a)):
            out.append((a, b, c))
    out.sort(key=lambda t: term_sort_key((t[0], t[1])))
    return out


def _coeff_bound(c: CRat) -> Fraction:
    """Exact rational upper bound for |c| (equals |c| for real or imaginary c)."""
    return abs(c.re) + abs(c.im)


def _rank(rows: Sequence[Sequence[int]], cols: Sequence[int]) -> int:
    m = [[Fraction(r[c]) for c in cols] for r in rows]
    rank = 0
    ncols = len(cols)
    row = 0
    for col in range(ncols):
        piv = next((r for r in range(row, len(m)) if m[r][col] != 0), None)
        if piv is None:
            continue
        m[row], m[piv] = m[piv], m[row]
        for r in range(len(m)):
            if r != row and m[r][col] != 0:
                f = m[r][col] / m[row][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[row])]
        row += 1
        rank += 1
        if row == len(m):
            break
    return rank


def _fraction_lattice(den: int) -> List[Fraction]:
    vals = {Fraction(0), Fraction(1)}
    for d in range(2, den + 1):
        for k in range(1, d):
            vals.add(Fraction(k, d))
    return sorted(vals)


# ----------------------------------------------------------------------
# tier 1: diagonal terms and complete squares
# ----------------------------------------------------------------------


def _squares_certificate(p: Poly) -> Optional[dict]:
    budget, bad = _balanced_budget(p)
    if bad is not None:
        return None
    mixed = _mixed_pairs(p)
    if not mixed:
        return {"tier": 1, "kind": "diagonal",
                "balanced": _budget_json(budget)}
    users: Dict[Gamma, int] = {}
    for a, b, _c in mixed:
        if a not in budget or b not in budget:
            return None
        users[a] = users.get(a, 0) + 1
        users[b] = users.get(b, 0) + 1
    blocks = []
    for a, b, c in mixed:
        alloc_a = budget[a] / users[a]
        alloc_b = budget[b] / users[b]
        if c.abs2() > alloc_a * alloc_b:
            return None
        blocks.append({"alpha": list(a), "beta": list(b),
                       "alloc_alpha": rat_str(alloc_a),
                       "alloc_beta": rat_str(alloc_b)})
    return {"tier": 1, "kind": "squares", "balanced": _budget_json(budget),
            "blocks": blocks}


def _budget_json(budget: Dict[Gamma, Fraction]) -> list:
    return [{"gamma": list(g), "coeff": rat_str(v)}
            for g, v in sorted(budget.items())]


# ----------------------------------------------------------------------
# tier 2: Cauchy-Schwarz pairing engine
# ----------------------------------------------------------------------


def _find_splittings(sigma: Gamma, budget: Dict[Gamma, Fraction]
                     ) -> List[Tuple[Gamma, Gamma]]:
    """All unordered pairs (g1 <= g2) of positive-budget balanced exponents
    with g1 + g2 == sigma."""
    pairs = []
    pos = sorted(g for g, v in budget.items() if v > 0)
    for g1 in pos:
        g2 = tuple(s - x for s, x in zip(sigma, g1))
        if any(e < 0 for e in g2):
            continue
        if g2 < g1:
            continue
        if budget.get(g2, Fraction(0)) > 0:
            pairs.append((g1, g2))
    return pairs


def _choose_fractions(mixed_pairs, budget, lattice_den, strict):
    """Assign splitting fractions (default: equal) so that per-slot consumption
    stays below (or at most equal to, when not strict) the budget.

    mixed_pairs: list of (u_bound, [pair...]) in canonical order.  Returns the
    list of fraction lists, or None."""

    def consumption(fracs_all) -> Dict[Gamma, Fraction]:
        cons: Dict[Gamma, Fraction] = {}
        for (u, pairs), fracs in zip(mixed_pairs, fracs_all):
            for (g1, g2), t in zip(pairs, fracs):
                if t == 0:
                    continue
                cons[g1] = cons.get(g1, Fraction(0)) + t * u
                cons[g2] = cons.get(g2, Fraction(0)) + t * u
        return cons

    def feasible(fracs_all) -> bool:
        for g, used in consumption(fracs_all).items():
            if strict and used >= budget[g]:
                return False
            if not strict and used > budget[g]:
                return False
        return True

    equal = [[Fraction(1, len(pairs))] * len(pairs)
             for _u, pairs in mixed_pairs]
    if feasible(equal):
        return equal
    lattice = _fraction_lattice(lattice_den)
    chosen: List[List[Fraction]] = []
    for i, (_u, pairs) in enumerate(mixed_pairs):
        best = None
        for combo in itertools.product(lattice, repeat=len(pairs)):
            if sum(combo) != 1:
                continue
            trial = chosen + [list(combo)] + equal[i + 1:]
            if feasible(trial):
                best = list(combo)
                break
        if best is None:
            return None
        chosen.append(best)
    return chosen if feasible(chosen) else None


def _psh_certificate(p: Poly, lattice_den: int,
                     memo: Dict[frozenset, Optional[dict]],
                     killed: frozenset) -> Optional[dict]:
    if killed in memo:
        return memo[killed]
    memo[killed] = None  # cycle guard; overwritten below
    budget, bad = _balanced_budget(p)
    if bad is not None:
        return None
    mixed = _mixed_pairs(p)
    active = [j for j in p.support_vars() if j >= 2]
    if not mixed:
        cert = {"tier": 2, "kind": "diagonal", "balanced": _budget_json(budget)}
        memo[killed] = cert
        return cert
    for a, b, _c in mixed:
        for i in range(p.n):
            if a[i] + b[i] == 1:
                return None  # linear slot: hyperplane cross-terms survive
    per_mixed = []
    for a, b, c in mixed:
        sigma = tuple(x + y for x, y in zip(a, b))
        pairs = _find_splittings(sigma, budget)
        if not pairs:
            return None
        per_mixed.append((_coeff_bound(c), pairs))
    fractions = _choose_fractions(per_mixed, budget, lattice_den, strict=True)
    if fractions is None:
        return None
    mixed_json = []
    for (a, b, c), (u, pairs), fracs in zip(mixed, per_mixed, fractions):
        rows = []
        systems = []
        for (g1, g2), t in zip(pairs, fracs):
            if t == 0:
                continue
            rows.extend([g1[1:], g2[1:]])
            systems.append([list(g1[1:]), list(g2[1:])])
        # the mixed Hessian content vanishes identically outside the support
        # of alpha + beta, so the kernels must intersect trivially there
        cols = [i - 1 for i in range(1, p.n)
                if a[i] + b[i] > 0]
        if _rank(rows, cols) != len(cols):
            return None  # majorant kernels do not intersect trivially
        mixed_json.append({
            "alpha": list(a), "beta": list(b), "bound": rat_str(u),
            "splittings": [{"fraction": rat_str(t),
                            "gamma1": list(g1), "gamma2": list(g2)}
                           for (g1, g2), t in zip(pairs, fracs) if t != 0],
            "kernel_systems": systems,
        })
    cons: Dict[Gamma, Fraction] = {}
    for (u, pairs), fracs in zip(per_mixed, fractions):
        for (g1, g2), t in zip(pairs, fracs):
            cons[g1] = cons.get(g1, Fraction(0)) + t * u
            cons[g2] = cons.get(g2, Fraction(0)) + t * u
    margin = max((used / budget[g] for g, used in cons.items()),
                 default=Fraction(0))
    hyper = []
    for j in active:
        rest = _kill_var(p, j)
        sub = _psh_certificate(rest, lattice_den, memo,
                               killed | frozenset([j]))
        if sub is None:
            return None
        entry = _diag_entry(p, j)
        entry_cert = _nonneg_certificate(entry, lattice_den)
        if entry_cert is None:
            return None
        hyper.append({"var": j, "restriction": sub, "entry": entry_cert})
    cert = {
        "tier": 2, "kind": "cauchy-schwarz",
        "active": active,
        "balanced": _budget_json(budget),
        "mixed": mixed_json,
        "consumption": [{"gamma": list(g), "used": rat_str(v),
                         "budget": rat_str(budget[g])}
                        for g, v in sorted(cons.items())],
        "margin": rat_str(margin),
        "hyperplanes": hyper,
    }
    memo[killed] = cert
    return cert


def _kill_var(p: Poly, j: int) -> Poly:
    i = j - 1
    return Poly(p.n, {(a, b): c for (a, b), c in p.terms.items()
                      if a[i] == 0 and b[i] == 0})


def _diag_entry(p: Poly, j: int) -> Poly:
    """d^2 p / dz_j dzbar_j restricted to z_j = 0: the terms with
    alpha_j = beta_j = 1, with the z_j factors stripped."""
    i = j - 1
    out = {}
    for (a, b), c in p.terms.items():
        if a[i] == 1 and b[i] == 1:
            na = a[:i] + (0,) + a[i + 1:]
            nb = b[:i] + (0,) + b[i + 1:]
            out[(na, nb)] = c
    return Poly(p.n, out)


def _nonneg_certificate(q: Poly, lattice_den: int) -> Optional[dict]:
    """Pointwise nonnegativity by Cauchy-Schwarz absorption (budget may be
    consumed fully: the bound is an inequality, not a strict domination)."""
    budget, bad = _balanced_budget(q)
    if bad is not None:
        return None
    mixed = _mixed_pairs(q)
    if not mixed:
        return {"kind": "pointwise-diagonal", "balanced": _budget_json(budget)}
    per_mixed = []
    for a, b, c in mixed:
        sigma = tuple(x + y for x, y in zip(a, b))
        pairs = _find_splittings(sigma, budget)
        if not pairs:
            return None
        per_mixed.append((_coeff_bound(c), pairs))
    fractions = _choose_fractions(per_mixed, budget, lattice_den, strict=False)
    if fractions is None:
        return None
    return {
        "kind": "pointwise-nonneg",
        "balanced": _budget_json(budget),
        "mixed": [{"alpha": list(a), "beta": list(b), "bound": rat_str(u),
                   "splittings": [{"fraction": rat_str(t),
                                   "gamma1": list(g1), "gamma2": list(g2)}
                                  for (g1, g2), t in zip(pairs, fracs)
                                  if t != 0]}
                  for (a, b, c), (u, pairs), fracs
                  in zip(mixed, per_mixed, fractions)],
    }


def cauchy_schwarz_pairing(p: Poly, lattice_den: int = 4) -> dict:
    """Cauchy-Schwarz plurisubharmonicity certificate for p(z_2..z_n).

    Returns {"certified": True, "certificate": ...} on success, otherwise
    {"certified": False, "reason": ...}; failure is a value, not an error."""
    _check_tangential(p)
    cert = _psh_certificate(p, lattice_den, {}, frozenset())
    if cert is None:
        return {"certified": False,
                "reason": "no full splitting of the mixed terms against the "
                          "balanced budget with trivially intersecting kernels"}
    return {"certified": True, "certificate": cert}


# ----------------------------------------------------------------------
# certificate replay
# ----------------------------------------------------------------------


def verify_psd_certificate(p: Poly, cert: dict) -> bool:
    """Re-derive every inequality of a stored certificate from p itself."""
    try:
        _check_tangential(p)
        if cert.get("tier") == 1:
            return _replay_tier1(p, cert)
        return _replay_psh(p, cert)
    except (PolyError, KeyError, ZeroDivisionError):
        return False


def _replay_budget(p: Poly, cert: dict) -> Optional[Dict[Gamma, Fraction]]:
    budget, bad = _balanced_budget(p)
    if bad is not None:
        return None
    recorded = {tuple(e["gamma"]): Fraction(e["coeff"])
                for e in cert.get("balanced", [])}
    if recorded != budget:
        return None
    return budget


def _replay_tier1(p: Poly, cert: dict) -> bool:
    budget = _replay_budget(p, cert)
    if budget is None:
        return False
    mixed = _mixed_pairs(p)
    if cert["kind"] == "diagonal":
        return not mixed
    blocks = {(tuple(bl["alpha"]), tuple(bl["beta"])): bl
              for bl in cert["blocks"]}
    if set(blocks) != {(a, b) for a, b, _ in mixed}:
        return False
    alloc_total: Dict[Gamma, Fraction] = {}
    for a, b, c in mixed:
        bl = blocks[(a, b)]
        aa, ab = Fraction(bl["alloc_alpha"]), Fraction(bl["alloc_beta"])
        if aa < 0 or ab < 0 or c.abs2() > aa * ab:
            return False
        alloc_total[a] = alloc_total.get(a, Fraction(0)) + aa
        alloc_total[b] = alloc_total.get(b, Fraction(0)) + ab
    return all(alloc_total[g] <= budget.get(g, Fraction(0))
               for g in alloc_total)


def _replay_absorption(p: Poly, cert: dict, strict: bool
                       ) -> Optional[Dict[Gamma, Fraction]]:
    """Shared replay of the splitting table; returns consumption or None."""
    budget = _replay_budget(p, cert)
    if budget is None:
        return None
    mixed = _mixed_pairs(p)
    recorded = {(tuple(mx["alpha"]), tuple(mx["beta"])): mx
                for mx in cert.get("mixed", [])}
    if set(recorded) != {(a, b) for a, b, _ in mixed}:
        return None
    cons: Dict[Gamma, Fraction] = {}
    for a, b, c in mixed:
        mx = recorded[(a, b)]
        u = _coeff_bound(c)
        sigma = tuple(x + y for x, y in zip(a, b))
        total = Fraction(0)
        for sp in mx["splittings"]:
            t = Fraction(sp["fraction"])
            g1, g2 = tuple(sp["gamma1"]), tuple(sp["gamma2"])
            if t < 0 or tuple(x + y for x, y in zip(g1, g2)) != sigma:
                return None
            if budget.get(g1, Fraction(0)) <= 0 or budget.get(g2, Fraction(0)) <= 0:
                return None
            total += t
            cons[g1] = cons.get(g1, Fraction(0)) + t * u
            cons[g2] = cons.get(g2, Fraction(0)) + t * u
        if total != 1:
            return None
    for g, used in cons.items():
        if strict and used >= budget[g]:
            return None
        if not strict and used > budget[g]:
            return None
    return cons


def _replay_psh(p: Poly, cert: dict) -> bool:
    if cert["kind"].endswith("diagonal"):
        return _replay_budget(p, cert) is not None and not _mixed_pairs(p)
    if cert["kind"] == "pointwise-nonneg":
        return _replay_absorption(p, cert, strict=False) is not None
    if cert["kind"] != "cauchy-schwarz":
        return False
    if _replay_absorption(p, cert, strict=True) is None:
        return False
    active = [j for j in p.support_vars() if j >= 2]
    if cert.get("active") != active:
        return False
    for a, b, _c in _mixed_pairs(p):
        for i in range(p.n):
            if a[i] + b[i] == 1:
                return False
    for mx in cert["mixed"]:
        rows = []
        for sp in mx["splittings"]:
            rows.append(tuple(sp["gamma1"])[1:])
            rows.append(tuple(sp["gamma2"])[1:])
        sigma_alpha = tuple(mx["alpha"])
        sigma_beta = tuple(mx["beta"])
        cols = [i - 1 for i in range(1, p.n)
                if sigma_alpha[i] + sigma_beta[i] > 0]
        if _rank(rows, cols) != len(cols):
            return False
    hyper = {h["var"]: h for h in cert.get("hyperplanes", [])}
    if set(hyper) != set(active):
        return False
    for j in active:
        if not _replay_psh(_kill_var(p, j), hyper[j]["restriction"]):
            return False
        if _replay_absorption(_diag_entry(p, j), hyper[j]["entry"],
                              strict=False) is None:
            return False
    return True


# ----------------------------------------------------------------------
# tier 3: exact sampling refutation
# ----------------------------------------------------------------------


def _structured_points(n: int) -> List[List[CRat]]:
    vals = [CRat(0), CRat(1), CRat(-1), CRat(0, 1)]
    if n - 1 >= 4:
        vals = vals[:3]
    pts = [list(t) for t in itertools.product(vals, repeat=n - 1)]
    return [p for p in pts if any(not c.is_zero() for c in p)]


def _structured_vectors(n: int) -> List[List[CRat]]:
    vals = [CRat(0), CRat(1), CRat(-1), CRat(0, 1), CRat(0, -1)]
    if n - 1 >= 4:
        vals = vals[:4]
    vecs = [list(t) for t in itertools.product(vals, repeat=n - 1)]
    return [v for v in vecs if any(not c.is_zero() for c in v)]


def _random_crat(rng: random.Random) -> CRat:
    return CRat(Fraction(rng.randint(-4, 4), rng.randint(1, 4)),
                Fraction(rng.randint(-4, 4), rng.randint(1, 4)))


def psd_verdict(p: Poly, samples: int = 200, seed: int = 0,
                lattice_den: int = 4) -> PositivityVerdict:
    """Three-tier exact positivity verdict for the Hessian form of p."""
    _check_tangential(p)
    cert = _squares_certificate(p)
    if cert is not None:
        return PositivityVerdict(KIND_CERTIFIED, tier=1, certificate=cert)
    pairing = cauchy_schwarz_pairing(p, lattice_den)
    if pairing["certified"]:
        return PositivityVerdict(KIND_CERTIFIED, tier=2,
                                 certificate=pairing["certificate"])
    hess = complex_hessian(p)
    tried = 0

    def check(z: List[CRat], a: List[CRat]) -> Optional[PositivityVerdict]:
        nonlocal tried
        tried += 1
        full_z = [CRat(0)] + list(z)
        value = hessian_form_value(hess, full_z, a)
        if value < 0:
            witness = {
                "z": [{"re": rat_str(c.re), "im": rat_str(c.im)} for c in full_z],
                "a": [{"re": rat_str(c.re), "im": rat_str(c.im)} for c in a],
                "value": rat_str(value),
            }
            return PositivityVerdict(KIND_REFUTED, witness=witness,
                                     samples_tried=tried)
        return None

    for z in _structured_points(p.n):
        for a in _structured_vectors(p.n):
            hit = check(z, a)
            if hit:
                return hit
    rng = random.Random(seed)
    for _ in range(samples):
        z = [_random_crat(rng) for _ in range(p.n - 1)]
        a = [_random_crat(rng) for _ in range(p.n - 1)]
        if all(c.is_zero() for c in a):
            a[0] = CRat(1)
        hit = check(z, a)
        if hit:
            return hit
    return PositivityVerdict(KIND_UNKNOWN, samples_tried=tried)


def replay_refutation(p: Poly, witness: dict) -> Fraction:
    """Exact Hessian form value at a stored witness (negative iff sound)."""
    z = [CRat(Fraction(c["re"]), Fraction(c["im"])) for c in witness["z"]]
    a = [CRat(Fraction(c["re"]), Fraction(c["im"])) for c in witness["a"]]
    return hessian_form_value(complex_hessian(p), z, a)


# ----------------------------------------------------------------------
# one-variable coefficient bounds
# ----------------------------------------------------------------------


@dataclass
class CoeffBoundReport:
    var: int
    half_degree: int
    C0: Fraction
    bounds: List[Tuple[int, CRat, bool]] = field(default_factory=list)
    nonzero: bool = True

    def all_satisfied(self) -> bool:
        return self.C0 >= 0 and all(ok for _k, _c, ok in self.bounds)

    def c0_positive(self) -> bool:
        return self.C0 > 0

    def to_json(self) -> dict:
        return {"var": self.var, "half_degree": self.half_degree,
                "C0": rat_str(self.C0),
                "bounds": [{"k": k, "re": rat_str(c.re), "im": rat_str(c.im),
                            "satisfied": ok} for k, c, ok in self.bounds],
                "all_satisfied": self.all_satisfied()}


def one_var_coeff_check(P: Poly, assume_nonneg: bool = False) -> CoeffBoundReport:
    """Coefficient bounds for a homogeneous one-variable P = sum C_k z^{m+k} zbar^{m-k}.

    Reports C_0 >= 0 and |C_k| <= C_0 for every k (exactly, via squared
    moduli).  For nonnegative P these must all hold, and C_0 > 0 when P != 0;
    a violated bound therefore certifies that P is not nonnegative."""
    require_real(P, "one-variable polynomial")
    sup = P.support_vars()
    if len(sup) > 1:
        raise PolyError(f"polynomial involves several variables: {sup}")
    if not sup:
        c = P.terms.get(((0,) * P.n, (0,) * P.n), CZERO)
        return CoeffBoundReport(var=0, half_degree=0, C0=c.re,
                                nonzero=not P.is_zero())
    var = sup[0]
    i = var - 1
    degs = {a[i] + b[i] for (a, b) in P.terms}
    if len(degs) != 1:
        raise PolyError("polynomial is not homogeneous")
    deg = degs.pop()
    if deg % 2 != 0:
        raise PolyError(f"odd degree {deg}; the bounds need even degree")
    m = deg // 2
    coeffs: Dict[int, CRat] = {}
    for (a, b), c in P.terms.items():
        coeffs[a[i] - m] = c
    C0 = coeffs.get(0, CZERO).re
    bounds = []
    for k in sorted(coeffs):
        if k <= 0:
            continue
        ck = coeffs[k]
        ok = C0 >= 0 and ck.abs2() <= C0 * C0
        bounds.append((k, ck, ok))
    return CoeffBoundReport(var=var, half_degree=m, C0=C0, bounds=bounds,
                            nonzero=not P.is_zero())


def circle_points(count: int) -> List[CRat]:
    """Rational points on |z| = 1 via the Pythagorean parametrization."""
    pts = [CRat(1), CRat(-1)]
    for t_num in range(1, count):
        t = Fraction(t_num, count)
        d = 1 + t * t
        pts.append(CRat((1 - t * t) / d, 2 * t / d))
        pts.append(CRat((1 - t * t) / d, -2 * t / d))
    return pts


# ----------------------------------------------------------------------
# dominance, Newton splits, truncation
# ----------------------------------------------------------------------


def m_dominant_coefficients(P: Poly, M: Fraction) -> List[Tuple[Gamma, Gamma]]:
    """Exponent pairs whose coefficient is M-dominant: every other coefficient
    C' satisfies |C'| <= M |C| (compared through squared moduli)."""
    M = Fraction(M)
    if M < 0:
        raise PolyError("dominance factor must be nonnegative")
    items = list(P.terms.items())
    out = []
    m2 = M * M
    for key, c in items:
        ca = c.abs2()
        if all(other.abs2() <= m2 * ca for _k, other in items):
            out.append(key)
    return sorted(out, key=term_sort_key)


@dataclass
class SplitPart:
    deg_a: int
    deg_b: int
    part: Poly
    flagged_nonneg: bool


def newton_split_check(P: Poly, partition: Tuple[Sequence[int], Sequence[int]]
                       ) -> List[SplitPart]:
    """Bidegree decomposition of an (asserted nonnegative) homogeneous P over
    a variable bipartition; extremal parts are flagged certified nonnegative
    (scaling x -> t x, y -> y/t and letting t run to 0 or infinity)."""
    group_a, group_b = set(partition[0]), set(partition[1])
    if group_a & group_b:
        raise PolyError("partition groups overlap")
    missing = set(P.support_vars()) - (group_a | group_b)
    if missing:
        raise PolyError(f"partition does not cover variables {sorted(missing)}")
    buckets: Dict[Tuple[int, int], Dict] = {}
    for (a, b), c in P.terms.items():
        da = sum(a[j - 1] + b[j - 1] for j in group_a)
        db = sum(a[j - 1] + b[j - 1] for j in group_b)
        buckets.setdefault((da, db), {})[(a, b)] = c
    if not buckets:
        return []
    max_a = max(d for d, _ in buckets)
    max_b = max(d for _, d in buckets)
    return [SplitPart(da, db, Poly(P.n, terms),
                      flagged_nonneg=(da == max_a or db == max_b))
            for (da, db), terms in sorted(buckets.items())]


def model_truncate(r: Poly, mu: Weight) -> Poly:
    """Weight-1 part of a model r = -2 Re z1 + O_mu(1); pseudoconvexity of r
    passes to the truncation by weighted dilation."""
    require_real(r, "model")
    parts = r.grade(mu.entries)
    for w in parts:
        if w < 1:
            raise PolyError(f"model contains terms of weight {w} < 1")
    return parts.get(Fraction(1), Poly.zero(r.n))
