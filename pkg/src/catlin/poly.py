"""Sparse exact polynomials in z_1..z_n and their conjugates.

A polynomial is a finite map from exponent pairs (alpha, beta) to Gaussian
rational coefficients, representing  sum C_{ab} z^alpha zbar^beta.  Real-valued
polynomials carry a Hermitian-symmetric coefficient table,
C_{ba} = conj(C_{ab}); intermediate results (Wirtinger derivatives, component
maps of coordinate changes) may be non-real, so the class itself does not
force the symmetry.  Use :func:`require_real` at public boundaries.

Conventions used throughout the package:

* variables are 1-based in every public signature (z1 is the "normal"
  direction of a model hypersurface); exponent tuples are 0-based internally;
* a pair (alpha, beta) is *balanced* when alpha == beta and *pure*
  (harmonic) when alpha == 0 or beta == 0;
* the canonical term order is graded, then lexicographic on the concatenated
  (alpha, beta); all iteration and serialization follow it;
* the zero polynomial has an empty term map; the dimension is carried
  separately.

All values are immutable after construction and all operations are pure, so
they may be shared freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Iterator, Mapping, Optional, Sequence, Tuple

from .exact import CRat, CZERO, Rat, rat_from_str, rat_str

Exponents = Tuple[int, ...]
TermKey = Tuple[Exponents, Exponents]


class PolyError(ValueError):
    """Invalid polynomial construction or operation."""


class NonRealError(PolyError):
    """A polynomial required to be real-valued is not Hermitian-symmetric."""


class DimensionMismatch(PolyError):
    """Operands live in different ambient dimensions."""


def term_sort_key(key: TermKey) -> tuple:
    alpha, beta = key
    return (sum(alpha) + sum(beta), alpha + beta)


@dataclass(frozen=True, eq=True)
class Poly:
    """Sparse polynomial in (z, zbar) with exact complex-rational coefficients."""

    n: int
    terms: Dict[TermKey, CRat]

    def __post_init__(self):
        if self.n < 1:
            raise PolyError("dimension must be >= 1")
        clean = {}
        for (alpha, beta), c in self.terms.items():
            if len(alpha) != self.n or len(beta) != self.n:
                raise DimensionMismatch(
                    f"exponent length != n={self.n}: {(alpha, beta)}")
            if any(e < 0 for e in alpha + beta):
                raise PolyError(f"negative exponent in {(alpha, beta)}")
            c = CRat.of(c)
            if not c.is_zero():
                clean[(tuple(alpha), tuple(beta))] = c
        object.__setattr__(self, "terms", clean)

    # ------------------------------------------------------------------
    # constructors
    # ------------------------------------------------------------------

    @staticmethod
    def zero(n: int) -> "Poly":
        return Poly(n, {})

    @staticmethod
    def const(n: int, c: "CRat | Rat") -> "Poly":
        z = (0,) * n
        return Poly(n, {(z, z): CRat.of(c)})

    @staticmethod
    def variable(n: int, j: int) -> "Poly":
        """The monomial z_j (1-based)."""
        _check_var(n, j)
        alpha = tuple(1 if i == j - 1 else 0 for i in range(n))
        return Poly(n, {(alpha, (0,) * n): CRat(1)})

    @staticmethod
    def conj_variable(n: int, j: int) -> "Poly":
        """The monomial zbar_j (1-based)."""
        _check_var(n, j)
        beta = tuple(1 if i == j - 1 else 0 for i in range(n))
        return Poly(n, {((0,) * n, beta): CRat(1)})

    @staticmethod
    def monomial(n: int, alpha: Sequence[int], beta: Sequence[int],
                 c: "CRat | Rat" = 1) -> "Poly":
        return Poly(n, {(tuple(alpha), tuple(beta)): CRat.of(c)})

    @staticmethod
    def modulus_power(n: int, alpha: Sequence[int], c: "CRat | Rat" = 1) -> "Poly":
        """The balanced monomial c * |z^alpha|^2 = c * z^alpha zbar^alpha."""
        a = tuple(alpha)
        return Poly(n, {(a, a): CRat.of(c)})

    # ------------------------------------------------------------------
    # ring operations
    # ------------------------------------------------------------------

    def _check_same(self, other: "Poly"):
        if self.n != other.n:
            raise DimensionMismatch(f"n={self.n} vs n={other.n}")

    def __add__(self, other: "Poly") -> "Poly":
        self._check_same(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, CZERO) + c
        return Poly(self.n, out)

    def __sub__(self, other: "Poly") -> "Poly":
        self._check_same(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, CZERO) - c
        return Poly(self.n, out)

    def __neg__(self) -> "Poly":
        return Poly(self.n, {k: -c for k, c in self.terms.items()})

    def __mul__(self, other) -> "Poly":
        if isinstance(other, Poly):
            self._check_same(other)
            out: Dict[TermKey, CRat] = {}
            for (a1, b1), c1 in self.terms.items():
                for (a2, b2), c2 in other.terms.items():
                    k = (tuple(x + y for x, y in zip(a1, a2)),
                         tuple(x + y for x, y in zip(b1, b2)))
                    prod = c1 * c2
                    out[k] = out.get(k, CZERO) + prod
            return Poly(self.n, out)
        c = CRat.of(other)
        return Poly(self.n, {k: v * c for k, v in self.terms.items()})

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "Poly":
        if not isinstance(e, int) or e < 0:
            raise PolyError("exponent must be a nonnegative integer")
        result = Poly.const(self.n, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base if e > 1 else base
            e >>= 1
        return result

    def conj(self) -> "Poly":
        return Poly(self.n, {(b, a): c.conj() for (a, b), c in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def coeff(self, alpha: Sequence[int], beta: Sequence[int]) -> CRat:
        return self.terms.get((tuple(alpha), tuple(beta)), CZERO)

    def iter_terms(self) -> Iterator[Tuple[Exponents, Exponents, CRat]]:
        """Terms in the canonical (graded, then lex) order."""
        for key in sorted(self.terms, key=term_sort_key):
            yield key[0], key[1], self.terms[key]

    # ------------------------------------------------------------------
    # realness / structure queries
    # ------------------------------------------------------------------

    def is_real(self) -> bool:
        """True iff the coefficient table is Hermitian-symmetric."""
        for (a, b), c in self.terms.items():
            if self.terms.get((b, a), CZERO) != c.conj():
                return False
        return True

    def balanced_part(self) -> "Poly":
        return Poly(self.n, {k: c for k, c in self.terms.items() if k[0] == k[1]})

    def pure_part(self) -> "Poly":
        """Terms z^alpha or zbar^beta (harmonic monomials), constants included."""
        zero = (0,) * self.n
        return Poly(self.n, {k: c for k, c in self.terms.items()
                             if k[0] == zero or k[1] == zero})

    def holomorphic_part(self) -> "Poly":
        zero = (0,) * self.n
        return Poly(self.n, {k: c for k, c in self.terms.items()
                             if k[1] == zero and k[0] != zero})

    def antiholomorphic_part(self) -> "Poly":
        zero = (0,) * self.n
        return Poly(self.n, {k: c for k, c in self.terms.items()
                             if k[0] == zero and k[1] != zero})

    def is_holomorphic(self) -> bool:
        zero = (0,) * self.n
        return all(k[1] == zero for k in self.terms)

    def support_vars(self) -> Tuple[int, ...]:
        """1-based indices of variables actually appearing."""
        seen = set()
        for (a, b) in self.terms:
            for i in range(self.n):
                if a[i] or b[i]:
                    seen.add(i + 1)
        return tuple(sorted(seen))

    def degree_in(self, j: int) -> int:
        """Total degree in (z_j, zbar_j); -1 for the zero polynomial."""
        _check_var(self.n, j)
        if not self.terms:
            return -1
        return max(a[j - 1] + b[j - 1] for (a, b) in self.terms)

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(a) + sum(b) for (a, b) in self.terms)

    def restrict_support(self, keep: Iterable[int]) -> "Poly":
        """Terms supported on the 1-based variable set ``keep`` (others set to 0)."""
        ks = {j - 1 for j in keep}
        out = {}
        for (a, b), c in self.terms.items():
            if all((a[i] == 0 and b[i] == 0) or i in ks for i in range(self.n)):
                out[(a, b)] = c
        return Poly(self.n, out)

    def top_degree_part(self, j: int) -> "Poly":
        """Terms of maximal total degree in (z_j, zbar_j)."""
        d = self.degree_in(j)
        return Poly(self.n, {k: c for k, c in self.terms.items()
                             if k[0][j - 1] + k[1][j - 1] == d})

    # ------------------------------------------------------------------
    # weights and grading
    # ------------------------------------------------------------------

    def grade(self, mu: Sequence[Fraction]) -> Dict[Fraction, "Poly"]:
        """Partition of terms by exact weighted order; the parts sum back to self."""
        buckets: Dict[Fraction, Dict[TermKey, CRat]] = {}
        for (a, b), c in self.terms.items():
            w = weighted_order((a, b), mu)
            buckets.setdefault(w, {})[(a, b)] = c
        return {w: Poly(self.n, t) for w, t in sorted(buckets.items())}

    def weight_part(self, mu: Sequence[Fraction], w: Fraction) -> "Poly":
        w = Fraction(w)
        return Poly(self.n, {k: c for k, c in self.terms.items()
                             if weighted_order(k, mu) == w})

    def min_weight(self, mu: Sequence[Fraction]) -> Optional[Fraction]:
        if not self.terms:
            return None
        return min(weighted_order(k, mu) for k in self.terms)

    # ------------------------------------------------------------------
    # calculus
    # ------------------------------------------------------------------

    def wirtinger(self, j: int, conjugate: bool = False) -> "Poly":
        """Formal partial derivative in z_j, or zbar_j when ``conjugate``."""
        _check_var(self.n, j)
        i = j - 1
        out: Dict[TermKey, CRat] = {}
        for (a, b), c in self.terms.items():
            e = b[i] if conjugate else a[i]
            if e == 0:
                continue
            if conjugate:
                nb = b[:i] + (e - 1,) + b[i + 1:]
                k = (a, nb)
            else:
                na = a[:i] + (e - 1,) + a[i + 1:]
                k = (na, b)
            out[k] = out.get(k, CZERO) + c * e
        return Poly(self.n, out)

    def deriv_multi(self, alpha: Sequence[int], beta: Sequence[int]) -> "Poly":
        """Iterated raw derivative D^alpha Dbar^beta (no factorial normalization)."""
        p = self
        for j, e in enumerate(alpha, start=1):
            for _ in range(e):
                p = p.wirtinger(j)
        for j, e in enumerate(beta, start=1):
            for _ in range(e):
                p = p.wirtinger(j, conjugate=True)
        return p

    # ------------------------------------------------------------------
    # substitution and evaluation
    # ------------------------------------------------------------------

    def substitute_maps(self, maps: Sequence["Poly"]) -> "Poly":
        """Exact expansion of self under z_j -> maps[j-1], zbar_j -> conj(maps[j-1]).

        Every map must be holomorphic (no zbar content).
        """
        if len(maps) != self.n:
            raise DimensionMismatch("need one component map per variable")
        m = maps[0].n
        for f in maps:
            if f.n != m:
                raise DimensionMismatch("component maps disagree on dimension")
            if not f.is_holomorphic():
                raise PolyError("component maps must be holomorphic")
        hol_pows: Dict[Tuple[int, int], Poly] = {}
        anti_pows: Dict[Tuple[int, int], Poly] = {}

        def hp(i: int, e: int) -> Poly:
            key = (i, e)
            if key not in hol_pows:
                hol_pows[key] = maps[i] ** e
            return hol_pows[key]

        def ap(i: int, e: int) -> Poly:
            key = (i, e)
            if key not in anti_pows:
                anti_pows[key] = maps[i].conj() ** e
            return anti_pows[key]

        total = Poly.zero(m)
        for (a, b), c in self.terms.items():
            piece = Poly.const(m, c)
            for i in range(self.n):
                if a[i]:
                    piece = piece * hp(i, a[i])
                if b[i]:
                    piece = piece * ap(i, b[i])
            total = total + piece
        return total

    def evaluate(self, point: Sequence["CRat | Rat"]) -> CRat:
        """Exact value at a point (zbar slots use the conjugate coordinates)."""
        if len(point) != self.n:
            raise DimensionMismatch("point length != n")
        zs = [CRat.of(c) for c in point]
        zbars = [c.conj() for c in zs]
        total = CZERO
        for (a, b), c in self.terms.items():
            v = c
            for i in range(self.n):
                for _ in range(a[i]):
                    v = v * zs[i]
                for _ in range(b[i]):
                    v = v * zbars[i]
            total = total + v
        return total

    # ------------------------------------------------------------------
    # serialization and display
    # ------------------------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "terms": [
                {"alpha": list(a), "beta": list(b),
                 "re": rat_str(c.re), "im": rat_str(c.im)}
                for a, b, c in self.iter_terms()
            ],
        }

    @staticmethod
    def from_json_dict(d: dict) -> "Poly":
        n = int(d["n"])
        terms: Dict[TermKey, CRat] = {}
        for t in d["terms"]:
            key = (tuple(int(x) for x in t["alpha"]),
                   tuple(int(x) for x in t["beta"]))
            c = CRat(rat_from_str(t["re"]), rat_from_str(t["im"]))
            if key in terms:
                raise PolyError(f"duplicate term {key} in JSON polynomial")
            terms[key] = c
        return Poly(n, terms)

    def __str__(self) -> str:
        return format_poly(self)


def _check_var(n: int, j: int):
    if not 1 <= j <= n:
        raise DimensionMismatch(f"variable index {j} out of range 1..{n}")


def require_real(p: Poly, what: str = "polynomial") -> Poly:
    if not p.is_real():
        bad = [k for k, c in p.terms.items()
               if p.terms.get((k[1], k[0]), CZERO) != c.conj()]
        raise NonRealError(
            f"{what} is not real-valued; offending exponent pairs: {bad[:3]}")
    return p


def weighted_order(pair: TermKey, mu: Sequence[Fraction]) -> Fraction:
    """(alpha + beta | mu), an exact rational."""
    alpha, beta = pair
    if len(alpha) != len(mu):
        raise DimensionMismatch("weight length != exponent length")
    total = Fraction(0)
    for a, b, m in zip(alpha, beta, mu):
        e = a + b
        if e:
            total += e * Fraction(m)
    return total


def eliminate_harmonic(r: Poly) -> Tuple[Poly, Poly]:
    """Absorb pure (harmonic) monomials of f into z_1 for r = c*Re(z1) + f.

    Returns (r', h) with r' = r after the substitution z1 -> z1 + h.  h is the
    holomorphic pure part of f rescaled by the z1 coefficient; r' contains no
    pure monomial.  The z1 slot must appear exactly linearly with a real
    coefficient (any nonzero real multiple of Re z1 is accepted).
    """
    require_real(r, "defining function")
    n = r.n
    e1 = tuple(1 if i == 0 else 0 for i in range(n))
    zero = (0,) * n
    c1 = r.terms.get((e1, zero), CZERO)
    if c1.is_zero() or not c1.is_real():
        raise PolyError("expected a nonzero real multiple of Re z1")
    f_terms = {}
    for (a, b), c in r.terms.items():
        if a[0] or b[0]:
            if (a, b) not in ((e1, zero), (zero, e1)):
                raise PolyError("z1 appears nonlinearly or inside f")
            continue
        f_terms[(a, b)] = c
    f = Poly(n, f_terms)
    # Shifting z1 by holomorphic h adds c1*h + conj(c1*h) to r (c1 real), so
    # h = -P/c1 cancels the pure pair P + conj(P); a real constant c0 appears
    # once in the table and needs half that shift.
    pure_holo = f.holomorphic_part()
    c0 = f.terms.get((zero, zero), CZERO)
    if pure_holo.is_zero() and c0.is_zero():
        return r, Poly.zero(n)
    h = (pure_holo + Poly.const(n, c0 * Fraction(1, 2))) * (CRat(-1) / c1)
    maps = [Poly.variable(n, j) for j in range(1, n + 1)]
    maps[0] = maps[0] + h
    r_prime = r.substitute_maps(maps)
    return require_real(r_prime, "harmonic-eliminated polynomial"), h


def leading_model(p: Poly, mu: Sequence[Fraction]) -> Poly:
    """Weight-1 part of p: the polynomial model of a graded defining function."""
    return p.weight_part(mu, Fraction(1))


def tail(p: Poly, mu: Sequence[Fraction]) -> Poly:
    """Strictly-above-weight-1 part of p (the graded remainder)."""
    out = {k: c for k, c in p.terms.items() if weighted_order(k, mu) > 1}
    return Poly(p.n, out)


def revlex_max_balanced(p: Poly, active: Iterable[int]) -> Optional[TermKey]:
    """Revlex-maximal balanced monomial of p supported on ``active`` variables.

    Multidegree sequences over the active variables are compared starting
    from the last variable.  Returns the (alpha, beta) key or None.
    """
    act = sorted(set(active))
    best_key = None
    best_rank = None
    for (a, b), _ in p.terms.items():
        if a != b:
            continue
        if any((a[i] or b[i]) and (i + 1) not in act for i in range(p.n)):
            continue
        rank = tuple(2 * a[j - 1] for j in reversed(act))
        if best_rank is None or rank > best_rank:
            best_rank = rank
            best_key = (a, b)
    return best_key


# ----------------------------------------------------------------------
# coordinate changes
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class CoordChange:
    """Weighted-homogeneous polynomial holomorphic coordinate change.

    ``maps[j-1]`` expresses the substitution target of z_j: applying the
    change to p yields p with z_j replaced by maps[j-1] (and zbar_j by its
    conjugate).  Validity: each map is holomorphic with no constant term,
    every monomial of maps[j-1] has mu-weight >= mu_j, and the linear part on
    each equal-weight block of variables is an invertible matrix.

    A change constructed with ``graded=False`` skips the weight clauses and
    instead requires the full linear part to be invertible; this is reserved
    for absorbing pure (harmonic) terms into z_1, which is a preliminary step
    outside the weighted grading.
    """

    n: int
    maps: Tuple[Poly, ...]
    mu: Tuple[Fraction, ...]
    graded: bool

    def __init__(self, n: int, maps: Sequence[Poly], mu: Sequence[Fraction],
                 graded: bool = True):
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "maps", tuple(maps))
        object.__setattr__(self, "mu", tuple(Fraction(m) for m in mu))
        object.__setattr__(self, "graded", bool(graded))
        self._validate()

    def _validate(self):
        if len(self.maps) != self.n or len(self.mu) != self.n:
            raise DimensionMismatch("need one map and one weight per variable")
        zero = (0,) * self.n
        for j, f in enumerate(self.maps, start=1):
            if f.n != self.n:
                raise DimensionMismatch("component map dimension mismatch")
            if not f.is_holomorphic():
                raise PolyError(f"component map {j} is not holomorphic")
            if not f.terms.get((zero, zero), CZERO).is_zero():
                raise PolyError(f"component map {j} does not fix the origin")
            if not self.graded:
                continue
            wj = self.mu[j - 1]
            for (a, b) in f.terms:
                if weighted_order((a, b), self.mu) < wj:
                    raise PolyError(
                        f"component map {j} has a monomial of weight below {wj}")
        if self.graded:
            for block in _weight_blocks(self.mu):
                m = [[self.maps[j - 1].coeff(_unit(self.n, i), zero)
                      for j in block] for i in block]
                if not _invertible(m):
                    raise PolyError(
                        f"linear part on equal-weight block {block} is singular")
        else:
            full = [[self.maps[j - 1].coeff(_unit(self.n, i), zero)
                     for j in range(1, self.n + 1)]
                    for i in range(1, self.n + 1)]
            if not _invertible(full):
                raise PolyError("linear part of the change is singular")

    @staticmethod
    def identity(n: int, mu: Sequence[Fraction]) -> "CoordChange":
        return CoordChange(n, [Poly.variable(n, j) for j in range(1, n + 1)], mu)

    @staticmethod
    def linear(n: int, matrix: Mapping[Tuple[int, int], "CRat | Rat"],
               mu: Sequence[Fraction]) -> "CoordChange":
        """Linear change z_i -> sum_j matrix[(i, j)] z_j (1-based, sparse)."""
        maps = []
        for i in range(1, n + 1):
            f = Poly.zero(n)
            for (row, col), c in matrix.items():
                if row == i:
                    f = f + Poly.variable(n, col) * CRat.of(c)
            maps.append(f)
        return CoordChange(n, maps, mu)

    def apply(self, p: Poly) -> Poly:
        return p.substitute_maps(self.maps)

    def compose(self, after: "CoordChange") -> "CoordChange":
        """Change equivalent to applying self first, then ``after``."""
        maps = [f.substitute_maps(after.maps) for f in self.maps]
        return CoordChange(self.n, maps, after.mu,
                           graded=self.graded and after.graded)

    def to_json_dict(self) -> dict:
        return {"mu": [rat_str(m) for m in self.mu],
                "graded": self.graded,
                "maps": [f.to_json_dict() for f in self.maps]}


def substitute(p: Poly, change: CoordChange) -> Poly:
    """Exact expansion of p under the coordinate change."""
    return change.apply(p)


def _unit(n: int, j: int) -> Exponents:
    return tuple(1 if i == j - 1 else 0 for i in range(n))


def _weight_blocks(mu: Sequence[Fraction]) -> Iterator[Tuple[int, ...]]:
    groups: Dict[Fraction, list] = {}
    for j, m in enumerate(mu, start=1):
        groups.setdefault(m, []).append(j)
    for m in sorted(groups, reverse=True):
        yield tuple(groups[m])


def _invertible(m: Sequence[Sequence[CRat]]) -> bool:
    """Gaussian elimination over CRat."""
    k = len(m)
    a = [[CRat.of(x) for x in row] for row in m]
    for col in range(k):
        piv = next((r for r in range(col, k) if not a[r][col].is_zero()), None)
        if piv is None:
            return False
        a[col], a[piv] = a[piv], a[col]
        inv = CRat(1) / a[col][col]
        for r in range(col + 1, k):
            if a[r][col].is_zero():
                continue
            factor = a[r][col] * inv
            a[r] = [x - factor * y for x, y in zip(a[r], a[col])]
    return True


# ----------------------------------------------------------------------
# pretty printing
# ----------------------------------------------------------------------


def _monomial_str(n: int, alpha: Exponents, beta: Exponents) -> str:
    parts = []
    for i in range(n):
        if alpha[i]:
            parts.append(f"z{i+1}" + (f"^{alpha[i]}" if alpha[i] > 1 else ""))
    for i in range(n):
        if beta[i]:
            parts.append(f"zbar{i+1}" + (f"^{beta[i]}" if beta[i] > 1 else ""))
    return "*".join(parts) if parts else "1"


def format_poly(p: Poly) -> str:
    """Human form; Hermitian pairs are folded into 2*Re(...) and |.|^2 terms."""
    if p.is_zero():
        return "0"
    shown = set()
    chunks = []
    for a, b, c in p.iter_terms():
        if (a, b) in shown:
            continue
        if a == b:
            shown.add((a, b))
            body = "*".join(f"|z{i+1}|^{2*a[i]}" for i in range(p.n) if a[i])
            if not body:
                body = "1"
            coeff = "" if c == CRat(1) else f"{c}*"
            chunks.append(f"{coeff}{body}")
        else:
            partner = (b, a)
            if partner in p.terms and p.terms[partner] == c.conj():
                shown.add((a, b))
                shown.add(partner)
                if a + b < b + a:  # show the holomorphic-leading side
                    a, b, c = partner[0], partner[1], c.conj()
                if c == CRat(1):
                    chunks.append(f"2*Re({_monomial_str(p.n, a, b)})")
                elif c == CRat(-1):
                    chunks.append(f"-2*Re({_monomial_str(p.n, a, b)})")
                else:
                    chunks.append(f"2*Re(({c})*{_monomial_str(p.n, a, b)})")
            else:
                shown.add((a, b))
                chunks.append(f"({c})*{_monomial_str(p.n, a, b)}")
    out = " + ".join(chunks)
    return out.replace("+ -", "- ")
