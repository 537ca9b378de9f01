"""Shared generators and small oracles for the test suite."""

from __future__ import annotations

import random
from fractions import Fraction
from typing import List, Tuple

from catlin.exact import CRat
from catlin.poly import Poly


def rand_fraction(rng: random.Random, span: int = 4) -> Fraction:
    return Fraction(rng.randint(-span, span), rng.randint(1, span))


def rand_crat(rng: random.Random, span: int = 4) -> CRat:
    return CRat(rand_fraction(rng, span), rand_fraction(rng, span))


def rand_real_poly(rng: random.Random, n: int, terms: int = 3,
                   max_exp: int = 3) -> Poly:
    """Random real-valued polynomial built from Hermitian-symmetric pairs."""
    p = Poly.zero(n)
    for _ in range(terms):
        alpha = tuple(rng.randint(0, max_exp) for _ in range(n))
        beta = tuple(rng.randint(0, max_exp) for _ in range(n))
        c = rand_crat(rng)
        p = p + Poly.monomial(n, alpha, beta, c) + Poly.monomial(n, beta, alpha,
                                                                 c.conj())
    return p


def rand_holomorphic(rng: random.Random, n: int, terms: int = 2,
                     max_exp: int = 2) -> Poly:
    p = Poly.zero(n)
    for _ in range(terms):
        alpha = tuple(rng.randint(0, max_exp) for _ in range(n))
        p = p + Poly.monomial(n, alpha, (0,) * n, rand_crat(rng))
    return p


def homogenized_modulus_square(rng: random.Random, target_half_degree: int,
                               max_q_degree: int = 6) -> Poly:
    """One-variable nonnegative homogeneous polynomial of degree
    2 * target_half_degree: the |z|-homogenization of |q(z)|^2 where q has
    exponents of a single parity (so all pad exponents stay integral).

    With q = sum a_j z^j, the result is
        sum_jk a_j conj(a_k) z^j zbar^k |z|^(2m - j - k),
    which equals |z|^(2m) |q(z/|z|)|^2 >= 0 pointwise.
    """
    m = target_half_degree
    parity = rng.randint(0, 1)
    degrees = [d for d in range(parity, max_q_degree + 1, 2) if d <= m]
    chosen = rng.sample(degrees, k=min(len(degrees), rng.randint(1, 3)))
    coeffs = {d: rand_crat(rng) for d in chosen}
    if all(c.is_zero() for c in coeffs.values()):
        coeffs[chosen[0]] = CRat(1)
    p = Poly.zero(1)
    for j, aj in coeffs.items():
        for k, ak in coeffs.items():
            pad = 2 * m - j - k
            assert pad % 2 == 0 and pad >= 0
            alpha = (j + pad // 2,)
            beta = (k + pad // 2,)
            p = p + Poly.monomial(1, alpha, beta, aj * ak.conj())
    return p


def brute_admissible_slot(lams: List[Fraction], bound: int = 40) -> List[Tuple[int, ...]]:
    """Independent brute-force witness search for one admissibility slot."""
    i = len(lams)
    out = []

    def rec(idx, acc, total):
        if idx == i:
            if acc[-1] > 0 and total == 1:
                out.append(tuple(acc))
            return
        for a in range(0, bound):
            t = total + Fraction(a) / lams[idx]
            if t > 1:
                break
            rec(idx + 1, acc + [a], t)

    rec(0, [], Fraction(0))
    return out
