import random
from fractions import Fraction

import pytest

from catlin.exact import CRat
from catlin.levi import (KIND_CERTIFIED, KIND_REFUTED, KIND_UNKNOWN,
                         cauchy_schwarz_pairing, circle_points, complex_hessian,
                         hessian_form_value, m_dominant_coefficients,
                         model_truncate, newton_split_check,
                         one_var_coeff_check, psd_verdict, replay_refutation,
                         verify_psd_certificate)
from catlin.parser import parse_poly
from catlin.poly import Poly, PolyError
from catlin.weights import Weight

from helpers import homogenized_modulus_square, rand_crat

TORSION_EXPR = ("-2*Re(z1) + |z2|^6 + |z2|^2*|z3|^6 + |z2|^4*|z3|^2*|z4|^2"
                " + |z2|^2*|z3|^4*|z4|^4"
                " + 2*(1/10)*Re(z2*zbar2*z3^2*zbar3^3*z4*zbar4)"
                " + |z3|^8*|z4|^2")


def torsion_p(eps="1/10"):
    expr = TORSION_EXPR.replace("1/10", eps)
    r = parse_poly(expr, 4)
    return Poly(4, {k: c for k, c in r.terms.items()
                    if k[0][0] == 0 and k[1][0] == 0})


# ----------------------------------------------------------------------
# complex Hessian
# ----------------------------------------------------------------------


def test_hessian_quadric():
    h = complex_hessian(parse_poly("|z2|^2", 2))
    assert h[0][0].is_zero() and h[0][1].is_zero() and h[1][0].is_zero()
    assert h[1][1] == Poly.const(2, 1)


def test_hessian_modulus_fourth():
    h = complex_hessian(parse_poly("|z2|^4", 2))
    assert h[1][1] == parse_poly("4*|z2|^2", 2)


def test_hessian_against_shift_oracle():
    # Independent check: coefficients of z_j zbar_k in the shifted expansion
    # p(w + z) equal the Hessian entries at w.
    rng = random.Random(41)
    p = parse_poly("2*Re(z2^2*zbar3^3)", 3)
    h = complex_hessian(p)
    for _ in range(10):
        w = [rand_crat(rng, 2) for _ in range(3)]
        maps = [Poly.variable(3, j + 1) + Poly.const(3, w[j]) for j in range(3)]
        shifted = p.substitute_maps(maps)
        for j in range(1, 4):
            for k in range(1, 4):
                ej = tuple(1 if i == j - 1 else 0 for i in range(3))
                ek = tuple(1 if i == k - 1 else 0 for i in range(3))
                assert shifted.coeff(ej, ek) == h[j - 1][k - 1].evaluate(w)


def test_hessian_hermitian_symmetry_random():
    rng = random.Random(43)
    for _ in range(40):
        p = Poly.zero(3)
        for _k in range(3):
            a = tuple(rng.randint(0, 2) for _ in range(3))
            b = tuple(rng.randint(0, 2) for _ in range(3))
            c = rand_crat(rng)
            p = p + Poly.monomial(3, a, b, c) + Poly.monomial(3, b, a, c.conj())
        h = complex_hessian(p)
        for j in range(3):
            for k in range(3):
                assert h[j][k] == h[k][j].conj()


# ----------------------------------------------------------------------
# psd_verdict tiers
# ----------------------------------------------------------------------


def test_verdict_diagonal():
    v = psd_verdict(parse_poly("|z2|^2 + |z3|^2", 3))
    assert v.kind == KIND_CERTIFIED and v.tier == 1
    assert verify_psd_certificate(parse_poly("|z2|^2 + |z3|^2", 3),
                                  v.certificate)


def test_verdict_refuted_with_witness():
    p = parse_poly("2*Re(z2^2*zbar3^3)", 3)
    v = psd_verdict(p)
    assert v.kind == KIND_REFUTED
    assert Fraction(v.witness["value"]) < 0
    assert replay_refutation(p, v.witness) == Fraction(v.witness["value"])


def test_verdict_torsion_model_tier2():
    p = torsion_p()
    v = psd_verdict(p)
    assert v.kind == KIND_CERTIFIED and v.tier == 2
    assert verify_psd_certificate(p, v.certificate)


def test_verdict_square_tier1():
    p = parse_poly("|z2|^4 + |z3|^6 + 2*(9/10)*Re(z2^2*zbar3^3)", 3)
    v = psd_verdict(p)
    assert v.kind == KIND_CERTIFIED and v.tier == 1
    assert verify_psd_certificate(p, v.certificate)


def test_verdict_unknown_is_honest():
    # (Re z2)^2 restricted to the tangential slots: psh but neither a
    # diagonal-plus-squares shape nor CS-absorbable (the mixed term has no
    # balanced majorant pair); the verdict must stay Unknown, not Refuted.
    p = parse_poly("(Re(z2))^2", 2)
    v = psd_verdict(p, samples=40)
    assert v.kind == KIND_UNKNOWN
    assert v.samples_tried > 0


def test_verdict_rejects_z1_dependence():
    with pytest.raises(PolyError):
        psd_verdict(parse_poly("-2*Re(z1) + |z2|^2", 2))


def test_hessian_form_value_negative_case():
    p = parse_poly("2*Re(z2^2*zbar3^3)", 3)
    h = complex_hessian(p)
    value = hessian_form_value(h, [CRat(0), CRat(1), CRat(1)],
                               [CRat(1), CRat(-1)])
    assert value == -12


# ----------------------------------------------------------------------
# Cauchy-Schwarz pairing engine
# ----------------------------------------------------------------------


def test_pairing_torsion_kernel_systems():
    result = cauchy_schwarz_pairing(torsion_p())
    assert result["certified"]
    cert = result["certificate"]
    mixed = cert["mixed"]
    assert len(mixed) == 1
    systems = {frozenset(tuple(row) for row in sys_)
               for sys_ in mixed[0]["kernel_systems"]}
    expected = {frozenset({(1, 3, 0), (1, 2, 2)}),
                frozenset({(2, 1, 1), (0, 4, 1)})}
    assert systems == expected
    fractions = sorted(Fraction(sp["fraction"])
                       for sp in mixed[0]["splittings"])
    assert fractions == [Fraction(1, 2), Fraction(1, 2)]


def test_pairing_kernel_intersection_trivial_oracle():
    # Independent oracle: Gaussian elimination over the rationals on the four
    # kernel rows; full rank 3 means the intersection is the origin.
    rows = [[1, 3, 0], [1, 2, 2], [2, 1, 1], [0, 4, 1]]
    m = [[Fraction(x) for x in row] for row in rows]
    rank = 0
    for col in range(3):
        piv = next((r for r in range(rank, 4) if m[r][col] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for r in range(4):
            if r != rank and m[r][col] != 0:
                f = m[r][col] / m[rank][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[rank])]
        rank += 1
    assert rank == 3


def test_pairing_trivial_without_mixed():
    result = cauchy_schwarz_pairing(parse_poly("|z2|^4 + |z3|^2", 3))
    assert result["certified"]
    assert result["certificate"]["kind"] == "diagonal"


def test_pairing_fails_without_balanced():
    result = cauchy_schwarz_pairing(parse_poly("2*Re(z2^2*zbar3^3)", 3))
    assert not result["certified"]
    assert "splitting" in result["reason"]


def test_pairing_margin_scales_with_eps():
    small = cauchy_schwarz_pairing(torsion_p("1/100"))
    big = cauchy_schwarz_pairing(torsion_p("1/10"))
    assert Fraction(small["certificate"]["margin"]) < \
        Fraction(big["certificate"]["margin"]) < 1


def test_pairing_uses_lattice_when_equal_split_fails():
    # two mixed terms compete for the |z2|^4 budget: a half/half split of the
    # second one overloads the slot, a quarter/three-quarters split fits
    p = parse_poly("|z2|^4 + |z3|^4 + |z4|^4 + |z2|^2*|z4|^2"
                   " + 2*(4/5)*Re(z2^2*zbar3^2) + 2*(3/5)*Re(z2^2*zbar4^2)", 4)
    result = cauchy_schwarz_pairing(p)
    assert result["certified"]
    assert verify_psd_certificate(p, result["certificate"])
    by_pair = {(tuple(m["alpha"]), tuple(m["beta"])): m
               for m in result["certificate"]["mixed"]}
    competing = by_pair[((0, 0, 0, 2), (0, 2, 0, 0))]
    fractions = sorted(Fraction(sp["fraction"])
                       for sp in competing["splittings"])
    assert fractions == [Fraction(1, 4), Fraction(3, 4)]


def test_pairing_kernel_check_restricted_to_mixed_support():
    # a mixed term not involving z4 pairs inside {z2, z3}; its majorant
    # kernels need only be trivial there
    p = parse_poly("|z2|^4 + |z3|^4 + |z4|^4 + 2*(1/2)*Re(z2^2*zbar3^2)", 4)
    result = cauchy_schwarz_pairing(p)
    assert result["certified"]
    assert verify_psd_certificate(p, result["certificate"])


def test_m_dominance_of_extracted_restriction():
    # the balanced coefficient of a one-variable restriction is
    # (1/(2 mu_2))-dominant among its coefficients
    p2 = parse_poly("|z1|^4 + Re(z1^3*zbar1)", 1)
    dominant = m_dominant_coefficients(p2, Fraction(2))
    assert ((2,), (2,)) in dominant


def test_certificate_tamper_detection():
    p = torsion_p()
    cert = cauchy_schwarz_pairing(p)["certificate"]
    assert verify_psd_certificate(p, cert)
    import copy
    bad = copy.deepcopy(cert)
    bad["mixed"][0]["splittings"][0]["fraction"] = "2/3"  # sums above 1
    assert not verify_psd_certificate(p, bad)
    bad2 = copy.deepcopy(cert)
    bad2["mixed"][0]["splittings"].pop()  # fractions no longer sum to 1
    assert not verify_psd_certificate(p, bad2)
    other = parse_poly("|z2|^2 + |z3|^2 + |z4|^2", 4)
    assert not verify_psd_certificate(other, cert)


# ----------------------------------------------------------------------
# one-variable coefficient bounds
# ----------------------------------------------------------------------


def test_one_var_pure_modulus():
    rep = one_var_coeff_check(parse_poly("|z1|^4", 1))
    assert rep.C0 == 1 and rep.all_satisfied() and not rep.bounds


def test_one_var_with_off_diagonal():
    # |z|^4 + Re(z^3 zbar): C0 = 1, |C_1| = 1/2 <= 1.  Nonnegativity
    # pre-checked by dense sampling on rational points of |z| = 1.
    p = parse_poly("|z1|^4 + Re(z1^3*zbar1)", 1)
    for z in circle_points(40):
        assert p.evaluate([z]).re >= 0
    rep = one_var_coeff_check(p, assume_nonneg=True)
    assert rep.C0 == 1
    assert rep.all_satisfied()
    (k, c, ok), = rep.bounds
    assert k == 1 and c == CRat(Fraction(1, 2)) and ok


def test_one_var_violation_certifies_not_nonneg():
    p = parse_poly("2*Re(z1^2)", 1)
    rep = one_var_coeff_check(p)
    assert rep.C0 == 0
    assert not rep.all_satisfied()
    # contrapositive: P takes negative values
    assert any(p.evaluate([z]).re < 0 for z in circle_points(8))


def test_one_var_requires_homogeneous():
    with pytest.raises(PolyError):
        one_var_coeff_check(parse_poly("|z1|^2 + |z1|^4", 1))
    with pytest.raises(PolyError):
        one_var_coeff_check(parse_poly("|z1|^2*Re(z1)", 1))


def test_one_var_random_nonneg_suite():
    # 200 nonnegative homogeneous one-variable polynomials built as
    # homogenized |q|^2 + |q~|^2; the coefficient bounds must all hold.
    rng = random.Random(47)
    for _ in range(200):
        m = rng.randint(1, 6)
        p = homogenized_modulus_square(rng, m) + \
            homogenized_modulus_square(rng, m)
        rep = one_var_coeff_check(p, assume_nonneg=True)
        assert rep.C0 > 0
        assert rep.all_satisfied()


# ----------------------------------------------------------------------
# dominance and Newton splits
# ----------------------------------------------------------------------


def test_m_dominant_single():
    p = parse_poly("|z1|^4", 1)
    assert m_dominant_coefficients(p, Fraction(1)) == [((2,), (2,))]


def test_m_dominant_tie():
    p = parse_poly("|z2|^2*|z3|^2 + |z2|^4 + |z3|^4", 3)
    got = m_dominant_coefficients(p, Fraction(1))
    assert len(got) == 3  # all coefficients equal: every one is 1-dominant


def test_m_dominant_factor():
    p = parse_poly("2*|z1|^4 + Re(z1^3*zbar1)", 1)
    assert ((2,), (2,)) in m_dominant_coefficients(p, Fraction(1))
    assert len(m_dominant_coefficients(p, Fraction(1, 10))) == 0


def test_newton_split_flags():
    p = parse_poly("|z2|^2 + 2*Re(z2*zbar3) + |z3|^2", 3)
    parts = newton_split_check(p, ([2], [3]))
    by_key = {(s.deg_a, s.deg_b): s for s in parts}
    assert set(by_key) == {(2, 0), (1, 1), (0, 2)}
    assert by_key[(2, 0)].flagged_nonneg
    assert by_key[(0, 2)].flagged_nonneg
    assert not by_key[(1, 1)].flagged_nonneg


def test_newton_split_single_balanced():
    p = parse_poly("|z2|^2*|z3|^4", 3)
    parts = newton_split_check(p, ([2], [3]))
    assert len(parts) == 1 and parts[0].flagged_nonneg


def test_newton_split_extremal_parts_nonneg_random():
    rng = random.Random(53)
    for _ in range(40):
        p = Poly.zero(3)
        for _k in range(3):
            a = (0, rng.randint(0, 2), rng.randint(0, 2))
            p = p + Poly.modulus_power(3, a, Fraction(rng.randint(1, 3)))
        parts = newton_split_check(p, ([2], [3]))
        for part in parts:
            if part.flagged_nonneg:
                for z2 in (CRat(1), CRat(-1), CRat(1, 1)):
                    val = part.part.evaluate([CRat(0), z2, CRat(1, -1)])
                    assert val.is_real() and val.re >= 0


def test_newton_split_invalid_partition():
    p = parse_poly("|z2|^2*|z3|^2", 3)
    with pytest.raises(PolyError):
        newton_split_check(p, ([2], [2, 3]))
    with pytest.raises(PolyError):
        newton_split_check(p, ([2], []))


# ----------------------------------------------------------------------
# model truncation
# ----------------------------------------------------------------------


def test_model_truncate_strips_tail():
    r = parse_poly("-2*Re(z1) + |z2|^4 + |z2|^6", 2)
    mu = Weight((Fraction(1), Fraction(1, 4)))
    assert model_truncate(r, mu) == parse_poly("-2*Re(z1) + |z2|^4", 2)


def test_model_truncate_identity_on_homogeneous():
    r = parse_poly("-2*Re(z1) + |z2|^8 + |z2|^4*|z3|^6", 3)
    mu = Weight((Fraction(1), Fraction(1, 8), Fraction(1, 12)))
    assert model_truncate(r, mu) == r


def test_model_truncate_rejects_low_weight():
    r = parse_poly("-2*Re(z1) + |z2|^2", 2)
    mu = Weight((Fraction(1), Fraction(1, 4)))
    with pytest.raises(PolyError):
        model_truncate(r, mu)


def test_model_truncate_consistency_with_verdict():
    # if the full model is certified, its truncation is never refuted
    r = parse_poly("-2*Re(z1) + |z2|^4 + |z2|^6", 2)
    mu = Weight((Fraction(1), Fraction(1, 4)))
    full_p = Poly(2, {k: c for k, c in r.terms.items()
                      if k[0][0] == 0 and k[1][0] == 0})
    trunc = model_truncate(r, mu)
    trunc_p = Poly(2, {k: c for k, c in trunc.terms.items()
                       if k[0][0] == 0 and k[1][0] == 0})
    assert psd_verdict(full_p).kind == KIND_CERTIFIED
    assert psd_verdict(trunc_p).kind != KIND_REFUTED


# ----------------------------------------------------------------------
# soundness of refutations (invariant)
# ----------------------------------------------------------------------


def test_refutation_soundness_random():
    rng = random.Random(59)
    refuted = 0
    for _ in range(30):
        a = tuple(rng.randint(0, 2) for _ in range(2))
        b = tuple(rng.randint(0, 2) for _ in range(2))
        if a == b:
            continue
        p = Poly.monomial(3, (0,) + a, (0,) + b, 1) + \
            Poly.monomial(3, (0,) + b, (0,) + a, 1)
        v = psd_verdict(p, samples=60, seed=3)
        if v.kind == KIND_REFUTED:
            refuted += 1
            assert replay_refutation(p, v.witness) < 0
    assert refuted > 0
