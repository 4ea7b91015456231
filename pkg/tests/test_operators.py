"""Generator builders, normal-ordered application, graded commutator action."""

import random
from fractions import Fraction

import pytest

from virfock import (
    BOSON,
    BasisState,
    BilinearTerm,
    FERMION,
    FieldKind,
    REDUCED_FERMION,
    StateVector,
    Truncation,
    TruncationOverflowError,
    UnsafeLevelError,
    VACUUM,
    a,
    adag,
    apply_mode,
    apply_operator,
    b,
    bdag,
    build_B,
    build_K,
    build_L,
    build_chi_bar0,
    build_chi_boson,
    commutator_action,
    commutator_with_linear,
    conformal_weight,
    enumerate_basis,
    linear_bracket,
    mode_operator,
    red_adag,
    red_b,
)
from virfock.operators import safe_basis_for_pair

H = Fraction(1, 2)


def test_build_B_structure():
    b0 = build_B(0, Fraction(7))
    assert b0.linear == ((adag(0), Fraction(1)),)  # the a[0] term has coefficient 0
    b2 = build_B(2, H)
    assert dict(b2.linear) == {adag(2): 1, a(2): 1}


def test_B_and_chi_bracket_table():
    # [B_m, B_n] = -2Mm delta(m+n); [chi_m, chi_n] = 2Mm delta(m+n); [B, chi] = 0
    M = H
    assert linear_bracket(build_B(2, M), build_B(-2, M)) == -2
    M = Fraction(1)
    assert linear_bracket(build_chi_boson(3, M), build_chi_boson(-3, M)) == 6
    assert linear_bracket(build_B(3, M), build_chi_boson(-3, M)) == 0
    assert linear_bracket(build_chi_boson(0, M), build_chi_bar0()) == 1
    assert linear_bracket(build_chi_boson(5, M), build_chi_boson(4, M)) == 0


def test_build_K_structure():
    k = build_K(3)
    assert k.bilinears == (BilinearTerm(FieldKind.ADAG, FieldKind.A, 3,
                                        Fraction(0), Fraction(1)),)
    assert k.linear == () and k.constant == 0 and k.shift == 3


def test_build_L_boson_zero_mode():
    lam = Fraction(1, 3)
    l0 = build_L("boson-unconstrained", 0, Fraction(5), lam)
    assert dict(l0.linear) == {adag(0): lam}  # K_0 + lam a†[0]
    assert l0.bilinears == build_K(0).bilinears


def test_build_L_reduced_boson():
    M = Fraction(2)
    l0 = build_L("boson-reduced", 0, M, Fraction(1, 2))
    assert l0.bilinears == (BilinearTerm(FieldKind.RED_ADAG, FieldKind.RED_ADAG, 0,
                                         Fraction(1, 2), Fraction(0)),)
    assert l0.linear == ()  # a†[0] linear part skipped at build time
    l2 = build_L("boson-reduced", 2, M, Fraction(1, 2))
    assert dict(l2.linear) == {red_adag(2): 3}  # 2 lam (m+1)
    with pytest.raises(ValueError):
        build_L("boson-reduced", 1, 0, 1)  # 1/M kernel undefined


def test_build_L_fermion_kernel():
    lam = Fraction(1, 3)
    l2 = build_L("fermion-unconstrained", 2, 0, lam)
    assert l2.bilinears == (BilinearTerm(FieldKind.BDAG, FieldKind.B, 2,
                                         2 * lam, Fraction(-1)),)
    lr = build_L("fermion-reduced", 3)
    assert lr.bilinears == (BilinearTerm(FieldKind.RED_B, FieldKind.RED_B, 3,
                                         Fraction(3, 2), Fraction(-1)),)


def test_K_mode_laws_on_states():
    # [K_1, a_2] = 3 a_3 and [K_2, a†_-1] = -a†_1, as actions on safe states
    trunc = Truncation(Fraction(6), 3)
    k1, k2 = build_K(1), build_K(2)
    a2 = mode_operator(BOSON, a(2))
    ad_m1 = mode_operator(BOSON, adag(-1))
    for psi in safe_basis_for_pair(BOSON, trunc, k1, a2):
        vec = StateVector.basis(BOSON, psi)
        assert commutator_action(k1, a2, psi, trunc) == 3 * apply_mode(a(3), vec, trunc)
    for psi in safe_basis_for_pair(BOSON, trunc, k2, ad_m1):
        vec = StateVector.basis(BOSON, psi)
        assert commutator_action(k2, ad_m1, psi, trunc) == \
            (-1) * apply_mode(adag(1), vec, trunc)


def test_K_chi_commutator_symbolic():
    # [K_2, chi_3] = 3 chi_5 as linear expressions
    M = Fraction(1)
    got = commutator_with_linear(build_K(2), build_chi_boson(3, M))
    assert got == 3 * build_chi_boson(5, M)
    # [K_m, B_n] = n B_{m+n}
    got = commutator_with_linear(build_K(-1), build_B(4, M))
    assert got == 4 * build_B(3, M)
    # [L_m, a_0] = m a_m + lam delta(m)
    lam = Fraction(2, 3)
    got = commutator_with_linear(build_L("boson-unconstrained", 2, 1, lam),
                                 mode_operator(BOSON, a(0)))
    assert dict(got.linear) == {a(2): 2} and got.constant == 0
    got = commutator_with_linear(build_L("boson-unconstrained", 0, 1, lam),
                                 mode_operator(BOSON, a(0)))
    assert got.linear == () and got.constant == lam


def test_L0_fermion_reduced_eigenvalue_by_hand():
    # expand L_0 = -sum_r r :b[-r] b[r]: manually on the level-1/2 state;
    # only r = +-1/2 contribute and each term yields (1/4) psi
    trunc = Truncation(Fraction(7, 2))
    psi = StateVector.basis(REDUCED_FERMION, BasisState((red_b(H),)))
    plus = apply_mode(red_b(H), apply_mode(red_b(-H), psi, trunc), trunc)
    # r=+1/2 term: -(1/2) :b[-1/2]b[1/2]: = +(1/2) b[1/2] b[-1/2] after the odd swap
    # r=-1/2 term: +(1/2) :b[1/2]b[-1/2]: already ordered
    oracle = H * plus + H * plus
    assert oracle == H * psi
    l0 = build_L("fermion-reduced", 0)
    assert apply_operator(l0, psi, trunc) == oracle


def test_K0_counts_level():
    trunc = Truncation(Fraction(5), 2)
    k0 = build_K(0)
    for state in enumerate_basis(BOSON, trunc):
        v = StateVector.basis(BOSON, state)
        assert apply_operator(k0, v, trunc) == state.level * v


def test_operator_on_zero_vector():
    trunc = Truncation(Fraction(4))
    zero = StateVector.zero(REDUCED_FERMION)
    assert apply_operator(build_L("fermion-reduced", -2), zero, trunc).is_zero()


@pytest.mark.parametrize("family,M,lam", [
    ("boson-unconstrained", Fraction(1), Fraction(1, 2)),
    ("boson-reduced", Fraction(2), Fraction(1, 3)),
    ("fermion-unconstrained", 0, Fraction(1, 3)),
    ("fermion-reduced", 0, 0),
])
def test_generators_are_level_homogeneous(family, M, lam):
    from virfock import algebra_for
    algebra = algebra_for(family, M)
    cap = Fraction(5) if not family.startswith("fermion") else Fraction(9, 2)
    trunc = Truncation(cap, 3 if algebra.has_zero_modes else 0)
    for m in range(-3, 4):
        op = build_L(family, m, M, lam)
        for state in enumerate_basis(algebra, trunc):
            if state.level + max(0, m) > trunc.level_cap:
                continue
            if algebra.has_zero_modes and state.zero_occ + 1 > trunc.zero_mode_cap:
                continue
            out = apply_operator(op, StateVector.basis(algebra, state), trunc)
            for s2 in out.amp:
                assert s2.level == state.level + m


def test_primary_field_law_matches_conformal_weight():
    # [G_m, phi_n] = ((1-h) m + n) phi_{m+n} with h the mode's weight metadata
    lam = Fraction(1, 3)
    cases = [
        (BOSON, build_K, None, a, FieldKind.A, Truncation(Fraction(5), 3)),
        (BOSON, build_K, None, adag, FieldKind.ADAG, Truncation(Fraction(5), 3)),
        (FERMION, lambda m: build_L("fermion-unconstrained", m, 0, lam), lam,
         b, FieldKind.B, Truncation(Fraction(9, 2))),
        (FERMION, lambda m: build_L("fermion-unconstrained", m, 0, lam), lam,
         bdag, FieldKind.BDAG, Truncation(Fraction(9, 2))),
    ]
    for algebra, gen, wlam, ctor, kind, trunc in cases:
        h = conformal_weight(kind, wlam)
        half = kind.half_integer_moded
        indices = ([Fraction(t, 2) for t in range(-5, 6, 2)] if half
                   else list(range(-3, 4)))
        for m in range(-3, 4):
            op = gen(m)
            for n in indices:
                x = ctor(n)
                target = ctor(n + m)
                coeff = (1 - h) * m + n
                xop = mode_operator(algebra, x)
                for psi in safe_basis_for_pair(algebra, trunc, op, xop):
                    vec = StateVector.basis(algebra, psi)
                    lhs = commutator_action(op, xop, psi, trunc)
                    assert lhs == coeff * apply_mode(target, vec, trunc), (m, n, psi)


def test_window_widening_changes_nothing():
    rng = random.Random(11)
    for family, M, lam, trunc in [
        ("boson-unconstrained", Fraction(1), Fraction(1, 2), Truncation(Fraction(5), 3)),
        ("fermion-unconstrained", 0, Fraction(1, 3), Truncation(Fraction(9, 2))),
    ]:
        from virfock import algebra_for
        algebra = algebra_for(family, M)
        states = enumerate_basis(algebra, trunc)
        for _ in range(60):
            m = rng.randint(-3, 3)
            op = build_L(family, m, M, lam)
            pool = [s for s in states if s.level + max(0, m) <= trunc.level_cap
                    and (not algebra.has_zero_modes
                         or s.zero_occ + 1 <= trunc.zero_mode_cap)]
            psi = StateVector.basis(algebra, rng.choice(pool))
            narrow = apply_operator(op, psi, trunc)
            wide = apply_operator(op, psi, trunc,
                                  window=3 * (trunc.level_cap + abs(op.shift)) + 2)
            assert narrow == wide


def test_fermion_half_lambda_mode_law():
    # lam = 1/2: [L_1, b[1/2]] = (1/2 + 1/2) b[3/2] = b[3/2]
    trunc = Truncation(Fraction(9, 2))
    l1 = build_L("fermion-unconstrained", 1, 0, H)
    xop = mode_operator(FERMION, b(H))
    for psi in safe_basis_for_pair(FERMION, trunc, l1, xop):
        vec = StateVector.basis(FERMION, psi)
        assert commutator_action(l1, xop, psi, trunc) == \
            apply_mode(b(Fraction(3, 2)), vec, trunc)


def test_commutator_with_itself_vanishes():
    trunc = Truncation(Fraction(9, 2))
    l1 = build_L("fermion-unconstrained", 1, 0, H)
    for psi in safe_basis_for_pair(FERMION, trunc, l1, l1):
        assert commutator_action(l1, l1, psi, trunc).is_zero()


def test_central_term_vacuum_values():
    # <0|[L_2, L_-2]|0> = -(c/12)(2^3-2) with the family's central charge
    trb = Truncation(Fraction(6), 4)
    l2 = build_L("boson-unconstrained", 2, 1, H)
    lm2 = build_L("boson-unconstrained", -2, 1, H)
    out = commutator_action(l2, lm2, VACUUM, trb)
    assert out.vacuum_component() == 2  # c = -4
    trf = Truncation(Fraction(11, 2))
    f2 = build_L("fermion-reduced", 2)
    fm2 = build_L("fermion-reduced", -2)
    out = commutator_action(f2, fm2, VACUUM, trf)
    assert out.vacuum_component() == Fraction(-1, 4)  # c = 1/2


def test_reduced_fermion_raising_on_vacuum():
    # L_2 |0> = -(1/2 + 1/2) b[1/2]b[3/2]|0> termwise: fixes the sign convention
    trunc = Truncation(Fraction(11, 2))
    out = apply_operator(build_L("fermion-reduced", 2), StateVector.vacuum(REDUCED_FERMION), trunc)
    t = BasisState((red_b(H), red_b(Fraction(3, 2))))
    assert out == (-1) * StateVector.basis(REDUCED_FERMION, t)


def test_unsafe_level_is_rejected():
    trunc = Truncation(Fraction(2))
    l2 = build_L("fermion-reduced", 2)
    lm2 = build_L("fermion-reduced", -2)
    high = BasisState((red_b(H), red_b(Fraction(3, 2))))  # level 2, rise 2
    with pytest.raises(UnsafeLevelError):
        commutator_action(l2, lm2, high, trunc)


def test_apply_operator_overflow_propagates():
    trunc = Truncation(Fraction(2))
    psi = StateVector.basis(REDUCED_FERMION, BasisState((red_b(Fraction(3, 2)),)))
    with pytest.raises(TruncationOverflowError):
        apply_operator(build_L("fermion-reduced", 3), psi, trunc)


def test_operator_addition_and_scaling():
    M = Fraction(1)
    lhs = build_B(2, M) + build_chi_boson(2, M)
    assert dict(lhs.linear) == {adag(2): 2}  # the a[2] parts cancel
    assert (0 * build_K(1)).bilinears == ()
    with pytest.raises(ValueError):
        build_K(1) + build_K(2)  # inhomogeneous sum
