"""End-to-end verification: Virasoro relation, central-charge oracle, laws.

The central-charge oracle is representation independent: it reads c off the
vacuum component of [L_m, L_-m]|0> via

    c = -12 (f(m) + 2m g) / (m^3 - m),   f(m) = <0|[L_m, L_-m]|0>,
                                          g    = <0|L_0|0>,

computed at m = 2 and cross-checked at m = 3 (a disagreement means a
truncation-soundness bug, not a formula failure).  The closed-form claims
are then tested against this oracle, never assumed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .algebra import VirfockError, ZERO, a, adag, b, bdag, format_rational, red_adag
from .dirac import (
    Window,
    boson_constraints,
    dirac_transform_adagger,
    even_fermion_copy_constraints,
    fermion_constraints,
    classify,
    delta_contract_residuals,
    dirac_bracket,
    mode_compatibility_reports,
    verify_compatibility,
)
from .fock import (
    StateVector,
    Truncation,
    VACUUM,
    apply_mode,
    enumerate_basis,
)
from .operators import (
    FAMILIES,
    OperatorSpec,
    algebra_for,
    apply_operator,
    build_L,
    commutator_action,
    is_safe_state,
    linear_operator,
    mode_operator,
    safe_basis_for_pair,
)
from .report import report


class OracleInconsistencyError(VirfockError):
    """The m=2 and m=3 central-charge evaluations disagree."""


def default_truncation(family: str, level: int = 6, zmax: int = 4) -> Truncation:
    """Default caps: integer level for bosons, (2*level-1)/2 for fermions."""
    if family.startswith("fermion"):
        return Truncation(Fraction(2 * level - 1, 2), 0)
    if family == "boson-unconstrained":
        return Truncation(Fraction(level), zmax)
    return Truncation(Fraction(level), 0)


@dataclass(frozen=True)
class ScenarioParams:
    family: str
    M: Fraction = Fraction(1)
    lam: Fraction = Fraction(1, 2)
    trunc: Truncation = None
    m_range: int = 3
    window: Window = field(default_factory=lambda: Window(8))

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.m_range < 2:
            raise ValueError("m_range must be at least 2 (the anomaly needs m^3 - m != 0)")
        object.__setattr__(self, "M", Fraction(self.M))
        object.__setattr__(self, "lam", Fraction(self.lam))
        if self.trunc is None:
            object.__setattr__(self, "trunc", default_truncation(self.family))

    @property
    def algebra(self):
        return algebra_for(self.family, self.M)


def claimed_central_charge(family: str, M=0, lam=0) -> Fraction:
    """The closed-form central charge asserted for each generator family."""
    M, lam = Fraction(M), Fraction(lam)
    if family == "boson-unconstrained":
        return 2 - 24 * M * lam * lam
    if family == "boson-reduced":
        return 1 - 24 * M * lam * lam
    if family == "fermion-unconstrained":
        return -2 * (1 - 6 * lam + 6 * lam * lam)
    if family == "fermion-reduced":
        return Fraction(1, 2)
    raise ValueError(f"unknown family {family!r}")


@lru_cache(maxsize=None)
def _gen(family: str, m: int, M: Fraction, lam: Fraction) -> OperatorSpec:
    return build_L(family, m, M, lam)


def extract_central_charge(params: ScenarioParams) -> Fraction:
    """Central charge measured on the vacuum; the independent oracle."""
    trunc = params.trunc
    if trunc.level_cap < 3:
        raise ValueError("central-charge extraction needs level_cap >= 3")
    algebra = params.algebra
    if algebra.has_zero_modes and trunc.zero_mode_cap < 2:
        raise ValueError("central-charge extraction needs zero_mode_cap >= 2 here")
    vac = StateVector.vacuum(algebra)
    g = apply_operator(_gen(params.family, 0, params.M, params.lam), vac, trunc).vacuum_component()

    def c_at(m: int) -> Fraction:
        lm = _gen(params.family, m, params.M, params.lam)
        lneg = _gen(params.family, -m, params.M, params.lam)
        f = commutator_action(lm, lneg, VACUUM, trunc).vacuum_component()
        return Fraction(-12) * (f + 2 * m * g) / (m ** 3 - m)

    c2, c3 = c_at(2), c_at(3)
    if c2 != c3:
        raise OracleInconsistencyError(
            f"{params.family}: m=2 gives c={c2} but m=3 gives c={c3}; "
            "truncation soundness is broken")
    return c2


def check_virasoro_relation(params: ScenarioParams, c_expected) -> list:
    """[L_m, L_n] = (n-m) L_{m+n} - (c/12)(m^3-m) delta(m+n), state by state.

    Asserted exactly on every safe basis state, one report per (m, n).
    """
    c_expected = Fraction(c_expected)
    trunc, R = params.trunc, params.m_range
    algebra = params.algebra
    reports = []
    for m in range(-R, R + 1):
        lm = _gen(params.family, m, params.M, params.lam)
        for n in range(-R, R + 1):
            ln = _gen(params.family, n, params.M, params.lam)
            lmn = _gen(params.family, m + n, params.M, params.lam)
            ok, witness, residual = True, None, None
            states = safe_basis_for_pair(algebra, trunc, lm, ln)
            for psi in states:
                vec = StateVector.basis(algebra, psi)
                lhs = commutator_action(lm, ln, psi, trunc)
                rhs = (n - m) * apply_operator(lmn, vec, trunc)
                if m + n == 0:
                    rhs = rhs - (c_expected * Fraction(m ** 3 - m, 12)) * vec
                if lhs != rhs:
                    ok, witness, residual = False, psi, lhs - rhs
                    break
            reports.append(report(
                f"virasoro[m={m},n={n}]", ok, "0",
                "0" if ok else str(residual), "" if ok else str(witness)))
    return reports


_PRIMARY_LAWS = {
    # family -> (generator family, [(mode ctor, coefficient(m, idx))])
    "boson-unconstrained": [
        ("a", a, lambda m, n, lam: m + n),
        ("a†", adag, lambda m, n, lam: n),
    ],
    "fermion-unconstrained": [
        ("b", b, lambda m, r, lam: (1 - lam) * m + r),
        ("b†", bdag, lambda m, r, lam: lam * m + r),
    ],
}


def check_primary_laws(params: ScenarioParams) -> list:
    """Mode transformation laws [G_m, phi_n] = ((1-h)m + n) phi_{m+n}.

    For the boson family the generator is the pure bilinear K_m (lambda and
    M enter only through the linear part, which commutes with the modes up
    to scalars); for the fermion family it is L_m with its lambda.
    """
    if params.family not in _PRIMARY_LAWS:
        return []
    trunc, R = params.trunc, params.m_range
    algebra = params.algebra
    boson = params.family == "boson-unconstrained"
    reports = []
    for m in range(-R, R + 1):
        if boson:
            gen = build_L("boson-unconstrained", m, 0, 0)  # K_m
        else:
            gen = _gen(params.family, m, params.M, params.lam)
        for sym, ctor, coeff_fn in _PRIMARY_LAWS[params.family]:
            indices = (range(-R, R + 1) if boson
                       else [Fraction(t, 2) for t in range(-2 * R + 1, 2 * R, 2)])
            for idx in indices:
                x = ctor(idx)
                target = ctor(idx + m)
                coeff = Fraction(coeff_fn(m, Fraction(idx), params.lam))
                xop = mode_operator(algebra, x)
                ok, witness = True, None
                for psi in safe_basis_for_pair(algebra, trunc, gen, xop):
                    vec = StateVector.basis(algebra, psi)
                    lhs = commutator_action(gen, xop, psi, trunc)
                    rhs = coeff * apply_mode(target, vec, trunc)
                    if lhs != rhs:
                        ok, witness = False, psi
                        break
                reports.append(report(
                    f"primary[{sym},m={m},n={idx}]", ok,
                    f"{format_rational(coeff)}·{target}",
                    "as expected" if ok else "mismatch", "" if ok else str(witness)))
    return reports


def check_christoffel(params: ScenarioParams) -> list:
    """Reduced-boson transformation [L_m, a†[n]] = n a†[m+n] - M lam m(m+1) delta(m+n).

    Checked on the reduced Fock module (a†[0] terms skipped) and
    cross-checked against the Dirac-bracket machinery route.
    """
    if params.family != "boson-reduced":
        return []
    trunc, R = params.trunc, params.m_range
    algebra = params.algebra
    M, lam = params.M, params.lam
    reports = []
    for m in range(-R, R + 1):
        lm = _gen("boson-reduced", m, M, lam)
        for n in [k for k in range(-R, R + 1) if k != 0]:
            anomaly = -M * lam * m * (m + 1) if m + n == 0 else ZERO
            xop = mode_operator(algebra, red_adag(n))
            ok, witness = True, None
            for psi in safe_basis_for_pair(algebra, trunc, lm, xop):
                vec = StateVector.basis(algebra, psi)
                lhs = commutator_action(lm, xop, psi, trunc)
                rhs = anomaly * vec
                if m + n != 0:
                    rhs = rhs + n * apply_mode(red_adag(m + n), vec, trunc)
                if lhs != rhs:
                    ok, witness = False, psi
                    break
            reports.append(report(
                f"christoffel[m={m},n={n}]", ok,
                (f"{n}·a†[{m + n}]" if m + n else format_rational(anomaly)),
                "as expected" if ok else "mismatch", "" if ok else str(witness)))
            # independent route through the Dirac bracket of the unconstrained form
            via_dirac = dirac_transform_adagger(m, n, M, lam)
            expected = linear_operator(
                algebra_for("boson-unconstrained"),
                {adag(m + n): n} if m + n != 0 else {},
                constant=anomaly, shift=Fraction(m + n), parity=0)
            dir_ok = via_dirac == expected
            reports.append(report(
                f"christoffel_dirac[m={m},n={n}]", dir_ok, str(expected),
                str(via_dirac) if not dir_ok else str(expected)))
    return reports


def check_jacobi(params: ScenarioParams, triple=(1, 2, -3)) -> list:
    """Jacobi identity spot check on nested commutators of three generators."""
    trunc = params.trunc
    algebra = params.algebra
    ops = {m: _gen(params.family, m, params.M, params.lam) for m in triple}
    la, lb, lc = (ops[m] for m in triple)
    partials = []
    for i in triple:
        partials.append(Fraction(i))
    aa, bb, cc = partials
    sums = (aa, bb, cc, aa + bb, aa + cc, bb + cc, aa + bb + cc)

    def nested(x, y, z, psi):
        # [[X, Y], Z] psi for even operators
        vec = StateVector.basis(algebra, psi)
        zpsi = apply_operator(z, vec, trunc)
        xpsi = apply_operator(x, vec, trunc)
        ypsi = apply_operator(y, vec, trunc)
        return (apply_operator(x, apply_operator(y, zpsi, trunc), trunc)
                - apply_operator(y, apply_operator(x, zpsi, trunc), trunc)
                - apply_operator(z, apply_operator(x, ypsi, trunc), trunc)
                + apply_operator(z, apply_operator(y, xpsi, trunc), trunc))

    ok, witness = True, None
    for psi in enumerate_basis(algebra, trunc):
        if not is_safe_state(psi, sums, algebra, trunc, zero_uses=3):
            continue
        total = (nested(la, lb, lc, psi) + nested(lb, lc, la, psi)
                 + nested(lc, la, lb, psi))
        if not total.is_zero():
            ok, witness = False, psi
            break
    return [report(f"jacobi[{triple[0]},{triple[1]},{triple[2]}]", ok, "0",
                   "0" if ok else "nonzero", "" if ok else str(witness))]


def check_window_doubling(params: ScenarioParams, probes: int = 100, seed: int = 7) -> list:
    """Widening the kernel window beyond level_cap + |m| must change nothing."""
    trunc = params.trunc
    algebra = params.algebra
    rng = random.Random(seed)
    states = enumerate_basis(algebra, trunc)
    labels = [m for m in range(-params.m_range, params.m_range + 1)]
    ok, witness = True, None
    for _ in range(probes):
        m = rng.choice(labels)
        op = _gen(params.family, m, params.M, params.lam)
        pool = [s for s in states if is_safe_state(s, (op.shift,), algebra, trunc, zero_uses=1)]
        psi = rng.choice(pool)
        vec = StateVector.basis(algebra, psi)
        narrow = apply_operator(op, vec, trunc)
        wide = apply_operator(op, vec, trunc, window=2 * (trunc.level_cap + abs(op.shift)))
        if narrow != wide:
            ok, witness = False, (m, psi)
            break
    return [report(f"window_doubling[{probes} probes]", ok, "identical action",
                   "identical action" if ok else "differs", "" if ok else str(witness))]


def run_family_scenario(params: ScenarioParams):
    """Full verification suite for one generator family at one parameter point.

    Returns (reports, c_formula, c_oracle).
    """
    c_formula = claimed_central_charge(params.family, params.M, params.lam)
    c_oracle = extract_central_charge(params)
    reports = [report("central_charge", c_formula == c_oracle,
                      format_rational(c_formula), format_rational(c_oracle))]
    reports += check_virasoro_relation(params, c_formula)
    reports += check_primary_laws(params)
    reports += check_christoffel(params)
    reports += check_jacobi(params)
    reports += check_window_doubling(params)
    return reports, c_formula, c_oracle


def run_dirac_checks(M=Fraction(1), window: Window = None) -> list:
    """Constraint-machinery suite: inversion contract, bracket tables,
    classification, and generator compatibility for both families."""
    window = window or Window(8)
    N = window.half_width
    M = Fraction(M)
    reports = []

    bos = boson_constraints(M, with_zero_gauge=True)
    fer = fermion_constraints()

    for name, fam in (("boson", bos), ("fermion", fer)):
        bad = delta_contract_residuals(fam, window)
        reports.append(report(f"delta_contract[{name},N={N}]", not bad,
                              "identity", "identity" if not bad else str(bad[:3])))

    # closed-form bracket matrix against the one recomputed from expressions
    agree = all(bos.c_entry(p, r) == bos.computed_c_entry(p, r)
                for p in bos.labels(window) for r in bos.labels(window))
    agree &= all(fer.c_entry(p, r) == fer.computed_c_entry(p, r)
                 for p in fer.labels(window) for r in fer.labels(window))
    reports.append(report(f"bracket_matrix_closed_form[N={N}]", agree,
                          "matches expressions", "matches" if agree else "mismatch"))

    # Dirac bracket tables
    bad = []
    balg = bos.algebra
    for m in range(-N, N + 1):
        for n in range(-N, N + 1):
            want = -(M / 2) * m if m + n == 0 else ZERO
            got = dirac_bracket(mode_operator(balg, adag(m)), mode_operator(balg, adag(n)), bos)
            if got != want:
                bad.append((m, n, got))
    for x, y in ((adag(0), adag(0)), (adag(0), a(0)), (a(0), a(0))):
        got = dirac_bracket(mode_operator(balg, x), mode_operator(balg, y), bos)
        if got != 0:
            bad.append((str(x), str(y), got))
    reports.append(report(f"dirac_bracket_boson[N={N}]", not bad,
                          "-(M/2) m delta(m+n), zero modes 0",
                          "as expected" if not bad else str(bad[:3])))

    bad = []
    falg = fer.algebra
    half = [Fraction(t, 2) for t in range(-2 * N + 1, 2 * N, 2)]
    for r in half:
        for s in half:
            want = Fraction(1, 2) if r + s == 0 else ZERO
            got = dirac_bracket(mode_operator(falg, b(r)), mode_operator(falg, b(s)), fer)
            if got != want:
                bad.append((r, s, got))
    reports.append(report(f"dirac_bracket_fermion[N={N}]", not bad,
                          "(1/2) delta(r+s)", "as expected" if not bad else str(bad[:3])))

    # classification
    split = classify(boson_constraints(M, with_zero_gauge=False), window)
    ok = split.first_class == [0] and 0 not in split.second_class
    reports.append(report("classify[boson,no-gauge]", ok, "chi[0] first class",
                          str(split.first_class)))
    split = classify(bos, window)
    reports.append(report("classify[boson,gauged]", not split.first_class,
                          "all second class", "all second class" if not split.first_class
                          else str(split.first_class)))
    split = classify(even_fermion_copy_constraints(), window)
    ok = not split.second_class and len(split.first_class) == 2 * N
    reports.append(report("classify[even-copy]", ok, "C=0, all first class",
                          "all first class" if ok else str(split.second_class)))

    # generator compatibility with the constraint ideal
    for m in range(-5, 6):
        lm = build_L("boson-unconstrained", m, M, Fraction(1, 2))
        reports += verify_compatibility(lm, bos, range(-5, 6))
    half5 = [Fraction(t, 2) for t in range(-9, 10, 2)]
    for m in range(-5, 6):
        lm = build_L("fermion-unconstrained", m, 0, Fraction(1, 2))
        reports += verify_compatibility(lm, fer, half5)
    incompatible = [r for m in (1, 2)
                    for r in verify_compatibility(build_L("fermion-unconstrained", m, 0, 0),
                                                  fer, half5)
                    if r.status == "fail"]
    reports.append(report("incompatibility_detected[fermion,lambda=0]", bool(incompatible),
                          "transforms leave the constraint ideal",
                          "detected" if incompatible else "not detected"))

    reports += mode_compatibility_reports(bos, window)
    reports += mode_compatibility_reports(fer, window)
    return reports
