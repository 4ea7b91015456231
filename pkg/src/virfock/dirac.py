"""Constraint families, classification, and the graded Dirac bracket.

A constraint family is an indexed set of linear constraints chi_P with a
graded-antisymmetric bracket matrix C_PR = [chi_P, chi_R}.  When C is
invertible (all constraints second class) its inverse Delta obeys the sign
convention

    (-1)^{p(R)} Delta^{PR} C_RS = delta^P_S

and the Dirac bracket is

    [A, B]* = [A, B] - (-1)^{p(R)} [A, chi_P] Delta^{PR} [chi_R, B].

The two families of interest are infinite but banded (C couples P with -P,
plus one zero-mode pair), so Delta has a registered closed form; windowed
exact elimination must reproduce it entry by entry and is also available for
finite user families.  All P, R sums in the Dirac bracket run over their
exact, finite support, computed from the modes present in A and B; nothing
is ever sampled.

Families:

* boson constraints: chi_m = a†[m] - M m a[m] for integer m, optionally
  extended by the gauge-fixing zero-mode constraint a[0] (label "a0").
  Without "a0" the label 0 has an identically zero bracket row and is first
  class; with it, all constraints are second class.
* fermion constraints: chi_r = b[r] - b†[r] for half-odd r, with
  C_rs = -2 delta(r+s), second class.
* even copy of the fermion constraints over the bosonized pair: the engine
  discovers C = 0 identically, the spin-statistics degeneracy.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .algebra import (
    AlgebraMismatchError,
    BOSON,
    BOSONIZED_FERMION,
    FERMION,
    FieldKind,
    Mode,
    VirfockError,
    ZERO,
    adag,
    b,
    bdag,
    even_b,
    even_bdag,
    format_rational,
)
from .operators import (
    OperatorSpec,
    build_chi_bar0,
    build_chi_boson,
    build_L,
    commutator_with_linear,
    linear_bracket,
    linear_operator,
    mode_operator,
)
from .report import report

ZERO_GAUGE_LABEL = "a0"


class SingularBlockError(VirfockError):
    """The putative second-class block is not invertible over the window."""


class NotSecondClassError(VirfockError):
    """Dirac brackets require a fully second-class family."""


@dataclass(frozen=True)
class Window:
    """Finite probe of an infinite banded family: |doubled index| <= 2N."""

    half_width: int

    def __post_init__(self):
        if self.half_width < 1:
            raise ValueError("window half-width must be positive")


@dataclass(frozen=True)
class ConstraintFamily:
    style: str  # "boson" | "fermion" | "even-copy" | "finite"
    M: Fraction | None = None
    with_zero_gauge: bool = True
    members: tuple = ()  # finite user families: ((label, expr), ...)

    @property
    def algebra(self):
        if self.style == "finite":
            return self.members[0][1].algebra
        return {"boson": BOSON, "fermion": FERMION, "even-copy": BOSONIZED_FERMION}[self.style]

    @property
    def fully_second_class(self) -> bool:
        if self.style == "boson":
            return self.with_zero_gauge
        if self.style == "finite":
            try:
                _finite_delta(self)
                return True
            except (SingularBlockError, NotSecondClassError):
                return False
        return self.style == "fermion"

    def labels(self, window: Window):
        if self.style == "boson":
            out = list(range(-window.half_width, window.half_width + 1))
            if self.with_zero_gauge:
                out.append(ZERO_GAUGE_LABEL)
            return out
        if self.style == "finite":
            return [label for label, _ in self.members]
        return [Fraction(t, 2) for t in range(-2 * window.half_width + 1,
                                              2 * window.half_width, 2)]

    def parity(self, label) -> int:
        if self.style == "finite":
            return self.expr(label).parity
        return 1 if self.style == "fermion" else 0

    def expr(self, label) -> OperatorSpec:
        if self.style == "finite":
            for name, spec in self.members:
                if name == label:
                    return spec
            raise KeyError(f"no constraint labelled {label!r}")
        return _family_expr(self, label)

    def label_of_expr(self, label) -> str:
        return ZERO_GAUGE_LABEL if label == ZERO_GAUGE_LABEL else f"chi[{label}]"

    def c_entry(self, p, r) -> Fraction:
        """Bracket matrix entry C_PR; closed form where registered."""
        if self.style == "boson":
            if p == ZERO_GAUGE_LABEL and r == ZERO_GAUGE_LABEL:
                return ZERO
            if p == ZERO_GAUGE_LABEL:
                return Fraction(-1) if r == 0 else ZERO
            if r == ZERO_GAUGE_LABEL:
                return Fraction(1) if p == 0 else ZERO
            return 2 * self.M * p if p + r == 0 else ZERO
        if self.style == "fermion":
            return Fraction(-2) if p + r == 0 else ZERO
        # even copy and finite user families: computed from the expressions
        return linear_bracket(self.expr(p), self.expr(r))

    def computed_c_entry(self, p, r) -> Fraction:
        """C_PR recomputed from the constraint expressions and canonical brackets."""
        return linear_bracket(self.expr(p), self.expr(r))

    def delta_entry(self, p, r) -> Fraction:
        """Inverse entry Delta^PR: closed form for the banded families,
        exact elimination for finite ones (second class required)."""
        self._require_second_class()
        if self.style == "boson":
            if p == ZERO_GAUGE_LABEL:
                return Fraction(1) if r == 0 else ZERO
            if r == ZERO_GAUGE_LABEL:
                return Fraction(-1) if p == 0 else ZERO
            if p == 0 or r == 0 or p + r != 0:
                return ZERO
            return Fraction(-1) / (2 * self.M * p)
        if self.style == "finite":
            return _finite_delta(self).get((p, r), ZERO)
        return Fraction(1, 2) if p + r == 0 else ZERO

    def delta_row(self, p):
        """Nonzero (R, Delta^PR) partners of a fixed first label."""
        self._require_second_class()
        if self.style == "boson":
            if p == ZERO_GAUGE_LABEL:
                return ((0, Fraction(1)),)
            if p == 0:
                return ((ZERO_GAUGE_LABEL, Fraction(-1)),)
            return ((-p, Fraction(-1) / (2 * self.M * p)),)
        if self.style == "finite":
            delta = _finite_delta(self)
            return tuple((r, v) for (pp, r), v in delta.items() if pp == p)
        return ((-p, Fraction(1, 2)),)

    def delta_col(self, r):
        """Nonzero (P, Delta^PR) partners of a fixed second label."""
        self._require_second_class()
        if self.style == "boson":
            if r == ZERO_GAUGE_LABEL:
                return ((0, Fraction(-1)),)
            if r == 0:
                return ((ZERO_GAUGE_LABEL, Fraction(1)),)
            return ((-r, Fraction(1) / (2 * self.M * r)),)
        if self.style == "finite":
            delta = _finite_delta(self)
            return tuple((p, v) for (p, rr), v in delta.items() if rr == r)
        return ((-r, Fraction(1, 2)),)

    def support_labels(self, expr: OperatorSpec):
        """Every label P with [expr, chi_P] possibly nonzero; exact, not sampled."""
        if self.style == "finite":
            return [label for label, _ in self.members]
        out = set()
        for mode, _ in expr.linear:
            if self.style == "boson":
                out.add(int(-mode.index))
                if mode.two == 0:
                    out.add(ZERO_GAUGE_LABEL)
            else:
                out.add(-mode.index)
        return out

    def _require_second_class(self):
        if not self.fully_second_class:
            raise NotSecondClassError(
                f"{self.style} constraint family is not fully second class; "
                "add gauge conditions (for the boson family, include the a[0] constraint)")


def boson_constraints(M, with_zero_gauge=True) -> ConstraintFamily:
    M = Fraction(M)
    if M == 0:
        raise ValueError("boson constraint family needs M != 0 (C scales with M)")
    return ConstraintFamily("boson", M, with_zero_gauge)


def fermion_constraints() -> ConstraintFamily:
    return ConstraintFamily("fermion", None, False)


def even_fermion_copy_constraints() -> ConstraintFamily:
    """The fermionic constraint shape with bosonic statistics; degenerates to C = 0."""
    return ConstraintFamily("even-copy", None, False)


def finite_constraints(members) -> ConstraintFamily:
    """User-supplied finite family: an iterable of (label, linear expression).

    C is computed from the expressions; Delta comes from exact elimination
    when the family is second class.
    """
    members = tuple(members)
    if not members:
        raise ValueError("a finite constraint family needs at least one member")
    algebra = members[0][1].algebra
    for label, spec in members:
        if not spec.is_linear:
            raise ValueError(f"constraint {label!r} is not a linear expression")
        if spec.algebra != algebra:
            raise AlgebraMismatchError("finite family mixes algebras")
    return ConstraintFamily("finite", None, False, members)


@lru_cache(maxsize=None)
def _finite_delta(family: ConstraintFamily) -> dict:
    """Exact Delta of a finite family; raises when it is not second class."""
    labels = [label for label, _ in family.members]
    rows = {p: [family.c_entry(p, r) for r in labels] for p in labels}
    dead = [p for p in labels if not any(rows[p])]
    if dead:
        raise NotSecondClassError(
            f"constraints {dead} have identically zero bracket rows (first class)")
    signed = [[(-1 if family.parity(r) else 1) * rows[r][j]
               for j, _ in enumerate(labels)] for r in labels]
    inverse = _invert_exact(signed)
    return {(p, r): inverse[i][j]
            for i, p in enumerate(labels) for j, r in enumerate(labels)
            if inverse[i][j]}


@lru_cache(maxsize=None)
def _family_expr(family: ConstraintFamily, label) -> OperatorSpec:
    if family.style == "boson":
        if label == ZERO_GAUGE_LABEL:
            return build_chi_bar0()
        return build_chi_boson(int(label), family.M)
    if family.style == "fermion":
        r = Fraction(label)
        return linear_operator(FERMION, {b(r): 1, bdag(r): -1}, shift=r, parity=1)
    r = Fraction(label)
    return linear_operator(BOSONIZED_FERMION, {even_b(r): 1, even_bdag(r): -1},
                           shift=r, parity=0)


@dataclass
class Classification:
    first_class: list
    second_class: list


def classify(family: ConstraintFamily, window: Window) -> Classification:
    """Split windowed constraints into first class (zero bracket row) and second class.

    The rest must form an invertible block, otherwise SingularBlockError.
    Exact zero rows, no rank tolerances: the arithmetic is exact.
    """
    labels = family.labels(window)
    first, second = [], []
    for p in labels:
        if all(family.c_entry(p, r) == 0 for r in labels):
            first.append(p)
        else:
            second.append(p)
    if second:
        matrix = [[family.c_entry(p, r) for r in second] for p in second]
        try:
            _invert_exact(matrix)
        except SingularBlockError as exc:
            raise SingularBlockError(
                f"putative second-class block of {family.style} family is singular "
                f"on window N={window.half_width}: {exc}") from exc
    return Classification(first, second)


def _invert_exact(matrix):
    """Exact Gauss-Jordan inverse of a square Fraction matrix."""
    n = len(matrix)
    aug = [list(row) + [Fraction(1) if i == j else ZERO for j in range(n)]
           for i, row in enumerate(matrix)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col]), None)
        if pivot is None:
            raise SingularBlockError(f"no pivot in column {col}")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [v * inv for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [v - f * w for v, w in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def invert_c(family: ConstraintFamily, window: Window) -> dict:
    """Windowed exact inverse Delta with (-1)^p(R) Delta^PR C_RS = delta^P_S.

    Requires the family fully second class on the window.  When a closed form
    is registered the elimination must agree with it entry by entry; a
    mismatch is an engine bug and raises.
    """
    split = classify(family, window)
    if split.first_class:
        raise SingularBlockError(
            f"first-class constraints {split.first_class} present; "
            "the bracket matrix is not invertible")
    labels = split.second_class
    signed = [[(-1 if family.parity(r) else 1) * family.c_entry(r, s) for s in labels]
              for r in labels]
    inverse = _invert_exact(signed)
    delta = {}
    for i, p in enumerate(labels):
        for j, r in enumerate(labels):
            val = inverse[i][j]
            if val:
                delta[(p, r)] = val
    if family.fully_second_class and family.style in ("boson", "fermion"):
        for i, p in enumerate(labels):
            for j, r in enumerate(labels):
                if inverse[i][j] != family.delta_entry(p, r):
                    raise VirfockError(
                        f"windowed inversion disagrees with the closed form at ({p},{r}): "
                        f"{inverse[i][j]} vs {family.delta_entry(p, r)}")
    return delta


def delta_contract_residuals(family: ConstraintFamily, window: Window):
    """All (P,S) with sum_R (-1)^p(R) Delta^PR C_RS != delta^P_S on the window."""
    labels = family.labels(window)
    delta = invert_c(family, window)
    bad = []
    for p in labels:
        for s in labels:
            total = ZERO
            for r in labels:
                d = delta.get((p, r), ZERO)
                if d:
                    sign = -1 if family.parity(r) else 1
                    total += sign * d * family.c_entry(r, s)
            want = Fraction(1) if p == s else ZERO
            if total != want:
                bad.append((p, s, total))
    return bad


def dirac_bracket(A: OperatorSpec, B: OperatorSpec, family: ConstraintFamily) -> Fraction:
    """Graded Dirac bracket of two linear expressions; a scalar.

    The P, R sums run over their exact finite support (C and Delta are
    banded and A, B are finite).
    """
    if not (A.is_linear and B.is_linear):
        raise ValueError("dirac_bracket of non-linear expressions; "
                         "use the reduced algebras for bilinears")
    if A.algebra != family.algebra or B.algebra != family.algebra:
        raise AlgebraMismatchError("expressions do not belong to the family's algebra")
    family._require_second_class()
    base = linear_bracket(A, B)
    corr = ZERO
    for p in family.support_labels(A):
        bra = linear_bracket(A, family.expr(p))
        if not bra:
            continue
        for r, d_pr in family.delta_row(p):
            ket = linear_bracket(family.expr(r), B)
            if ket:
                sign = -1 if family.parity(r) else 1
                corr += sign * bra * d_pr * ket
    return base - corr


def dirac_op_bracket(op: OperatorSpec, B: OperatorSpec, family: ConstraintFamily) -> OperatorSpec:
    """Dirac bracket of an operator (bilinear allowed) with a linear expression.

    [op, chi_P] is then itself a linear expression; the R sum is anchored on
    the finite support of [chi_R, B].
    """
    if not B.is_linear:
        raise ValueError("second argument must be linear")
    family._require_second_class()
    result = commutator_with_linear(op, B)
    for r in family.support_labels(B):
        ket = linear_bracket(family.expr(r), B)
        if not ket:
            continue
        sign = -1 if family.parity(r) else 1
        for p, d_pr in family.delta_col(r):
            bra = commutator_with_linear(op, family.expr(p))
            result = result - (sign * d_pr * ket) * bra
    return result


def solve_boson_constraints(expr: OperatorSpec, M) -> OperatorSpec:
    """Substitute the solved constraints into a linear boson expression.

    chi_m = 0 solves to a[m] = a†[m]/(M m) for m != 0; both zero modes are
    set to zero (a[0] by its own constraint, a†[0] = chi_0 = 0).
    """
    M = Fraction(M)
    if M == 0:
        raise ValueError("solving the boson constraints needs M != 0")
    out = {}
    for mode, c in expr.linear:
        if mode.two == 0:
            continue
        if mode.kind is FieldKind.A:
            target = adag(mode.index)
            out[target] = out.get(target, ZERO) + c / (M * mode.index)
        else:
            out[mode] = out.get(mode, ZERO) + c
    return OperatorSpec(BOSON, expr.shift, (), tuple(sorted(
        ((m, c) for m, c in out.items() if c), key=lambda mc: mc[0].sort_key)),
        expr.constant, expr.parity)


def dirac_transform_adagger(m: int, n: int, M, lam) -> OperatorSpec:
    """Dirac bracket [L_m, a†[n]]* with the constraints solved in.

    Built through the full Dirac machinery from the unconstrained boson
    generator; the result must equal n a†[m+n] - M lam m (m+1) delta(m+n),
    with a†[0] dropped.
    """
    M = Fraction(M)
    if M == 0:
        raise ValueError("the reduced boson bracket needs M != 0 (1/M kernel)")
    family = boson_constraints(M, with_zero_gauge=True)
    op = build_L("boson-unconstrained", m, M, lam)
    raw = dirac_op_bracket(op, mode_operator(BOSON, adag(n)), family)
    return solve_boson_constraints(raw, M)


def verify_compatibility(op: OperatorSpec, family: ConstraintFamily, index_range,
                         window: Window | None = None):
    """Check that a generator preserves the constraint ideal.

    (i) [op, chi_n] must equal the stated multiple of chi at the shifted
    label: n chi[m+n] for the boson family, (m/2 + r) chi[m+r] for the
    fermion family (which holds only at lambda = 1/2; other lambdas are
    reported as incompatible).  (ii) With a window, additionally checks
    dirac_bracket(x, chi) = 0 for every basic mode x in the window.
    """
    m = op.shift
    reports = []
    for label in index_range:
        chi = family.expr(label)
        got = commutator_with_linear(op, chi)
        target_label = label + (int(m) if family.style == "boson" else Fraction(m))
        target = family.expr(target_label)
        coeff = Fraction(label) if family.style == "boson" else Fraction(m) / 2 + Fraction(label)
        expected = coeff * target
        ok = got == expected
        reports.append(report(
            f"chi_transform[m={m},n={label}]", ok,
            f"{format_rational(coeff)}·{family.label_of_expr(target_label)}",
            str(got) if not ok else f"{format_rational(coeff)}·{family.label_of_expr(target_label)}"))
    if window is not None:
        reports.extend(mode_compatibility_reports(family, window))
    return reports


def mode_compatibility_reports(family: ConstraintFamily, window: Window):
    """dirac_bracket(x, chi_R) = 0 for every basic mode x and windowed constraint."""
    algebra = family.algebra
    modes = []
    for kind in algebra.kinds:
        start = 1 if kind.half_integer_moded else 0
        for two in range(start, 2 * window.half_width + 1, 2):
            modes.append(Mode(kind, two))
            if two:
                modes.append(Mode(kind, -two))
    reports = []
    bad = []
    for x in sorted(modes, key=lambda mm: mm.sort_key):
        for label in family.labels(window):
            val = dirac_bracket(mode_operator(algebra, x), family.expr(label), family)
            if val:
                bad.append((x, label, val))
    reports.append(report(
        f"dirac_mode_compatibility[N={window.half_width}]", not bad, "0",
        "0" if not bad else "; ".join(f"[{x},{family.label_of_expr(lb)}]*={format_rational(v)}"
                                      for x, lb, v in bad[:4])))
    return reports
