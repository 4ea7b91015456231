"""Normal-ordered operator families and their exact truncated action.

An OperatorSpec is a sum of bilinear mode families, a linear part and a
constant.  Each bilinear family stands for

    sum over r of (alpha + beta*r) :X[m-r] Y[r]:

with the coefficient affine in the summation index r; that is general enough
for every generator built here.  Normal ordering :X Y: moves annihilating
modes (negative index, and the boson zero mode a[0]) to the right, with a
-1 for each transposition of two odd modes.  Realized terms whose modes do
not exist in the algebra (the reduced boson has no zero mode) are skipped;
the skip is decided when the symbolic kernel is expanded, which is the only
point where individual terms exist at all.

Truncated application realizes the kernel over the window |r| <= level_cap
+ |m|.  Any term acting nontrivially inside the truncation has either its
annihilating factor bounded by the state level (|r| <= level_cap, possibly
through the swap X <-> Y) or both factors creating (|r| < |m|), so the
window provably contains every contribution; widening it can only add terms
that act as zero.

commutator_action evaluates graded commutators on basis states restricted
to the safe window

    level + max(0, m, n, m+n) <= level_cap      (labels m, n of the pair)
    zero_occ + 2 <= zero_mode_cap               (zero-moded algebras only)

inside which the level grading guarantees the truncated evaluation equals
the untruncated one exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

from .algebra import (
    Algebra,
    AlgebraMismatchError,
    BOSON,
    FERMION,
    FieldKind,
    Mode,
    REDUCED_FERMION,
    VirfockError,
    ZERO,
    a,
    adag,
    canonical_bracket,
    is_creator,
    format_rational,
    red_adag,
    reduced_boson,
)
from .fock import BasisState, StateVector, Truncation, apply_mode


class UnsafeLevelError(VirfockError):
    """A commutator probe state violates the safe-window rule."""


FAMILIES = (
    "boson-unconstrained",
    "boson-reduced",
    "fermion-unconstrained",
    "fermion-reduced",
)


def algebra_for(family: str, M=0) -> Algebra:
    if family == "boson-unconstrained":
        return BOSON
    if family == "boson-reduced":
        return reduced_boson(M)
    if family == "fermion-unconstrained":
        return FERMION
    if family == "fermion-reduced":
        return REDUCED_FERMION
    raise ValueError(f"unknown generator family {family!r}")


class BilinearTerm(NamedTuple):
    """sum_r (alpha + beta*r) :left[m-r] right[r]: with m the total index."""

    left: FieldKind
    right: FieldKind
    m: int
    alpha: Fraction
    beta: Fraction


def _norm_linear(items) -> tuple:
    acc = {}
    pairs = items.items() if isinstance(items, dict) else items
    for mode, c in pairs:
        c = Fraction(c)
        if not c:
            continue
        acc[mode] = acc.get(mode, ZERO) + c
    return tuple(sorted(((m, c) for m, c in acc.items() if c),
                        key=lambda mc: mc[0].sort_key))


@dataclass(frozen=True)
class OperatorSpec:
    """A normal-ordered operator expression over one algebra.

    shift is the level the operator adds to any homogeneous state (the
    generator label m); parity is the Z2 grading controlling commutator
    versus anticommutator.
    """

    algebra: Algebra
    shift: Fraction
    bilinears: tuple = ()
    linear: tuple = ()
    constant: Fraction = ZERO
    parity: int = 0

    @property
    def is_linear(self) -> bool:
        return not self.bilinears

    @property
    def is_constant_only(self) -> bool:
        return not self.bilinears and not self.linear

    def linear_dict(self):
        return dict(self.linear)

    def coeff(self, mode: Mode) -> Fraction:
        return self.linear_dict().get(mode, ZERO)

    def __add__(self, other: "OperatorSpec") -> "OperatorSpec":
        if self.algebra != other.algebra:
            raise AlgebraMismatchError("cannot add operators over different algebras")
        if self.is_constant_only:
            shift, parity = other.shift, other.parity
        elif other.is_constant_only:
            shift, parity = self.shift, self.parity
        else:
            if self.shift != other.shift:
                raise ValueError("adding operators of different level shift breaks homogeneity")
            if self.parity != other.parity:
                raise ValueError("adding operators of different parity")
            shift, parity = self.shift, self.parity
        bil = {}
        for t in self.bilinears + other.bilinears:
            key = (t.left, t.right, t.m)
            prev = bil.get(key)
            bil[key] = (prev[0] + t.alpha, prev[1] + t.beta) if prev else (t.alpha, t.beta)
        bilinears = tuple(BilinearTerm(l, r, m, al, be)
                          for (l, r, m), (al, be) in sorted(bil.items(),
                                                            key=lambda kv: (kv[0][0].value, kv[0][1].value, kv[0][2]))
                          if al or be)
        return OperatorSpec(self.algebra, shift, bilinears,
                            _norm_linear(self.linear + other.linear),
                            self.constant + other.constant, parity)

    def __sub__(self, other):
        return self + (-1) * other

    def __rmul__(self, scalar) -> "OperatorSpec":
        scalar = Fraction(scalar)
        if not scalar:
            return OperatorSpec(self.algebra, self.shift, (), (), ZERO, self.parity)
        return OperatorSpec(
            self.algebra, self.shift,
            tuple(BilinearTerm(t.left, t.right, t.m, scalar * t.alpha, scalar * t.beta)
                  for t in self.bilinears),
            tuple((m, scalar * c) for m, c in self.linear),
            scalar * self.constant, self.parity)

    def __neg__(self):
        return (-1) * self

    def __str__(self):
        bits = []
        for t in self.bilinears:
            bits.append(f"sum_r ({format_rational(t.alpha)} + {format_rational(t.beta)}r) "
                        f":{t.left.symbol}[{t.m}-r]{t.right.symbol}[r]:")
        for mode, c in self.linear:
            bits.append(f"{format_rational(c)}·{mode}")
        if self.constant or not bits:
            bits.append(format_rational(self.constant))
        return " + ".join(bits).replace("+ -", "- ")


def linear_operator(algebra: Algebra, mapping, constant=0, shift=None, parity=None) -> OperatorSpec:
    """Build a linear expression c_x * x + constant as an OperatorSpec.

    Modes must carry one parity (homogeneity invariant).  The level shift is
    inferred when all modes sit at one level.
    """
    linear = _norm_linear(mapping)
    parities = {m.parity for m, _ in linear}
    if len(parities) > 1:
        raise ValueError("linear expression mixes parities; homogeneous parity required")
    if parity is None:
        parity = parities.pop() if parities else 0
    if shift is None:
        levels = {m.index for m, _ in linear}
        if len(levels) > 1:
            raise ValueError("cannot infer the level shift of an inhomogeneous expression")
        shift = levels.pop() if levels else ZERO
    for mode, _ in linear:
        if mode.kind not in algebra.kinds:
            raise AlgebraMismatchError(f"mode {mode} does not belong to {algebra}")
    return OperatorSpec(algebra, Fraction(shift), (), linear, Fraction(constant), parity)


def mode_operator(algebra: Algebra, x: Mode) -> OperatorSpec:
    return linear_operator(algebra, {x: 1})


def build_B(m: int, M) -> OperatorSpec:
    """a†[m] + M*m*a[m] over the unconstrained boson algebra."""
    M = Fraction(M)
    return linear_operator(BOSON, {adag(m): 1, a(m): M * m}, shift=m, parity=0)


def build_chi_boson(m: int, M) -> OperatorSpec:
    """Constraint a†[m] - M*m*a[m]."""
    M = Fraction(M)
    return linear_operator(BOSON, {adag(m): 1, a(m): -M * m}, shift=m, parity=0)


def build_chi_bar0() -> OperatorSpec:
    """The extra zero-mode constraint a[0], which makes the boson family fully second class."""
    return linear_operator(BOSON, {a(0): 1}, shift=0, parity=0)


def build_K(m: int) -> OperatorSpec:
    """sum_r r :a†[m-r] a[r]: over the unconstrained boson algebra."""
    term = BilinearTerm(FieldKind.ADAG, FieldKind.A, int(m), ZERO, Fraction(1))
    return OperatorSpec(BOSON, Fraction(m), (term,))


def build_L(family: str, m: int, M=0, lam=0) -> OperatorSpec:
    """The Virasoro generator labelled m of one of the four families.

    boson-unconstrained   K[m] + lam*(m+1)*(a†[m] + M*m*a[m])
    boson-reduced         sum_r (1/M) :a†[m-r]a†[r]: + 2*lam*(m+1)*a†[m],
                          every a†[0] factor skipped (M must be nonzero)
    fermion-unconstrained -sum_r (-lam*m + r) :b†[m-r] b[r]:
    fermion-reduced       -sum_r (-m/2 + r) :b[m-r] b[r]:
    """
    m = int(m)
    M = Fraction(M)
    lam = Fraction(lam)
    if family == "boson-unconstrained":
        return build_K(m) + (lam * (m + 1)) * build_B(m, M)
    if family == "boson-reduced":
        algebra = algebra_for(family, M)  # raises for M = 0
        term = BilinearTerm(FieldKind.RED_ADAG, FieldKind.RED_ADAG, m, 1 / M, ZERO)
        lin = {}
        if m != 0 and lam:
            lin[red_adag(m)] = 2 * lam * (m + 1)
        return OperatorSpec(algebra, Fraction(m), (term,), _norm_linear(lin))
    if family == "fermion-unconstrained":
        term = BilinearTerm(FieldKind.BDAG, FieldKind.B, m, lam * m, Fraction(-1))
        # Zero-mode normal-ordering constant.  On the half-odd-integer mode
        # lattice the kernel's subtraction point sits at r = 0, not at the
        # weight-lam Fourier origin, so L_0 must carry -(1-2*lam)^2/8 for the
        # commutator anomaly to close on the (m^3 - m) shape (it vanishes at
        # lam = 1/2, where the lattice and the weight agree).
        const = -((1 - 2 * lam) ** 2) / 8 if m == 0 else ZERO
        return OperatorSpec(FERMION, Fraction(m), (term,), (), const)
    if family == "fermion-reduced":
        term = BilinearTerm(FieldKind.RED_B, FieldKind.RED_B, m, Fraction(m, 2), Fraction(-1))
        return OperatorSpec(REDUCED_FERMION, Fraction(m), (term,))
    raise ValueError(f"unknown generator family {family!r}")


def _mode_exists(kind: FieldKind, two: int) -> bool:
    # the reduced boson algebra has no zero mode; everything else is populated
    return not (kind is FieldKind.RED_ADAG and two == 0)


@lru_cache(maxsize=None)
def _realized(term: BilinearTerm, algebra: Algebra, width: Fraction):
    """Expand a bilinear kernel over |r| <= width into ordered mode pairs.

    Yields (coefficient, first, second) with `first` applied first; the
    coefficient absorbs the normal-ordering sign.
    """
    out = []
    two_m = 2 * term.m
    odd_bit = 1 if term.left.half_integer_moded else 0
    two_w = math.floor(2 * width)
    for two_r in range(-two_w, two_w + 1):
        if (two_r & 1) != odd_bit:
            continue
        r = Fraction(two_r, 2)
        coeff = term.alpha + term.beta * r
        if not coeff:
            continue
        if not (_mode_exists(term.left, two_m - two_r) and _mode_exists(term.right, two_r)):
            continue
        x = Mode(term.left, two_m - two_r)
        y = Mode(term.right, two_r)
        if not is_creator(x) and is_creator(y):
            sign = -1 if (x.parity and y.parity) else 1
            out.append((coeff * sign, x, y))
        else:
            out.append((coeff, y, x))
    return tuple(out)


@lru_cache(maxsize=None)
def _apply_to_basis(op: OperatorSpec, state: BasisState, trunc: Truncation, width: Fraction):
    base = StateVector.basis(op.algebra, state)
    acc = {}

    def merge(vec: StateVector, scale: Fraction):
        for s, q in vec.amp.items():
            val = acc.get(s, ZERO) + scale * q
            if val:
                acc[s] = val
            else:
                acc.pop(s, None)

    for term in op.bilinears:
        for coeff, first, second in _realized(term, op.algebra, width):
            tmp = apply_mode(first, base, trunc)
            if tmp.is_zero():
                continue
            merge(apply_mode(second, tmp, trunc), coeff)
    for mode, c in op.linear:
        merge(apply_mode(mode, base, trunc), c)
    if op.constant:
        merge(base, op.constant)
    return tuple(acc.items())


def apply_operator(op: OperatorSpec, v: StateVector, trunc: Truncation, window=None) -> StateVector:
    """Apply an operator to a state vector, exactly, within the truncation.

    window overrides the summation half-width (default level_cap + |m|,
    which provably contains every contributing term).  Overflow beyond the
    truncation propagates as TruncationOverflowError.
    """
    if op.algebra != v.algebra:
        raise AlgebraMismatchError("operator and vector belong to different algebras")
    width = Fraction(window) if window is not None else trunc.level_cap + abs(op.shift)
    acc = {}
    for state, q in v.amp.items():
        for new_state, w in _apply_to_basis(op, state, trunc, width):
            val = acc.get(new_state, ZERO) + q * w
            if val:
                acc[new_state] = val
            else:
                acc.pop(new_state, None)
    out = StateVector(v.algebra)
    out.amp = acc
    return out


def is_safe_state(state: BasisState, shifts, algebra: Algebra, trunc: Truncation,
                  zero_uses: int = 2) -> bool:
    """Safe-window rule for a composite of operators with the given level shifts.

    For a pair (m, n) the partial shifts are {0, m, n, m+n}; a state is safe
    when its level plus the largest partial shift stays within the cap (and
    the zero-mode occupancy leaves room for `zero_uses` more quanta on
    zero-moded algebras).  Inside this window a truncated commutator equals
    the untruncated one exactly, because the algebra is level graded.
    """
    rise = max(ZERO, *[Fraction(s) for s in shifts])
    if state.level + rise > trunc.level_cap:
        return False
    if algebra.has_zero_modes and state.zero_occ + zero_uses > trunc.zero_mode_cap:
        return False
    return True


def pair_shifts(op_a: OperatorSpec, op_b: OperatorSpec):
    return (op_a.shift, op_b.shift, op_a.shift + op_b.shift)


def safe_basis_for_pair(algebra, trunc, op_a, op_b):
    from .fock import enumerate_basis
    return [s for s in enumerate_basis(algebra, trunc)
            if is_safe_state(s, pair_shifts(op_a, op_b), algebra, trunc)]


def commutator_action(op_a: OperatorSpec, op_b: OperatorSpec, state: BasisState,
                      trunc: Truncation) -> StateVector:
    """Exact action of the graded commutator [A, B} on a safe basis state.

    Raises UnsafeLevelError when the state violates the safe-window rule;
    the caller must shrink its probe set, never ignore the signal.
    """
    if op_a.algebra != op_b.algebra:
        raise AlgebraMismatchError("commutator of operators over different algebras")
    algebra = op_a.algebra
    if not is_safe_state(state, pair_shifts(op_a, op_b), algebra, trunc):
        raise UnsafeLevelError(
            f"state {state} (level {state.level}) is outside the safe window for "
            f"shifts ({op_a.shift}, {op_b.shift}) at level_cap {trunc.level_cap}")
    v = StateVector.basis(algebra, state)
    ab = apply_operator(op_a, apply_operator(op_b, v, trunc), trunc)
    ba = apply_operator(op_b, apply_operator(op_a, v, trunc), trunc)
    if op_a.parity and op_b.parity:
        return ab + ba
    return ab - ba


def linear_bracket(x: OperatorSpec, y: OperatorSpec) -> Fraction:
    """Graded bracket of two linear expressions; a scalar, computed exactly."""
    if not (x.is_linear and y.is_linear):
        raise ValueError("linear_bracket needs linear expressions on both sides")
    if x.algebra != y.algebra:
        raise AlgebraMismatchError("bracket of expressions over different algebras")
    total = ZERO
    for mx, cx in x.linear:
        for my, cy in y.linear:
            val = canonical_bracket(mx, my, x.algebra)
            if val:
                total += cx * cy * val
    return total


def commutator_with_linear(op: OperatorSpec, lin: OperatorSpec) -> OperatorSpec:
    """Graded commutator [op, lin} of an operator with a linear expression.

    Uses [:XY:, z} = [Y,z} X + (-1)^{p(z)p(Y)} [X,z} Y termwise (the normal
    ordering constant commutes away), so the result is linear and the sum
    over the kernel index has support of at most two points per mode of
    `lin`.  Exact; no windowing involved.
    """
    if op.algebra != lin.algebra:
        raise AlgebraMismatchError("commutator of expressions over different algebras")
    if not lin.is_linear:
        raise ValueError("second argument must be a linear expression")
    algebra = op.algebra
    out_linear = {}
    out_const = ZERO

    def add_mode(mode, c):
        if c:
            out_linear[mode] = out_linear.get(mode, ZERO) + c

    for z, cz in lin.linear:
        for term in op.bilinears:
            two_m = 2 * term.m
            for two_r in {-z.two, two_m + z.two}:
                r = Fraction(two_r, 2)
                coeff = term.alpha + term.beta * r
                if not coeff:
                    continue
                if not (_mode_exists(term.left, two_m - two_r) and _mode_exists(term.right, two_r)):
                    continue
                x = Mode(term.left, two_m - two_r)
                y = Mode(term.right, two_r)
                by = canonical_bracket(y, z, algebra)
                if by:
                    add_mode(x, cz * coeff * by)
                bx = canonical_bracket(x, z, algebra)
                if bx:
                    sign = -1 if (z.parity and y.parity) else 1
                    add_mode(y, cz * coeff * sign * bx)
        for w, cw in op.linear:
            val = canonical_bracket(w, z, algebra)
            if val:
                out_const += cw * cz * val
    return OperatorSpec(algebra, op.shift + lin.shift, (), _norm_linear(out_linear),
                        out_const, (op.parity + lin.parity) % 2)
