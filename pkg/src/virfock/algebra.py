"""Exact mode algebras for free-field realizations of the Virasoro algebra.

All scalars are `fractions.Fraction`: every bracket, amplitude and central
charge in this package is exact, never floating point.

Mode indices are half-integers stored doubled (``two = 2*index``), so integer
and half-odd-integer ladders share one exact, cheaply ordered encoding.

Conventions fixed across the whole package:

* a mode with positive index creates, a mode with negative index annihilates;
  the boson zero modes split as: a†[0] creates (its power is the zero-mode
  occupancy of a basis state) while a[0] annihilates the vacuum;
* the level of a mode equals its index, so creators carry positive level and
  an operator labelled ``m`` shifts level by exactly ``m``;
* ``canonical_bracket(x, y)`` is the value of the graded commutator [x, y},
  i.e. a commutator for even pairs and an anticommutator for odd pairs;
  quantization is "bracket value = graded commutator value", with no i or
  hbar factor.

Five concrete algebras are provided.  Four carry the module families of
interest; the fifth is an even-parity copy of the fermion pair used only to
probe the spin-statistics degeneracy of constraint systems:

====================  =================================  =================
algebra               nonzero canonical bracket          mode parity
====================  =================================  =================
boson-unconstrained   [a†[m], a[n]]  = delta(m+n)        even
fermion-unconstrained {b[r], b†[s]}  = delta(r+s)        odd (r,s half-odd)
reduced-boson(M)      [a†[m], a†[n]] = -(M/2) m d(m+n)   even (m,n nonzero)
reduced-fermion       {b[r], b[s]}   = (1/2) delta(r+s)  odd
bosonized-fermion     [b†[r], b[s]]  = delta(r+s)        even (half-odd r,s)
====================  =================================  =================
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import NamedTuple


class VirfockError(Exception):
    """Base class for domain errors raised by this package."""


class AlgebraMismatchError(VirfockError):
    """Modes or expressions from different algebras were combined."""


ZERO = Fraction(0)
HALF = Fraction(1, 2)


def parse_rational(text) -> Fraction:
    """Parse ``p/q`` (or a plain integer literal) into an exact Fraction."""
    return Fraction(str(text).strip())


def format_rational(value) -> str:
    """Render an exact scalar as ``p/q``, with ``/q`` omitted when q = 1."""
    return str(Fraction(value))


class FieldKind(Enum):
    """Which oscillator family a mode belongs to.

    A/ADAG are the integer-moded boson pair, B/BDAG the half-odd-integer
    fermion pair.  RED_ADAG and RED_B are the surviving modes of the two
    constrained (Dirac-reduced) algebras.  EVEN_B/EVEN_BDAG are a bosonic
    copy of the fermion pair, present only so the constraint classifier can
    discover that the fermionic constraint family degenerates (C = 0) when
    given the wrong statistics.
    """

    A = 0
    ADAG = 1
    B = 2
    BDAG = 3
    RED_ADAG = 4
    RED_B = 5
    EVEN_B = 6
    EVEN_BDAG = 7

    @property
    def parity(self) -> int:
        """1 for odd (fermionic) kinds, 0 for even."""
        return 1 if self in (FieldKind.B, FieldKind.BDAG, FieldKind.RED_B) else 0

    @property
    def half_integer_moded(self) -> bool:
        return self in (FieldKind.B, FieldKind.BDAG, FieldKind.RED_B,
                        FieldKind.EVEN_B, FieldKind.EVEN_BDAG)

    @property
    def symbol(self) -> str:
        return _SYMBOL[self]


_SYMBOL = {
    FieldKind.A: "a",
    FieldKind.ADAG: "a†",
    FieldKind.B: "b",
    FieldKind.BDAG: "b†",
    FieldKind.RED_ADAG: "a†",
    FieldKind.RED_B: "b",
    FieldKind.EVEN_B: "b",
    FieldKind.EVEN_BDAG: "b†",
}


def conformal_weight(kind: FieldKind, lam=None) -> Fraction:
    """Conformal weight metadata for a field kind.

    The fermion weights depend on the family parameter lambda; pass it for
    B/BDAG (and their even copies).  Weights are bookkeeping only; no
    computation in the engine consumes them.
    """
    if kind is FieldKind.A:
        return ZERO
    if kind in (FieldKind.ADAG, FieldKind.RED_ADAG):
        return Fraction(1)
    if kind is FieldKind.RED_B:
        return HALF
    if lam is None:
        raise ValueError("fermion conformal weights need the lambda parameter")
    lam = Fraction(lam)
    if kind in (FieldKind.B, FieldKind.EVEN_B):
        return lam
    return 1 - lam


class Mode(NamedTuple):
    """A single oscillator generator: field kind plus half-integer index."""

    kind: FieldKind
    two: int  # doubled index, exact for both integer and half-odd ladders

    @property
    def index(self) -> Fraction:
        return Fraction(self.two, 2)

    @property
    def parity(self) -> int:
        return self.kind.parity

    @property
    def sort_key(self):
        return (self.kind.value, self.two)

    def __str__(self):
        if self.two % 2 == 0:
            idx = str(self.two // 2)
        else:
            idx = f"{self.two}/2"
        return f"{self.kind.symbol}[{idx}]"


def _doubled(index, half_odd: bool, what: str) -> int:
    q = Fraction(index)
    if q.denominator not in (1, 2):
        raise ValueError(f"{what} index must be integer or half-integer, got {q}")
    two = q.numerator * (2 // q.denominator)
    if half_odd and two % 2 == 0:
        raise ValueError(f"{what} modes live on half-odd-integer indices, got {q}")
    if not half_odd and two % 2 != 0:
        raise ValueError(f"{what} modes live on integer indices, got {q}")
    return two


def a(n) -> Mode:
    """Weight-0 boson mode a[n], n integer."""
    return Mode(FieldKind.A, _doubled(n, False, "a"))


def adag(n) -> Mode:
    """Weight-1 boson mode a†[n], n integer."""
    return Mode(FieldKind.ADAG, _doubled(n, False, "a†"))


def b(r) -> Mode:
    """Fermion mode b[r], r half-odd-integer."""
    return Mode(FieldKind.B, _doubled(r, True, "b"))


def bdag(r) -> Mode:
    """Fermion mode b†[r], r half-odd-integer."""
    return Mode(FieldKind.BDAG, _doubled(r, True, "b†"))


def red_adag(n) -> Mode:
    """Surviving mode a†[n] of the reduced boson algebra, n a nonzero integer."""
    two = _doubled(n, False, "reduced a†")
    if two == 0:
        raise ValueError("the reduced boson algebra has no zero mode; a†[0] is constrained away")
    return Mode(FieldKind.RED_ADAG, two)


def red_b(r) -> Mode:
    """Surviving mode b[r] of the reduced fermion algebra, r half-odd-integer."""
    return Mode(FieldKind.RED_B, _doubled(r, True, "reduced b"))


def even_b(r) -> Mode:
    """Even-parity copy of b[r] (spin-statistics probe only)."""
    return Mode(FieldKind.EVEN_B, _doubled(r, True, "even b"))


def even_bdag(r) -> Mode:
    """Even-parity copy of b†[r] (spin-statistics probe only)."""
    return Mode(FieldKind.EVEN_BDAG, _doubled(r, True, "even b†"))


def mode_level(x: Mode) -> Fraction:
    """Level grading of a mode: equal to its index.

    Every bilinear pair (X[m-r], Y[r]) therefore has total level m, so an
    operator labelled m is level-homogeneous of degree m.
    """
    return x.index


@dataclass(frozen=True)
class Algebra:
    """Identifies one of the concrete mode algebras (and carries M if needed)."""

    name: str
    M: Fraction | None = None
    kinds: tuple = ()
    has_zero_modes: bool = False

    def __contains__(self, mode: Mode) -> bool:
        return mode.kind in self.kinds

    def __str__(self):
        if self.M is not None:
            return f"{self.name}(M={self.M})"
        return self.name


BOSON = Algebra("boson-unconstrained", None, (FieldKind.A, FieldKind.ADAG), True)
FERMION = Algebra("fermion-unconstrained", None, (FieldKind.B, FieldKind.BDAG), False)
REDUCED_FERMION = Algebra("fermion-reduced", None, (FieldKind.RED_B,), False)
BOSONIZED_FERMION = Algebra("bosonized-fermion", None,
                            (FieldKind.EVEN_B, FieldKind.EVEN_BDAG), False)


def reduced_boson(M) -> Algebra:
    """Reduced boson algebra; M scales the brackets and must be nonzero."""
    M = Fraction(M)
    if M == 0:
        raise ValueError("reduced boson algebra needs M != 0 "
                         "(the brackets scale with M and the generator kernel carries 1/M)")
    return Algebra("boson-reduced", M, (FieldKind.RED_ADAG,), False)


def _require_member(x: Mode, algebra: Algebra):
    if x.kind not in algebra.kinds:
        raise AlgebraMismatchError(f"mode {x} does not belong to {algebra}")


def canonical_bracket(x: Mode, y: Mode, algebra: Algebra) -> Fraction:
    """Value of the graded commutator [x, y} in the given algebra.

    Antisymmetric on even pairs, symmetric on odd pairs; nonzero only when
    the two indices sum to zero.
    """
    _require_member(x, algebra)
    _require_member(y, algebra)
    if x.two + y.two != 0:
        return ZERO
    kx, ky = x.kind, y.kind
    if algebra.name == "boson-unconstrained":
        if kx is FieldKind.ADAG and ky is FieldKind.A:
            return Fraction(1)
        if kx is FieldKind.A and ky is FieldKind.ADAG:
            return Fraction(-1)
        return ZERO
    if algebra.name == "fermion-unconstrained":
        if kx is not ky:
            return Fraction(1)
        return ZERO
    if algebra.name == "boson-reduced":
        # [a†[m], a†[n]] = -(M/2) m delta(m+n)
        return -algebra.M * Fraction(x.two, 4)
    if algebra.name == "fermion-reduced":
        return HALF
    if algebra.name == "bosonized-fermion":
        if kx is FieldKind.EVEN_BDAG and ky is FieldKind.EVEN_B:
            return Fraction(1)
        if kx is FieldKind.EVEN_B and ky is FieldKind.EVEN_BDAG:
            return Fraction(-1)
        return ZERO
    raise AlgebraMismatchError(f"unknown algebra {algebra}")


def is_creator(x: Mode) -> bool:
    """Positive-index modes create; among the zero modes only a†[0] does."""
    return x.two > 0 or (x.two == 0 and x.kind is FieldKind.ADAG)
