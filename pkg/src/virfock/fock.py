"""Level-truncated Fock modules: basis enumeration and exact mode action.

A basis state is a canonically ordered product of creation modes applied to
the vacuum, together with a power of the boson zero mode a†[0] tracked
separately (its level is zero, so the level cap alone would not bound it).
Fermionic reordering signs are counted against the canonical order, one
factor of -1 per transposition of two odd modes.

Truncation is an explicit contract: producing a state beyond the caps raises
TruncationOverflowError instead of silently dropping amplitude, because a
silently truncated commutator check would be unsound.  Callers restrict
their probes to the safe window (see operators.commutator_action), inside
which the level grading guarantees nothing ever leaves the truncation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

from .algebra import (
    Algebra,
    AlgebraMismatchError,
    FieldKind,
    Mode,
    VirfockError,
    ZERO,
    canonical_bracket,
    format_rational,
    is_creator,
)


class TruncationOverflowError(VirfockError):
    """A produced basis state exceeds the truncation caps.

    The caller decides whether its context makes the evaluation sound; this
    error is a signal, never silently swallowed by the engine itself.
    """


@dataclass(frozen=True)
class Truncation:
    """Caps for a truncated Fock module.

    level_cap bounds the total level (sum of creator indices); zero_mode_cap
    bounds the a†[0] occupancy and only matters for algebras with zero modes.
    """

    level_cap: Fraction
    zero_mode_cap: int = 0

    def __post_init__(self):
        cap = Fraction(self.level_cap)
        if cap < 0 or cap.denominator not in (1, 2):
            raise ValueError("level_cap must be a non-negative half-integer multiple")
        object.__setattr__(self, "level_cap", cap)
        if self.zero_mode_cap < 0:
            raise ValueError("zero_mode_cap must be non-negative")


class BasisState(NamedTuple):
    """Normal-ordered creator product applied to the vacuum.

    creators is sorted by (kind, index) with strictly positive indices;
    zero_occ is the power of a†[0].  The stored tuple order is the operator
    order (leftmost acts last), which fixes the sign of fermionic states.
    """

    creators: tuple = ()
    zero_occ: int = 0

    @property
    def level(self) -> Fraction:
        return Fraction(sum(m.two for m in self.creators), 2)

    def __str__(self):
        parts = [str(m) for m in self.creators]
        if self.zero_occ == 1:
            parts.append("a†[0]")
        elif self.zero_occ > 1:
            parts.append(f"a†[0]^{self.zero_occ}")
        return "".join(parts) + "|0⟩"


VACUUM = BasisState()


class StateVector:
    """Finite rational linear combination of basis states of one algebra."""

    __slots__ = ("algebra", "amp")

    def __init__(self, algebra: Algebra, amplitudes=None):
        self.algebra = algebra
        amp = {}
        if amplitudes:
            items = amplitudes.items() if isinstance(amplitudes, dict) else amplitudes
            for state, q in items:
                q = Fraction(q)
                if q:
                    prev = amp.get(state, ZERO) + q
                    if prev:
                        amp[state] = prev
                    else:
                        amp.pop(state, None)
        self.amp = amp

    @classmethod
    def basis(cls, algebra, state: BasisState):
        return cls(algebra, {state: Fraction(1)})

    @classmethod
    def vacuum(cls, algebra):
        return cls.basis(algebra, VACUUM)

    @classmethod
    def zero(cls, algebra):
        return cls(algebra)

    def is_zero(self) -> bool:
        return not self.amp

    def vacuum_component(self) -> Fraction:
        return self.amp.get(VACUUM, ZERO)

    def items(self):
        return self.amp.items()

    def __eq__(self, other):
        return (isinstance(other, StateVector)
                and self.algebra == other.algebra and self.amp == other.amp)

    def __add__(self, other):
        if self.algebra != other.algebra:
            raise AlgebraMismatchError("cannot add vectors from different algebras")
        out = dict(self.amp)
        for s, q in other.amp.items():
            new = out.get(s, ZERO) + q
            if new:
                out[s] = new
            else:
                out.pop(s, None)
        v = StateVector(self.algebra)
        v.amp = out
        return v

    def __sub__(self, other):
        return self + (-1) * other

    def __rmul__(self, scalar):
        scalar = Fraction(scalar)
        v = StateVector(self.algebra)
        if scalar:
            v.amp = {s: scalar * q for s, q in self.amp.items()}
        return v

    def __neg__(self):
        return (-1) * self

    def __str__(self):
        if not self.amp:
            return "0"
        bits = []
        for state in sorted(self.amp, key=_state_key):
            q = self.amp[state]
            coeff = format_rational(q)
            bits.append(f"{coeff}·{state}")
        return " + ".join(bits).replace("+ -", "- ")


def _state_key(state: BasisState):
    return (state.level, state.zero_occ, tuple(m.sort_key for m in state.creators))


def vacuum_component(v: StateVector) -> Fraction:
    """Amplitude of the vacuum basis state (0 if absent)."""
    return v.vacuum_component()


def enumerate_basis(algebra: Algebra, trunc: Truncation):
    """All basis states within the truncation, each once, in canonical order.

    Canonical order is by (level, zero occupancy, creator tuple); the level-0
    sector is exactly the vacuum when zero_mode_cap = 0.
    """
    modes = []
    for kind in algebra.kinds:
        start = 1 if kind.half_integer_moded else 2  # doubled index
        two = start
        while Fraction(two, 2) <= trunc.level_cap:
            modes.append(Mode(kind, two))
            two += 2
    modes.sort(key=lambda m: m.sort_key)

    combos = []

    def grow(i, prefix, remaining):
        combos.append(tuple(prefix))
        for j in range(i, len(modes)):
            m = modes[j]
            lvl = m.index
            if lvl > remaining:
                continue
            prefix.append(m)
            # odd kinds are nilpotent: advance past this mode
            grow(j + 1 if m.parity else j, prefix, remaining - lvl)
            prefix.pop()

    grow(0, [], trunc.level_cap)

    occs = range(trunc.zero_mode_cap + 1) if algebra.has_zero_modes else (0,)
    states = [BasisState(c, z) for c in combos for z in occs]
    states.sort(key=_state_key)
    return states


@lru_cache(maxsize=None)
def _apply_to_basis(algebra: Algebra, x: Mode, state: BasisState, trunc: Truncation):
    """Action of a single mode on a basis state, as ((state, amplitude), ...)."""
    creators, z = state.creators, state.zero_occ
    if is_creator(x):
        if x.two == 0:  # a†[0]
            if z + 1 > trunc.zero_mode_cap:
                raise TruncationOverflowError(
                    f"a†[0] occupancy {z + 1} exceeds zero_mode_cap {trunc.zero_mode_cap} on {state}")
            return ((BasisState(creators, z + 1), Fraction(1)),)
        if x.parity and x in creators:
            return ()
        if state.level + x.index > trunc.level_cap:
            raise TruncationOverflowError(
                f"level {state.level + x.index} exceeds level_cap {trunc.level_cap} "
                f"applying {x} to {state}")
        pos = 0
        crossed_odd = 0
        for c in creators:
            if c.sort_key < x.sort_key:
                pos += 1
                crossed_odd += c.parity
            else:
                break
        sign = -1 if (x.parity and crossed_odd % 2) else 1
        new = creators[:pos] + (x,) + creators[pos:]
        return ((BasisState(new, z), Fraction(sign)),)

    # annihilator: contract against each creator in turn, tracking crossings
    out = []
    sign = 1
    for j, c in enumerate(creators):
        val = canonical_bracket(x, c, algebra)
        if val:
            out.append((BasisState(creators[:j] + creators[j + 1:], z), sign * val))
        if x.parity and c.parity:
            sign = -sign
    if x.two == 0 and x.kind is FieldKind.A and z > 0:
        # a[0] against (a†[0])^z: [a[0], a†[0]] = -1 per power
        out.append((BasisState(creators, z - 1), Fraction(-z)))
    return tuple(out)


def apply_mode(x: Mode, v: StateVector, trunc: Truncation) -> StateVector:
    """Apply a single mode to a state vector, exactly.

    Creators insert into canonical position with the fermionic crossing sign;
    annihilators contract against matching creators via canonical_bracket.
    Raises TruncationOverflowError when a produced state exceeds the caps.
    """
    if x.kind not in v.algebra.kinds:
        raise AlgebraMismatchError(f"mode {x} does not belong to {v.algebra}")
    acc = {}
    for state, q in v.amp.items():
        for new_state, w in _apply_to_basis(v.algebra, x, state, trunc):
            val = acc.get(new_state, ZERO) + q * w
            if val:
                acc[new_state] = val
            else:
                acc.pop(new_state, None)
    out = StateVector(v.algebra)
    out.amp = acc
    return out
