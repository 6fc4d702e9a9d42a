"""
Exact and precision-tracked points of the unit interval.

A UnitReal is either an exact ``Fraction`` or an ``ApproxReal``: a rational
enclosure [lo, hi] of an irrational value together with the oracle that
produced it.  Refining an ApproxReal asks the oracle again at twice the
precision, so digit extraction deep into an expansion can retroactively demand
more bits of the original constant.

Irrational constants are evaluated with directed rounding through
``mpmath.libmp``, which keeps every enclosure rigorous and avoids the global
precision state of the mpmath contexts.
"""

from __future__ import annotations

import logging
import math
from abc import ABC, abstractmethod
from collections.abc import Callable
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

from mpmath.libmp import (
    from_int,
    mpf_e,
    mpf_phi,
    mpf_pi,
    mpf_sqrt,
    round_ceiling,
    round_floor,
    to_rational,
)

from gls_normal.constants import (
    CONSTANT_GUARD_BITS,
    INITIAL_PRECISION_BITS,
    PRECISION_CAP_BITS,
)
from gls_normal.exceptions import GlsError, PrecisionExhausted, SpecError

logger = logging.getLogger(__name__)

Enclosure = tuple[Fraction, Fraction]
Oracle = Callable[[int], Enclosure]


@dataclass(frozen=True)
class ApproxReal:
    """
    A real number known through a rigorous rational enclosure.

    Attributes:
        lo: Lower end of the enclosure
        hi: Upper end of the enclosure
        bits: Precision the enclosure was requested at
        oracle: Callable returning an enclosure for a requested precision
        cap: Largest precision refine() may request
    """

    lo: Fraction
    hi: Fraction
    bits: int
    oracle: Oracle = field(repr=False, compare=False)
    cap: int = PRECISION_CAP_BITS

    @classmethod
    def from_oracle(
        cls,
        oracle: Oracle,
        bits: int = INITIAL_PRECISION_BITS,
        cap: int = PRECISION_CAP_BITS,
    ) -> ApproxReal:
        """Evaluate the oracle once and wrap the result."""
        lo, hi = oracle(bits)
        return cls(lo=lo, hi=hi, bits=bits, oracle=oracle, cap=cap)

    @property
    def center(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def radius(self) -> Fraction:
        return (self.hi - self.lo) / 2

    def refine(self) -> ApproxReal:
        """
        Re-evaluate at twice the precision.

        Raises:
            PrecisionExhausted: If the precision is already at the cap
        """
        if self.bits >= self.cap:
            raise PrecisionExhausted(self.cap)
        bits = min(2 * self.bits, self.cap)
        logger.debug('refining approximation from %d to %d bits', self.bits, bits)
        return ApproxReal.from_oracle(self.oracle, bits=bits, cap=self.cap)

    def at_least(self, bits: int) -> ApproxReal:
        """Return an approximation with at least the given precision."""
        if bits <= self.bits:
            return self
        if bits > self.cap:
            raise PrecisionExhausted(self.cap)
        return ApproxReal.from_oracle(self.oracle, bits=bits, cap=self.cap)

    def map_affine(
        self,
        slope: Fraction,
        offset: Fraction,
        domain: Enclosure,
    ) -> ApproxReal:
        """
        Image under x -> slope * x + offset, for a value known to lie in ``domain``.

        The composed oracle clamps each fresh enclosure to ``domain`` before
        mapping, and asks the parent for enough extra bits to absorb the slope.
        """
        extra = max(0, _bit_size(abs(slope)))
        parent = self.oracle
        low, high = domain

        def oracle(bits: int) -> Enclosure:
            lo, hi = parent(bits + extra)
            return _affine_image(max(lo, low), min(hi, high), slope, offset)

        lo, hi = _affine_image(max(self.lo, low), min(self.hi, high), slope, offset)
        return ApproxReal(lo=lo, hi=hi, bits=self.bits, oracle=oracle, cap=self.cap)


UnitReal = Union[Fraction, ApproxReal]


def _bit_size(value: Fraction) -> int:
    if value == 0:
        return 0
    return value.numerator.bit_length() - value.denominator.bit_length() + 1


def _affine_image(lo: Fraction, hi: Fraction, slope: Fraction, offset: Fraction) -> Enclosure:
    a = slope * lo + offset
    b = slope * hi + offset
    return (a, b) if a <= b else (b, a)


def as_rational(value: Union[int, str, Fraction]) -> Fraction:
    """Parse an exact rational from an int, a Fraction or a ``p/q`` string."""
    try:
        return Fraction(value)
    except (TypeError, ValueError, ZeroDivisionError) as e:
        raise GlsError(f'not an exact rational: {value!r}') from e


def to_unit_real(value: Union[int, str, Fraction, ApproxReal]) -> UnitReal:
    """
    Coerce a value to a UnitReal, checking that exact values lie in [0, 1].

    Raises:
        GlsError: If an exact value lies outside [0, 1]
    """
    if isinstance(value, ApproxReal):
        return value
    x = as_rational(value)
    if not 0 <= x <= 1:
        raise GlsError(f'{x} is outside [0, 1]')
    return x


def enclosure(x: UnitReal) -> Enclosure:
    """Return [lo, hi] for either kind of UnitReal."""
    if isinstance(x, ApproxReal):
        return x.lo, x.hi
    return x, x


# =============================================================================
# Irrational constants
# =============================================================================


def _exact(value) -> Fraction:
    """A Fraction with plain int parts; mpmath may hand back gmpy2 integers."""
    value = Fraction(value)
    return Fraction(int(value.numerator), int(value.denominator))


def _raw_to_fraction(raw) -> Fraction:
    p, q = to_rational(raw)
    return Fraction(int(p), int(q))


class IrrationalConstant(ABC):
    """A symbolic irrational constant with an enclosure oracle."""

    name: str

    @abstractmethod
    def enclose(self, bits: int) -> Enclosure:
        """Return lo < value < hi with hi - lo of order 2**-bits."""

    def __repr__(self) -> str:
        return f'{type(self).__name__}({self.name!r})'


class _DirectedConstant(IrrationalConstant):
    """Constant computed by an mpmath.libmp routine taking (prec, rounding)."""

    def __init__(self, name: str, evaluate: Callable):
        self.name = name
        self._evaluate = evaluate

    def enclose(self, bits: int) -> Enclosure:
        prec = bits + CONSTANT_GUARD_BITS
        lo = _raw_to_fraction(self._evaluate(prec, round_floor))
        hi = _raw_to_fraction(self._evaluate(prec, round_ceiling))
        slack = Fraction(1, 1 << (bits + 1))
        return lo - slack, hi + slack


class SqrtConstant(_DirectedConstant):
    """Square root of a positive non-square integer."""

    def __init__(self, m: int):
        if m <= 0 or math.isqrt(m) ** 2 == m:
            raise SpecError(f'sqrt({m}) is rational; kronecker needs an irrational constant')
        self.m = m
        super().__init__(f'sqrt{m}', lambda prec, rnd: mpf_sqrt(from_int(m), prec, rnd))


class CallableConstant(IrrationalConstant):
    """User constant backed by an enclosure callable."""

    def __init__(self, name: str, enclose: Oracle):
        self.name = name
        self._enclose = enclose

    def enclose(self, bits: int) -> Enclosure:
        lo, hi = self._enclose(bits)
        return _exact(lo), _exact(hi)


GOLDEN = _DirectedConstant('golden', mpf_phi)
PI = _DirectedConstant('pi', mpf_pi)
E = _DirectedConstant('e', mpf_e)

_NAMED_CONSTANTS = {
    'golden': GOLDEN,
    'phi': GOLDEN,
    'pi': PI,
    'e': E,
}


def make_constant(value: Union[str, int, Fraction, IrrationalConstant]) -> IrrationalConstant:
    """
    Build an irrational constant from a name such as ``sqrt2``, ``golden``, ``pi``, ``e``.

    Raises:
        SpecError: For rational values or unknown names
    """
    if isinstance(value, IrrationalConstant):
        return value
    if isinstance(value, (int, Fraction)):
        raise SpecError(f'{value} is rational; kronecker needs an irrational constant')
    name = value.strip().lower()
    if name in _NAMED_CONSTANTS:
        return _NAMED_CONSTANTS[name]
    if name.startswith('sqrt'):
        digits = name[4:].strip('()')
        if digits.isdigit():
            return SqrtConstant(int(digits))
    try:
        Fraction(name)
    except (ValueError, ZeroDivisionError):
        raise SpecError(f'unknown constant: {value!r}') from None
    raise SpecError(f'{value} is rational; kronecker needs an irrational constant')
