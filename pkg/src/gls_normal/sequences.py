"""
Equidistributed sequences in [0, 1].

Every sequence is a deterministic function of its parameters and a 1-based
index j, so element j can be requested out of order and reproduced across
runs.  Iteration is a convenience layer over indexed access.
"""

from __future__ import annotations

import itertools
import logging
import math
from abc import ABC, abstractmethod
from collections.abc import Iterator
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Optional, Union

from gls_normal.constants import (
    INITIAL_PRECISION_BITS,
    PRECISION_CAP_BITS,
    SEQ_CUSTOM_LIST,
    SEQ_FAREY,
    SEQ_IMAGE,
    SEQ_KRONECKER,
    SEQ_VAN_DER_CORPUT,
)
from gls_normal.exceptions import (
    ExpansionTerminated,
    FormatError,
    GlsError,
    PrecisionExhausted,
    SpecError,
)
from gls_normal.gls_core import GlsSpec, step
from gls_normal.precision import (
    ApproxReal,
    Enclosure,
    IrrationalConstant,
    UnitReal,
    make_constant,
)

logger = logging.getLogger(__name__)


def _check_index(j: int) -> None:
    if not isinstance(j, int) or j < 1:
        raise GlsError(f'sequence indices start at 1, got {j!r}')


def van_der_corput(base: int, j: int) -> Fraction:
    """Radical inverse of j in the given base."""
    if base < 2:
        raise SpecError(f'van der Corput base must be >= 2, got {base}')
    _check_index(j)
    num, den = 0, 1
    while j:
        j, d = divmod(j, base)
        num = num * base + d
        den *= base
    return Fraction(num, den)


def farey_enum(j: int) -> Fraction:
    """
    The j-th term of 1/2, 1/3, 2/3, 1/4, 2/4, 3/4, 1/5, ...

    Unreduced fractions keep their slot (2/4 is the fifth term) but the value
    is returned in lowest terms.
    """
    _check_index(j)
    # smallest q with q(q-1)/2 >= j
    q = (1 + math.isqrt(8 * j)) // 2
    while q * (q - 1) // 2 < j:
        q += 1
    while q > 2 and (q - 1) * (q - 2) // 2 >= j:
        q -= 1
    return Fraction(j - (q - 1) * (q - 2) // 2, q)


def kronecker(
    beta: Union[str, IrrationalConstant],
    j: int,
    bits: int = INITIAL_PRECISION_BITS,
    cap: int = PRECISION_CAP_BITS,
) -> ApproxReal:
    """
    j*beta mod 1 as an approximation that can be refined on demand.

    Raises:
        SpecError: If beta is rational
    """
    constant = make_constant(beta)
    _check_index(j)
    extra = j.bit_length()

    def oracle(precision: int) -> Enclosure:
        working = precision + extra
        while True:
            lo, hi = constant.enclose(working)
            lo, hi = j * lo, j * hi
            whole = math.floor(lo)
            if math.floor(hi) == whole:
                return lo - whole, hi - whole
            if working > cap + extra:
                raise PrecisionExhausted(cap)
            working *= 2

    return ApproxReal.from_oracle(oracle, bits=bits, cap=cap)


# =============================================================================
# Sequence objects
# =============================================================================


class PointSeq(ABC):
    """An indexed sequence (a_1, a_2, ...) of points of [0, 1]."""

    kind: str
    offset: int

    @abstractmethod
    def _term(self, j: int) -> UnitReal:
        """Unshifted term j."""

    @abstractmethod
    def describe(self) -> str:
        """Selector string reproducing this sequence, without the offset."""

    @property
    def exact(self) -> bool:
        return True

    @property
    def length(self) -> Optional[int]:
        """Number of elements, or None for an infinite sequence."""
        return None

    def element(self, j: int) -> UnitReal:
        _check_index(j)
        if self.length is not None and j > self.length:
            raise GlsError(f'{self.describe()} has only {self.length} elements, asked for {j}')
        return self._term(j + self.offset)

    def take(self, n: int) -> list[UnitReal]:
        """The first n elements."""
        return [self.element(j) for j in range(1, n + 1)]

    def __iter__(self) -> Iterator[UnitReal]:
        indices = itertools.count(1) if self.length is None else range(1, self.length + 1)
        return (self.element(j) for j in indices)

    def shift(self, k: int) -> PointSeq:
        return shift(self, k)

    @property
    def selector(self) -> str:
        base = self.describe()
        return base if self.offset == 0 else f'{base}@{self.offset + 1}'

    def __str__(self) -> str:
        return self.selector


@dataclass(frozen=True)
class VanDerCorputSeq(PointSeq):
    base: int = 2
    offset: int = 0
    kind: str = field(default=SEQ_VAN_DER_CORPUT, init=False)

    def __post_init__(self):
        if self.base < 2:
            raise SpecError(f'van der Corput base must be >= 2, got {self.base}')

    def _term(self, j: int) -> Fraction:
        return van_der_corput(self.base, j)

    def describe(self) -> str:
        return f'vdc:{self.base}'


@dataclass(frozen=True)
class FareySeq(PointSeq):
    offset: int = 0
    kind: str = field(default=SEQ_FAREY, init=False)

    def _term(self, j: int) -> Fraction:
        return farey_enum(j)

    def describe(self) -> str:
        return 'farey'


@dataclass(frozen=True)
class KroneckerSeq(PointSeq):
    """(j * beta mod 1) for an irrational constant beta."""

    beta: IrrationalConstant
    bits: int = INITIAL_PRECISION_BITS
    cap: int = PRECISION_CAP_BITS
    offset: int = 0
    kind: str = field(default=SEQ_KRONECKER, init=False)

    def __post_init__(self):
        object.__setattr__(self, 'beta', make_constant(self.beta))

    @property
    def exact(self) -> bool:
        return False

    def _term(self, j: int) -> ApproxReal:
        return kronecker(self.beta, j, bits=self.bits, cap=self.cap)

    def describe(self) -> str:
        return f'kronecker:{self.beta.name}'


@dataclass(frozen=True)
class FractionListSeq(PointSeq):
    """A finite user-supplied list of exact points."""

    values: tuple[Fraction, ...] = ()
    label: str = 'list'
    offset: int = 0
    kind: str = field(default=SEQ_CUSTOM_LIST, init=False)

    def __post_init__(self):
        for value in self.values:
            if not 0 <= value <= 1:
                raise SpecError(f'{value} is outside [0, 1]')

    @property
    def length(self) -> Optional[int]:
        return max(len(self.values) - self.offset, 0)

    def _term(self, j: int) -> Fraction:
        return self.values[j - 1]

    def describe(self) -> str:
        return self.label


@dataclass(frozen=True)
class ImageSeq(PointSeq):
    """(T^power a_j) for a base sequence; terminal points stay at 0."""

    source: PointSeq
    spec: GlsSpec
    power: int = 1
    offset: int = 0
    kind: str = field(default=SEQ_IMAGE, init=False)

    def __post_init__(self):
        if self.power < 0:
            raise ValueError('power must be non-negative')

    @property
    def exact(self) -> bool:
        return self.source.exact

    @property
    def length(self) -> Optional[int]:
        if self.source.length is None:
            return None
        return max(self.source.length - self.offset, 0)

    def _term(self, j: int) -> UnitReal:
        return apply_power(self.spec, self.source.element(j), self.power)

    def describe(self) -> str:
        return f'image({self.source.selector},{self.spec.name},{self.power})'


def apply_power(spec: GlsSpec, x: UnitReal, power: int) -> UnitReal:
    """T^power(x), absorbing at terminal points."""
    for _ in range(power):
        try:
            x = step(spec, x)
        except ExpansionTerminated:
            return Fraction(0)
    return x


def shift(seq: PointSeq, k: int) -> PointSeq:
    """The sequence (a_k, a_{k+1}, ...)."""
    _check_index(k)
    return replace(seq, offset=seq.offset + k - 1)


def image(seq: PointSeq, spec: GlsSpec, power: int = 1) -> ImageSeq:
    return ImageSeq(source=seq, spec=spec, power=power)


def parse_fraction_list(text: str, label: str = 'list') -> FractionListSeq:
    values = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        try:
            value = Fraction(line)
        except (ValueError, ZeroDivisionError) as e:
            raise FormatError(f'not a fraction: {line!r}', lineno) from e
        if not 0 <= value <= 1:
            raise FormatError(f'{value} is outside [0, 1]', lineno)
        values.append(value)
    return FractionListSeq(values=tuple(values), label=label)


def load_fraction_list(path: Union[str, Path]) -> FractionListSeq:
    path = Path(path)
    return parse_fraction_list(path.read_text(encoding='utf-8'), label=f'list:{path}')


def parse_sequence(selector: str, cap: int = PRECISION_CAP_BITS) -> PointSeq:
    """
    Parse a CLI selector such as ``vdc:2``, ``farey``, ``kronecker:sqrt2``, ``list:PATH``.

    A trailing ``@K`` starts the sequence at element K.

    Raises:
        SpecError: For unknown selectors or bad parameters
    """
    start = 1
    body, at, tail = selector.rpartition('@')
    if at and tail.isdigit():
        selector, start = body, int(tail)
    head, _, arg = selector.partition(':')
    if head == 'vdc':
        try:
            seq: PointSeq = VanDerCorputSeq(base=int(arg or 2))
        except ValueError:
            raise SpecError(f'bad van der Corput base in {selector!r}') from None
    elif head == 'farey':
        seq = FareySeq()
    elif head == 'kronecker':
        seq = KroneckerSeq(beta=arg or 'sqrt2', cap=cap)
    elif head == 'list' and arg:
        seq = load_fraction_list(arg)
    else:
        raise SpecError(f'unknown sequence selector: {selector!r}')
    if start < 1:
        raise SpecError('sequence start must be >= 1')
    return shift(seq, start) if start > 1 else seq
