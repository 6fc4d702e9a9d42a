"""
Generalized Lüroth Series: branches, digits, the map T, expansions and cylinders.

Conventions:
- every branch interval is half-open [left, right); the branch whose right
  endpoint is 1 also contains 1, so every point of [0, 1] has one digit;
- under the Lüroth families the point 0 is not covered by any branch and is a
  terminal point: the expansion stops there;
- digits are positive integers; the b-adic digit k + 1 encodes the usual digit k.
"""

from __future__ import annotations

import bisect
import itertools
import logging
from abc import ABC, abstractmethod
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Optional, Union

from gls_normal.constants import (
    BUILTIN_FAMILIES,
    FAMILY_B_ADIC,
    FAMILY_CUSTOM,
    FAMILY_LUEROTH_ALTERNATING,
    FAMILY_LUEROTH_CLASSIC,
    SYMBOLIC_CHECK_DEPTH,
)
from gls_normal.exceptions import ExpansionTerminated, FormatError, SpecError
from gls_normal.gls_types import ValidationIssue
from gls_normal.precision import ApproxReal, UnitReal, to_unit_real

logger = logging.getLogger(__name__)

ONE = Fraction(1)
ZERO = Fraction(0)


class Orientation(str, Enum):
    INCREASING = 'increasing'
    DECREASING = 'decreasing'

    @classmethod
    def parse(cls, text: str) -> Orientation:
        token = text.strip().lower()
        if token in ('+', 'inc', 'increasing'):
            return cls.INCREASING
        if token in ('-', 'dec', 'decreasing'):
            return cls.DECREASING
        raise SpecError(f'unknown orientation: {text!r}')


@dataclass(frozen=True)
class Branch:
    """
    One digit of a GLS: the interval [left, right) and the affine map onto [0, 1].

    An increasing branch realizes T_d(x) = (x - left) / (right - left), a
    decreasing one T_d(x) = 1 - (x - left) / (right - left).
    """

    digit: int
    left: Fraction
    right: Fraction
    orientation: Orientation = Orientation.INCREASING

    def __post_init__(self):
        object.__setattr__(self, 'left', Fraction(self.left))
        object.__setattr__(self, 'right', Fraction(self.right))
        object.__setattr__(self, 'orientation', Orientation(self.orientation))
        if self.digit < 1:
            raise SpecError(f'digits must be positive integers, got {self.digit}')

    @property
    def length(self) -> Fraction:
        return self.right - self.left

    @property
    def increasing(self) -> bool:
        return self.orientation is Orientation.INCREASING

    @property
    def slope(self) -> Fraction:
        return 1 / self.length if self.increasing else -1 / self.length

    @property
    def offset(self) -> Fraction:
        if self.increasing:
            return -self.left / self.length
        return 1 + self.left / self.length

    def contains(self, x: Fraction) -> bool:
        if self.left <= x < self.right:
            return True
        return x == 1 and self.right == 1

    def apply(self, x: Fraction) -> Fraction:
        """T_d(x) for an exact x of this branch."""
        return self.slope * x + self.offset

    def inverse(self, y: Fraction) -> Fraction:
        """The x in the closure of this branch with T_d(x) = y."""
        if self.increasing:
            return self.left + y * self.length
        return self.left + (1 - y) * self.length


@dataclass(frozen=True)
class Interval:
    """A subinterval of [0, 1] with closure flags."""

    left: Fraction
    right: Fraction
    left_closed: bool = True
    right_closed: bool = False

    @property
    def length(self) -> Fraction:
        return self.right - self.left

    def __contains__(self, x: Fraction) -> bool:
        if x < self.left or x > self.right:
            return False
        if x == self.left and not self.left_closed:
            return False
        if x == self.right and not self.right_closed:
            return False
        return True

    def __str__(self) -> str:
        lb = '[' if self.left_closed else '('
        rb = ']' if self.right_closed else ')'
        return f'{lb}{self.left}, {self.right}{rb}'


UNIT_INTERVAL = Interval(ZERO, ONE, True, True)


@dataclass(frozen=True)
class Expansion:
    """Leading digits of an expansion and whether the orbit hit a terminal point."""

    digits: tuple[int, ...]
    terminated: bool = False

    def __len__(self) -> int:
        return len(self.digits)


@dataclass(frozen=True)
class Block:
    """A nonempty block of digits (b_1, ..., b_r)."""

    digits: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, 'digits', tuple(int(d) for d in self.digits))
        if not self.digits:
            raise SpecError('a block needs at least one digit')

    @property
    def r(self) -> int:
        return len(self.digits)

    def __iter__(self) -> Iterator[int]:
        return iter(self.digits)

    def __len__(self) -> int:
        return len(self.digits)

    def __str__(self) -> str:
        return '-'.join(str(d) for d in self.digits)


def as_block(block: Union[Block, Sequence[int]]) -> Block:
    return block if isinstance(block, Block) else Block(tuple(block))


# =============================================================================
# Specs
# =============================================================================


class GlsSpec(ABC):
    """A Generalized Lüroth Series: digit set, branch intervals and the map T."""

    family_name: str

    @property
    @abstractmethod
    def kind(self) -> str:
        """'finite-table' or 'builtin-infinite-family'."""

    @property
    @abstractmethod
    def name(self) -> str:
        """Selector string identifying the spec, e.g. ``b-adic:2``."""

    @abstractmethod
    def branch_of(self, digit: int) -> Branch:
        """Return the branch of a digit, raising SpecError for unknown digits."""

    @abstractmethod
    def digit_at(self, x: Fraction) -> Optional[int]:
        """Digit of an exact point, or None at a terminal point."""

    @abstractmethod
    def digits(self) -> Iterator[int]:
        """Digits in order of decreasing branch length, ties by digit."""

    @property
    def is_finite(self) -> bool:
        return self.kind == 'finite-table'

    def has_digit(self, digit: int) -> bool:
        try:
            self.branch_of(digit)
        except SpecError:
            return False
        return True

    def branch_length(self, digit: int) -> Fraction:
        return self.branch_of(digit).length

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class TableSpec(GlsSpec):
    """A GLS given by an explicit finite list of branches."""

    branches: tuple[Branch, ...]
    family_name: str = FAMILY_CUSTOM
    param: Optional[int] = None
    label: Optional[str] = field(default=None, compare=False)

    @property
    def kind(self) -> str:
        return 'finite-table'

    @property
    def name(self) -> str:
        if self.family_name == FAMILY_B_ADIC:
            return f'{FAMILY_B_ADIC}:{self.param}'
        return self.label or FAMILY_CUSTOM

    @cached_property
    def _by_digit(self) -> dict[int, Branch]:
        return {b.digit: b for b in self.branches}

    @cached_property
    def _sorted(self) -> tuple[Branch, ...]:
        return tuple(sorted(self.branches, key=lambda b: (b.left, b.right)))

    @cached_property
    def _lefts(self) -> list[Fraction]:
        return [b.left for b in self._sorted]

    def branch_of(self, digit: int) -> Branch:
        try:
            return self._by_digit[digit]
        except KeyError:
            raise SpecError(f'{digit} is not a digit of {self.name}') from None

    def digit_at(self, x: Fraction) -> Optional[int]:
        i = bisect.bisect_right(self._lefts, x) - 1
        if i >= 0 and self._sorted[i].contains(x):
            return self._sorted[i].digit
        raise SpecError(f'{x} is not covered by any branch of {self.name}')

    def digits(self) -> Iterator[int]:
        ordered = sorted(self.branches, key=lambda b: (-b.length, b.digit))
        return iter([b.digit for b in ordered])


@dataclass(frozen=True)
class LuerothSpec(GlsSpec):
    """
    The Lüroth families: digit n >= 1 owns [1/(n+1), 1/n).

    The classical series uses increasing branches, T(x) = n(n+1)x - n; the
    alternating series uses decreasing ones.
    """

    alternating: bool = False

    @property
    def family_name(self) -> str:  # type: ignore[override]
        return FAMILY_LUEROTH_ALTERNATING if self.alternating else FAMILY_LUEROTH_CLASSIC

    @property
    def kind(self) -> str:
        return 'builtin-infinite-family'

    @property
    def name(self) -> str:
        return self.family_name

    def branch_of(self, digit: int) -> Branch:
        if not isinstance(digit, int) or digit < 1:
            raise SpecError(f'{digit!r} is not a digit of {self.name}')
        orientation = Orientation.DECREASING if self.alternating else Orientation.INCREASING
        return Branch(digit, Fraction(1, digit + 1), Fraction(1, digit), orientation)

    def digit_at(self, x: Fraction) -> Optional[int]:
        if x == 0:
            return None
        if x == 1:
            return 1
        # x in [1/(n+1), 1/n)  <=>  n = ceil(1/x) - 1
        return -(-x.denominator // x.numerator) - 1

    def digits(self) -> Iterator[int]:
        return itertools.count(1)


# =============================================================================
# Construction and validation
# =============================================================================


def b_adic_spec(base: int) -> TableSpec:
    if not isinstance(base, int) or base < 2:
        raise SpecError(f'b-adic base must be an integer >= 2, got {base!r}')
    branches = tuple(
        Branch(k + 1, Fraction(k, base), Fraction(k + 1, base)) for k in range(base)
    )
    return TableSpec(branches=branches, family_name=FAMILY_B_ADIC, param=base)


def parse_branch_table(text: str, label: Optional[str] = None, check: bool = True) -> TableSpec:
    """
    Parse the custom table format: one ``digit left right orientation`` per line.

    Blank lines and ``#`` comments are ignored.  The table is validated unless
    ``check`` is false.

    Raises:
        FormatError: On unparsable lines
        SpecError: If the table is not a valid GLS
    """
    branches = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 4:
            raise FormatError(f'expected "digit left right orientation", got {raw!r}', lineno)
        try:
            digit = int(parts[0])
            left = Fraction(parts[1])
            right = Fraction(parts[2])
            orientation = Orientation.parse(parts[3])
            branches.append(Branch(digit, left, right, orientation))
        except (ValueError, ZeroDivisionError) as e:
            raise FormatError(str(e), lineno) from e
    if not branches:
        raise FormatError('branch table is empty')
    spec = TableSpec(branches=tuple(branches), family_name=FAMILY_CUSTOM, label=label)
    if check:
        validate(spec).raise_if_invalid()
    return spec


def load_branch_table(path: Union[str, Path], check: bool = True) -> TableSpec:
    path = Path(path)
    text = path.read_text(encoding='utf-8')
    return parse_branch_table(text, label=f'table:{path}', check=check)


def builtin_spec(
    name: str,
    params: Optional[int] = None,
    table: Union[str, Path, Iterable[Branch], None] = None,
) -> GlsSpec:
    """
    Build one of the builtin GLS families.

    Args:
        name: 'b-adic', 'lueroth-classic', 'lueroth-alternating' or 'custom'
        params: Base for b-adic
        table: For 'custom', a table file path or an iterable of branches

    Returns:
        A validated GlsSpec

    Raises:
        SpecError: Unknown family, bad base or invalid custom table
    """
    if name not in BUILTIN_FAMILIES:
        known = ', '.join(BUILTIN_FAMILIES)
        raise SpecError(f'unknown GLS family: {name!r}; expected one of {known}')
    if name == FAMILY_B_ADIC:
        if params is None:
            raise SpecError('b-adic needs a base')
        return b_adic_spec(params)
    if name == FAMILY_LUEROTH_CLASSIC:
        return LuerothSpec(alternating=False)
    if name == FAMILY_LUEROTH_ALTERNATING:
        return LuerothSpec(alternating=True)
    if table is None:
        raise SpecError('custom specs need an explicit branch table')
    if isinstance(table, (str, Path)):
        return load_branch_table(table)
    spec = TableSpec(branches=tuple(table))
    validate(spec).raise_if_invalid()
    return spec


def parse_spec(selector: str, check: bool = True) -> GlsSpec:
    """Parse a CLI selector: ``b-adic:B``, ``lueroth-classic``, ``table:PATH``."""
    head, _, tail = selector.partition(':')
    if head == FAMILY_B_ADIC:
        try:
            base = int(tail)
        except ValueError:
            raise SpecError(f'bad b-adic base in {selector!r}') from None
        return b_adic_spec(base)
    if head in ('table', FAMILY_CUSTOM) and tail:
        return load_branch_table(tail, check=check)
    return builtin_spec(selector)


@dataclass
class ValidationReport:
    """Outcome of validate(): issues found and, for builtins, the certificate."""

    spec_name: str
    kind: str
    issues: list[ValidationIssue] = field(default_factory=list)
    certificate: Optional[str] = None

    @property
    def ok(self) -> bool:
        return not self.issues

    def add(self, kind: str, detail: str) -> None:
        self.issues.append(ValidationIssue(kind=kind, detail=detail))

    def raise_if_invalid(self) -> None:
        if self.issues:
            details = '; '.join(f'{i["kind"]}: {i["detail"]}' for i in self.issues)
            raise SpecError(f'invalid GLS {self.spec_name}: {details}')


def _check_affine(branch: Branch, report: ValidationReport) -> None:
    lo, hi = (ZERO, ONE) if branch.increasing else (ONE, ZERO)
    if branch.apply(branch.left) != lo or branch.apply(branch.right) != hi:
        report.add('affine', f'T_{branch.digit} does not map its interval onto [0, 1]')


def validate(spec: GlsSpec, depth: int = SYMBOLIC_CHECK_DEPTH) -> ValidationReport:
    """
    Check the GLS axioms: disjointness, coverage, exact length sum and affine branches.

    Finite tables are checked exactly.  The Lüroth families get a symbolic
    certificate: the telescoping partial sums sum_{n<=N} 1/(n(n+1)) = 1 - 1/(N+1)
    are verified exactly for N <= depth together with contiguity of the branches.
    """
    report = ValidationReport(spec_name=spec.name, kind=spec.kind)
    if isinstance(spec, TableSpec):
        _validate_table(spec, report)
    else:
        _validate_family(spec, depth, report)
    if report.ok:
        logger.debug('spec %s validated', spec.name)
    else:
        logger.info('spec %s has %d issues', spec.name, len(report.issues))
    return report


def _validate_table(spec: TableSpec, report: ValidationReport) -> None:
    digits = [b.digit for b in spec.branches]
    if len(set(digits)) != len(digits):
        report.add('duplicate-digit', 'a digit labels more than one branch')
    total = ZERO
    for b in spec.branches:
        if not (0 <= b.left and b.right <= 1):
            report.add('range', f'branch {b.digit} [{b.left}, {b.right}) leaves [0, 1]')
        if b.length <= 0:
            report.add('zero-length', f'branch {b.digit} has non-positive length')
            continue
        total += b.length
        _check_affine(b, report)
    ordered = sorted(spec.branches, key=lambda b: (b.left, b.right))
    cursor = ZERO
    for b in ordered:
        if b.left < cursor:
            report.add('overlap', f'branch {b.digit} starts at {b.left} before {cursor}')
        elif b.left > cursor:
            report.add('gap', f'[{cursor}, {b.left}) is not covered')
        cursor = max(cursor, b.right)
    if cursor < 1:
        report.add('gap', f'[{cursor}, 1] is not covered')
    if total != 1:
        report.add('length-sum', f'branch lengths sum to {total}, not 1')


def _validate_family(spec: GlsSpec, depth: int, report: ValidationReport) -> None:
    partial = ZERO
    previous_left = ONE
    for n in range(1, depth + 1):
        branch = spec.branch_of(n)
        if branch.right != previous_left:
            report.add('gap', f'branch {n} does not abut branch {n - 1}')
            return
        if branch.length <= 0:
            report.add('zero-length', f'branch {n} has non-positive length')
            return
        _check_affine(branch, report)
        partial += branch.length
        if partial != 1 - Fraction(1, n + 1):
            report.add('length-sum', f'partial sum up to {n} is {partial}')
            return
        previous_left = branch.left
    report.certificate = (
        f'sum of 1/(n(n+1)) for n <= N equals 1 - 1/(N+1), checked exactly for N <= {depth}; '
        'the telescoping closed form gives total length 1'
    )


# =============================================================================
# Digits, the map T and expansions
# =============================================================================


def _resolve(spec: GlsSpec, x: UnitReal) -> tuple[int, UnitReal]:
    """Digit of x together with the (possibly refined) value it was decided on."""
    if not isinstance(x, ApproxReal):
        digit = spec.digit_at(x)
        if digit is None:
            raise ExpansionTerminated(x)
        return digit, x
    while True:
        lo, hi = max(x.lo, ZERO), min(x.hi, ONE)
        d_lo = spec.digit_at(lo)
        d_hi = spec.digit_at(hi)
        if d_lo is not None and d_lo == d_hi:
            return d_lo, x
        x = x.refine()


def digit_of(spec: GlsSpec, x: UnitReal) -> int:
    """
    The digit d with x in I_d.

    Raises:
        ExpansionTerminated: At a terminal point
        PrecisionExhausted: If an approximate x straddles a boundary at the cap
    """
    return _resolve(spec, to_unit_real(x))[0]


def _step_resolved(spec: GlsSpec, digit: int, x: UnitReal) -> UnitReal:
    branch = spec.branch_of(digit)
    if isinstance(x, ApproxReal):
        return x.map_affine(branch.slope, branch.offset, (branch.left, branch.right))
    return branch.apply(x)


def step(spec: GlsSpec, x: UnitReal) -> UnitReal:
    """T(x); exact input gives exact output."""
    digit, x = _resolve(spec, to_unit_real(x))
    return _step_resolved(spec, digit, x)


def orbit_step(spec: GlsSpec, x: UnitReal) -> tuple[int, UnitReal]:
    """Digit of x and T(x) in one pass."""
    digit, x = _resolve(spec, x)
    return digit, _step_resolved(spec, digit, x)


def expand(spec: GlsSpec, x: UnitReal, length: int) -> Expansion:
    """
    The first ``length`` digits of x, shorter if the orbit reaches a terminal point.

    Raises:
        PrecisionExhausted: For approximate x that cannot be resolved at the cap
    """
    if length < 0:
        raise ValueError('length must be non-negative')
    x = to_unit_real(x)
    digits = []
    for _ in range(length):
        try:
            digit, x = orbit_step(spec, x)
        except ExpansionTerminated:
            return Expansion(tuple(digits), terminated=True)
        digits.append(digit)
    return Expansion(tuple(digits), terminated=False)


# =============================================================================
# Cylinders and preimages
# =============================================================================


def preimage(spec: GlsSpec, digit: int, interval: Interval) -> Interval:
    """T_d^{-1}(interval) intersected with I_d."""
    branch = spec.branch_of(digit)
    if branch.increasing:
        left, right = branch.inverse(interval.left), branch.inverse(interval.right)
        left_closed, right_closed = interval.left_closed, interval.right_closed
    else:
        left, right = branch.inverse(interval.right), branch.inverse(interval.left)
        left_closed, right_closed = interval.right_closed, interval.left_closed
    if right == branch.right and branch.right != 1:
        right_closed = False
    return Interval(left, right, left_closed, right_closed)


def cylinder(spec: GlsSpec, block: Union[Block, Sequence[int]]) -> Interval:
    """
    The set of x whose expansion starts with ``block``, as an interval.

    Built by composing the inverse branch maps from the last digit to the
    first; decreasing branches swap the closure flags.
    """
    block = as_block(block)
    current = UNIT_INTERVAL
    for digit in reversed(block.digits):
        current = preimage(spec, digit, current)
    return current


@dataclass(frozen=True)
class PreimageMeasure:
    """Total measure of T^{-1}(I) and a bound on the part not enumerated."""

    measure: Fraction
    tail_bound: Fraction


def preimage_measure(
    spec: GlsSpec,
    left: Fraction,
    right: Fraction,
    digit_cap: Optional[int] = None,
) -> PreimageMeasure:
    """
    Sum over digits of |T_d^{-1}([left, right]) ∩ I_d|.

    For finite tables every branch is used and the tail bound is 0.  For
    infinite families the first ``digit_cap`` digits are summed and the tail
    bound is the uncovered branch mass times |I|.
    """
    interval = Interval(Fraction(left), Fraction(right), True, True)
    if spec.is_finite:
        chosen: Iterable[int] = spec.digits()
    else:
        if digit_cap is None:
            raise ValueError('infinite families need a digit_cap')
        chosen = itertools.islice(spec.digits(), digit_cap)
    measure = ZERO
    mass = ZERO
    for digit in chosen:
        measure += preimage(spec, digit, interval).length
        mass += spec.branch_length(digit)
    return PreimageMeasure(measure=measure, tail_bound=(1 - mass) * interval.length)
