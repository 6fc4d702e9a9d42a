"""
Text and binary formats: digit streams and schedule sidecar files.

Digits are written either as space-separated text or as a varint stream:
the magic ``GLSV``, the digit count, then one unsigned LEB128 varint per digit.
"""

from __future__ import annotations

import logging
import os
import tempfile
from collections.abc import Iterable, Sequence
from fractions import Fraction
from pathlib import Path
from typing import Union

from gls_normal.constructor import CutoffSchedule
from gls_normal.exceptions import FormatError, ScheduleError
from gls_normal.gls_types import ScheduleLevel

logger = logging.getLogger(__name__)

VARINT_MAGIC = b'GLSV'
SCHEDULE_TAG = 'gls-normal schedule'

PathLike = Union[str, Path]


# =============================================================================
# Digits
# =============================================================================


def _put_varint(value: int, out: bytearray) -> None:
    if value < 0:
        raise FormatError(f'varints are unsigned, got {value}')
    while True:
        byte = value & 0x7F
        value >>= 7
        if value:
            out.append(byte | 0x80)
        else:
            out.append(byte)
            return


def _get_varint(data: bytes, pos: int) -> tuple[int, int]:
    value = shift = 0
    start = pos
    while True:
        if pos >= len(data):
            raise FormatError(f'truncated varint at byte {start}')
        byte = data[pos]
        pos += 1
        value |= (byte & 0x7F) << shift
        if not byte & 0x80:
            return value, pos
        shift += 7


def encode_varint(digits: Sequence[int]) -> bytes:
    """Magic, digit count, then every digit as an unsigned LEB128 varint."""
    out = bytearray(VARINT_MAGIC)
    _put_varint(len(digits), out)
    for d in digits:
        _put_varint(int(d), out)
    return bytes(out)


def decode_varint(data: bytes) -> tuple[int, ...]:
    """
    Raises:
        FormatError: On a missing magic, truncation, or trailing bytes
    """
    if not data.startswith(VARINT_MAGIC):
        raise FormatError('not a varint digit stream (missing GLSV magic)')
    count, pos = _get_varint(data, len(VARINT_MAGIC))
    digits = []
    for _ in range(count):
        d, pos = _get_varint(data, pos)
        digits.append(d)
    if pos != len(data):
        raise FormatError(f'{len(data) - pos} trailing bytes after {count} digits')
    return tuple(digits)


def format_digits_text(digits: Iterable[int]) -> str:
    text = ' '.join(str(int(d)) for d in digits)
    return f'{text}\n' if text else ''


def parse_digits_text(text: str) -> tuple[int, ...]:
    digits = []
    for pos, token in enumerate(text.split()):
        if not token.isdigit():
            raise FormatError(f'token {pos} is not a digit: {token!r}')
        digits.append(int(token))
    return tuple(digits)


def encode_digits(digits: Sequence[int], fmt: str) -> bytes:
    if fmt == 'varint':
        return encode_varint(digits)
    if fmt == 'text':
        return format_digits_text(digits).encode('ascii')
    raise FormatError(f'unknown digit format: {fmt!r}')


def read_digits(path: PathLike) -> tuple[int, ...]:
    """Read a digit file in either format; varint files are recognized by their magic."""
    data = Path(path).read_bytes()
    if data.startswith(VARINT_MAGIC):
        return decode_varint(data)
    try:
        text = data.decode('ascii')
    except UnicodeDecodeError as e:
        raise FormatError(f'{path} is neither a text nor a varint digit file') from e
    return parse_digits_text(text)


# =============================================================================
# Schedules
# =============================================================================


def schedule_levels(schedule: CutoffSchedule) -> list[ScheduleLevel]:
    return [
        ScheduleLevel(level=level, cutoff=c, verified_to=v)
        for level, (c, v) in enumerate(zip(schedule.cutoffs, schedule.verified_to))
    ]


def dump_schedule(schedule: CutoffSchedule) -> str:
    """Header line with the horizon factor and generator, then ``level cutoff verified_to``."""
    header = f'# {SCHEDULE_TAG} horizon_factor={schedule.horizon_factor}'
    if schedule.spec_name:
        header += f' spec={schedule.spec_name}'
    if schedule.seq_name:
        header += f' seq={schedule.seq_name}'
    lines = [header]
    for row in schedule_levels(schedule):
        lines.append(f'{row["level"]} {row["cutoff"]} {row["verified_to"]}')
    return '\n'.join(lines) + '\n'


def parse_schedule(text: str) -> CutoffSchedule:
    """
    Raises:
        FormatError: On a missing header or malformed lines
        ScheduleError: If the cutoffs do not form a valid schedule
    """
    header: dict[str, str] = {}
    cutoffs: list[int] = []
    verified: list[int] = []
    seen_header = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith('#'):
            if not seen_header and SCHEDULE_TAG in line:
                seen_header = True
                for token in line.split():
                    key, eq, value = token.partition('=')
                    if eq:
                        header[key] = value
            continue
        if not seen_header:
            raise FormatError('schedule file must start with a header line', lineno)
        parts = line.split()
        if len(parts) != 3 or not all(p.isdigit() for p in parts):
            raise FormatError(f'expected "level cutoff verified_to", got {raw!r}', lineno)
        level, cutoff, verified_to = (int(p) for p in parts)
        if level != len(cutoffs):
            raise FormatError(f'expected level {len(cutoffs)}, got {level}', lineno)
        cutoffs.append(cutoff)
        verified.append(verified_to)
    if not seen_header:
        raise FormatError('schedule file has no header line')
    if not cutoffs:
        raise ScheduleError('schedule file lists no levels')
    try:
        factor = Fraction(header.get('horizon_factor', '1'))
    except (ValueError, ZeroDivisionError) as e:
        raise FormatError(f'bad horizon factor: {header["horizon_factor"]!r}') from e
    return CutoffSchedule(
        cutoffs=tuple(cutoffs),
        horizon_factor=factor,
        verified_to=tuple(verified),
        spec_name=header.get('spec', ''),
        seq_name=header.get('seq', ''),
    )


def load_schedule(path: PathLike) -> CutoffSchedule:
    return parse_schedule(Path(path).read_text(encoding='utf-8'))


# =============================================================================
# Output files
# =============================================================================


def atomic_write(path: PathLike, data: Union[str, bytes]) -> None:
    """
    Write a file so that it either appears complete or not at all.

    The data goes to a temporary file in the target directory which is then
    renamed over the target; on failure the temporary file is removed.
    """
    path = Path(path)
    payload = data.encode('utf-8') if isinstance(data, str) else data
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path('.'), prefix=f'.{path.name}.')
    try:
        with os.fdopen(fd, 'wb') as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise
    logger.debug('wrote %d bytes to %s', len(payload), path)


def remove_partial(paths: Iterable[PathLike]) -> None:
    """Delete output files left behind by a failed run."""
    for p in paths:
        path = Path(p)
        if path.exists():
            path.unlink()
            logger.info('removed partial output %s', path)
