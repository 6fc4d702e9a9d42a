"""
Command-line interface for gls-normal.

Subcommands: validate, generate, analyze, discrepancy, survey.  Reports go
to stdout or to the file named by --output; diagnostics go to stderr.
Exit codes: 0 success, 1 validation or domain failure, 2 usage error,
3 resource cap reached.
"""

from __future__ import annotations

import argparse
import logging
import re
import sys
from collections.abc import Callable, Sequence
from fractions import Fraction
from pathlib import Path
from typing import Literal, Optional

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    ValidationError,
    field_validator,
    model_validator,
)

from gls_normal import __version__
from gls_normal.constants import (
    CLI_DESCRIPTION,
    DECIMAL_PLACES,
    DEFAULT_DIGIT_CAP,
    DEFAULT_HORIZON_FACTOR,
    DEFAULT_LEVELS,
    DEFAULT_MAX_R,
    DEFAULT_N_CAP,
    DIGIT_FORMATS,
    EXIT_DOMAIN_FAILURE,
    EXIT_OK,
    EXIT_RESOURCE_CAP,
    EXIT_USAGE,
    FAMILY_LUEROTH_CLASSIC,
    HELP_BASE,
    HELP_CERTIFIED,
    HELP_COUNT,
    HELP_DIGIT_CAP,
    HELP_DIGIT_FORMAT,
    HELP_HORIZON,
    HELP_KMAX,
    HELP_LEVELS,
    HELP_MAX_R,
    HELP_N_CAP,
    HELP_N_MAX,
    HELP_SCHEDULE,
    HELP_SCHEDULE_OUT,
    HELP_SEQ,
    HELP_SPEC,
    HELP_STRICT_SCHEDULE,
    HELP_STRIDE,
    HELP_WORKERS,
    MSG_CERTIFICATE,
    MSG_CONJECTURE_NOTE,
    MSG_DIGITS_WRITTEN,
    MSG_HELD_COLUMNS,
    MSG_INVALID,
    MSG_SCHEDULE_WRITTEN,
    MSG_SKIPPED_COLUMNS,
    MSG_SURVEY_SUMMARY,
    MSG_VALID,
    PRECISION_CAP_BITS,
    REPORT_FORMATS,
    SCHEDULE_SUFFIX,
    SURVEY_CAP,
    TAIL_POLICY_ERROR,
    TAIL_POLICY_HOLD,
)
from gls_normal.constructor import DigitStream, choose_cutoffs, verify_schedule
from gls_normal.discrepancy import (
    certified_prefix_discrepancies,
    discrepancy_curve_frame,
    prefix_discrepancies,
)
from gls_normal.exceptions import (
    CapExceeded,
    GlsError,
    PrecisionExhausted,
    ScheduleSearchError,
)
from gls_normal.gls_core import parse_spec, validate
from gls_normal.normality import normality_report, report_frame, report_json
from gls_normal.precision import as_rational
from gls_normal.rational_lueroth import survey_family
from gls_normal.sequences import parse_sequence
from gls_normal.services.file_formats import (
    atomic_write,
    dump_schedule,
    encode_digits,
    load_schedule,
    read_digits,
    remove_partial,
)
from gls_normal.services.reports import frame_to_csv, render_frame, to_json_text

logger = logging.getLogger(__name__)

Command = Literal['validate', 'generate', 'analyze', 'discrepancy', 'survey']


class RunConfig(BaseModel):
    """Validated settings of one CLI invocation."""

    model_config = ConfigDict(frozen=True, extra='forbid')

    command: Command
    spec: Optional[str] = None
    seq: Optional[str] = None
    precision_cap: int = Field(PRECISION_CAP_BITS, ge=64)
    verbose: int = 0
    quiet: bool = False

    # generate
    levels: int = Field(DEFAULT_LEVELS, ge=1)
    horizon: str = str(DEFAULT_HORIZON_FACTOR)
    n_cap: int = Field(DEFAULT_N_CAP, ge=1)
    schedule: Optional[Path] = None
    schedule_out: Optional[Path] = None
    count: int = Field(0, ge=0)
    digit_format: Literal['text', 'varint'] = 'text'
    strict_schedule: bool = False

    # analyze
    digits: Optional[Path] = None
    max_r: int = Field(DEFAULT_MAX_R, ge=1)
    digit_cap: int = Field(DEFAULT_DIGIT_CAP, ge=1)
    report_format: Literal['csv', 'json'] = 'csv'

    # discrepancy
    n_max: int = Field(1, ge=1)
    stride: int = Field(1, ge=1)
    certified: bool = False
    decimals: int = Field(DECIMAL_PLACES, ge=0, le=30)

    # survey
    base: int = Field(2, ge=2)
    kmax: int = Field(1, ge=1)
    cap: int = Field(SURVEY_CAP, ge=1)
    workers: Optional[int] = Field(None, ge=1)
    summary: Optional[Path] = None

    output: Optional[Path] = None

    @field_validator('horizon')
    @classmethod
    def _horizon_is_rational(cls, value: str) -> str:
        factor = as_rational(value)
        if factor < 1:
            raise ValueError('horizon factor must be >= 1')
        return str(factor)

    @model_validator(mode='after')
    def _required_inputs(self) -> RunConfig:
        needs = {
            'validate': ('spec',),
            'generate': ('spec', 'seq'),
            'analyze': ('spec', 'digits'),
            'discrepancy': ('seq',),
            'survey': ('spec',),
        }[self.command]
        missing = [name for name in needs if getattr(self, name) is None]
        if missing:
            flags = ', '.join(f'--{name}' for name in missing)
            raise ValueError(f'{self.command} requires {flags}')
        if self.verbose and self.quiet:
            raise ValueError('--verbose and --quiet are mutually exclusive')
        return self

    @property
    def horizon_factor(self) -> Fraction:
        return Fraction(self.horizon)

    @property
    def tail_policy(self) -> str:
        return TAIL_POLICY_ERROR if self.strict_schedule else TAIL_POLICY_HOLD

    @property
    def schedule_path(self) -> Path:
        """Sidecar path of a generate run, in the working directory when digits go to stdout."""
        if self.schedule_out is not None:
            return self.schedule_out
        if self.output is not None:
            return self.output.with_name(self.output.name + SCHEDULE_SUFFIX)
        stem = '.'.join(_file_safe(part) for part in (self.spec, self.seq) if part)
        return Path(stem + SCHEDULE_SUFFIX)


def _file_safe(selector: str) -> str:
    """Selector text usable as a file name: 'table:/a/b.gls' -> 'table_a_b.gls'."""
    return re.sub(r'[^A-Za-z0-9.@-]+', '_', selector).strip('_.') or 'gls'


# =============================================================================
# Parser
# =============================================================================


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='gls-normal', description=CLI_DESCRIPTION)
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    parser.add_argument('-v', '--verbose', action='count', default=0, help='More logging')
    parser.add_argument('-q', '--quiet', action='store_true', help='Only warnings and errors')
    parser.add_argument(
        '--precision-cap',
        type=int,
        default=PRECISION_CAP_BITS,
        help='Largest working precision in bits for irrational points',
    )
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('validate', help='Check that a GLS is well formed')
    p.add_argument('--spec', required=True, help=HELP_SPEC)

    p = sub.add_parser('generate', help='Emit digits of the constructed normal number')
    p.add_argument('--spec', required=True, help=HELP_SPEC)
    p.add_argument('--seq', default='vdc:2', help=HELP_SEQ)
    p.add_argument('--levels', type=int, default=DEFAULT_LEVELS, help=HELP_LEVELS)
    p.add_argument('--horizon', default=str(DEFAULT_HORIZON_FACTOR), help=HELP_HORIZON)
    p.add_argument('--n-cap', type=int, default=DEFAULT_N_CAP, help=HELP_N_CAP)
    p.add_argument('--schedule', type=Path, help=HELP_SCHEDULE)
    p.add_argument('--schedule-out', type=Path, help=HELP_SCHEDULE_OUT)
    p.add_argument('--count', type=int, default=0, help=HELP_COUNT)
    p.add_argument(
        '--format',
        dest='digit_format',
        choices=DIGIT_FORMATS,
        default='text',
        help=HELP_DIGIT_FORMAT,
    )
    p.add_argument('--strict-schedule', action='store_true', help=HELP_STRICT_SCHEDULE)
    p.add_argument('--output', type=Path, help='Digit file (default: stdout)')

    p = sub.add_parser('analyze', help='Block-frequency report of a digit file')
    p.add_argument('--spec', required=True, help=HELP_SPEC)
    p.add_argument('--digits', type=Path, required=True, help='Digit file, text or varint')
    p.add_argument('--max-r', type=int, default=DEFAULT_MAX_R, help=HELP_MAX_R)
    p.add_argument('--digit-cap', type=int, default=DEFAULT_DIGIT_CAP, help=HELP_DIGIT_CAP)
    p.add_argument('--format', dest='report_format', choices=REPORT_FORMATS, default='csv')
    p.add_argument('--output', type=Path, help='Report file (default: stdout)')

    p = sub.add_parser('discrepancy', help='Prefix discrepancies of a sequence')
    p.add_argument('--seq', required=True, help=HELP_SEQ)
    p.add_argument('--n-max', type=int, required=True, help=HELP_N_MAX)
    p.add_argument('--stride', type=int, default=1, help=HELP_STRIDE)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument('--exact', dest='certified', action='store_false')
    mode.add_argument('--certified', dest='certified', action='store_true', help=HELP_CERTIFIED)
    p.set_defaults(certified=False)
    p.add_argument('--decimals', type=int, default=DECIMAL_PLACES)
    p.add_argument('--output', type=Path, help='CSV file (default: stdout)')

    p = sub.add_parser('survey', help='Classify the expansions of a/p^k')
    p.add_argument('--spec', default=FAMILY_LUEROTH_CLASSIC, help=HELP_SPEC)
    p.add_argument('--base', type=int, required=True, help=HELP_BASE)
    p.add_argument('--kmax', type=int, required=True, help=HELP_KMAX)
    p.add_argument('--cap', type=int, default=SURVEY_CAP)
    p.add_argument('--workers', type=int, help=HELP_WORKERS)
    p.add_argument('--output', type=Path, help='CSV file (default: stdout)')
    p.add_argument('--summary', type=Path, help='Summary JSON file')
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    values = {k: v for k, v in vars(args).items() if v is not None}
    return RunConfig(**values)


def _configure_logging(config: RunConfig) -> None:
    if config.quiet:
        level = logging.WARNING
    elif config.verbose:
        level = logging.DEBUG
    else:
        level = logging.INFO
    logging.basicConfig(
        level=level, format='%(levelname)s %(name)s: %(message)s', stream=sys.stderr
    )
    logging.getLogger('gls_normal').setLevel(level)


def _emit(config: RunConfig, data: str | bytes) -> None:
    if config.output is None:
        if isinstance(data, bytes):
            sys.stdout.buffer.write(data)
            sys.stdout.flush()
        else:
            sys.stdout.write(data)
    else:
        atomic_write(config.output, data)


# =============================================================================
# Subcommands
# =============================================================================


def cmd_validate(config: RunConfig) -> int:
    spec = parse_spec(config.spec, check=False)
    report = validate(spec)
    if report.ok:
        print(MSG_VALID.format(name=spec.name, kind=spec.kind))
        if report.certificate:
            print(MSG_CERTIFICATE.format(certificate=report.certificate))
        return EXIT_OK
    print(MSG_INVALID.format(name=spec.name))
    for issue in report.issues:
        print(f'  {issue["kind"]}: {issue["detail"]}')
    return EXIT_DOMAIN_FAILURE


def cmd_generate(config: RunConfig) -> int:
    spec = parse_spec(config.spec)
    seq = parse_sequence(config.seq, cap=config.precision_cap)
    if config.schedule is not None:
        schedule = load_schedule(config.schedule)
        verify_schedule(spec, seq, schedule)
    else:
        schedule = choose_cutoffs(
            spec, seq, config.levels, horizon_factor=config.horizon_factor, n_cap=config.n_cap
        )
    stream = DigitStream(spec, seq, schedule, tail_policy=config.tail_policy)
    digits = stream.take(config.count)
    if stream.skipped_columns:
        logger.info(MSG_SKIPPED_COLUMNS.format(skipped=stream.skipped_columns))
    if stream.held_columns:
        logger.info(MSG_HELD_COLUMNS.format(held=stream.held_columns, level=schedule.levels))

    written: list[Path] = []
    try:
        sidecar = config.schedule_path
        atomic_write(sidecar, dump_schedule(schedule))
        written.append(sidecar)
        logger.info(MSG_SCHEDULE_WRITTEN.format(path=sidecar))
        _emit(config, encode_digits(digits, config.digit_format))
        if config.output is not None:
            logger.info(MSG_DIGITS_WRITTEN.format(count=len(digits), path=config.output))
    except BaseException:
        remove_partial(written)
        raise
    return EXIT_OK


def cmd_analyze(config: RunConfig) -> int:
    spec = parse_spec(config.spec)
    digits = read_digits(config.digits)
    report = normality_report(digits, spec, config.max_r, digit_cap=config.digit_cap)
    if config.report_format == 'json':
        _emit(config, to_json_text(report_json(report)))
    else:
        _emit(config, render_frame(report_frame(report), 'csv'))
    return EXIT_OK


def cmd_discrepancy(config: RunConfig) -> int:
    seq = parse_sequence(config.seq, cap=config.precision_cap)
    if config.certified:
        rows = certified_prefix_discrepancies(seq, config.n_max, config.stride)
        frame = discrepancy_curve_frame(rows, decimals=config.decimals)
    else:
        frame = discrepancy_curve_frame(
            prefix_discrepancies(seq, config.n_max, config.stride), decimals=config.decimals
        )
    _emit(config, frame_to_csv(frame))
    return EXIT_OK


def cmd_survey(config: RunConfig) -> int:
    spec = parse_spec(config.spec)
    survey = survey_family(spec, config.base, config.kmax, cap=config.cap, workers=config.workers)
    summary = survey.summary()
    _emit(config, frame_to_csv(survey.frame()))
    if config.summary is not None:
        atomic_write(config.summary, to_json_text(summary))
    print(MSG_SURVEY_SUMMARY.format(**summary), file=sys.stderr)
    for fraction in summary['periodic_exceptions']:
        print(f'  periodic: {fraction}', file=sys.stderr)
    print(MSG_CONJECTURE_NOTE.format(kmax=config.kmax), file=sys.stderr)
    return EXIT_OK


COMMANDS: dict[str, Callable[[RunConfig], int]] = {
    'validate': cmd_validate,
    'generate': cmd_generate,
    'analyze': cmd_analyze,
    'discrepancy': cmd_discrepancy,
    'survey': cmd_survey,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run the CLI and return its exit status.

    argparse errors exit with status 2 on their own; invalid combinations
    caught by RunConfig map to the same status.
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = config_from_args(args)
    except ValidationError as e:
        print(f'gls-normal: error: {e}', file=sys.stderr)
        return EXIT_USAGE
    _configure_logging(config)
    try:
        return COMMANDS[config.command](config)
    except (CapExceeded, ScheduleSearchError, PrecisionExhausted) as e:
        logger.error('%s', e)
        return EXIT_RESOURCE_CAP
    except (GlsError, OSError) as e:
        logger.error('%s', e)
        return EXIT_DOMAIN_FAILURE
