"""
Defaults and user-facing strings for gls-normal.

Every tunable number and every message the CLI prints is kept here so the
computational modules stay free of magic values.
"""

from fractions import Fraction

# Approximate arithmetic
INITIAL_PRECISION_BITS = 64
PRECISION_CAP_BITS = 4096
# Guard bits added when evaluating constants with directed rounding
CONSTANT_GUARD_BITS = 16

# Builtin family certificates
SYMBOLIC_CHECK_DEPTH = 10_000

# Discrepancy
BRUTE_FORCE_CAP = 500
# Grid used to round approximate points for certified discrepancy
CERTIFIED_GRID_BITS = 40
# Largest magnitude kept in int64 arrays before switching to Python integers
INT64_SAFE_LIMIT = 2**62

# Cutoff schedules
DEFAULT_HORIZON_FACTOR = Fraction(4)
DEFAULT_N_CAP = 10**7
DEFAULT_LEVELS = 8
TAIL_POLICY_HOLD = 'hold'
TAIL_POLICY_ERROR = 'error'
TAIL_POLICIES = (TAIL_POLICY_HOLD, TAIL_POLICY_ERROR)

# Normality
DEFAULT_DIGIT_CAP = 16
DEFAULT_MAX_R = 3
BLOCK_COUNT_CHUNK = 1 << 20

# Rational classification
CLASSIFY_STEP_BUDGET = 10**6
# Orbits of tables with fractional slopes grow their denominators without bound
CLASSIFY_DENOMINATOR_BITS = 1024
SURVEY_CAP = 10**6
SURVEY_CHUNK = 4096

# Output rendering
DECIMAL_PLACES = 12
DIGIT_FORMATS = ('text', 'varint')
REPORT_FORMATS = ('csv', 'json')
SCHEDULE_SUFFIX = '.schedule'

# Builtin family identifiers
FAMILY_B_ADIC = 'b-adic'
FAMILY_LUEROTH_CLASSIC = 'lueroth-classic'
FAMILY_LUEROTH_ALTERNATING = 'lueroth-alternating'
FAMILY_CUSTOM = 'custom'
BUILTIN_FAMILIES = (
    FAMILY_B_ADIC,
    FAMILY_LUEROTH_CLASSIC,
    FAMILY_LUEROTH_ALTERNATING,
    FAMILY_CUSTOM,
)

# Sequence kinds
SEQ_KRONECKER = 'kronecker'
SEQ_FAREY = 'farey-enumeration'
SEQ_VAN_DER_CORPUT = 'van-der-corput'
SEQ_CUSTOM_LIST = 'custom-list'
SEQ_IMAGE = 'image'

# Exit codes
EXIT_OK = 0
EXIT_DOMAIN_FAILURE = 1
EXIT_USAGE = 2
EXIT_RESOURCE_CAP = 3

# CLI strings
CLI_DESCRIPTION = (
    'Construct normal numbers with respect to Generalized Lüroth Series and analyse '
    'their digit statistics.'
)
HELP_SPEC = 'GLS selector: b-adic:B, lueroth-classic, lueroth-alternating or table:PATH'
HELP_SEQ = (
    'Sequence selector: vdc:B, farey, kronecker:sqrtM|golden|pi|e or list:PATH, '
    'optionally followed by @K to start at element K'
)
HELP_LEVELS = 'Number of cutoff levels L to search'
HELP_HORIZON = 'Horizon factor: each cutoff is verified on [c, ceil(h*c)]'
HELP_N_CAP = 'Maximum column evaluations per level during the cutoff search'
HELP_SCHEDULE = 'Replay this schedule file instead of searching'
HELP_SCHEDULE_OUT = (
    'Where to write the schedule sidecar (default: <output>.schedule, or '
    '<spec>.<seq>.schedule in the working directory when digits go to stdout)'
)
HELP_COUNT = 'Number of digits of z to emit'
HELP_DIGIT_FORMAT = 'Digit output format'
HELP_STRICT_SCHEDULE = 'Fail instead of holding the last level once the schedule runs out'
HELP_MAX_R = 'Longest block length to report'
HELP_DIGIT_CAP = 'Number of most probable digits used for infinite alphabets'
HELP_N_MAX = 'Largest prefix length n'
HELP_STRIDE = 'Report every stride-th prefix length'
HELP_CERTIFIED = 'Accept approximate points and report certified bounds'
HELP_BASE = 'Denominator base p of the surveyed fractions a/p^k'
HELP_KMAX = 'Largest exponent k'
HELP_WORKERS = 'Worker processes for the survey'

MSG_VALID = 'OK: {name} is a valid GLS ({kind})'
MSG_INVALID = 'INVALID: {name}'
MSG_CERTIFICATE = 'certificate: {certificate}'
MSG_SCHEDULE_WRITTEN = 'schedule written to {path}'
MSG_DIGITS_WRITTEN = '{count} digits written to {path}'
MSG_SKIPPED_COLUMNS = '{skipped} columns skipped (expansion terminated early)'
MSG_HELD_COLUMNS = '{held} columns emitted at the held last level {level}'
MSG_SURVEY_SUMMARY = '{finite} finite, {periodic} periodic of {total} fractions'
MSG_CONJECTURE_NOTE = (
    'verified by exhaustive iteration up to k = {kmax}; this is a finite check, not a theorem'
)
