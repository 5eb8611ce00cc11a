"""Constants used in the salemgen package."""

CONFIG_ENV: str = "SALEMGEN_CONFIG"
THREADS_ENV: str = "SALEMGEN_THREADS"


class TailKind:
    zeros = "zeros"
    max_digits = "max"
    periodic = "periodic"
    seeded = "seeded"


class ScheduleKind:
    constant = "constant"
    periodic_list = "periodic_list"


class PermKind:
    identity = "identity"
    finite = "finite"
    block = "block"


class Deviation:
    identity_everywhere = "identity_everywhere"
    finite = "finite_deviation"
    infinite = "infinite_deviation"


class Rationality:
    rational = "rational"
    irrational = "irrational"


class Continuity:
    continuous = "continuous"
    jump = "jump"


class DiscontinuitySet:
    empty = "empty"
    finite = "finite"
    countable = "countable"


class Monotonicity:
    strictly_increasing = "strictly increasing"
    non_decreasing = "non-decreasing"
    constant_ae = "constant almost everywhere"
    no_intervals = "no monotonicity intervals"
    some_interval = "has some monotonicity interval"


class EvalMethod:
    series = "series"
    feq = "feq"


class QuadratureCheck:
    none = "none"
    quadrature = "quadrature"


class ExitCode:
    ok = 0
    verify_failed = 1
    config = 2
    usage = 3
    io = 4
    check_failed = 5
    distribution = 6


class Tolerance:
    weight_sum = 1e-12
    default = 1e-12
    twin = 1e-9
    snap_ulps = 4


class SeriesDefaultValues:
    max_terms = 20000
    max_closed_period = 4096
    encode_depth = 64
    feq_depth = 80
    seeded_block = 64


class SampleDefaultValues:
    count = 100_000
    depth = 64
    chunk_size = 16384
    grid_size = 1000
    threshold = 0.01


class QuadratureDefaultValues:
    max_cylinder_length = 1e-6
    check_tol = 1e-5
    max_cells = 8_000_000
    chunk_size = 1 << 18


class VerifyDefaultValues:
    points = 200
    rank = 6
    plan_prefix = 8
    plan_positions = 6
    plan_size = 3
    feq_steps = 10
    quadrature_tol = 1e-5
    samples = 20000
    ks_threshold = 0.02


class MaxSupported:
    radix = 64
