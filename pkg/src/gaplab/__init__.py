"""Desk-scale laboratory for very short gaps between primes and sieve survivors."""

__version__ = "0.1.0"

from .errors import (
    ConcurrencyContractError,
    DomainError,
    ExtensionExhaustedError,
    GaplabError,
    RangeCeilingError,
    TargetUnreachableError,
)
from .gapstats import (
    GapCdfReport,
    IntervalHistogram,
    ReciprocalSumAccumulator,
    dyadic_partition,
    feed_adaptive,
    gallagher_histogram,
    gap_cdf,
    reciprocal_sum,
    survivor_gap_report,
    window_prime_total,
)
from .sieve import (
    PrimeGapRecord,
    SegmentSpec,
    SpfTable,
    prime_count,
    prime_gap_stream,
    primes_in_range,
    spf_range,
)
from .singular import (
    OffsetTuple,
    SingularSeriesResult,
    hl_compare,
    hl_count,
    is_admissible,
    nu,
    pair_sum,
    pair_value,
    singular_series,
    triple_sum,
    triple_value,
)
from .survivors import (
    SurvivorConfig,
    SurvivorGapRecord,
    crt_pair_oracle,
    crt_triple_oracle,
    is_survivor,
    pair_count,
    survivor_gap_stream,
    survivor_stream,
    triple_count,
)
from .thresholds import (
    AdaptiveState,
    ThresholdSpec,
    domain_floor,
    eval_lambda,
    eval_y,
    iter_log,
    logorial,
)
