"""Self-adaptive field testing of a body sensor network.

Thin wrapper over the C++ core: oracles, statistics and the experiment
pipeline (gen_data -> derive -> run_experiment -> report).
"""

from ._adapta import (
    PROFILES,
    SENSORS,
    AdaptaError,
    ConfigError,
    DomainError,
    OracleUndefined,
    ParseError,
    UsageError,
    ValidationError,
    a12,
    classify_risk,
    compare,
    derive,
    expected_default,
    expected_weighted,
    gen_data,
    mann_whitney_u,
    overall_score,
    ptcr,
    report,
    run_experiment,
    std_dev,
)

__all__ = [
    "PROFILES",
    "SENSORS",
    "AdaptaError",
    "ConfigError",
    "DomainError",
    "OracleUndefined",
    "ParseError",
    "UsageError",
    "ValidationError",
    "a12",
    "classify_risk",
    "compare",
    "derive",
    "expected_default",
    "expected_weighted",
    "gen_data",
    "mann_whitney_u",
    "overall_score",
    "ptcr",
    "report",
    "run_experiment",
    "std_dev",
]
