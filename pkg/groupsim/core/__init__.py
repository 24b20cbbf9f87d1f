"""Core foundation modules for groupsim.

This package contains the fundamental building blocks:
- exceptions: Custom exception hierarchy mapped onto CLI exit codes
- validation: Input validation for identifiers, seeds, probabilities, paths
- logging: Structured logging with correlation IDs and the run ledger
- models: Frozen domain types shared by every module
- seeding: Deterministic seed derivation for per-agent random streams
"""

from .exceptions import (
    AllZeroActual,
    ArtifactIOError,
    ConfigurationError,
    DuplicateGroup,
    DuplicateSeed,
    EmptyList,
    EmptyPopulation,
    GroupSimError,
    IllegalAction,
    InvalidConfigurationError,
    InvalidEmotionError,
    InvalidIdentifierError,
    LayerOutOfRange,
    LengthMismatch,
    MalformedEvent,
    MalformedTree,
    MissingCredentialsError,
    MissingEntry,
    MissingSlot,
    MixedDates,
    NegativeCount,
    NoOptions,
    OracleError,
    OracleUnavailable,
    PathValidationError,
    ResourceError,
    ScalingOverflow,
    SimulationError,
    TooFewPairs,
    TooFewReplicates,
    UnparseableReply,
    ValidationError,
)
from .logging import (
    JSONFormatter,
    LogContext,
    RunLedger,
    clear_correlation_id,
    generate_correlation_id,
    get_correlation_id,
    get_logger,
    get_run_ledger,
    mask_sensitive,
    redact_headers,
    setup_logging,
)
from .seeding import agent_rng, derive_seed, unit_jitter

__all__ = [
    # Exceptions
    "GroupSimError",
    "ConfigurationError",
    "MissingCredentialsError",
    "InvalidConfigurationError",
    "ValidationError",
    "MalformedEvent",
    "InvalidEmotionError",
    "EmptyPopulation",
    "MalformedTree",
    "DuplicateGroup",
    "LayerOutOfRange",
    "MixedDates",
    "NoOptions",
    "LengthMismatch",
    "TooFewPairs",
    "EmptyList",
    "AllZeroActual",
    "TooFewReplicates",
    "DuplicateSeed",
    "InvalidIdentifierError",
    "PathValidationError",
    "ResourceError",
    "MissingEntry",
    "OracleError",
    "MissingSlot",
    "OracleUnavailable",
    "UnparseableReply",
    "IllegalAction",
    "NegativeCount",
    "SimulationError",
    "ScalingOverflow",
    "ArtifactIOError",
    # Logging
    "setup_logging",
    "get_logger",
    "get_run_ledger",
    "LogContext",
    "get_correlation_id",
    "generate_correlation_id",
    "clear_correlation_id",
    "mask_sensitive",
    "redact_headers",
    "RunLedger",
    "JSONFormatter",
    # Seeding
    "derive_seed",
    "agent_rng",
    "unit_jitter",
]
