"""groupsim - group-agent simulation of social-network event engagement.

Population groups are agents. Each agent perceives an online event day by
day, updates its emotions and memory, picks an action, and produces
population-weighted views, likes, comments and shares. Daily totals feed
back into what every agent perceives next.

Architecture:
    groupsim/
    ├── core/           # Foundation modules (exceptions, logging, validation, models, seeding)
    ├── hierarchy/      # Group-tree parser, knowledge graph, agent instantiation
    ├── oracle/         # Prompt templates, reply grammar, stub and remote oracles, gateway
    ├── services/       # Reasoning, actions, simulation runtime, evaluation
    ├── commands/       # CLI command parsers and handlers
    ├── metrics.py      # t-test, MAPE, DTW, Z-scores
    ├── fixtures.py     # Synthetic event archetypes
    ├── reporting.py    # Artefact readers and writers
    └── config.py       # Configuration loading
"""

__version__ = "0.1.0"
__description__ = "Group-agent social network simulation engine"

from .config import RunConfig, default_run_config, load_run_config
from .core import (
    ConfigurationError,
    GroupSimError,
    LogContext,
    OracleError,
    SimulationError,
    ValidationError,
    get_logger,
    get_run_ledger,
    setup_logging,
)
from .core.models import EventRecord, FadingConfig, GroupAgent
from .fixtures import Archetype, make_fixture
from .hierarchy import KnowledgeGraph, load_bundled_graph, parse_group_tree
from .metrics import MetricReport
from .oracle import OracleGateway, RemoteOracle, StubOracle
from .services import (
    ReplicationSet,
    Scenario,
    SimulationRuntime,
    SimulationTrace,
    aggregate_reports,
    evaluate_traces,
    run_replications,
    run_simulation,
)

__all__ = [
    "__version__",
    # Configuration
    "RunConfig",
    "load_run_config",
    "default_run_config",
    # Model
    "EventRecord",
    "FadingConfig",
    "GroupAgent",
    # Hierarchy
    "KnowledgeGraph",
    "load_bundled_graph",
    "parse_group_tree",
    # Oracle
    "OracleGateway",
    "StubOracle",
    "RemoteOracle",
    # Runtime
    "Scenario",
    "SimulationRuntime",
    "SimulationTrace",
    "ReplicationSet",
    "run_simulation",
    "run_replications",
    # Evaluation
    "MetricReport",
    "evaluate_traces",
    "aggregate_reports",
    "Archetype",
    "make_fixture",
    # Exceptions
    "GroupSimError",
    "ConfigurationError",
    "ValidationError",
    "OracleError",
    "SimulationError",
    # Logging
    "setup_logging",
    "get_logger",
    "LogContext",
    "get_run_ledger",
]
