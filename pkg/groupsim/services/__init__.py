"""Simulation services.

Services:
    ReasoningEngine: Perception, emotions, state transition, decisions, memory
    ActionEngine: Engagement generation, event-state aggregation, prediction
    SimulationRuntime: Day-tick loop, traces and replications
    evaluate_traces / aggregate_reports: Metrics against ground truth

Usage:
    from groupsim.services import Scenario, SimulationRuntime

    runtime = SimulationRuntime(graph, gateway, cfg)
    trace = runtime.run(Scenario(event, layer=3), seed=0)
"""

from .actions import (
    ActionEngine,
    OutcomeSummary,
    aggregate_event_state,
    engagement_rows,
    enforce_engagement_laws,
    generate_engagement,
    predict_outcome,
    tally_seats,
)
from .evaluation import EventPair, aggregate_reports, evaluate_traces, event_pair, mean_series
from .reasoning import (
    ReasoningEngine,
    amplify_change,
    apply_fading,
    decide_action,
    memory_influence,
    perceive,
    transition_state,
    update_emotion,
    update_memory,
)
from .runtime import (
    ReplicationSet,
    Scenario,
    SimulationRuntime,
    SimulationTrace,
    run_replications,
    run_simulation,
    summarize_replications,
)

__all__ = [
    "ReasoningEngine",
    "perceive",
    "update_emotion",
    "amplify_change",
    "apply_fading",
    "transition_state",
    "memory_influence",
    "decide_action",
    "update_memory",
    "ActionEngine",
    "OutcomeSummary",
    "generate_engagement",
    "enforce_engagement_laws",
    "aggregate_event_state",
    "engagement_rows",
    "predict_outcome",
    "tally_seats",
    "Scenario",
    "SimulationTrace",
    "ReplicationSet",
    "SimulationRuntime",
    "run_simulation",
    "run_replications",
    "summarize_replications",
    "EventPair",
    "evaluate_traces",
    "aggregate_reports",
    "event_pair",
    "mean_series",
]
