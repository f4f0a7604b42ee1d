"""Delay-minimizing traffic distribution over capacitated links.

The compiled extension carries the full API: the delay model and analytic
water-filling optimum, evolutionary-programming and particle-swarm searches,
dataset generation, and the neural load-to-flow predictor.
"""

__version__ = "0.1.0"

from ._core import (  # noqa: F401
    Dataset,
    DatasetRole,
    DatasetRow,
    FlowError,
    LinkSpec,
    MlpModel,
    NetworkTopology,
    NumericError,
    ParseError,
    SearchObjective,
    SearchResult,
    TrainConfig,
    TrialSummary,
    build_dataset,
    default_penalty_weight,
    delay_msec,
    kkt_optimal_flow,
    load_model,
    load_schedule,
    load_topology,
    mean_link_utilization,
    parse_topology,
    penalized_fitness,
    read_dataset,
    run_method,
    run_trials,
    save_model,
    total_capacity,
    train_mlp,
    write_dataset,
)

__all__ = [
    "Dataset",
    "DatasetRole",
    "DatasetRow",
    "FlowError",
    "LinkSpec",
    "MlpModel",
    "NetworkTopology",
    "NumericError",
    "ParseError",
    "SearchObjective",
    "SearchResult",
    "TrainConfig",
    "TrialSummary",
    "build_dataset",
    "default_penalty_weight",
    "delay_msec",
    "kkt_optimal_flow",
    "load_model",
    "load_schedule",
    "load_topology",
    "mean_link_utilization",
    "parse_topology",
    "penalized_fitness",
    "read_dataset",
    "run_method",
    "run_trials",
    "save_model",
    "total_capacity",
    "train_mlp",
    "write_dataset",
]
