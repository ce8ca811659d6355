"""Training loop, optimizers and repeated-run aggregation."""

from hybridsn_cli.training.optim import SGD, Adam, AdamState, adam_step
from hybridsn_cli.training.repeat import AggregateReport, MetricSummary, aggregate, run_repeated
from hybridsn_cli.training.trainer import EpochRecord, TrainConfig, TrainReport, evaluate, train

__all__ = [
    "SGD",
    "Adam",
    "AdamState",
    "AggregateReport",
    "EpochRecord",
    "MetricSummary",
    "TrainConfig",
    "TrainReport",
    "adam_step",
    "aggregate",
    "evaluate",
    "run_repeated",
    "train",
]
