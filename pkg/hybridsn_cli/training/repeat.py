"""Repeated seeded runs and their mean / sample-std aggregation."""

import json
import logging
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np

from hybridsn_cli.data.cube import GroundTruthMap, HyperspectralCube
from hybridsn_cli.errors import HybridSNError, NumericalError
from hybridsn_cli.metrics import MetricsReport
from hybridsn_cli.model.config import SeHybridSnConfig
from hybridsn_cli.model.network import SeHybridSnModel, build_model
from hybridsn_cli.preprocess.split import SplitAssignment, stratified_split
from hybridsn_cli.training.trainer import EpochRecord, TrainConfig, TrainReport, train

logger = logging.getLogger(__name__)

RunCallback = Callable[[int, SeHybridSnModel, TrainReport, SplitAssignment], None]


@dataclass(frozen=True)
class MetricSummary:
    mean: float
    std: float


@dataclass
class AggregateReport:
    oa: MetricSummary
    aa: MetricSummary
    kappa: MetricSummary
    per_class: list[Optional[MetricSummary]]
    runs: list[dict] = field(default_factory=list)
    failures: list[dict] = field(default_factory=list)
    single_run: bool = False

    @property
    def completed(self) -> int:
        return len(self.runs)

    def to_json(self) -> dict:
        def summary(value: Optional[MetricSummary]):
            return None if value is None else {"mean": value.mean, "std": value.std}

        return {
            "oa": summary(self.oa),
            "aa": summary(self.aa),
            "kappa": summary(self.kappa),
            "per_class": [summary(v) for v in self.per_class],
            "runs": self.runs,
            "failures": self.failures,
            "single_run": self.single_run,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2)


def _summarize(values: Sequence[float]) -> MetricSummary:
    array = np.asarray(values, dtype=np.float64)
    std = float(array.std(ddof=1)) if array.size > 1 else 0.0
    return MetricSummary(float(array.mean()), std)


def aggregate(reports: Sequence[MetricsReport], runs: Optional[list[dict]] = None) -> AggregateReport:
    """Mean and sample standard deviation (n - 1) of every index; std is 0 for a single run."""
    if not reports:
        raise NumericalError("no completed run to aggregate")
    if len(reports) == 1:
        logger.warning("Only one run completed, standard deviations are reported as 0")

    per_class: list[Optional[MetricSummary]] = []
    for index in range(reports[0].num_classes):
        values = [r.per_class[index] for r in reports if r.per_class[index] is not None]
        per_class.append(_summarize(values) if values else None)

    return AggregateReport(
        oa=_summarize([r.oa for r in reports]),
        aa=_summarize([r.aa for r in reports]),
        kappa=_summarize([r.kappa for r in reports]),
        per_class=per_class,
        runs=list(runs or []),
        single_run=len(reports) == 1,
    )


def run_repeated(
    model_config: SeHybridSnConfig,
    train_config: TrainConfig,
    cube: HyperspectralCube,
    gt: GroundTruthMap,
    fractions: tuple[float, float],
    base_seed: int,
    on_run: Optional[RunCallback] = None,
    on_epoch: Optional[Callable[[int, EpochRecord], None]] = None,
) -> AggregateReport:
    """Train ``train_config.repeats`` models; run ``i`` uses seed ``base_seed + i`` for split, init and dropout.

    With ``resplit_per_run`` off every run shares the split drawn with ``base_seed``.
    A failing run is logged and recorded, the others are still aggregated.
    """
    reports: list[MetricsReport] = []
    runs: list[dict] = []
    failures: list[dict] = []
    shared_split = None if train_config.resplit_per_run else stratified_split(gt, *fractions, base_seed)

    for index in range(train_config.repeats):
        seed = base_seed + index
        try:
            split = shared_split if shared_split is not None else stratified_split(gt, *fractions, seed)
            model = build_model(replace(model_config, seed=seed))
            epoch_hook = None if on_epoch is None else (lambda record, run=index: on_epoch(run, record))
            model, report = train(model, cube, split, replace(train_config, seed=seed), on_epoch=epoch_hook)
        except Exception as error:
            # one broken run never aborts the others
            if not isinstance(error, HybridSNError):
                logger.debug("Run %d (seed %d) raised", index, seed, exc_info=True)
            logger.warning("Run %d (seed %d) failed: %s: %s", index, seed, type(error).__name__, error)
            failures.append({"run": index, "seed": seed, "error_type": type(error).__name__, "error": str(error)})
            continue

        if report.test is None:
            logger.warning("Run %d (seed %d) has no test pixels, it is left out of the aggregate", index, seed)
        else:
            reports.append(report.test)
            runs.append(
                {"run": index, "seed": seed, "oa": report.test.oa, "aa": report.test.aa, "kappa": report.test.kappa}
            )
        if on_run is not None:
            on_run(index, model, report, split)

    if failures:
        logger.warning("%d of %d runs failed", len(failures), train_config.repeats)
    result = aggregate(reports, runs)
    result.failures = failures
    return result
