import logging
import os
from typing import Optional

import numpy as np

from hybridsn_cli.commands.pipeline import PipelineHandler, load_prepared_scene
from hybridsn_cli.config import RunConfig
from hybridsn_cli.errors import CheckpointError, ConfigError
from hybridsn_cli.metrics import ConfusionMatrix
from hybridsn_cli.model import SeHybridSnModel, load_checkpoint
from hybridsn_cli.preprocess import Role
from hybridsn_cli.store import STORE_RUNS_KEY, Store
from hybridsn_cli.training import evaluate

logger = logging.getLogger(__name__)

METRICS_REPORT_FILE = "metrics_report.json"
CONFUSION_MATRIX_FILE = "confusion_matrix.csv"


def trained_artifacts(config: RunConfig, store: Store, checkpoint: Optional[str], split: Optional[str]):
    """Checkpoint and split paths: explicit options first, then the first run recorded by ``train``.

    A checkpoint given without a split is evaluated against the split written by ``prepare``.
    """
    runs = store.get(STORE_RUNS_KEY) or []
    if checkpoint is None:
        if not runs:
            raise ConfigError("no checkpoint given and no trained run recorded, run `hybridsn train` first")
        checkpoint = config.output_path(runs[0]["checkpoint"])
        split = split or config.output_path(runs[0]["split"])
    return checkpoint, split


def load_matching_model(path: str, config: RunConfig, bands: int) -> SeHybridSnModel:
    if not os.path.exists(path):
        raise CheckpointError("checkpoint not found", path=path)

    model = load_checkpoint(path)
    if model.config.pca_k != bands:
        raise CheckpointError(
            f"checkpoint expects {model.config.pca_k} principal components, the prepared cube has {bands}", path=path
        )
    if model.config.num_classes != config.manifest.num_classes:
        raise CheckpointError(
            f"checkpoint predicts {model.config.num_classes} classes, "
            f"'{config.dataset}' has {config.manifest.num_classes}",
            path=path,
        )
    return model


class EvalHandler(PipelineHandler):
    error_title = "Evaluation Error"

    def run_pipeline(self, config: RunConfig, store: Store, **kwargs) -> int:
        checkpoint, split_path = trained_artifacts(config, store, kwargs.get("checkpoint"), kwargs.get("split"))
        scene = load_prepared_scene(config, store, split_path=split_path)
        model = load_matching_model(checkpoint, config, scene.cube.bands)

        report = evaluate(
            model,
            scene.cube,
            scene.split,
            Role.TEST,
            batch_size=config.training.eval_batch_size,
            threads=config.training.threads,
        )
        with open(config.output_path(METRICS_REPORT_FILE), "w") as handle:
            handle.write(report.dumps())
        confusion = ConfusionMatrix(report.num_classes, np.asarray(report.confusion, dtype=np.int64))
        confusion.to_csv(config.output_path(CONFUSION_MATRIX_FILE), config.manifest.class_names)

        self.formatter.print_table(
            self.formatter.metrics_table(report, config.manifest.class_names, title=f"Test results, {checkpoint}")
        )
        self.formatter.print_success_panel(
            f"OA {100 * report.oa:.2f}, AA {100 * report.aa:.2f}, Kappa×100 {100 * report.kappa:.2f} "
            f"over {report.samples} test pixels"
        )
        return 0
