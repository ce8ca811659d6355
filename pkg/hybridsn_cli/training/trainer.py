import csv
import json
import logging
import time
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Callable, Optional, Protocol

import numpy as np

from hybridsn_cli.common import Tensor
from hybridsn_cli.data.cube import HyperspectralCube
from hybridsn_cli.errors import ConfigError, DataError, NumericalError
from hybridsn_cli.metrics import ConfusionMatrix, MetricsReport, metrics_report
from hybridsn_cli.model.network import SeHybridSnModel
from hybridsn_cli.model.predict import DEFAULT_BATCH_SIZE, predict_pixels
from hybridsn_cli.nn import functional as F
from hybridsn_cli.preprocess.patches import pad_cube, patch_batch
from hybridsn_cli.preprocess.split import Role, SplitAssignment
from hybridsn_cli.training.optim import SGD, Adam

logger = logging.getLogger(__name__)

OPTIMIZERS = ("adam", "sgd")
# second entropy word of the shuffle stream, keeps it apart from split and init streams
SHUFFLE_STREAM = 0x5348


class Optimizer(Protocol):
    def step(self, params: dict[str, Tensor], grads: dict[str, Tensor]) -> None: ...


@dataclass(frozen=True)
class TrainConfig:
    optimizer: str = "adam"
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    momentum: float = 0.0
    batch_size: int = 64
    max_epochs: int = 150
    patience: int = 30
    seed: int = 0
    repeats: int = 1
    resplit_per_run: bool = True
    eval_batch_size: int = DEFAULT_BATCH_SIZE
    threads: int = 1

    def __post_init__(self):
        if self.optimizer not in OPTIMIZERS:
            raise ConfigError(f"optimizer must be one of {', '.join(OPTIMIZERS)}, got {self.optimizer!r}")
        if not self.learning_rate > 0:
            raise ConfigError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.max_epochs < 1:
            raise ConfigError(f"max_epochs must be >= 1, got {self.max_epochs}")
        if self.patience < 1:
            raise ConfigError(f"patience must be >= 1, got {self.patience}")
        if self.repeats < 1:
            raise ConfigError(f"repeats must be >= 1, got {self.repeats}")
        if not 0.0 <= self.momentum < 1.0:
            raise ConfigError(f"momentum must be in [0, 1), got {self.momentum}")
        if self.threads < 1 or self.eval_batch_size < 1:
            raise ConfigError("threads and eval_batch_size must be >= 1")

    def make_optimizer(self) -> Optimizer:
        if self.optimizer == "sgd":
            return SGD(self.learning_rate, self.momentum)
        return Adam(self.learning_rate, self.beta1, self.beta2, self.eps)


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    loss: float
    train_accuracy: float
    val_oa: float


@dataclass
class TrainReport:
    epochs: list[EpochRecord]
    selected_epoch: int
    best_val_oa: float
    seed: int
    split_seed: int
    test: Optional[MetricsReport] = None

    def to_json(self) -> dict:
        return {
            "epochs": [asdict(record) for record in self.epochs],
            "selected_epoch": self.selected_epoch,
            "best_val_oa": self.best_val_oa,
            "seed": self.seed,
            "split_seed": self.split_seed,
            "test": self.test.to_json() if self.test else None,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2)

    def write_curves(self, path: Path) -> None:
        with open(path, "w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(["epoch", "loss", "train_accuracy", "val_oa"])
            for record in self.epochs:
                values = (record.loss, record.train_accuracy, record.val_oa)
                writer.writerow([record.epoch, *(f"{value:.10g}" for value in values)])


def evaluate(
    model: SeHybridSnModel,
    cube: HyperspectralCube,
    split: SplitAssignment,
    role: Role = Role.TEST,
    batch_size: int = DEFAULT_BATCH_SIZE,
    threads: int = 1,
    padded: Optional[np.ndarray] = None,
) -> MetricsReport:
    """Metrics over exactly the pixels holding ``role``."""
    rows, cols, labels = split.coordinates(role)
    if labels.size == 0:
        raise DataError(f"the split has no {role.name.lower()} pixels")
    model.check_finite()

    padded = pad_cube(cube, model.config.window) if padded is None else padded
    predicted = predict_pixels(model, padded, rows, cols, batch_size, threads)
    return metrics_report(ConfusionMatrix.from_labels(split.num_classes, labels, predicted))


def train(
    model: SeHybridSnModel,
    cube: HyperspectralCube,
    split: SplitAssignment,
    cfg: TrainConfig,
    optimizer: Optional[Optimizer] = None,
    on_epoch: Optional[Callable[[EpochRecord], None]] = None,
) -> tuple[SeHybridSnModel, TrainReport]:
    """Mini-batch training with validation-based model selection.

    Returns the model holding the parameters of the epoch with the best
    validation OA (earliest on ties). Stops after ``cfg.patience`` epochs
    without improvement.
    """
    train_rows, train_cols, train_labels = split.coordinates(Role.TRAIN)
    if train_labels.size == 0:
        raise DataError("the split has no training pixels")
    if not split.mask(Role.VALIDATION).any():
        raise DataError("the split has no validation pixels")
    if model.config.num_classes != split.num_classes:
        raise ConfigError(f"model predicts {model.config.num_classes} classes, the split has {split.num_classes}")

    started = time.perf_counter()
    optimizer = optimizer if optimizer is not None else cfg.make_optimizer()
    padded = pad_cube(cube, model.config.window)
    targets = train_labels - 1
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([cfg.seed, SHUFFLE_STREAM])))

    records: list[EpochRecord] = []
    best_oa, best_epoch, best_params = -1.0, 0, model.snapshot()
    for epoch in range(1, cfg.max_epochs + 1):
        order = rng.permutation(train_labels.size)
        loss_sum, correct = 0.0, 0
        for batch_index, start in enumerate(range(0, order.size, cfg.batch_size)):
            chosen = order[start : start + cfg.batch_size]
            model.set_step(epoch, batch_index)
            batch = patch_batch(padded, train_rows[chosen], train_cols[chosen], model.config.window)
            logits = model.forward(batch, training=True)
            loss, grad_logits = F.softmax_cross_entropy(logits, targets[chosen])
            if not np.isfinite(loss):
                raise NumericalError("training loss is not finite", epoch=epoch, batch=batch_index)

            optimizer.step(model.parameters(), model.backward(grad_logits))
            loss_sum += loss * chosen.size
            correct += int(np.sum(np.argmax(logits, axis=1) == targets[chosen]))

        model.clear_cache()
        val_oa = evaluate(model, cube, split, Role.VALIDATION, cfg.eval_batch_size, cfg.threads, padded).oa
        record = EpochRecord(epoch, loss_sum / train_labels.size, correct / train_labels.size, val_oa)
        records.append(record)
        logger.debug("epoch %d: loss %.6f, train acc %.4f, val OA %.4f", *asdict(record).values())
        if on_epoch is not None:
            on_epoch(record)

        if val_oa > best_oa:
            best_oa, best_epoch, best_params = val_oa, epoch, model.snapshot()
        elif epoch - best_epoch >= cfg.patience:
            logger.info("Stopping at epoch %d, no validation improvement since epoch %d", epoch, best_epoch)
            break

    model.load_parameters(best_params)
    test = None
    if split.mask(Role.TEST).any():
        test = evaluate(model, cube, split, Role.TEST, cfg.eval_batch_size, cfg.threads, padded)

    report = TrainReport(
        epochs=records,
        selected_epoch=best_epoch,
        best_val_oa=best_oa,
        seed=cfg.seed,
        split_seed=split.seed,
        test=test,
    )
    logger.info(
        "Selected epoch %d with validation OA %.4f after %.1fs", best_epoch, best_oa, time.perf_counter() - started
    )
    return model, report
