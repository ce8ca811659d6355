"""Run configuration resolved in layers.

Precedence, lowest first: built-in defaults, dataset manifest defaults
(``pca_k``, ``fractions``), the config file, command-line flags.
"""

import json
import logging
import os
from dataclasses import asdict, dataclass, field
from typing import Any, Optional

from hybridsn_cli.data.manifest import DatasetManifest, load_manifest
from hybridsn_cli.errors import ConfigError
from hybridsn_cli.model.config import SeHybridSnConfig, hybridsn_baseline_config
from hybridsn_cli.training.trainer import TrainConfig
from hybridsn_cli.validators.run_config import load_config_file, validate_run_config

logger = logging.getLogger(__name__)

RESOLVED_CONFIG_FILE = "resolved_config.json"

DEFAULT_DATASET = "indian_pines"
DEFAULT_OUTPUT_DIR = "hybridsn_out"
DEFAULT_WINDOW = 19
DEFAULT_PCA_K = 30
DEFAULT_FRACTIONS = (0.05, 0.05)


def default_threads() -> int:
    return os.cpu_count() or 1


@dataclass(frozen=True)
class PreprocessConfig:
    window: int = DEFAULT_WINDOW
    pca_k: int = DEFAULT_PCA_K
    fractions: tuple[float, float] = DEFAULT_FRACTIONS
    standardize: bool = True


@dataclass(frozen=True)
class RunConfig:
    dataset: str
    output_dir: str
    seed: int
    preprocess: PreprocessConfig
    model: SeHybridSnConfig
    training: TrainConfig
    data_dir: Optional[str] = None
    config_path: Optional[str] = None
    manifest: Optional[DatasetManifest] = field(default=None, compare=False)

    def to_dict(self) -> dict[str, Any]:
        preprocess = asdict(self.preprocess)
        preprocess["fractions"] = list(self.preprocess.fractions)
        return {
            "dataset": self.dataset,
            "data_dir": self.data_dir,
            "config_path": self.config_path,
            "out": self.output_dir,
            "seed": self.seed,
            "preprocess": preprocess,
            "model": self.model.to_dict(),
            "training": asdict(self.training),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def output_path(self, *parts: str) -> str:
        return os.path.join(self.output_dir, *parts)

    def write_resolved(self) -> str:
        os.makedirs(self.output_dir, exist_ok=True)
        path = self.output_path(RESOLVED_CONFIG_FILE)
        with open(path, "w") as handle:
            handle.write(self.dumps())
        return path


def _read_config_file(path: Optional[str]) -> dict[str, Any]:
    if path is None:
        return {}

    data, error = load_config_file(path)
    if error:
        raise ConfigError(f"Cannot read config file {path}: {error}")
    if error_message := validate_run_config(data):
        raise ConfigError(f"{path}: {error_message}")
    return data


def _build_model_config(section: dict[str, Any], preprocess: PreprocessConfig, num_classes: int, seed: int):
    values = dict(section)
    architecture = values.pop("architecture", "se-hybridsn")
    derived = {"window": preprocess.window, "pca_k": preprocess.pca_k, "num_classes": num_classes, "seed": seed}
    base = hybridsn_baseline_config(**derived).to_dict() if architecture == "hybridsn" else {}
    return SeHybridSnConfig.from_dict({**base, **values, **derived, "architecture": architecture})


def resolve_run_config(
    config_path: Optional[str] = None,
    dataset: Optional[str] = None,
    data_dir: Optional[str] = None,
    output_dir: Optional[str] = None,
    seed: Optional[int] = None,
    threads: Optional[int] = None,
    repeats: Optional[int] = None,
    architecture: Optional[str] = None,
) -> RunConfig:
    """Merge every configuration layer; flags left as ``None`` do not override anything."""
    file_data = _read_config_file(config_path)

    dataset = dataset or file_data.get("dataset") or DEFAULT_DATASET
    data_dir = data_dir or file_data.get("data_dir")
    manifest = load_manifest(dataset, data_dir=data_dir)

    preprocess_values: dict[str, Any] = asdict(PreprocessConfig())
    if manifest.default_pca_k is not None:
        preprocess_values["pca_k"] = manifest.default_pca_k
    if manifest.default_fractions is not None:
        preprocess_values["fractions"] = manifest.default_fractions
    preprocess_values.update(file_data.get("preprocess", {}))
    preprocess_values["fractions"] = tuple(float(f) for f in preprocess_values["fractions"])
    preprocess = PreprocessConfig(**preprocess_values)

    run_seed = seed if seed is not None else file_data.get("seed", 0)

    model_section = dict(file_data.get("model", {}))
    if architecture is not None:
        model_section["architecture"] = architecture
    model = _build_model_config(model_section, preprocess, manifest.num_classes, run_seed)

    training_values = dict(file_data.get("training", {}))
    training_values.setdefault("threads", default_threads())
    if threads is not None:
        training_values["threads"] = threads
    if repeats is not None:
        training_values["repeats"] = repeats
    try:
        training = TrainConfig(**training_values, seed=run_seed)
    except TypeError as error:
        raise ConfigError(f"Invalid training config: {error}")

    config = RunConfig(
        dataset=dataset,
        output_dir=output_dir or file_data.get("out") or DEFAULT_OUTPUT_DIR,
        seed=run_seed,
        preprocess=preprocess,
        model=model,
        training=training,
        data_dir=data_dir,
        config_path=config_path,
        manifest=manifest,
    )
    logger.debug("Resolved configuration: %s", config.dumps())
    return config


def check_prepared_components(config: RunConfig, pca_k: int) -> None:
    if pca_k != config.preprocess.pca_k:
        raise ConfigError(
            f"the prepared cube has {pca_k} principal components but the configuration asks for "
            f"{config.preprocess.pca_k}, run `hybridsn prepare` again"
        )

