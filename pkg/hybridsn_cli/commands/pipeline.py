"""Pieces shared by the dataset-driven command handlers."""

import json
import logging
import os
from dataclasses import dataclass
from typing import Optional

import numpy as np
from rich import print_json

from hybridsn_cli.config import RunConfig, check_prepared_components, resolve_run_config
from hybridsn_cli.data import GroundTruthMap, HyperspectralCube, load_ground_truth
from hybridsn_cli.errors import ConfigError, DataError
from hybridsn_cli.handler import Handler
from hybridsn_cli.preprocess import SplitAssignment
from hybridsn_cli.store import STORE_DATASET_KEY, STORE_PCA_CUBE_KEY, STORE_SPLIT_KEY, Store

logger = logging.getLogger(__name__)

PCA_CUBE_FILE = "pca_cube.npy"
PCA_MODEL_FILE = "pca_model.npz"
SPLIT_FILE = "split.json"
SPLIT_SUMMARY_FILE = "split_summary.csv"

PREPARE_FIRST = "run `hybridsn prepare` first"


@dataclass(frozen=True)
class PreparedScene:
    cube: HyperspectralCube
    gt: GroundTruthMap
    split: SplitAssignment


def read_split(path: str, gt: GroundTruthMap) -> SplitAssignment:
    try:
        with open(path, "r") as handle:
            data = json.load(handle)
    except FileNotFoundError:
        raise DataError(f"split file not found, {PREPARE_FIRST}", path=path)
    except json.JSONDecodeError as error:
        raise DataError(f"invalid split file: {error.msg}", path=path, line=error.lineno)

    try:
        return SplitAssignment.from_json(data, gt)
    except (KeyError, TypeError, ValueError) as error:
        raise DataError(f"invalid split file: {error}", path=path)


def load_prepared_scene(config: RunConfig, store: Store, split_path: Optional[str] = None) -> PreparedScene:
    """Load the PCA cube and split written by ``prepare`` plus the dataset's ground truth."""
    prepared_dataset = store.get(STORE_DATASET_KEY)
    if prepared_dataset is None:
        raise DataError(f"no prepared dataset in {config.output_dir}, {PREPARE_FIRST}")
    if prepared_dataset != config.dataset:
        raise ConfigError(
            f"{config.output_dir} holds a prepared '{prepared_dataset}' dataset but the configuration "
            f"names '{config.dataset}', run `hybridsn prepare` again"
        )

    cube_path = config.output_path(store.get(STORE_PCA_CUBE_KEY, PCA_CUBE_FILE))
    if not os.path.exists(cube_path):
        raise DataError(f"prepared cube not found, {PREPARE_FIRST}", path=cube_path)
    try:
        cube = HyperspectralCube(np.load(cube_path, allow_pickle=False))
    except ValueError as error:
        raise DataError(f"unreadable prepared cube: {error}", path=cube_path)
    check_prepared_components(config, cube.bands)

    manifest = config.manifest
    gt = load_ground_truth(manifest.ground_truth_path, cube.height, cube.width, manifest.num_classes)
    split = read_split(split_path or config.output_path(store.get(STORE_SPLIT_KEY, SPLIT_FILE)), gt)
    logger.debug("Prepared scene: %dx%dx%d, split totals %s", cube.height, cube.width, cube.bands, split.totals())
    return PreparedScene(cube, gt, split)


class PipelineHandler(Handler):
    """Resolves the run configuration and honours ``--print-config`` before :meth:`run_pipeline`."""

    def run(self, **kwargs) -> int:
        config = resolve_run_config(
            config_path=kwargs.get("config_path"),
            dataset=kwargs.get("dataset"),
            data_dir=kwargs.get("data_dir"),
            output_dir=kwargs.get("output_dir"),
            seed=kwargs.get("seed"),
            threads=kwargs.get("threads"),
            repeats=kwargs.get("repeats"),
            architecture=kwargs.get("architecture"),
        )
        if kwargs.get("print_config"):
            print_json(config.dumps())
            return 0

        config.write_resolved()
        return self.run_pipeline(config, Store(config.output_dir), **kwargs)

    def run_pipeline(self, config: RunConfig, store: Store, **kwargs) -> int:  # pragma: no cover
        raise NotImplementedError()
