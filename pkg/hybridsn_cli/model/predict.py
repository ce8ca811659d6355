import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Optional

import numpy as np

from hybridsn_cli.data.cube import GroundTruthMap, HyperspectralCube
from hybridsn_cli.errors import DataError, ShapeError
from hybridsn_cli.model.network import SeHybridSnModel
from hybridsn_cli.preprocess.patches import pad_cube, patch_batch

logger = logging.getLogger(__name__)

DEFAULT_BATCH_SIZE = 256


def predict_pixels(
    model: SeHybridSnModel,
    padded: np.ndarray,
    rows: np.ndarray,
    cols: np.ndarray,
    batch_size: int = DEFAULT_BATCH_SIZE,
    threads: int = 1,
) -> np.ndarray:
    """Classify the pixels at (rows, cols) of a cube padded by :func:`pad_cube`; returns 1-based class ids.

    Batches are fixed before dispatch and results are assembled in batch order,
    so the output does not depend on ``threads``.
    """
    window = model.config.window
    starts = range(0, len(rows), batch_size)

    def run(start: int) -> np.ndarray:
        batch = patch_batch(padded, rows[start : start + batch_size], cols[start : start + batch_size], window)
        return np.argmax(model.forward(batch, training=False), axis=1) + 1

    if len(rows) == 0:
        return np.zeros(0, dtype=np.int64)
    if threads <= 1:
        return np.concatenate([run(start) for start in starts])
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return np.concatenate(list(pool.map(run, starts)))


def predict_scene(
    model: SeHybridSnModel,
    cube: HyperspectralCube,
    gt: Optional[GroundTruthMap] = None,
    all_pixels: bool = False,
    batch_size: int = DEFAULT_BATCH_SIZE,
    threads: int = 1,
) -> np.ndarray:
    """Label grid of the scene: labeled pixels (every pixel with ``all_pixels``) get a class, the rest 0."""
    if cube.bands != model.config.pca_k:
        raise ShapeError(f"cube has {cube.bands} components but the model expects {model.config.pca_k}")
    if gt is None and not all_pixels:
        raise DataError("a ground-truth map is required unless every pixel is classified")
    if gt is not None:
        gt.check_matches(cube)
    model.check_finite()

    if all_pixels:
        rows, cols = np.indices((cube.height, cube.width)).reshape(2, -1)
    else:
        rows, cols = np.nonzero(gt.labels)

    logger.info("Classifying %d pixels", len(rows))
    predictions = predict_pixels(model, pad_cube(cube, model.config.window), rows, cols, batch_size, threads)
    grid = np.zeros((cube.height, cube.width), dtype=np.int64)
    grid[rows, cols] = predictions
    return grid
