from dataclasses import dataclass
from typing import Optional

import numpy as np

from hybridsn_cli.data.cube import HyperspectralCube
from hybridsn_cli.errors import DataError


@dataclass(frozen=True)
class Patch:
    """A window x window x channels neighborhood labeled by its center pixel."""

    data: np.ndarray
    label: Optional[int] = None

    @property
    def window(self) -> int:
        return self.data.shape[0]

    @property
    def channels(self) -> int:
        return self.data.shape[2]


def _check_window(window: int) -> None:
    if window < 1 or window % 2 == 0:
        raise DataError(f"Patch window must be a positive odd number, got {window}")


def pad_cube(cube: HyperspectralCube, window: int) -> np.ndarray:
    """Zero-pad the spatial axes by ``window // 2`` on every side."""
    _check_window(window)
    margin = window // 2
    return np.pad(cube.data, ((margin, margin), (margin, margin), (0, 0)))


def extract_patch(cube: HyperspectralCube, row: int, col: int, window: int, label: Optional[int] = None) -> Patch:
    """Cut the window centered at (row, col); positions outside the image are zero."""
    _check_window(window)
    if not (0 <= row < cube.height and 0 <= col < cube.width):
        raise DataError(f"Patch center ({row}, {col}) is outside the {cube.height}x{cube.width} image")

    margin = window // 2
    patch = np.zeros((window, window, cube.bands), dtype=cube.data.dtype)

    top, bottom = max(row - margin, 0), min(row + margin + 1, cube.height)
    left, right = max(col - margin, 0), min(col + margin + 1, cube.width)
    patch[top - (row - margin) : bottom - (row - margin), left - (col - margin) : right - (col - margin)] = cube.data[
        top:bottom, left:right
    ]
    return Patch(patch, label)


def patch_batch(padded: np.ndarray, rows: np.ndarray, cols: np.ndarray, window: int) -> np.ndarray:
    """Gather patches from a cube padded by :func:`pad_cube` as a B x 1 x D x H x W batch.

    D is the spectral axis, H and W the spatial window.
    """
    rows = np.asarray(rows, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    offsets = np.arange(window)
    # patch (b, i, j, band) = padded[rows[b] + i, cols[b] + j, band]
    batch = padded[rows[:, None, None] + offsets[None, :, None], cols[:, None, None] + offsets[None, None, :]]
    return np.ascontiguousarray(batch.transpose(0, 3, 1, 2)[:, None])
