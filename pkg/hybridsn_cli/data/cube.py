from dataclasses import dataclass
from typing import Sequence

import numpy as np

from hybridsn_cli.errors import DataError


@dataclass(frozen=True)
class HyperspectralCube:
    """Reflectance cube stored as (row, col, band)."""

    data: np.ndarray

    def __post_init__(self):
        if self.data.ndim != 3:
            raise DataError(f"Hyperspectral cube must be 3-dimensional, got shape {self.data.shape}")
        if min(self.data.shape) < 1:
            raise DataError(f"Hyperspectral cube extents must be >= 1, got shape {self.data.shape}")

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def bands(self) -> int:
        return self.data.shape[2]

    def pixels(self) -> np.ndarray:
        """Return the cube as a (height * width, bands) matrix in row-major pixel order."""
        return self.data.reshape(-1, self.bands)


@dataclass(frozen=True)
class GroundTruthMap:
    """Per-pixel class ids, 0 = unlabeled background, 1..K = classes."""

    labels: np.ndarray
    num_classes: int

    def __post_init__(self):
        if self.labels.ndim != 2:
            raise DataError(f"Ground truth must be 2-dimensional, got shape {self.labels.shape}")
        if self.labels.size and int(self.labels.max()) > self.num_classes:
            raise DataError(f"Ground truth label {int(self.labels.max())} exceeds the class count {self.num_classes}")
        if self.labels.size and int(self.labels.min()) < 0:
            raise DataError("Ground truth labels must be non-negative")

    @property
    def height(self) -> int:
        return self.labels.shape[0]

    @property
    def width(self) -> int:
        return self.labels.shape[1]

    def labeled_count(self) -> int:
        return int(np.count_nonzero(self.labels))

    def class_totals(self) -> np.ndarray:
        """Number of labeled pixels per class, index 0 = class 1."""
        return np.bincount(self.labels.ravel(), minlength=self.num_classes + 1)[1:]

    def check_matches(self, cube: HyperspectralCube) -> None:
        if (self.height, self.width) != (cube.height, cube.width):
            raise DataError(
                f"Ground truth is {self.height}x{self.width} but the cube is {cube.height}x{cube.width}"
            )


def discard_bands(cube: HyperspectralCube, bands_to_discard: Sequence[int]) -> HyperspectralCube:
    """Drop the listed 0-based bands, keeping the others in their original order."""
    indices = [int(i) for i in bands_to_discard]
    if len(set(indices)) != len(indices):
        raise DataError(f"Duplicate band index in discard list: {sorted(indices)}")

    for idx in indices:
        if idx < 0 or idx >= cube.bands:
            raise DataError(f"Band index {idx} out of range for a cube with {cube.bands} bands")

    if not indices:
        return cube

    if len(indices) == cube.bands:
        raise DataError("Cannot discard every band of the cube")

    keep = np.setdiff1d(np.arange(cube.bands), indices)
    return HyperspectralCube(np.ascontiguousarray(cube.data[:, :, keep]))
