"""Principal component analysis along the spectral axis.

The band-covariance matrix is diagonalized with cyclic Jacobi rotations so the
result does not depend on the LAPACK build the interpreter happens to link.
"""

import logging
from dataclasses import dataclass

import numpy as np

from hybridsn_cli.data.cube import HyperspectralCube
from hybridsn_cli.errors import DataError, NumericalError, ShapeError

logger = logging.getLogger(__name__)

JACOBI_TOLERANCE = 1e-12
JACOBI_MAX_SWEEPS = 100


@dataclass(frozen=True)
class PcaModel:
    mean: np.ndarray
    components: np.ndarray
    eigenvalues: np.ndarray

    @property
    def input_dim(self) -> int:
        return self.components.shape[1]

    @property
    def k(self) -> int:
        return self.components.shape[0]

    def reconstruct(self, projected: np.ndarray) -> np.ndarray:
        """Map projected spectra back to the input space (exact when k = input_dim)."""
        return projected @ self.components + self.mean

    def save(self, path: str) -> None:
        with open(path, "wb") as handle:
            np.savez(handle, mean=self.mean, components=self.components, eigenvalues=self.eigenvalues)

    @classmethod
    def load(cls, path: str) -> "PcaModel":
        with np.load(path) as archive:
            return cls(archive["mean"], archive["components"], archive["eigenvalues"])


def jacobi_eigh(matrix: np.ndarray, tol: float = JACOBI_TOLERANCE) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decompose a symmetric matrix by cyclic Jacobi rotations.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvectors as columns, in
    the matrix's original diagonal order (unsorted).
    """
    a = np.array(matrix, dtype=np.float64, copy=True)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeError(f"Jacobi rotation needs a square matrix, got shape {a.shape}")

    n = a.shape[0]
    v = np.eye(n)

    for sweep in range(JACOBI_MAX_SWEEPS):
        off = np.abs(a - np.diag(np.diag(a)))
        max_off = off.max() if n > 1 else 0.0
        max_diag = np.abs(np.diag(a)).max()
        if max_off <= tol * max_diag or max_off == 0.0:
            logger.debug("Jacobi converged after %d sweeps", sweep)
            return np.diag(a).copy(), v

        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue

                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0)) if theta != 0.0 else 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c

                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q

                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = a[q, p] = 0.0

                vec_p = v[:, p].copy()
                vec_q = v[:, q].copy()
                v[:, p] = c * vec_p - s * vec_q
                v[:, q] = s * vec_p + c * vec_q

    raise NumericalError(f"Jacobi eigendecomposition did not converge in {JACOBI_MAX_SWEEPS} sweeps")


def band_covariance(cube: HyperspectralCube) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(mean, covariance)`` of all pixels, population normalization."""
    pixels = cube.pixels()
    mean = pixels.mean(axis=0)
    centered = pixels - mean
    return mean, centered.T @ centered / pixels.shape[0]


def fit_pca(cube: HyperspectralCube, k: int) -> PcaModel:
    """Fit the top-``k`` principal axes of the scene's band covariance (labeled and unlabeled pixels)."""
    if not 1 <= k <= cube.bands:
        raise DataError(f"PCA component count must be in 1..{cube.bands}, got {k}")

    n_pixels = cube.height * cube.width
    if n_pixels < cube.bands:
        logger.warning("PCA fit on %d pixels for %d bands; the covariance is rank deficient", n_pixels, cube.bands)

    mean, covariance = band_covariance(cube)
    eigenvalues, eigenvectors = jacobi_eigh(covariance)

    order = np.argsort(-eigenvalues, kind="stable")[:k]
    eigenvalues = np.clip(eigenvalues[order], 0.0, None)
    components = eigenvectors[:, order].T

    # deterministic sign: largest-magnitude entry of each axis is positive
    pivots = np.argmax(np.abs(components), axis=1)
    signs = np.sign(components[np.arange(k), pivots])
    signs[signs == 0] = 1.0
    components = components * signs[:, None]

    logger.info(
        "PCA kept %d of %d components (%.2f%% of variance)",
        k,
        cube.bands,
        100.0 * eigenvalues.sum() / max(np.trace(covariance), np.finfo(float).tiny),
    )
    return PcaModel(mean=mean, components=components, eigenvalues=eigenvalues)


def apply_pca(cube: HyperspectralCube, model: PcaModel) -> HyperspectralCube:
    if cube.bands != model.input_dim:
        raise ShapeError(f"PCA model expects {model.input_dim} bands, the cube has {cube.bands}")

    projected = (cube.pixels() - model.mean) @ model.components.T
    return HyperspectralCube(projected.reshape(cube.height, cube.width, model.k))
