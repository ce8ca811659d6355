"""Central finite-difference gradient checks."""

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np

logger = logging.getLogger(__name__)

DEFAULT_STEP = 1e-5
DEFAULT_SAMPLES = 20
RELATIVE_FLOOR = 1e-7


@dataclass(frozen=True)
class GradCheckResult:
    name: str
    max_relative_error: float
    checked: int
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.max_relative_error)) and self.max_relative_error <= self.tolerance


def relative_error(analytic: float, numeric: float) -> float:
    return abs(analytic - numeric) / max(abs(analytic), abs(numeric), RELATIVE_FLOOR)


def sample_indices(shape: tuple[int, ...], count: int, rng: np.random.Generator) -> list[tuple[int, ...]]:
    """Up to ``count`` distinct coordinates; every coordinate when the tensor is small."""
    size = int(np.prod(shape))
    flat = np.arange(size) if size <= count else rng.choice(size, size=count, replace=False)
    return [tuple(int(i) for i in np.unravel_index(f, shape)) for f in flat]


def check_gradient(
    name: str,
    loss_fn: Callable[[], float],
    tensor: np.ndarray,
    analytic: np.ndarray,
    rng: np.random.Generator,
    samples: int = DEFAULT_SAMPLES,
    step: float = DEFAULT_STEP,
    tolerance: float = 1e-4,
) -> GradCheckResult:
    """Compare ``analytic`` with central differences of ``loss_fn`` w.r.t. ``tensor``.

    ``tensor`` is perturbed in place and restored; ``loss_fn`` must read it.
    """
    if analytic.shape != tensor.shape:
        raise ValueError(f"{name}: analytic gradient shape {analytic.shape} differs from tensor {tensor.shape}")

    worst = 0.0
    indices = sample_indices(tensor.shape, samples, rng)
    for index in indices:
        original = tensor[index]
        tensor[index] = original + step
        plus = loss_fn()
        tensor[index] = original - step
        minus = loss_fn()
        tensor[index] = original

        numeric = (plus - minus) / (2.0 * step)
        error = relative_error(float(analytic[index]), numeric)
        if not np.isfinite(error):
            error = float("inf")
        worst = max(worst, error)

    result = GradCheckResult(name, worst, len(indices), tolerance)
    logger.debug("gradcheck %s: max rel err %.3e over %d coordinates", name, worst, len(indices))
    return result
