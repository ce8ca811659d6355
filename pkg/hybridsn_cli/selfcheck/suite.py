"""Numerical self-checks run by ``hybridsn selfcheck``.

Every check is independent, seeded, and reports pass/fail with a short
detail string; an exception inside a check is reported as a failure of
that check only.
"""

import logging
from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence

import numpy as np

from hybridsn_cli.data.cube import HyperspectralCube
from hybridsn_cli.data.envi import to_row_col_band
from hybridsn_cli.metrics import ConfusionMatrix, kappa
from hybridsn_cli.model.config import SeHybridSnConfig
from hybridsn_cli.model.network import build_model
from hybridsn_cli.nn import functional as F
from hybridsn_cli.nn.gradcheck import GradCheckResult, check_gradient
from hybridsn_cli.preprocess.pca import band_covariance, fit_pca
from hybridsn_cli.preprocess.split import decode_roles, encode_roles

logger = logging.getLogger(__name__)

GRADIENT_TOLERANCE = 1e-4
MODEL_GRADIENT_TOLERANCE = 1e-3
ORACLE_TOLERANCE = 1e-12
PCA_TOLERANCE = 1e-8
GRADIENT_SAMPLES = 20

# small enough for whole-model finite differences
SELFCHECK_MODEL_CONFIG = SeHybridSnConfig(
    window=5,
    pca_k=8,
    num_classes=2,
    conv3d_specs=((2, (3, 3, 3)), (2, (3, 3, 3)), (2, (1, 3, 3)), (2, (1, 3, 3))),
    conv2d_spec=(4, (3, 3)),
    sep_conv_spec=(4, (3, 3)),
    se_reduction=2,
    fc_dims=(8, 6),
    dropout_rate=0.25,
    seed=5,
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _gradient_result(name: str, results: Sequence[GradCheckResult]) -> CheckResult:
    worst = max(results, key=lambda r: r.max_relative_error)
    checked = sum(r.checked for r in results)
    detail = f"max rel err {worst.max_relative_error:.2e} at {worst.name}, {checked} coordinates"
    return CheckResult(name, all(r.passed for r in results), detail)


def _check_op(
    name: str,
    forward: Callable[[], tuple],
    backward: Callable[[object, np.ndarray], dict[str, np.ndarray]],
    tensors: dict[str, np.ndarray],
    rng: np.random.Generator,
) -> CheckResult:
    """Finite differences of ``sum(forward() * projection)`` against ``backward``."""
    out, cache = forward()
    projection = rng.normal(size=out.shape)
    grads = backward(cache, projection)

    def loss() -> float:
        return float(np.sum(forward()[0] * projection))

    results = [
        check_gradient(f"{name}.{key}", loss, tensor, grads[key], rng, GRADIENT_SAMPLES, tolerance=GRADIENT_TOLERANCE)
        for key, tensor in tensors.items()
    ]
    return _gradient_result(name, results)


def check_conv3d(rng: np.random.Generator) -> CheckResult:
    x, w, b = rng.normal(size=(2, 2, 5, 4, 4)), rng.normal(size=(3, 2, 3, 3, 3)), rng.normal(size=3)
    return _check_op(
        "conv3d",
        lambda: F.conv3d_forward(x, w, b),
        lambda cache, g: dict(zip(("input", "weight", "bias"), F.conv3d_backward(cache, g))),
        {"input": x, "weight": w, "bias": b},
        rng,
    )


def check_conv2d(rng: np.random.Generator) -> CheckResult:
    x, w, b = rng.normal(size=(2, 3, 6, 5)), rng.normal(size=(4, 3, 3, 3)), rng.normal(size=4)
    return _check_op(
        "conv2d",
        lambda: F.conv2d_forward(x, w, b),
        lambda cache, g: dict(zip(("input", "weight", "bias"), F.conv2d_backward(cache, g))),
        {"input": x, "weight": w, "bias": b},
        rng,
    )


def check_depthwise_separable(rng: np.random.Generator) -> CheckResult:
    x = rng.normal(size=(2, 3, 5, 5))
    depthwise = rng.normal(size=(3, 3, 3))
    pointwise, bias = rng.normal(size=(4, 3, 1, 1)), rng.normal(size=4)

    def forward():
        spatial, depthwise_cache = F.depthwise_conv2d_forward(x, depthwise)
        out, pointwise_cache = F.conv2d_forward(spatial, pointwise, bias)
        return out, (depthwise_cache, pointwise_cache)

    def backward(cache, grad):
        depthwise_cache, pointwise_cache = cache
        grad_spatial, grad_pointwise, grad_bias = F.conv2d_backward(pointwise_cache, grad)
        grad_x, grad_depthwise = F.depthwise_conv2d_backward(depthwise_cache, grad_spatial)
        return {"input": grad_x, "depthwise": grad_depthwise, "pointwise": grad_pointwise, "bias": grad_bias}

    tensors = {"input": x, "depthwise": depthwise, "pointwise": pointwise, "bias": bias}
    return _check_op("depthwise_separable", forward, backward, tensors, rng)


def check_squeeze_excitation(rng: np.random.Generator) -> CheckResult:
    x = rng.normal(size=(2, 4, 3, 3))
    w1, b1 = rng.normal(size=(2, 4)), rng.normal(size=2) + 0.5
    w2, b2 = rng.normal(size=(4, 2)), rng.normal(size=4)

    def backward(cache, grad):
        grad_x, grads = F.se_backward(cache, grad)
        return {"input": grad_x, **grads}

    return _check_op(
        "squeeze_excitation",
        lambda: F.se_forward(x, w1, b1, w2, b2),
        backward,
        {"input": x, "w1": w1, "b1": b1, "w2": w2, "b2": b2},
        rng,
    )


def check_dense(rng: np.random.Generator) -> CheckResult:
    x, w, b = rng.normal(size=(3, 5)), rng.normal(size=(4, 5)), rng.normal(size=4)
    return _check_op(
        "dense",
        lambda: F.dense_forward(x, w, b),
        lambda cache, g: dict(zip(("input", "weight", "bias"), F.dense_backward(cache, w, g))),
        {"input": x, "weight": w, "bias": b},
        rng,
    )


def check_dropout(rng: np.random.Generator) -> CheckResult:
    x = rng.normal(size=(4, 6))
    return _check_op(
        "dropout",
        lambda: F.dropout_forward(x, 0.4, [7, 1, 2, 0], training=True),
        lambda mask, g: {"input": F.dropout_backward(mask, g)},
        {"input": x},
        rng,
    )


def check_global_avg_pool(rng: np.random.Generator) -> CheckResult:
    x = rng.normal(size=(2, 3, 4, 5))
    return _check_op(
        "global_avg_pool",
        lambda: F.global_avg_pool_forward(x),
        lambda shape, g: {"input": F.global_avg_pool_backward(shape, g)},
        {"input": x},
        rng,
    )


def check_softmax_cross_entropy(rng: np.random.Generator) -> CheckResult:
    logits = rng.normal(size=(5, 4))
    targets = rng.integers(0, 4, size=5)
    _, grad = F.softmax_cross_entropy(logits, targets)

    result = check_gradient(
        "softmax_cross_entropy.logits",
        lambda: F.softmax_cross_entropy(logits, targets)[0],
        logits,
        grad,
        rng,
        GRADIENT_SAMPLES,
        tolerance=GRADIENT_TOLERANCE,
    )
    return _gradient_result("softmax_cross_entropy", [result])


def check_whole_model(rng: np.random.Generator) -> CheckResult:
    model = build_model(SELFCHECK_MODEL_CONFIG)
    model.set_step(1, 0)
    batch = rng.normal(size=(2,) + model.input_shape)
    targets = np.array([0, 1])

    def loss() -> float:
        return F.softmax_cross_entropy(model.forward(batch, training=True), targets)[0]

    _, grad_logits = F.softmax_cross_entropy(model.forward(batch, training=True), targets)
    grads = {name: grad.copy() for name, grad in model.backward(grad_logits).items()}
    model.clear_cache()

    results = [
        check_gradient(name, loss, tensor, grads[name], rng, samples=2, tolerance=MODEL_GRADIENT_TOLERANCE)
        for name, tensor in model.parameters().items()
    ]
    return _gradient_result("whole_model", results)


def _naive_conv(x: np.ndarray, w: np.ndarray, b: np.ndarray) -> np.ndarray:
    kernel = w.shape[2:]
    out_shape = (x.shape[0], w.shape[0]) + tuple(n - k + 1 for n, k in zip(x.shape[2:], kernel))
    out = np.zeros(out_shape)
    for index in np.ndindex(*out_shape):
        n, o, position = index[0], index[1], index[2:]
        window = tuple(slice(p, p + k) for p, k in zip(position, kernel))
        out[index] = b[o] + np.sum(w[o] * x[(n, slice(None)) + window])
    return out


def check_convolution_oracle(rng: np.random.Generator, shapes: int = 6) -> CheckResult:
    worst = 0.0
    for index in range(shapes):
        spatial = 3 if index % 2 else 2
        channels_in, channels_out = rng.integers(1, 4, size=2)
        kernel = tuple(int(k) for k in rng.integers(1, 4, size=spatial))
        extents = tuple(k + int(e) for k, e in zip(kernel, rng.integers(0, 3, size=spatial)))
        x = rng.normal(size=(2, channels_in) + extents)
        w = rng.normal(size=(channels_out, channels_in) + kernel)
        b = rng.normal(size=channels_out)
        forward = F.conv3d_forward if spatial == 3 else F.conv2d_forward
        worst = max(worst, float(np.max(np.abs(forward(x, w, b)[0] - _naive_conv(x, w, b)))))
    detail = f"max abs err {worst:.2e} over {shapes} shapes"
    return CheckResult("convolution_oracle", worst <= ORACLE_TOLERANCE, detail)


def _power_iteration(matrix: np.ndarray, max_iterations: int = 20000) -> tuple[np.ndarray, np.ndarray]:
    work = matrix.copy()
    values, vectors = [], []
    for index in range(matrix.shape[0]):
        vector = np.ones(matrix.shape[0]) + 0.01 * index
        vector /= np.linalg.norm(vector)
        for _ in range(max_iterations):
            updated = work @ vector
            updated /= np.linalg.norm(updated)
            converged = np.max(np.abs(updated - vector)) < 1e-15
            vector = updated
            if converged:
                break
        value = vector @ matrix @ vector
        values.append(value)
        vectors.append(vector)
        work = work - value * np.outer(vector, vector)
    return np.array(values), np.array(vectors)


def check_pca_oracle(rng: np.random.Generator) -> CheckResult:
    bands = int(rng.integers(6, 13))
    scales = np.linspace(float(bands), 1.0, bands)
    cube = HyperspectralCube((rng.normal(size=(60, bands)) * scales).reshape(6, 10, bands))

    model = fit_pca(cube, bands)
    _, covariance = band_covariance(cube)
    values, vectors = _power_iteration(covariance)

    value_error = float(np.max(np.abs(model.eigenvalues - values)))
    aligned = model.components * np.sign(np.sum(model.components * vectors, axis=1))[:, None]
    vector_error = float(np.max(np.abs(aligned - vectors)))
    worst = max(value_error, vector_error)
    return CheckResult("pca_oracle", worst <= PCA_TOLERANCE, f"{bands} bands, max abs err {worst:.2e}")


def _enumerated_kappa(counts: np.ndarray) -> float:
    total = counts.sum()
    true_share, predicted_share = counts.sum(axis=1) / total, counts.sum(axis=0) / total
    chance = sum(true_share[i] * predicted_share[i] for i in range(len(counts)))
    observed = sum(counts[i, i] for i in range(len(counts))) / total
    return (observed - chance) / (1.0 - chance)


def check_kappa_oracle(rng: np.random.Generator, matrices: int = 100) -> CheckResult:
    worst = 0.0
    for _ in range(matrices):
        size = int(rng.integers(2, 6))
        counts = rng.integers(0, 20, size=(size, size))
        counts[0, 1] += 1
        counts[1, 1] += 1
        computed = kappa(ConfusionMatrix(size, counts.astype(np.int64)))
        worst = max(worst, abs(computed - _enumerated_kappa(counts.astype(np.float64))))
    return CheckResult("kappa_oracle", worst <= ORACLE_TOLERANCE, f"max abs err {worst:.2e} over {matrices} matrices")


def check_round_trips(rng: np.random.Generator) -> CheckResult:
    failures = []

    x = rng.normal(size=(2, 3, 4, 5, 5))
    if not np.array_equal(F.reshape_split_channels(F.reshape_merge_channels(x), 3), x):
        failures.append("merge/split channels")

    cube = rng.normal(size=(3, 4, 5))
    layouts = {"bsq": (2, 0, 1), "bil": (0, 2, 1), "bip": (0, 1, 2)}
    for interleave, axes in layouts.items():
        flat = np.ascontiguousarray(cube.transpose(axes)).ravel()
        if not np.array_equal(to_row_col_band(flat, 3, 4, 5, interleave), cube):
            failures.append(f"{interleave} interleave")

    roles = rng.integers(0, 3, size=200).astype(np.int8)
    if not np.array_equal(decode_roles(encode_roles(roles)), roles):
        failures.append("split run-length encoding")

    if not np.array_equal(F.crop_depth(F.uncrop_depth(x, 8), 4), x):
        failures.append("spectral crop")

    detail = "all round trips exact" if not failures else f"failed: {', '.join(failures)}"
    return CheckResult("round_trips", not failures, detail)


def check_attention_ablation(rng: np.random.Generator) -> CheckResult:
    with_se = build_model(SELFCHECK_MODEL_CONFIG)
    without_se = build_model(replace(SELFCHECK_MODEL_CONFIG, use_se=False))
    with_se.set_gate_override(1.0)

    batch = rng.normal(size=(3,) + with_se.input_shape)
    error = float(np.max(np.abs(with_se.forward(batch) - without_se.forward(batch))))
    return CheckResult("attention_ablation", error <= ORACLE_TOLERANCE, f"max abs err {error:.2e} with gates at 1")


CHECKS: tuple[tuple[str, Callable[[np.random.Generator], CheckResult]], ...] = (
    ("conv3d", check_conv3d),
    ("conv2d", check_conv2d),
    ("depthwise_separable", check_depthwise_separable),
    ("squeeze_excitation", check_squeeze_excitation),
    ("dense", check_dense),
    ("dropout", check_dropout),
    ("global_avg_pool", check_global_avg_pool),
    ("softmax_cross_entropy", check_softmax_cross_entropy),
    ("whole_model", check_whole_model),
    ("convolution_oracle", check_convolution_oracle),
    ("pca_oracle", check_pca_oracle),
    ("kappa_oracle", check_kappa_oracle),
    ("round_trips", check_round_trips),
    ("attention_ablation", check_attention_ablation),
)


def check_names() -> list[str]:
    return [name for name, _ in CHECKS]


def run_selfcheck(seed: int = 0, only: Optional[Sequence[str]] = None) -> list[CheckResult]:
    """Run every check (or the ``only`` subset) with its own seeded stream."""
    results = []
    for index, (name, check) in enumerate(CHECKS):
        if only and name not in only:
            continue
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, index])))
        try:
            result = check(rng)
        except Exception as error:
            result = CheckResult(name, False, f"{type(error).__name__}: {error}")
        logger.debug("selfcheck %s: %s (%s)", name, "pass" if result.passed else "FAIL", result.detail)
        results.append(result)
    return results
