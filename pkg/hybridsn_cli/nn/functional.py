"""Forward and backward passes of every network operation.

Each ``*_forward`` returns ``(output, cache)`` and the matching ``*_backward``
takes ``(cache, grad_output)``. Convolutions are "valid"; padding is a
separate operation. Layouts are channels-first: B x C x H x W for 2D and
B x C x D x H x W for 3D, with D the spectral axis.
"""

from typing import Optional

import numpy as np

from hybridsn_cli.common import Tensor
from hybridsn_cli.errors import ShapeError


def _check_conv(x: Tensor, w: Tensor, b: Tensor, nd: int, name: str) -> None:
    if x.ndim != nd + 2 or w.ndim != nd + 2:
        raise ShapeError(f"{name}: expected {nd + 2}-d input and weights, got {x.shape} and {w.shape}")
    if x.shape[1] != w.shape[1]:
        raise ShapeError(f"{name}: input has {x.shape[1]} channels, weights expect {w.shape[1]}")
    if b.shape != (w.shape[0],):
        raise ShapeError(f"{name}: bias shape {b.shape} does not match {w.shape[0]} output channels")
    for extent, k in zip(x.shape[2:], w.shape[2:]):
        if extent < k:
            raise ShapeError(f"{name}: input extents {x.shape[2:]} are smaller than the kernel {w.shape[2:]}")


def _window(offset: tuple[int, ...], out_shape: tuple[int, ...]) -> tuple[slice, ...]:
    return tuple(slice(o, o + n) for o, n in zip(offset, out_shape))


def _conv_forward(x: Tensor, w: Tensor, b: Tensor) -> tuple[Tensor, tuple]:
    kernel = w.shape[2:]
    out_shape = tuple(n - k + 1 for n, k in zip(x.shape[2:], kernel))

    # channels-last so every kernel offset is one matrix product
    x_last = np.moveaxis(x, 1, -1)
    out = np.zeros((x.shape[0],) + out_shape + (w.shape[0],), dtype=np.result_type(x, w))
    for offset in np.ndindex(*kernel):
        patch = x_last[(slice(None),) + _window(offset, out_shape)]
        out += patch @ w[(slice(None), slice(None)) + offset].T
    out += b

    return np.ascontiguousarray(np.moveaxis(out, -1, 1)), (x, w)


def _conv_backward(cache: tuple, grad_out: Tensor) -> tuple[Tensor, Tensor, Tensor]:
    x, w = cache
    kernel = w.shape[2:]
    out_shape = grad_out.shape[2:]
    if grad_out.shape[:2] != (x.shape[0], w.shape[0]) or out_shape != tuple(
        n - k + 1 for n, k in zip(x.shape[2:], kernel)
    ):
        raise ShapeError(f"convolution backward: gradient shape {grad_out.shape} does not match the forward pass")

    x_last = np.moveaxis(x, 1, -1)
    g_last = np.moveaxis(grad_out, 1, -1)
    g_flat = g_last.reshape(-1, w.shape[0])

    grad_x_last = np.zeros(x_last.shape, dtype=np.result_type(x, grad_out))
    grad_w = np.zeros_like(w, dtype=np.result_type(w, grad_out))
    for offset in np.ndindex(*kernel):
        window = (slice(None),) + _window(offset, out_shape)
        w_offset = w[(slice(None), slice(None)) + offset]
        grad_w[(slice(None), slice(None)) + offset] = g_flat.T @ x_last[window].reshape(-1, w.shape[1])
        grad_x_last[window] += g_last @ w_offset

    grad_b = grad_out.sum(axis=(0,) + tuple(range(2, grad_out.ndim)))
    return np.ascontiguousarray(np.moveaxis(grad_x_last, -1, 1)), grad_w, grad_b


def conv2d_forward(x: Tensor, weight: Tensor, bias: Tensor) -> tuple[Tensor, tuple]:
    """Pre-activation 2D convolution: B x C x H x W -> B x C' x (H - kh + 1) x (W - kw + 1)."""
    _check_conv(x, weight, bias, 2, "conv2d")
    return _conv_forward(x, weight, bias)


def conv2d_backward(cache: tuple, grad_out: Tensor) -> tuple[Tensor, Tensor, Tensor]:
    return _conv_backward(cache, grad_out)


def conv3d_forward(x: Tensor, weight: Tensor, bias: Tensor) -> tuple[Tensor, tuple]:
    """Pre-activation 3D convolution: B x C x D x H x W -> B x C' x D' x H' x W'."""
    _check_conv(x, weight, bias, 3, "conv3d")
    return _conv_forward(x, weight, bias)


def conv3d_backward(cache: tuple, grad_out: Tensor) -> tuple[Tensor, Tensor, Tensor]:
    return _conv_backward(cache, grad_out)


def depthwise_conv2d_forward(x: Tensor, weight: Tensor) -> tuple[Tensor, tuple]:
    """Per-channel same-padded spatial convolution, ``weight`` is C x kh x kw."""
    if x.ndim != 4 or weight.ndim != 3 or x.shape[1] != weight.shape[0]:
        raise ShapeError(f"depthwise conv: input {x.shape} does not match kernels {weight.shape}")
    kh, kw = weight.shape[1:]
    if kh % 2 == 0 or kw % 2 == 0:
        raise ShapeError(f"depthwise conv: kernel extents must be odd, got {weight.shape[1:]}")

    padded = np.pad(x, ((0, 0), (0, 0), (kh // 2, kh // 2), (kw // 2, kw // 2)))
    height, width = x.shape[2:]
    out = np.zeros(x.shape, dtype=np.result_type(x, weight))
    for i, j in np.ndindex(kh, kw):
        out += padded[:, :, i : i + height, j : j + width] * weight[None, :, i, j, None, None]
    return out, (padded, weight)


def depthwise_conv2d_backward(cache: tuple, grad_out: Tensor) -> tuple[Tensor, Tensor]:
    padded, weight = cache
    kh, kw = weight.shape[1:]
    height, width = grad_out.shape[2:]

    grad_padded = np.zeros(padded.shape, dtype=np.result_type(padded, grad_out))
    grad_w = np.zeros_like(weight, dtype=np.result_type(weight, grad_out))
    for i, j in np.ndindex(kh, kw):
        grad_w[:, i, j] = (grad_out * padded[:, :, i : i + height, j : j + width]).sum(axis=(0, 2, 3))
        grad_padded[:, :, i : i + height, j : j + width] += grad_out * weight[None, :, i, j, None, None]

    grad_x = grad_padded[:, :, kh // 2 : kh // 2 + height, kw // 2 : kw // 2 + width]
    return np.ascontiguousarray(grad_x), grad_w


def pad_forward(x: Tensor, pads: tuple[tuple[int, int], ...]) -> tuple[Tensor, tuple]:
    """Zero padding; ``pads`` has one (before, after) pair per axis."""
    return np.pad(x, pads), (x.shape, pads)


def pad_backward(cache: tuple, grad_out: Tensor) -> Tensor:
    shape, pads = cache
    return np.ascontiguousarray(grad_out[tuple(slice(before, before + n) for n, (before, _) in zip(shape, pads))])


def crop_depth(x: Tensor, depth: int) -> Tensor:
    """Center-crop the spectral axis (axis 2) of a B x C x D x H x W tensor."""
    start = (x.shape[2] - depth) // 2
    return x[:, :, start : start + depth]


def uncrop_depth(grad: Tensor, depth: int) -> Tensor:
    """Adjoint of :func:`crop_depth`: scatter into a zero tensor of spectral extent ``depth``."""
    full = np.zeros(grad.shape[:2] + (depth,) + grad.shape[3:], dtype=grad.dtype)
    start = (depth - grad.shape[2]) // 2
    full[:, :, start : start + grad.shape[2]] = grad
    return full


def relu_forward(x: Tensor) -> tuple[Tensor, Tensor]:
    mask = x > 0
    return x * mask, mask


def relu_backward(mask: Tensor, grad_out: Tensor) -> Tensor:
    return grad_out * mask


def sigmoid(x: Tensor) -> Tensor:
    out = np.empty_like(x)
    positive = x >= 0
    out[positive] = 1.0 / (1.0 + np.exp(-x[positive]))
    exp_x = np.exp(x[~positive])
    out[~positive] = exp_x / (1.0 + exp_x)
    return out


def dropout_mask(shape: tuple[int, ...], rate: float, seed) -> Tensor:
    """Keep-mask with survivors scaled by ``1 / (1 - rate)``; ``seed`` feeds a PCG64 stream."""
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    return (rng.random(shape) >= rate) / (1.0 - rate)


def dropout_forward(x: Tensor, rate: float, seed, training: bool) -> tuple[Tensor, Optional[Tensor]]:
    if not 0.0 <= rate < 1.0:
        raise ValueError(f"Dropout rate must be in [0, 1), got {rate}")
    if not training or rate == 0.0:
        return x, None
    mask = dropout_mask(x.shape, rate, seed).astype(x.dtype)
    return x * mask, mask


def dropout_backward(mask: Optional[Tensor], grad_out: Tensor) -> Tensor:
    return grad_out if mask is None else grad_out * mask


def dense_forward(x: Tensor, weight: Tensor, bias: Tensor) -> tuple[Tensor, Tensor]:
    """y = W x + b over a B x in batch."""
    if x.ndim != 2 or x.shape[1] != weight.shape[1]:
        raise ShapeError(f"dense: input {x.shape} does not match weights {weight.shape}")
    return x @ weight.T + bias, x


def dense_backward(cache: Tensor, weight: Tensor, grad_out: Tensor) -> tuple[Tensor, Tensor, Tensor]:
    x = cache
    return grad_out @ weight, grad_out.T @ x, grad_out.sum(axis=0)


def reshape_merge_channels(x: Tensor) -> Tensor:
    """B x N x C x H x W -> B x (N*C) x H x W; element (b, n, c, h, w) lands on channel n*C + c."""
    if x.ndim != 5:
        raise ShapeError(f"merge reshape needs a rank-5 tensor, got shape {x.shape}")
    b, n, c, h, w = x.shape
    return x.reshape(b, n * c, h, w)


def reshape_split_channels(x: Tensor, n: int) -> Tensor:
    """Inverse of :func:`reshape_merge_channels`."""
    if x.ndim != 4 or x.shape[1] % n != 0:
        raise ShapeError(f"cannot split {x.shape[1]} channels into {n} groups")
    b, nc, h, w = x.shape
    return x.reshape(b, n, nc // n, h, w)


def se_forward(
    x: Tensor,
    w1: Tensor,
    b1: Tensor,
    w2: Tensor,
    b2: Tensor,
    gate_override: Optional[float] = None,
) -> tuple[Tensor, tuple]:
    """Squeeze-and-excitation over the channels of a B x C x H x W tensor."""
    if x.ndim != 4 or x.shape[1] != w1.shape[1] or w2.shape[0] != x.shape[1]:
        raise ShapeError(f"squeeze-excite: input {x.shape} does not match gate weights {w1.shape} / {w2.shape}")

    if gate_override is not None:
        gate = np.full(x.shape[:2], gate_override, dtype=x.dtype)
        return x * gate[:, :, None, None], (x, None, None, None, gate, w1, w2)

    squeezed = x.mean(axis=(2, 3))
    hidden_pre = squeezed @ w1.T + b1
    hidden = np.maximum(hidden_pre, 0.0)
    gate = sigmoid(hidden @ w2.T + b2)
    return x * gate[:, :, None, None], (x, squeezed, hidden_pre, hidden, gate, w1, w2)


def se_backward(cache: tuple, grad_out: Tensor) -> tuple[Tensor, dict[str, Tensor]]:
    """Gradients through both the scaling branch and the gate branch of :func:`se_forward`."""
    x, squeezed, hidden_pre, hidden, gate, w1, w2 = cache
    if grad_out.shape != x.shape:
        raise ShapeError(f"squeeze-excite backward: gradient {grad_out.shape} does not match input {x.shape}")

    grad_x = grad_out * gate[:, :, None, None]
    if squeezed is None:
        return grad_x, {
            "w1": np.zeros_like(w1),
            "b1": np.zeros(w1.shape[0], dtype=w1.dtype),
            "w2": np.zeros_like(w2),
            "b2": np.zeros(w2.shape[0], dtype=w2.dtype),
        }

    grad_gate = (grad_out * x).sum(axis=(2, 3))
    grad_gate_pre = grad_gate * gate * (1.0 - gate)
    grad_hidden_pre = (grad_gate_pre @ w2) * (hidden_pre > 0)
    grad_squeezed = grad_hidden_pre @ w1

    grad_x = grad_x + grad_squeezed[:, :, None, None] / (x.shape[2] * x.shape[3])
    grads = {
        "w1": grad_hidden_pre.T @ squeezed,
        "b1": grad_hidden_pre.sum(axis=0),
        "w2": grad_gate_pre.T @ hidden,
        "b2": grad_gate_pre.sum(axis=0),
    }
    return grad_x, grads


def global_avg_pool_forward(x: Tensor) -> tuple[Tensor, tuple]:
    return x.mean(axis=(2, 3)), x.shape


def global_avg_pool_backward(shape: tuple, grad_out: Tensor) -> Tensor:
    return np.broadcast_to(grad_out[:, :, None, None] / (shape[2] * shape[3]), shape).copy()


def softmax(logits: Tensor) -> Tensor:
    shifted = logits - logits.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=1, keepdims=True)


def softmax_cross_entropy(logits: Tensor, targets: np.ndarray) -> tuple[float, Tensor]:
    """Mean cross-entropy over the batch and its gradient; ``targets`` are 0-based class indices."""
    targets = np.asarray(targets, dtype=np.int64)
    if logits.ndim != 2:
        raise ShapeError(f"softmax_cross_entropy expects B x K logits, got shape {logits.shape}")
    batch, num_classes = logits.shape
    if batch == 0:
        raise ShapeError("softmax_cross_entropy needs a non-empty batch")
    if targets.shape != (batch,):
        raise ShapeError(f"expected {batch} targets, got shape {targets.shape}")
    if targets.size and (targets.min() < 0 or targets.max() >= num_classes):
        raise ValueError(f"target class out of range 0..{num_classes - 1}")

    shifted = logits - logits.max(axis=1, keepdims=True)
    log_norm = np.log(np.exp(shifted).sum(axis=1))
    loss = float(np.mean(log_norm - shifted[np.arange(batch), targets]))

    grad = np.exp(shifted - log_norm[:, None])
    grad[np.arange(batch), targets] -= 1.0
    return loss, grad / batch
