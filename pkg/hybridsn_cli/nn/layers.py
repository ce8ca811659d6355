"""Stateful layers wrapping :mod:`hybridsn_cli.nn.functional`.

A layer owns its parameters (``params``) and, after ``backward``, the matching
gradients (``grads``). Activations are cached only when ``forward`` runs with
``training=True``; inference never writes layer state, so a trained network can
be shared between threads.
"""

from typing import Iterator, Optional, Sequence

import numpy as np

from hybridsn_cli.common import Tensor
from hybridsn_cli.errors import MissingCacheError, ShapeError
from hybridsn_cli.nn import functional as F


class Layer:
    def __init__(self, name: str):
        self.name = name
        self.params: dict[str, Tensor] = {}
        self.grads: dict[str, Tensor] = {}
        self.fan_in: dict[str, int] = {}
        self._cache = None

    def forward(self, x: Tensor, training: bool = False) -> Tensor:  # pragma: no cover
        raise NotImplementedError()

    def backward(self, grad: Tensor) -> Tensor:  # pragma: no cover
        raise NotImplementedError()

    def _store(self, cache, training: bool) -> None:
        if training:
            self._cache = cache

    def _take_cache(self):
        if self._cache is None:
            raise MissingCacheError(f"{self.name}: backward called without a training forward pass")
        return self._cache

    def leaves(self) -> Iterator["Layer"]:
        yield self

    def named_parameters(self) -> Iterator[tuple[str, Tensor]]:
        for leaf in self.leaves():
            for key, value in leaf.params.items():
                yield f"{leaf.name}.{key}", value

    def named_gradients(self) -> Iterator[tuple[str, Tensor]]:
        for leaf in self.leaves():
            for key, value in leaf.params.items():
                yield f"{leaf.name}.{key}", leaf.grads.get(key, np.zeros_like(value))

    def num_parameters(self) -> int:
        return sum(value.size for _, value in self.named_parameters())

    def clear_cache(self) -> None:
        for leaf in self.leaves():
            leaf._cache = None


def _odd_kernel(kernel: Sequence[int], name: str) -> tuple[int, ...]:
    kernel = tuple(int(k) for k in kernel)
    if any(k < 1 or k % 2 == 0 for k in kernel):
        raise ShapeError(f"{name}: kernel extents must be odd and >= 1, got {kernel}")
    return kernel


class Conv3dLayer(Layer):
    """3D convolution, kernel given as (spectral, height, width)."""

    def __init__(self, name: str, in_channels: int, out_channels: int, kernel: Sequence[int], dtype=np.float64):
        super().__init__(name)
        self.kernel = _odd_kernel(kernel, name)
        if len(self.kernel) != 3:
            raise ShapeError(f"{name}: 3D kernel needs three extents, got {self.kernel}")
        self.in_channels = in_channels
        self.out_channels = out_channels
        self.params["weight"] = np.zeros((out_channels, in_channels) + self.kernel, dtype=dtype)
        self.params["bias"] = np.zeros(out_channels, dtype=dtype)
        self.fan_in["weight"] = in_channels * int(np.prod(self.kernel))

    def forward(self, x, training=False):
        out, cache = F.conv3d_forward(x, self.params["weight"], self.params["bias"])
        self._store(cache, training)
        return out

    def backward(self, grad):
        grad_x, self.grads["weight"], self.grads["bias"] = F.conv3d_backward(self._take_cache(), grad)
        return grad_x


class Conv2dLayer(Layer):
    def __init__(self, name: str, in_channels: int, out_channels: int, kernel: Sequence[int], dtype=np.float64):
        super().__init__(name)
        self.kernel = _odd_kernel(kernel, name)
        if len(self.kernel) != 2:
            raise ShapeError(f"{name}: 2D kernel needs two extents, got {self.kernel}")
        self.in_channels = in_channels
        self.out_channels = out_channels
        self.params["weight"] = np.zeros((out_channels, in_channels) + self.kernel, dtype=dtype)
        self.params["bias"] = np.zeros(out_channels, dtype=dtype)
        self.fan_in["weight"] = in_channels * int(np.prod(self.kernel))

    def forward(self, x, training=False):
        out, cache = F.conv2d_forward(x, self.params["weight"], self.params["bias"])
        self._store(cache, training)
        return out

    def backward(self, grad):
        grad_x, self.grads["weight"], self.grads["bias"] = F.conv2d_backward(self._take_cache(), grad)
        return grad_x


class DepthwiseSeparableConv2d(Layer):
    """Same-padded per-channel k x k convolution followed by a 1 x 1 pointwise convolution."""

    def __init__(self, name: str, in_channels: int, out_channels: int, kernel: Sequence[int], dtype=np.float64):
        super().__init__(name)
        self.kernel = _odd_kernel(kernel, name)
        self.in_channels = in_channels
        self.out_channels = out_channels
        self.params["depthwise"] = np.zeros((in_channels,) + self.kernel, dtype=dtype)
        self.fan_in["depthwise"] = int(np.prod(self.kernel))
        self.pointwise = Conv2dLayer(f"{name}.pointwise", in_channels, out_channels, (1, 1), dtype=dtype)

    def leaves(self):
        yield self
        yield self.pointwise

    def forward(self, x, training=False):
        spatial, cache = F.depthwise_conv2d_forward(x, self.params["depthwise"])
        self._store(cache, training)
        return self.pointwise.forward(spatial, training)

    def backward(self, grad):
        grad_spatial = self.pointwise.backward(grad)
        grad_x, self.grads["depthwise"] = F.depthwise_conv2d_backward(self._take_cache(), grad_spatial)
        return grad_x


class DenseLayer(Layer):
    def __init__(self, name: str, in_dim: int, out_dim: int, dtype=np.float64):
        super().__init__(name)
        self.in_dim = in_dim
        self.out_dim = out_dim
        self.params["weight"] = np.zeros((out_dim, in_dim), dtype=dtype)
        self.params["bias"] = np.zeros(out_dim, dtype=dtype)
        self.fan_in["weight"] = in_dim

    def forward(self, x, training=False):
        out, cache = F.dense_forward(x, self.params["weight"], self.params["bias"])
        self._store(cache, training)
        return out

    def backward(self, grad):
        grad_x, self.grads["weight"], self.grads["bias"] = F.dense_backward(
            self._take_cache(), self.params["weight"], grad
        )
        return grad_x


class SeBlock(Layer):
    """Squeeze-and-excitation channel attention.

    A rank-5 input (B x N x D x H x W, the output of a 3D convolution) is
    merged to B x (N*D) x H x W first and split back afterwards, so every
    spectral slice of every kernel gets its own gate.
    """

    def __init__(self, name: str, channels: int, reduction: int, dtype=np.float64):
        super().__init__(name)
        if reduction < 1 or channels % reduction != 0:
            raise ShapeError(f"{name}: reduction {reduction} must divide the {channels} channels")
        hidden = channels // reduction
        self.channels = channels
        self.reduction = reduction
        self.gate_override: Optional[float] = None
        self.params["w1"] = np.zeros((hidden, channels), dtype=dtype)
        self.params["b1"] = np.zeros(hidden, dtype=dtype)
        self.params["w2"] = np.zeros((channels, hidden), dtype=dtype)
        self.params["b2"] = np.zeros(channels, dtype=dtype)
        self.fan_in["w1"] = channels
        self.fan_in["w2"] = hidden

    def forward(self, x, training=False):
        groups = x.shape[1] if x.ndim == 5 else None
        merged = F.reshape_merge_channels(x) if groups is not None else x
        out, cache = F.se_forward(merged, *(self.params[k] for k in ("w1", "b1", "w2", "b2")), self.gate_override)
        self._store((cache, groups), training)
        return F.reshape_split_channels(out, groups) if groups is not None else out

    def backward(self, grad):
        cache, groups = self._take_cache()
        merged = F.reshape_merge_channels(grad) if groups is not None else grad
        grad_x, grads = F.se_backward(cache, merged)
        self.grads.update(grads)
        return F.reshape_split_channels(grad_x, groups) if groups is not None else grad_x


class ReLU(Layer):
    def forward(self, x, training=False):
        out, mask = F.relu_forward(x)
        self._store(mask, training)
        return out

    def backward(self, grad):
        return F.relu_backward(self._take_cache(), grad)


class Dropout(Layer):
    """Inverted dropout whose mask is a pure function of (seed, epoch, batch, layer id)."""

    def __init__(self, name: str, rate: float, layer_id: int, seed: int = 0):
        super().__init__(name)
        if not 0.0 <= rate < 1.0:
            raise ValueError(f"{name}: dropout rate must be in [0, 1), got {rate}")
        self.rate = rate
        self.layer_id = layer_id
        self.seed = seed
        self.step = (0, 0)

    def forward(self, x, training=False):
        epoch, batch = self.step
        out, mask = F.dropout_forward(x, self.rate, [self.seed, epoch, batch, self.layer_id], training)
        self._store((mask,), training)
        return out

    def backward(self, grad):
        (mask,) = self._take_cache()
        return F.dropout_backward(mask, grad)


class SpatialZeroPad(Layer):
    """Zero-pad the two trailing (spatial) axes so a following k x k convolution keeps the extent."""

    def __init__(self, name: str, kernel: Sequence[int]):
        super().__init__(name)
        self.margins = tuple(k // 2 for k in kernel[-2:])

    def forward(self, x, training=False):
        pads = ((0, 0),) * (x.ndim - 2) + tuple((m, m) for m in self.margins)
        out, cache = F.pad_forward(x, pads)
        self._store(cache, training)
        return out

    def backward(self, grad):
        return F.pad_backward(self._take_cache(), grad)


class MergeChannels(Layer):
    """5D -> 4D reshape: B x N x D x H x W -> B x (N*D) x H x W."""

    def forward(self, x, training=False):
        self._store(x.shape[1], training)
        return F.reshape_merge_channels(x)

    def backward(self, grad):
        return F.reshape_split_channels(grad, self._take_cache())


class Flatten(Layer):
    def forward(self, x, training=False):
        self._store(x.shape, training)
        return x.reshape(x.shape[0], -1)

    def backward(self, grad):
        return grad.reshape(self._take_cache())


class GlobalAvgPool(Layer):
    def forward(self, x, training=False):
        out, shape = F.global_avg_pool_forward(x)
        self._store(shape, training)
        return out

    def backward(self, grad):
        return F.global_avg_pool_backward(self._take_cache(), grad)


class Sequential(Layer):
    def __init__(self, name: str, layers: Sequence[Layer]):
        super().__init__(name)
        self.layers = list(layers)

    def leaves(self):
        for layer in self.layers:
            yield from layer.leaves()

    def forward(self, x, training=False):
        for layer in self.layers:
            x = layer.forward(x, training)
        return x

    def backward(self, grad):
        for layer in reversed(self.layers):
            grad = layer.backward(grad)
        return grad


class DenseBlock3d(Layer):
    """Densely connected stack of 3D units.

    Unit ``i`` consumes the channel concatenation of the outputs of units
    ``0..i-1`` (unit 0 consumes the block input). Units are valid along the
    spectral axis, so earlier outputs are center-cropped to the shortest
    spectral extent before concatenation. The block output concatenates all
    unit outputs the same way.
    """

    def __init__(self, name: str, units: Sequence[Layer]):
        super().__init__(name)
        self.units = list(units)

    def leaves(self):
        for unit in self.units:
            yield from unit.leaves()

    def forward(self, x, training=False):
        outputs: list[Tensor] = []
        for index, unit in enumerate(self.units):
            unit_input = x if index == 0 else self._concat(outputs, outputs[-1].shape[2])
            outputs.append(unit.forward(unit_input, training))

        depth = outputs[-1].shape[2]
        self._store(([o.shape for o in outputs], depth), training)
        return self._concat(outputs, depth)

    @staticmethod
    def _concat(outputs: list[Tensor], depth: int) -> Tensor:
        return np.concatenate([F.crop_depth(o, depth) for o in outputs], axis=1)

    def _scatter(self, grad: Tensor, shapes: list[tuple], count: int, pending: list[Tensor]) -> None:
        """Route a gradient taken w.r.t. a concatenation of the first ``count`` outputs back to each output."""
        offset = 0
        for j in range(count):
            channels = shapes[j][1]
            piece = grad[:, offset : offset + channels]
            pending[j] += F.uncrop_depth(piece, shapes[j][2])
            offset += channels

    def backward(self, grad):
        shapes, _ = self._take_cache()
        pending = [np.zeros(shape, dtype=grad.dtype) for shape in shapes]
        self._scatter(grad, shapes, len(shapes), pending)

        grad_x = None
        for index in reversed(range(len(self.units))):
            grad_in = self.units[index].backward(pending[index])
            if index == 0:
                grad_x = grad_in
            else:
                self._scatter(grad_in, shapes, index, pending)
        return grad_x
