"""SE-HybridSN and the plain HybridSN baseline assembled from :mod:`hybridsn_cli.nn` layers."""

import logging
from typing import Iterator, Optional

import numpy as np

from hybridsn_cli.common import Tensor
from hybridsn_cli.errors import ConfigError, NumericalError, ShapeError
from hybridsn_cli.model.config import SeHybridSnConfig
from hybridsn_cli.nn import (
    Conv2dLayer,
    Conv3dLayer,
    DenseBlock3d,
    DenseLayer,
    DepthwiseSeparableConv2d,
    Dropout,
    Flatten,
    GlobalAvgPool,
    Layer,
    MergeChannels,
    ReLU,
    SeBlock,
    Sequential,
    SpatialZeroPad,
    init_parameters,
)

logger = logging.getLogger(__name__)


class SeHybridSnModel:
    def __init__(self, config: SeHybridSnConfig, network: Sequential):
        self.config = config
        self.network = network
        self.dtype = np.dtype(config.dtype)

    @property
    def input_shape(self) -> tuple[int, int, int, int]:
        return (1, self.config.pca_k, self.config.window, self.config.window)

    def forward(self, batch: Tensor, training: bool = False) -> Tensor:
        if batch.ndim != 5 or batch.shape[1:] != self.input_shape:
            raise ShapeError(f"model expects batches of shape B x {self.input_shape}, got {batch.shape}")
        return self.network.forward(batch.astype(self.dtype, copy=False), training)

    def backward(self, grad_logits: Tensor) -> dict[str, Tensor]:
        self.network.backward(grad_logits)
        return self.gradients()

    def parameters(self) -> dict[str, Tensor]:
        return dict(self.network.named_parameters())

    def gradients(self) -> dict[str, Tensor]:
        return dict(self.network.named_gradients())

    def num_parameters(self) -> int:
        return self.network.num_parameters()

    def layers(self) -> Iterator[Layer]:
        return self.network.leaves()

    def conv_layers(self) -> list[Layer]:
        """Convolution layers of the network; the pointwise half of a separable convolution is not counted."""
        pointwise = {id(layer.pointwise) for layer in self.layers() if isinstance(layer, DepthwiseSeparableConv2d)}
        return [
            layer
            for layer in self.layers()
            if isinstance(layer, (Conv3dLayer, Conv2dLayer, DepthwiseSeparableConv2d)) and id(layer) not in pointwise
        ]

    def se_blocks(self) -> list[SeBlock]:
        return [layer for layer in self.layers() if isinstance(layer, SeBlock)]

    def set_gate_override(self, value: Optional[float]) -> None:
        for block in self.se_blocks():
            block.gate_override = value

    def set_step(self, epoch: int, batch: int) -> None:
        """Select the dropout masks of a training step."""
        for layer in self.layers():
            if isinstance(layer, Dropout):
                layer.step = (epoch, batch)

    def clear_cache(self) -> None:
        self.network.clear_cache()

    def snapshot(self) -> dict[str, Tensor]:
        return {name: value.copy() for name, value in self.parameters().items()}

    def load_parameters(self, values: dict[str, Tensor]) -> None:
        current = self.parameters()
        missing = sorted(set(current) - set(values))
        if missing:
            raise ShapeError(f"parameter set is missing tensors: {', '.join(missing)}")
        for name, target in current.items():
            if values[name].shape != target.shape:
                raise ShapeError(f"tensor {name}: expected shape {target.shape}, got {values[name].shape}")
            target[...] = values[name]

    def check_finite(self) -> None:
        for name, value in self.parameters().items():
            if not np.all(np.isfinite(value)):
                raise NumericalError(f"parameter {name} holds NaN or Inf values")


def _se(name: str, channels: int, config: SeHybridSnConfig) -> list[Layer]:
    if not config.use_se:
        return []
    return [SeBlock(name, channels, config.se_reduction, dtype=config.dtype)]


def _activated(conv: Layer, relu: Layer, se: list[Layer], config: SeHybridSnConfig) -> list[Layer]:
    if config.se_position == "pre-activation":
        return [conv, *se, relu]
    return [conv, relu, *se]


def _classifier(in_dim: int, config: SeHybridSnConfig) -> list[Layer]:
    layers: list[Layer] = []
    for index, width in enumerate(config.fc_dims):
        layers.append(DenseLayer(f"fc{index + 1}", in_dim, width, dtype=config.dtype))
        layers.append(ReLU(f"fc{index + 1}.relu"))
        layers.append(Dropout(f"fc{index + 1}.dropout", config.dropout_rate, layer_id=index, seed=config.seed))
        in_dim = width
    layers.append(DenseLayer("logits", in_dim, config.num_classes, dtype=config.dtype))
    return layers


def _spectral_depth(depth: int, kernel_depth: int, name: str) -> int:
    if kernel_depth > depth:
        raise ConfigError(f"{name}: spectral kernel {kernel_depth} exceeds the remaining depth {depth}")
    return depth - kernel_depth + 1


def _spatial_extent(extent: int, kernel: int, name: str) -> int:
    if kernel > extent:
        raise ConfigError(f"{name}: kernel {kernel} exceeds the remaining spatial extent {extent}")
    return extent - kernel + 1


def _build_se_hybridsn(config: SeHybridSnConfig) -> Sequential:
    units = []
    depth, in_channels, produced = config.pca_k, 1, 0
    for index, (out_channels, kernel) in enumerate(config.conv3d_specs):
        name = f"conv3d_{index + 1}"
        depth = _spectral_depth(depth, kernel[0], name)
        conv = Conv3dLayer(name, in_channels, out_channels, kernel, dtype=config.dtype)
        body = _activated(conv, ReLU(f"{name}.relu"), _se(f"{name}.se", out_channels * depth, config), config)
        units.append(Sequential(name, [SpatialZeroPad(f"{name}.pad", kernel), *body]))
        produced += out_channels
        in_channels = produced

    merged = produced * depth
    conv2d_out, conv2d_kernel = config.conv2d_spec
    height = _spatial_extent(config.window, conv2d_kernel[0], "conv2d")
    width = _spatial_extent(config.window, conv2d_kernel[1], "conv2d")
    sep_out, sep_kernel = config.sep_conv_spec

    layers: list[Layer] = [DenseBlock3d("dense_block", units), MergeChannels("merge")]
    layers += _activated(
        Conv2dLayer("conv2d", merged, conv2d_out, conv2d_kernel, dtype=config.dtype),
        ReLU("conv2d.relu"),
        _se("conv2d.se", conv2d_out, config),
        config,
    )
    layers += _activated(
        DepthwiseSeparableConv2d("sepconv", conv2d_out, sep_out, sep_kernel, dtype=config.dtype),
        ReLU("sepconv.relu"),
        _se("sepconv.se", sep_out, config),
        config,
    )

    if config.head == "average":
        layers.append(GlobalAvgPool("pool"))
        features = sep_out
    else:
        layers.append(Flatten("flatten"))
        features = sep_out * height * width
    layers += _classifier(features, config)
    return Sequential("se_hybridsn", layers)


def _build_hybridsn(config: SeHybridSnConfig) -> Sequential:
    layers: list[Layer] = []
    depth, height, width, in_channels = config.pca_k, config.window, config.window, 1
    for index, (out_channels, kernel) in enumerate(config.conv3d_specs):
        name = f"conv3d_{index + 1}"
        depth = _spectral_depth(depth, kernel[0], name)
        height = _spatial_extent(height, kernel[1], name)
        width = _spatial_extent(width, kernel[2], name)
        layers += [Conv3dLayer(name, in_channels, out_channels, kernel, dtype=config.dtype), ReLU(f"{name}.relu")]
        in_channels = out_channels

    conv2d_out, conv2d_kernel = config.conv2d_spec
    merged = in_channels * depth
    height = _spatial_extent(height, conv2d_kernel[0], "conv2d")
    width = _spatial_extent(width, conv2d_kernel[1], "conv2d")
    layers += [MergeChannels("merge"), Conv2dLayer("conv2d", merged, conv2d_out, conv2d_kernel, dtype=config.dtype)]
    layers += [ReLU("conv2d.relu")]

    if config.head == "average":
        layers.append(GlobalAvgPool("pool"))
        features = conv2d_out
    else:
        layers.append(Flatten("flatten"))
        features = conv2d_out * height * width
    layers += _classifier(features, config)
    return Sequential("hybridsn", layers)


def build_model(config: SeHybridSnConfig, initialize: bool = True) -> SeHybridSnModel:
    builder = _build_se_hybridsn if config.architecture == "se-hybridsn" else _build_hybridsn
    model = SeHybridSnModel(config, builder(config))
    if initialize:
        init_parameters(model.network, config.seed)
    logger.debug("Built %s with %d parameters", config.architecture, model.num_parameters())
    return model


def count_parameters(config: SeHybridSnConfig) -> int:
    return build_model(config, initialize=False).num_parameters()
