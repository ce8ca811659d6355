"""Neural-network layers with hand-derived backward passes."""

from hybridsn_cli.nn.gradcheck import GradCheckResult, check_gradient
from hybridsn_cli.nn.init import init_parameters
from hybridsn_cli.nn.layers import (
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
)

__all__ = [
    "Conv2dLayer",
    "Conv3dLayer",
    "DenseBlock3d",
    "DenseLayer",
    "DepthwiseSeparableConv2d",
    "Dropout",
    "Flatten",
    "GlobalAvgPool",
    "GradCheckResult",
    "Layer",
    "MergeChannels",
    "ReLU",
    "SeBlock",
    "Sequential",
    "SpatialZeroPad",
    "check_gradient",
    "init_parameters",
]
