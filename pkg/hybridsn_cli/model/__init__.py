"""SE-HybridSN network, its baseline, checkpoints and scene prediction."""

from hybridsn_cli.model.checkpoint import load_checkpoint, save_checkpoint
from hybridsn_cli.model.config import SeHybridSnConfig, hybridsn_baseline_config
from hybridsn_cli.model.network import SeHybridSnModel, build_model, count_parameters
from hybridsn_cli.model.predict import predict_pixels, predict_scene

__all__ = [
    "SeHybridSnConfig",
    "SeHybridSnModel",
    "build_model",
    "count_parameters",
    "hybridsn_baseline_config",
    "load_checkpoint",
    "predict_pixels",
    "predict_scene",
    "save_checkpoint",
]
