import tomllib
from dataclasses import fields
from typing import Any, Optional

import yaml

from hybridsn_cli.common import ErrorMessage
from hybridsn_cli.model.config import SeHybridSnConfig
from hybridsn_cli.training.trainer import TrainConfig

TOP_LEVEL_KEYS = ("dataset", "data_dir", "out", "seed", "preprocess", "model", "training")
PREPROCESS_KEYS = ("window", "pca_k", "fractions", "standardize")

# keys owned by the run or the preprocessing section, never set per section
RESERVED_MODEL_KEYS = ("window", "pca_k", "num_classes", "seed")
RESERVED_TRAINING_KEYS = ("seed",)


def load_config_file(path: str) -> tuple[Any, Optional[Exception]]:
    """Read a ``.toml``, ``.yaml`` or ``.yml`` run configuration."""
    try:
        if path.endswith(".toml"):
            with open(path, "rb") as file:
                return tomllib.load(file), None
        if path.endswith((".yaml", ".yml")):
            with open(path, "r") as file:
                return yaml.safe_load(file) or {}, None
    except Exception as error:
        return None, error

    return None, Exception(f"Unsupported config file type '{path}', expected .toml, .yaml or .yml")


def _is_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def validate_preprocess_section(section: Any) -> ErrorMessage:
    if not isinstance(section, dict):
        return "'preprocess' must be a table"

    unknown = sorted(set(section) - set(PREPROCESS_KEYS))
    if unknown:
        return f"Unknown keys in 'preprocess': {', '.join(unknown)}"

    window = section.get("window")
    if window is not None and (not _is_int(window) or window < 1 or window % 2 == 0):
        return "'preprocess.window' must be a positive odd integer"

    pca_k = section.get("pca_k")
    if pca_k is not None and (not _is_int(pca_k) or pca_k < 1):
        return "'preprocess.pca_k' must be a positive integer"

    fractions = section.get("fractions")
    if fractions is not None:
        if not isinstance(fractions, list) or len(fractions) != 2 or not all(_is_number(f) for f in fractions):
            return "'preprocess.fractions' must be [train_fraction, val_fraction]"

    standardize = section.get("standardize")
    if standardize is not None and not isinstance(standardize, bool):
        return "'preprocess.standardize' must be true or false"

    return None


def _validate_dataclass_section(name: str, section: Any, cls: type, reserved: tuple[str, ...]) -> ErrorMessage:
    if not isinstance(section, dict):
        return f"'{name}' must be a table"

    for key in reserved:
        if key in section:
            return f"'{name}.{key}' cannot be set here, it is derived from the run configuration"

    known = {f.name for f in fields(cls)}
    unknown = sorted(set(section) - known)
    if unknown:
        return f"Unknown keys in '{name}': {', '.join(unknown)}"

    return None


def validate_run_config(data: Any) -> ErrorMessage:
    """
    Validates the structure of a run configuration file.

    Value ranges of the model and training sections are checked later by
    the dataclasses they populate.

    Args:
        data (dict): Parsed TOML or YAML data

    Returns:
        str | None: error message, if any
    """
    if not isinstance(data, dict):
        return "Run configuration must be a table of settings"

    unknown = sorted(set(data) - set(TOP_LEVEL_KEYS))
    if unknown:
        return f"Unknown top-level keys: {', '.join(unknown)}"

    for key in ("dataset", "data_dir", "out"):
        if key in data and (not isinstance(data[key], str) or not data[key]):
            return f"'{key}' must be a non-empty string"

    if "seed" in data and (not _is_int(data["seed"]) or data["seed"] < 0):
        return "'seed' must be a non-negative integer"

    if "preprocess" in data:
        if error := validate_preprocess_section(data["preprocess"]):
            return error

    if "model" in data:
        if error := _validate_dataclass_section("model", data["model"], SeHybridSnConfig, RESERVED_MODEL_KEYS):
            return error

    if "training" in data:
        if error := _validate_dataclass_section("training", data["training"], TrainConfig, RESERVED_TRAINING_KEYS):
            return error

    return None
