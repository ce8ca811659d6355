from typing import Any

from hybridsn_cli.common import ErrorMessage

CUBE_FORMATS = ("envi", "raw")
RAW_DTYPES = ("f32", "f64", "u16", "i16")
RAW_INTERLEAVES = ("bsq", "bil", "bip")
RAW_BYTE_ORDERS = ("le", "be")


def validate_raw_sidecar(sidecar: Any) -> ErrorMessage:
    """
    Validates a raw-cube sidecar block.

    Args:
        sidecar (dict): Parsed sidecar JSON

    Returns:
        str | None: error message, if any
    """
    if not isinstance(sidecar, dict):
        return "Raw cube sidecar must be an object"

    for key in ("lines", "samples", "bands"):
        value = sidecar.get(key)
        if not isinstance(value, int) or isinstance(value, bool) or value < 1:
            return f"Raw cube sidecar key '{key}' must be a positive integer"

    if sidecar.get("dtype") not in RAW_DTYPES:
        return f"Unknown raw cube element type {sidecar.get('dtype')!r}, expected one of {', '.join(RAW_DTYPES)}"

    if sidecar.get("interleave") not in RAW_INTERLEAVES:
        return f"Raw cube sidecar 'interleave' must be one of {', '.join(RAW_INTERLEAVES)}"

    if sidecar.get("byte_order") not in RAW_BYTE_ORDERS:
        return f"Raw cube sidecar 'byte_order' must be one of {', '.join(RAW_BYTE_ORDERS)}"

    return None


def _validate_rgb(value: Any) -> bool:
    return (
        isinstance(value, (list, tuple))
        and len(value) == 3
        and all(isinstance(c, int) and not isinstance(c, bool) and 0 <= c <= 255 for c in value)
    )


def validate_manifest_schema(data: Any) -> ErrorMessage:
    """
    Validates that a dataset manifest contains all required fields and has a valid structure.

    Args:
        data (dict): Parsed YAML data

    Returns:
        str | None: error message, if any
    """
    if not isinstance(data, dict):
        return "Dataset manifest must be an object"

    if not data.get("name") or not isinstance(data["name"], str):
        return "Dataset manifest is missing required string field 'name'"

    cube = data.get("cube")
    if not isinstance(cube, dict):
        return "Dataset manifest is missing required object 'cube'"

    if cube.get("format") not in CUBE_FORMATS:
        return f"'cube.format' must be one of {', '.join(CUBE_FORMATS)}"

    if not cube.get("path") or not isinstance(cube["path"], str):
        return "'cube.path' must be a non-empty string"

    if cube["format"] == "envi":
        if not cube.get("header") or not isinstance(cube["header"], str):
            return "ENVI cubes require a 'cube.header' path"
    else:
        sidecar = cube.get("sidecar")
        if isinstance(sidecar, dict):
            if error := validate_raw_sidecar(sidecar):
                return error
        elif not isinstance(sidecar, str) or not sidecar:
            return "Raw cubes require 'cube.sidecar' (inline object or path to a JSON file)"

    ground_truth = data.get("ground_truth")
    if not isinstance(ground_truth, dict) or not isinstance(ground_truth.get("path"), str):
        return "Dataset manifest is missing required 'ground_truth.path'"

    class_names = data.get("class_names")
    if not isinstance(class_names, list) or not class_names:
        return "'class_names' must be a non-empty array"
    for idx, name in enumerate(class_names):
        if not isinstance(name, str):
            return f"class name at index {idx} must be a string"

    palette = data.get("palette")
    if not isinstance(palette, list):
        return "'palette' must be an array of RGB triples"
    if len(palette) != len(class_names) + 1:
        return (
            f"'palette' must have one entry per class plus background "
            f"({len(class_names) + 1}), got {len(palette)}"
        )
    for idx, color in enumerate(palette):
        if not _validate_rgb(color):
            return f"palette entry {idx} must be three integers in 0..255"

    bands = data.get("bands_to_discard", [])
    if not isinstance(bands, list):
        return "'bands_to_discard' must be an array of band indices"
    for idx, band in enumerate(bands):
        if not isinstance(band, int) or isinstance(band, bool) or band < 0:
            return f"'bands_to_discard' entry at index {idx} must be a non-negative integer"
    if len(set(bands)) != len(bands):
        return "'bands_to_discard' indices must be unique"

    defaults = data.get("defaults", {})
    if not isinstance(defaults, dict):
        return "'defaults' must be an object"
    fractions = defaults.get("fractions")
    if fractions is not None:
        if (
            not isinstance(fractions, list)
            or len(fractions) != 2
            or not all(isinstance(f, (int, float)) and not isinstance(f, bool) for f in fractions)
        ):
            return "'defaults.fractions' must be [train_fraction, val_fraction]"
    pca_k = defaults.get("pca_k")
    if pca_k is not None and (not isinstance(pca_k, int) or pca_k < 1):
        return "'defaults.pca_k' must be a positive integer"

    return None
