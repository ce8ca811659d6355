"""Dataset manifests: where a scene's cube and ground truth live, plus its metadata.

Three manifests ship with the package (``indian_pines``, ``pavia_university``,
``salinas``). Their data paths are relative and resolve against ``data_dir``.
User manifests resolve relative paths against the manifest's own directory.
"""

import json
import os
from dataclasses import dataclass, field
from typing import Any, Optional

import yaml

from hybridsn_cli.errors import DataError
from hybridsn_cli.validators.manifest import validate_manifest_schema, validate_raw_sidecar

BUILTIN_MANIFEST_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "manifests")


@dataclass(frozen=True)
class DatasetManifest:
    name: str
    cube_format: str
    cube_path: str
    ground_truth_path: str
    class_names: list[str]
    palette: list[tuple[int, int, int]]
    bands_to_discard: list[int] = field(default_factory=list)
    header_path: Optional[str] = None
    raw_sidecar: Optional[dict[str, Any]] = None
    raw_sidecar_path: Optional[str] = None
    default_pca_k: Optional[int] = None
    default_fractions: Optional[tuple[float, float]] = None
    wavelength_range: Optional[str] = None
    source: Optional[str] = None

    @property
    def num_classes(self) -> int:
        return len(self.class_names)


def builtin_manifests() -> list[str]:
    return sorted(f[: -len(".yaml")] for f in os.listdir(BUILTIN_MANIFEST_DIR) if f.endswith(".yaml"))


def _resolve(base_dir: str, path: Optional[str]) -> Optional[str]:
    if path is None:
        return None
    return path if os.path.isabs(path) else os.path.normpath(os.path.join(base_dir, path))


def manifest_from_dict(data: dict, base_dir: str, source: Optional[str] = None) -> DatasetManifest:
    if error := validate_manifest_schema(data):
        raise DataError(f"Invalid dataset manifest: {error}", path=source)

    cube = data["cube"]
    sidecar = cube.get("sidecar")
    defaults = data.get("defaults", {}) or {}
    fractions = defaults.get("fractions")

    return DatasetManifest(
        name=data["name"],
        cube_format=cube["format"],
        cube_path=_resolve(base_dir, cube["path"]),
        header_path=_resolve(base_dir, cube.get("header")),
        raw_sidecar=sidecar if isinstance(sidecar, dict) else None,
        raw_sidecar_path=_resolve(base_dir, sidecar) if isinstance(sidecar, str) else None,
        ground_truth_path=_resolve(base_dir, data["ground_truth"]["path"]),
        class_names=list(data["class_names"]),
        palette=[tuple(c) for c in data["palette"]],
        bands_to_discard=list(data.get("bands_to_discard", [])),
        default_pca_k=defaults.get("pca_k"),
        default_fractions=tuple(float(f) for f in fractions) if fractions else None,
        wavelength_range=data.get("wavelength_range"),
        source=source,
    )


def load_manifest(name_or_path: str, data_dir: Optional[str] = None) -> DatasetManifest:
    """Load a manifest by file path, or by built-in name (resolved against ``data_dir``)."""
    if os.path.isfile(name_or_path):
        path = name_or_path
        base_dir = os.path.dirname(os.path.abspath(path))
    elif name_or_path in builtin_manifests():
        path = os.path.join(BUILTIN_MANIFEST_DIR, f"{name_or_path}.yaml")
        base_dir = os.path.abspath(data_dir or os.getcwd())
    else:
        raise DataError(
            f"Manifest not found. Use a file path or one of: {', '.join(builtin_manifests())}",
            path=name_or_path,
        )

    try:
        with open(path, "r") as stream:
            data = yaml.safe_load(stream)
    except yaml.YAMLError as error:
        line = None
        if getattr(error, "problem_mark", None) is not None:
            line = error.problem_mark.line + 1
        raise DataError(f"Invalid manifest YAML: {error}", path=path, line=line) from error
    except OSError as error:
        raise DataError(f"Cannot read manifest: {error}", path=path) from error

    return manifest_from_dict(data, base_dir, source=path)


def load_sidecar(manifest: DatasetManifest) -> dict[str, Any]:
    """Return the raw-cube sidecar block, reading it from disk when it is a path."""
    if manifest.raw_sidecar is not None:
        return manifest.raw_sidecar

    if manifest.raw_sidecar_path is None:
        raise DataError(f"Manifest '{manifest.name}' has no raw cube sidecar", path=manifest.source)

    try:
        with open(manifest.raw_sidecar_path, "r") as handle:
            sidecar = json.load(handle)
    except json.JSONDecodeError as error:
        raise DataError(f"Invalid sidecar JSON: {error.msg}", path=manifest.raw_sidecar_path, line=error.lineno)
    except OSError as error:
        raise DataError(f"Cannot read sidecar: {error}", path=manifest.raw_sidecar_path) from error

    if error_message := validate_raw_sidecar(sidecar):
        raise DataError(error_message, path=manifest.raw_sidecar_path)
    return sidecar
