import logging

import numpy as np

from hybridsn_cli.data.cube import GroundTruthMap, HyperspectralCube
from hybridsn_cli.data.envi import load_envi_cube, read_flat_samples, to_row_col_band
from hybridsn_cli.data.manifest import DatasetManifest, load_sidecar
from hybridsn_cli.errors import DataError
from hybridsn_cli.validators.manifest import validate_raw_sidecar

logger = logging.getLogger(__name__)

RAW_DTYPES = {
    "f32": np.float32,
    "f64": np.float64,
    "u16": np.uint16,
    "i16": np.int16,
}


def load_raw_cube(manifest: DatasetManifest) -> HyperspectralCube:
    """Load a headerless binary cube described by the manifest's sidecar block."""
    sidecar = load_sidecar(manifest)
    if error := validate_raw_sidecar(sidecar):
        raise DataError(error, path=manifest.raw_sidecar_path or manifest.source)

    dtype = np.dtype(RAW_DTYPES[sidecar["dtype"]])
    dtype = dtype.newbyteorder(">" if sidecar["byte_order"] == "be" else "<")

    lines, samples, bands = sidecar["lines"], sidecar["samples"], sidecar["bands"]
    flat = read_flat_samples(manifest.cube_path, dtype, lines * samples * bands)
    data = to_row_col_band(flat, lines, samples, bands, sidecar["interleave"])

    logger.debug("Loaded raw cube %s: %dx%dx%d", manifest.cube_path, lines, samples, bands)
    return HyperspectralCube(np.ascontiguousarray(data, dtype=np.float64))


def load_cube(manifest: DatasetManifest) -> HyperspectralCube:
    if manifest.cube_format == "envi":
        if manifest.header_path is None:
            raise DataError(f"Manifest '{manifest.name}' declares an ENVI cube without a header", path=manifest.source)
        return load_envi_cube(manifest.header_path, manifest.cube_path)
    return load_raw_cube(manifest)


def load_ground_truth(path: str, height: int, width: int, num_classes: int) -> GroundTruthMap:
    """Read a raw little-endian u16 row-major label grid."""
    labels = read_flat_samples(path, np.dtype("<u2"), height * width).reshape(height, width)
    labels = labels.astype(np.int64)

    if labels.size and int(labels.max()) > num_classes:
        raise DataError(f"Label {int(labels.max())} exceeds the declared {num_classes} classes", path=path)

    return GroundTruthMap(labels, num_classes)


def save_ground_truth(path: str, labels: np.ndarray) -> None:
    """Write a label grid in the canonical raw u16 format."""
    np.ascontiguousarray(labels, dtype="<u2").tofile(path)
