"""ENVI header parsing and flat binary cube loading.

Only the keys needed to locate and decode the samples are interpreted; any
other header entry is kept as a raw string.
"""

import logging
import os
from typing import Any

import numpy as np

from hybridsn_cli.data.cube import HyperspectralCube
from hybridsn_cli.errors import DataError

logger = logging.getLogger(__name__)

# ENVI "data type" codes accepted for reflectance cubes.
ENVI_DTYPES = {
    1: np.uint8,
    2: np.int16,
    4: np.float32,
    5: np.float64,
    12: np.uint16,
}

INTERLEAVES = ("bsq", "bil", "bip")

REQUIRED_HEADER_KEYS = ("samples", "lines", "bands", "interleave", "data type", "byte order")
INTEGER_HEADER_KEYS = ("samples", "lines", "bands", "data type", "byte order", "header offset")


def read_envi_header(header_path: str) -> dict[str, Any]:
    """Parse an ENVI ``.hdr`` file into a dict with lower-cased keys."""
    try:
        with open(header_path, "r", encoding="utf-8", errors="replace") as handle:
            lines = handle.read().splitlines()
    except OSError as error:
        raise DataError(f"Cannot read ENVI header: {error}", path=header_path) from error

    if not lines or lines[0].strip().upper() != "ENVI":
        raise DataError("Missing 'ENVI' signature on the first line", path=header_path, line=1)

    header: dict[str, Any] = {}
    key_lines: dict[str, int] = {}
    idx = 1
    while idx < len(lines):
        line = lines[idx]
        line_no = idx + 1
        idx += 1
        if not line.strip() or line.strip().startswith(";"):
            continue
        if "=" not in line:
            raise DataError(f"Unparsable header line: {line.strip()!r}", path=header_path, line=line_no)

        key, value = line.split("=", 1)
        value = value.strip()
        # brace blocks may span several lines
        if value.startswith("{") and "}" not in value:
            while idx < len(lines) and "}" not in value:
                value += " " + lines[idx].strip()
                idx += 1
            if "}" not in value:
                raise DataError(f"Unterminated '{{' block for key '{key.strip()}'", path=header_path, line=line_no)

        key = key.strip().lower()
        header[key] = value.strip("{} ")
        key_lines[key] = line_no

    for key in REQUIRED_HEADER_KEYS:
        if key not in header:
            raise DataError(f"Missing required header key '{key}'", path=header_path)

    for key in INTEGER_HEADER_KEYS:
        if key not in header:
            continue
        try:
            header[key] = int(header[key])
        except ValueError as error:
            raise DataError(
                f"Header key '{key}' must be an integer, got {header[key]!r}",
                path=header_path,
                line=key_lines.get(key),
            ) from error

    header["interleave"] = str(header["interleave"]).lower()
    if header["interleave"] not in INTERLEAVES:
        raise DataError(
            f"Unsupported interleave '{header['interleave']}', expected one of {', '.join(INTERLEAVES)}",
            path=header_path,
            line=key_lines.get("interleave"),
        )

    if header["data type"] not in ENVI_DTYPES:
        raise DataError(
            f"Unsupported data type code {header['data type']}, "
            f"expected one of {', '.join(str(c) for c in ENVI_DTYPES)}",
            path=header_path,
            line=key_lines.get("data type"),
        )

    if header["byte order"] not in (0, 1):
        raise DataError(
            f"'byte order' must be 0 (little endian) or 1 (big endian), got {header['byte order']}",
            path=header_path,
            line=key_lines.get("byte order"),
        )

    for key in ("samples", "lines", "bands"):
        if header[key] < 1:
            raise DataError(f"Header key '{key}' must be >= 1", path=header_path, line=key_lines.get(key))

    return header


def to_row_col_band(flat: np.ndarray, lines: int, samples: int, bands: int, interleave: str) -> np.ndarray:
    """Reorder a flat sample array stored with ``interleave`` into (row, col, band)."""
    if interleave == "bsq":
        return flat.reshape(bands, lines, samples).transpose(1, 2, 0)
    if interleave == "bil":
        return flat.reshape(lines, bands, samples).transpose(0, 2, 1)
    if interleave == "bip":
        return flat.reshape(lines, samples, bands)
    raise DataError(f"Unsupported interleave '{interleave}'")


def read_flat_samples(data_path: str, dtype: np.dtype, expected: int, offset: int = 0) -> np.ndarray:
    """Read exactly ``expected`` samples of ``dtype`` from ``data_path`` after ``offset`` bytes."""
    try:
        size = os.path.getsize(data_path)
    except OSError as error:
        raise DataError(f"Cannot read cube data: {error}", path=data_path) from error

    expected_bytes = offset + expected * dtype.itemsize
    if size != expected_bytes:
        raise DataError(
            f"Data file has {size} bytes but the declared dimensions require {expected_bytes}",
            path=data_path,
        )

    return np.fromfile(data_path, dtype=dtype, count=expected, offset=offset)


def load_envi_cube(header_path: str, data_path: str) -> HyperspectralCube:
    """Load an ENVI cube, normalizing BSQ/BIL/BIP storage to (row, col, band).

    Integer samples are converted to float64 without scaling.
    """
    header = read_envi_header(header_path)
    lines, samples, bands = header["lines"], header["samples"], header["bands"]

    dtype = np.dtype(ENVI_DTYPES[header["data type"]])
    dtype = dtype.newbyteorder(">" if header["byte order"] == 1 else "<")

    flat = read_flat_samples(data_path, dtype, lines * samples * bands, header.get("header offset", 0))
    data = to_row_col_band(flat, lines, samples, bands, header["interleave"])

    logger.debug("Loaded ENVI cube %s: %dx%dx%d (%s)", data_path, lines, samples, bands, header["interleave"])
    return HyperspectralCube(np.ascontiguousarray(data, dtype=np.float64))
