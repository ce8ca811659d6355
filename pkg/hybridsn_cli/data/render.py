"""Classification maps as binary PPM (P6) images."""

from typing import Sequence

import numpy as np

from hybridsn_cli.errors import DataError

PPM_MAX_VALUE = 255


def encode_ppm(labels: np.ndarray, palette: Sequence[Sequence[int]]) -> bytes:
    labels = np.asarray(labels)
    if labels.ndim != 2:
        raise DataError(f"Label grid must be 2-dimensional, got shape {labels.shape}")

    colors = np.asarray(palette, dtype=np.int64)
    if colors.ndim != 2 or colors.shape[1] != 3:
        raise DataError("Palette must be a list of RGB triples")

    if labels.size and (labels.min() < 0 or labels.max() >= len(colors)):
        raise DataError(f"Label {int(labels.max())} has no palette entry (palette has {len(colors)} colors)")

    colors = colors.copy()
    # background is always rendered black
    colors[0] = (0, 0, 0)

    height, width = labels.shape
    header = f"P6\n{width} {height}\n{PPM_MAX_VALUE}\n".encode("ascii")
    return header + colors[labels].astype(np.uint8).tobytes()


def render_class_map(labels: np.ndarray, palette: Sequence[Sequence[int]], out_path: str) -> None:
    payload = encode_ppm(labels, palette)
    try:
        with open(out_path, "wb") as handle:
            handle.write(payload)
    except OSError as error:
        raise DataError(f"Cannot write classification map: {error}", path=out_path) from error


def read_ppm(path: str) -> np.ndarray:
    """Read a binary PPM into an (height, width, 3) uint8 array."""
    with open(path, "rb") as handle:
        payload = handle.read()

    tokens: list[bytes] = []
    pos, end = 0, len(payload)
    while len(tokens) < 4 and pos < end:
        while pos < end and payload[pos : pos + 1].isspace():
            pos += 1
        if payload[pos : pos + 1] == b"#":
            newline = payload.find(b"\n", pos)
            pos = end if newline < 0 else newline + 1
            continue
        start = pos
        while pos < end and not payload[pos : pos + 1].isspace():
            pos += 1
        if pos > start:
            tokens.append(payload[start:pos])

    # the single whitespace byte after the max value must be present
    if len(tokens) < 4 or pos >= end:
        raise DataError("Truncated PPM header", path=path)

    if tokens[0] != b"P6":
        raise DataError("Not a binary PPM (P6) file", path=path)

    try:
        width, height, max_value = (int(t) for t in tokens[1:])
    except ValueError as error:
        raise DataError(f"Malformed PPM header: {error}", path=path) from error
    if max_value != PPM_MAX_VALUE:
        raise DataError(f"Unsupported PPM max value {max_value}", path=path)

    pixels = np.frombuffer(payload[pos + 1 :], dtype=np.uint8)
    if pixels.size != width * height * 3:
        raise DataError(f"PPM pixel data has {pixels.size} bytes, expected {width * height * 3}", path=path)
    return pixels.reshape(height, width, 3)


def decode_class_map(rgb: np.ndarray, palette: Sequence[Sequence[int]]) -> np.ndarray:
    """Invert :func:`encode_ppm` for a palette with distinct colors."""
    colors = np.asarray(palette, dtype=np.int64).copy()
    colors[0] = (0, 0, 0)
    keys = (rgb[..., 0].astype(np.int64) << 16) | (rgb[..., 1].astype(np.int64) << 8) | rgb[..., 2]
    color_keys = (colors[:, 0] << 16) | (colors[:, 1] << 8) | colors[:, 2]

    lookup = {int(k): label for label, k in enumerate(color_keys)}
    if len(lookup) != len(color_keys):
        raise DataError("Palette colors must be distinct to decode a classification map")

    try:
        return np.vectorize(lambda k: lookup[int(k)], otypes=[np.int64])(keys)
    except KeyError as error:
        raise DataError(f"Color {error} is not in the palette") from error
