"""Binary checkpoint format.

Layout (all integers little-endian)::

    b"SEHSNCKP"  magic
    u16          format version
    u32 + bytes  model config as UTF-8 JSON with sorted keys
    u32          tensor count
    per tensor:  u16 + name bytes, u8 ndim, u32 * ndim shape, float64 values
    32 bytes     SHA-256 of everything above

The digest is verified before anything is parsed, so a damaged file never
yields a partially loaded model.
"""

import hashlib
import json
import struct
from io import BytesIO
from pathlib import Path
from typing import BinaryIO, Optional

import numpy as np

from hybridsn_cli.errors import CheckpointError, ConfigError, ShapeError
from hybridsn_cli.model.config import SeHybridSnConfig
from hybridsn_cli.model.network import SeHybridSnModel, build_model

MAGIC = b"SEHSNCKP"
VERSION = 1
DIGEST_SIZE = hashlib.sha256().digest_size


def _write_tensor(buffer: BinaryIO, name: str, value: np.ndarray) -> None:
    encoded = name.encode("utf-8")
    buffer.write(struct.pack("<H", len(encoded)))
    buffer.write(encoded)
    buffer.write(struct.pack("<B", value.ndim))
    buffer.write(struct.pack(f"<{value.ndim}I", *value.shape))
    buffer.write(np.ascontiguousarray(value, dtype="<f8").tobytes())


def encode_checkpoint(model: SeHybridSnModel) -> bytes:
    buffer = BytesIO()
    buffer.write(MAGIC)
    buffer.write(struct.pack("<H", VERSION))

    config = json.dumps(model.config.to_dict(), sort_keys=True).encode("utf-8")
    buffer.write(struct.pack("<I", len(config)))
    buffer.write(config)

    parameters = model.parameters()
    buffer.write(struct.pack("<I", len(parameters)))
    for name, value in parameters.items():
        _write_tensor(buffer, name, value)

    body = buffer.getvalue()
    return body + hashlib.sha256(body).digest()


def save_checkpoint(model: SeHybridSnModel, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(encode_checkpoint(model))
    return path


class _Reader:
    def __init__(self, data: bytes, path: Path):
        self.data = data
        self.offset = 0
        self.path = path

    def take(self, size: int) -> bytes:
        if self.offset + size > len(self.data):
            raise CheckpointError("checkpoint ends unexpectedly", path=self.path)
        chunk = self.data[self.offset : self.offset + size]
        self.offset += size
        return chunk

    def unpack(self, fmt: str) -> tuple:
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))


def decode_checkpoint(data: bytes, path: Path) -> tuple[SeHybridSnConfig, dict[str, np.ndarray]]:
    if len(data) < len(MAGIC) + DIGEST_SIZE or not data.startswith(MAGIC):
        raise CheckpointError("not a checkpoint file (bad magic)", path=path)

    body, digest = data[:-DIGEST_SIZE], data[-DIGEST_SIZE:]
    if hashlib.sha256(body).digest() != digest:
        raise CheckpointError("digest mismatch, the file is truncated or corrupted", path=path)

    reader = _Reader(body, path)
    reader.take(len(MAGIC))
    (version,) = reader.unpack("<H")
    if version != VERSION:
        raise CheckpointError(f"unsupported checkpoint version {version}, expected {VERSION}", path=path)

    (config_size,) = reader.unpack("<I")
    try:
        config = SeHybridSnConfig.from_dict(json.loads(reader.take(config_size).decode("utf-8")))
    except (ValueError, ConfigError) as error:
        raise CheckpointError(f"invalid config block: {error}", path=path)

    tensors: dict[str, np.ndarray] = {}
    (count,) = reader.unpack("<I")
    for _ in range(count):
        (name_size,) = reader.unpack("<H")
        name = reader.take(name_size).decode("utf-8")
        (ndim,) = reader.unpack("<B")
        shape = reader.unpack(f"<{ndim}I")
        size = int(np.prod(shape)) if ndim else 1
        tensors[name] = np.frombuffer(reader.take(size * 8), dtype="<f8").reshape(shape).astype(np.float64)

    if reader.offset != len(body):
        raise CheckpointError("trailing bytes after the last tensor", path=path)
    return config, tensors


def load_checkpoint(path: Path, model: Optional[SeHybridSnModel] = None) -> SeHybridSnModel:
    """Read a checkpoint into ``model`` or into a fresh model built from the stored config.

    When ``model`` is given its architecture must match the file tensor for tensor.
    """
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as error:
        raise CheckpointError(f"cannot read checkpoint: {error.strerror}", path=path)

    config, tensors = decode_checkpoint(data, path)
    target = model if model is not None else build_model(config, initialize=False)

    expected = target.parameters()
    for name in expected:
        if name not in tensors:
            raise ShapeError(f"checkpoint {path} has no tensor {name}")
    for name, value in tensors.items():
        if name not in expected:
            raise ShapeError(f"checkpoint {path} holds unexpected tensor {name}")
        if value.shape != expected[name].shape:
            raise ShapeError(
                f"checkpoint {path}: tensor {name} has shape {value.shape}, the model expects {expected[name].shape}"
            )

    target.load_parameters(tensors)
    return target
