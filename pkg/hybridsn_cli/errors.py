"""Exception hierarchy shared by the numeric core and the command handlers.

Every error the CLI knows how to report derives from :class:`HybridSNError`
and carries the process exit code the handler should return.
"""

from typing import Optional


class HybridSNError(Exception):
    """Base class for expected, reportable failures."""

    exit_code = 1

    def __init__(self, message: str):
        self.message = message
        super().__init__(self._format_message())

    def _format_message(self) -> str:
        return self.message


class ConfigError(HybridSNError):
    """Invalid or inconsistent configuration (usage error)."""

    exit_code = 1


class DataError(HybridSNError):
    """Unreadable, malformed or inconsistent input data."""

    exit_code = 2

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None):
        self.path = path
        self.line = line
        super().__init__(message)

    def _format_message(self) -> str:
        if self.path and self.line is not None:
            return f"{self.path}:{self.line}: {self.message}"
        if self.path:
            return f"{self.path}: {self.message}"
        return self.message


class CheckpointError(DataError):
    """Checkpoint digest, version or shape mismatch."""


class NumericalError(HybridSNError):
    """Divergence, non-finite values or a failed numerical check."""

    exit_code = 3

    def __init__(self, message: str, epoch: Optional[int] = None, batch: Optional[int] = None):
        self.epoch = epoch
        self.batch = batch
        super().__init__(message)

    def _format_message(self) -> str:
        msg = self.message
        if self.epoch is not None:
            msg += f" - Epoch: {self.epoch}"
        if self.batch is not None:
            msg += f" - Batch: {self.batch}"
        return msg


class MissingCacheError(NumericalError):
    """Backward pass requested without a cached training forward pass."""


class ShapeError(HybridSNError):
    """Tensor shape or channel count does not match a layer's contract."""

    exit_code = 3
