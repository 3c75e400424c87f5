"""Exception types shared across modules."""

from __future__ import annotations

from dataclasses import dataclass

# Failure classification carried on every executor error.
EXEC_ERROR_KINDS = ("parse", "type", "runtime", "protocol", "timeout", "internal")


@dataclass(frozen=True)
class ExecError:
    """Classified execution failure; the rejection-sampling currency."""

    kind: str
    message: str

    def __post_init__(self):
        if self.kind not in EXEC_ERROR_KINDS:
            raise ValueError(f"unknown ExecError kind: {self.kind!r}")
        if not self.message:
            raise ValueError("ExecError message must be non-empty")

    def to_dict(self) -> dict:
        return {"kind": self.kind, "message": self.message}


class VRefineError(Exception):
    """Base for all library errors."""


class ConfigError(VRefineError):
    """A SearchConfig invariant does not hold."""

    def __init__(self, field: str, reason: str):
        self.field = field
        self.reason = reason
        super().__init__(f"config field {field!r}: {reason}")


class ExecutionFailed(VRefineError):
    """Raised by executors; wraps the classified ExecError."""

    def __init__(self, error: ExecError):
        self.error = error
        super().__init__(f"{error.kind}: {error.message}")


class BackendError(VRefineError):
    """A generator / evaluator / imagination backend call failed."""


class InitError(VRefineError):
    """The initial program failed to execute; refinement cannot start."""


class DimensionMismatch(VRefineError):
    """Two visual states do not share raster dimensions."""
