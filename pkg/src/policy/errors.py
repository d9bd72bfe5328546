"""Policy exceptions."""

from src.errors import CedmError


class PolicyError(CedmError):
    """Raised on invalid policy inputs (dimension mismatch, unknown action, ...)."""
    pass


class CheckpointError(CedmError):
    """Raised when a policy checkpoint cannot be written, read or validated."""
    pass
