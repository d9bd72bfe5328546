"""Root of the exception hierarchy.

Every module defines its own subclasses next to the code that raises them;
the CLI only needs to know about ``CedmError``.
"""


class CedmError(Exception):
    """Base exception for all framework errors."""
    pass


class ConfigError(CedmError):
    """Raised when a run configuration cannot be loaded or validated."""

    def __init__(self, message: str, location: str = ""):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)
