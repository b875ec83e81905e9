"""Exception hierarchy for dladmm.

Every error the CLI can surface derives from :class:`DlAdmmError` and carries the
process exit code the CLI reports for it.
"""


class DlAdmmError(Exception):
    """Base exception for all dladmm-specific errors."""

    exit_code: int = 1


class ConfigurationError(DlAdmmError):
    """Invalid or unparseable run configuration."""

    exit_code = 2


class ShapeError(DlAdmmError, ValueError):
    """Array dimensions disagree with the architecture or with each other."""

    exit_code = 2


class DatasetError(DlAdmmError):
    """A dataset file is missing, unreadable or inconsistent."""

    exit_code = 3


class IdxFormatError(DatasetError):
    """Malformed IDX container (bad magic, truncated payload, dimension overflow)."""


class NumericFailureError(DlAdmmError):
    """A block update produced non-finite values or failed to terminate."""

    exit_code = 4

    def __init__(self, message: str, *, block: str, layer: int | None = None, direction: str | None = None) -> None:
        self.block = block
        self.layer = layer
        self.direction = direction
        super().__init__(message)

    def __str__(self) -> str:
        where = self.block
        if self.layer is not None:
            where += f"[{self.layer}]"
        if self.direction is not None:
            where += f" ({self.direction})"
        return f"{where}: {super().__str__()}"


class CheckpointError(DlAdmmError):
    """Checkpoint file has a bad header, version or payload."""

    exit_code = 5
