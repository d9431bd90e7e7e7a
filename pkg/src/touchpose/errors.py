"""Exception types shared across the package."""


class TouchPoseError(Exception):
    """Base class for all package errors."""


class InvalidInputError(TouchPoseError, ValueError):
    """A precondition on caller-supplied data was violated."""


class PlyFormatError(TouchPoseError):
    """Malformed PLY content. Carries the byte offset where parsing failed."""

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class NumericalError(TouchPoseError):
    """A numerical operation failed (singular matrix, collapsed state, ...)."""


class DegeneratePairError(InvalidInputError):
    """A correspondence pair is coincident and yields no constraint."""


class PlanningError(TouchPoseError):
    """The planner could not produce a touch action."""


class SimulationError(TouchPoseError):
    """The touch simulator failed to generate a contact."""
