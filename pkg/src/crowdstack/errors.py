"""Exception hierarchy shared by the solver modules and the CLI."""


class CrowdstackError(Exception):
    """Base class for all package errors."""


class DomainError(CrowdstackError, ValueError):
    """An argument lies outside the domain of the operation."""


class CapacityError(CrowdstackError):
    """The requested instance exceeds a configured size budget."""


class InvalidSpecError(CrowdstackError, ValueError):
    """A game specification failed validation.

    ``violations`` holds every problem found, not just the first one.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "\n".join(f"  - {v}" for v in self.violations)
        super().__init__(f"invalid game specification:\n{lines}")


class UnsupportedShapeError(CrowdstackError, ValueError):
    """The operation only supports a restricted game shape (e.g. two tasks)."""


class DegenerateTypeError(CrowdstackError, ValueError):
    """A worker type is matched to both tasks or to neither."""


class InconsistencyError(CrowdstackError, RuntimeError):
    """An internal invariant was violated; indicates a bug, not bad input."""
