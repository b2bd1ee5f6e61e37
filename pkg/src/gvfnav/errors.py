"""Exception types shared across the package."""


class GvfNavError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(GvfNavError):
    """A path parameter was evaluated outside its valid interval."""


class ConfigurationError(GvfNavError):
    """A spline, scenario, or controller was built with inconsistent settings."""


class DegenerateTangentError(GvfNavError):
    """The path tangent vanished where a direction or curvature was needed."""


class FieldDegenerateError(GvfNavError):
    """The planar projection of the guiding field vanished at the query state."""

    def __init__(self, message, xi=None):
        super().__init__(message)
        self.xi = xi


class LockedPointError(GvfNavError):
    """An edit targeted a control point that is fixed by joint continuity."""


class SessionStateError(GvfNavError):
    """A simulation session was driven in a state that does not allow it."""


class ScenarioError(GvfNavError):
    """A scenario failed validation; ``errors`` lists (field_path, message) pairs."""

    def __init__(self, errors):
        self.errors = list(errors)
        summary = "; ".join(f"{path}: {msg}" for path, msg in self.errors)
        super().__init__(f"invalid scenario: {summary}")
