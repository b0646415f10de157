"""Exception types shared across the package."""


class DiskcurvError(Exception):
    """Base class for all package errors."""


class ConfigurationError(DiskcurvError):
    """Invalid mesh/group/spec combination or malformed run configuration."""


class InvalidFieldError(DiskcurvError):
    """A nodal field contains NaN/Inf or has the wrong length."""


class OutsideAdmissibleSetError(DiskcurvError):
    """An iterate left the admissible set: a curvature-weighted exponential
    integral became nonpositive.  ``which`` is ``"area"`` or ``"boundary"``."""

    def __init__(self, which: str, value: float):
        self.which = which
        self.value = value
        super().__init__(
            f"nonpositive {which} integral ({value:.6g}); "
            "iterate is outside the admissible set"
        )


class InfeasibleProblemError(DiskcurvError):
    """The admissible set is empty: K is nowhere positive on the disk or h is
    nowhere positive on the boundary."""


class EndpointRhoError(DiskcurvError):
    """The mass-parameter derivative is infinite at rho = 0 or rho = 2*pi."""


class StalledLineSearchError(DiskcurvError):
    """Backtracking could not restore admissibility within the allowed number
    of step reductions."""


class InconsistentMinimizerError(DiskcurvError):
    """The two candidate normalization constants disagree beyond tolerance,
    so the pair (u, rho) does not satisfy the mass-balance constraint."""


class LinearSolveError(DiskcurvError):
    """A sparse linear solve failed."""
