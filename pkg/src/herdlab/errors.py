"""Exception hierarchy shared by every herdlab module."""

from __future__ import annotations


class HerdlabError(Exception):
    """Base class for all toolkit errors."""


class ModelError(HerdlabError):
    """The model left its domain of validity (reported with CLI exit code 2)."""


class SingularityError(ModelError):
    """Pursuer and evader came within the singularity guard distance."""

    def __init__(self, index: int, distance: float, t: float | None = None):
        self.index = index
        self.distance = distance
        self.t = t
        where = "" if t is None else f" at t={t:.17g}"
        gap = "within the guard distance" if distance != distance else f"distance {distance:.3e}"
        super().__init__(f"pursuer-evader collision for evader {index} ({gap}){where}")


class DomainError(ModelError):
    """An input lies outside the domain of a formula (e.g. r <= 0 in polar frames)."""

    def __init__(self, message: str, index: int | None = None, t: float | None = None):
        self.index = index
        self.t = t
        super().__init__(message)


class FrameError(HerdlabError):
    """Operation requested in a coordinate frame where it is meaningless."""


class NoRootError(ModelError):
    """No positive root of the equilibrium equation was found in the searched range."""

    def __init__(self, lo: float, hi: float):
        self.range = (lo, hi)
        super().__init__(f"no positive root found in [{lo:.6g}, {hi:.6g}]")


class ExistenceError(ModelError):
    """Circular pursuit parameters admit no equilibrium."""


class RangeError(ModelError):
    """Requested target radius cannot be produced by any positive angular velocity."""


class NotHurwitzError(ModelError):
    """Matrix has an eigenvalue with non-negative real part."""


class SeedInfeasibleError(ModelError):
    """No positive multiple of the Lyapunov seed satisfies the boundary constraint."""


class CertificationError(ModelError):
    """An optimized ellipse failed the densified boundary check."""


class EmptyIntersectionError(ModelError):
    """The equilibrium-centred ellipse does not contain the target point."""


class ValidationError(HerdlabError, ValueError):
    """A configuration or parameter field failed validation."""

    def __init__(self, field: str, reason: str):
        self.field = field
        self.reason = reason
        super().__init__(f"{field}: {reason}")


class ParseError(HerdlabError):
    """A scenario file could not be parsed."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        loc = "" if line is None else f" (line {line}, column {column})"
        super().__init__(f"{message}{loc}")


class AdmissibilityWarning(UserWarning):
    """Spiral parameters violate the uniqueness condition; several equilibria may exist."""
