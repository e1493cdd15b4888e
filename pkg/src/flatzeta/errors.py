"""Exception types shared across the package.

Numerical diagnostics (pole proximity, half-plane violations, suspected
divergence) are raised as exceptions rather than returned as flags so that
callers cannot silently consume an invalid continuation value.
"""

from __future__ import annotations


class FlatZetaError(Exception):
    """Base class for all library errors."""


class PoleProximity(FlatZetaError):
    """The query point s lies inside the exclusion disk of a candidate pole."""

    def __init__(self, s, pole, distance, exclusion):
        self.s = s
        self.pole = pole
        self.distance = distance
        self.exclusion = exclusion
        super().__init__(
            f"s={s} is within {distance:.3e} of candidate pole {pole} "
            f"(exclusion radius {exclusion:.3e})"
        )


class HalfPlaneExceeded(FlatZetaError):
    """The query point lies outside the half-plane the expansion order reaches."""

    def __init__(self, s, abscissa, hint=""):
        self.s = s
        self.abscissa = abscissa
        msg = f"Re(s)={s.real if hasattr(s, 'real') else s} is not strictly right of {abscissa}"
        if hint:
            msg += f"; {hint}"
        super().__init__(msg)


class NotAdmitted(FlatZetaError):
    """A face scaling limit does not exist; carries the obstructing term."""

    def __init__(self, face, term, reason=""):
        self.face = face
        self.term = term
        msg = f"face {face} does not admit a scaling limit (obstruction: {term})"
        if reason:
            msg += f": {reason}"
        super().__init__(msg)


class FlatSupport(FlatZetaError):
    """Monomial support is empty, so there is no polyhedron to build."""


class DivergenceSuspected(FlatZetaError):
    """Exploratory quadrature did not converge under refinement.

    Carries the dyadic shell sums so the caller can inspect the decay rate.
    """

    def __init__(self, s, shells):
        self.s = s
        self.shells = shells
        super().__init__(
            f"integral at s={s} shows non-convergent shell sums ({len(shells)} shells)"
        )


class QuadratureDiagnostic(FlatZetaError):
    """A quadrature or root-bracketing routine could not certify its result."""


class PreconditionViolated(FlatZetaError):
    """A hypothesis check failed; carries the offending sample point."""

    def __init__(self, message, point=None):
        self.point = point
        super().__init__(message if point is None else f"{message} (at {point})")


class FuncSpecError(FlatZetaError):
    """A function-spec file failed validation; carries the offending key path."""

    def __init__(self, key, message):
        self.key = key
        super().__init__(f"spec key '{key}': {message}")
