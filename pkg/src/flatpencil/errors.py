"""Exception types shared by the flatpencil modules.

Every error that can escape a public operation is defined here so the CLI can
map any failure onto a single exit path.  Errors that point at a concrete grid
location carry the multi-index of the offending node.
"""

from __future__ import annotations


class FlatpencilError(Exception):
    """Base class for all package-specific failures."""


class NonFiniteSample(FlatpencilError):
    """A closure produced NaN/Inf at a grid node."""

    def __init__(self, node, detail=""):
        self.node = tuple(node)
        super().__init__(f"non-finite sample at grid node {self.node} {detail}".rstrip())


class ChartTooCoarse(FlatpencilError):
    """An axis has too few points for the requested stencil."""

    def __init__(self, axis, points, needed):
        self.axis = axis
        self.points = points
        self.needed = needed
        super().__init__(
            f"axis {axis} has {points} points, stencil needs at least {needed}"
        )


class DegenerateMetric(FlatpencilError):
    """Metric determinant fell below the nondegeneracy floor."""

    def __init__(self, node, det, floor):
        self.node = tuple(node)
        self.det = det
        self.floor = floor
        super().__init__(
            f"|det g| = {abs(det):.3e} < floor {floor:.3e} at node {self.node}"
        )


class DegenerateCombination(FlatpencilError):
    """A sampled linear combination of the pencil metrics is degenerate."""

    def __init__(self, lam1, lam2, cause):
        self.lam = (lam1, lam2)
        super().__init__(f"combination ({lam1}, {lam2}) degenerate: {cause}")


class EigensolveFailure(FlatpencilError):
    """The pointwise eigensolve for the pencil spectrum did not converge."""


class NotDiagonal(FlatpencilError):
    """An operation requiring diagonal metrics met an off-diagonal entry."""

    def __init__(self, offdiag, tol):
        self.offdiag = offdiag
        self.tol = tol
        super().__init__(f"off-diagonal magnitude {offdiag:.3e} exceeds {tol:.3e}")


class NotFlatCoordinates(FlatpencilError):
    """Chart coordinates are not flat coordinates of the reference metric."""

    def __init__(self, residual, tol):
        self.residual = residual
        self.tol = tol
        super().__init__(
            f"reference connection residual {residual:.3e} exceeds {tol:.3e}; "
            "construction requires flat coordinates"
        )


class SignMismatch(FlatpencilError):
    """A metric entry disagrees with its declared sign somewhere on the box."""

    def __init__(self, node, axis, value):
        self.node = tuple(node)
        self.axis = axis
        super().__init__(
            f"sign * g^{{{axis}{axis}}} = {value:.3e} <= 0 at node {self.node}"
        )


class SignChange(FlatpencilError):
    """A reduction weight changes sign (or vanishes) on its axis range."""

    def __init__(self, axis, detail=""):
        self.axis = axis
        super().__init__(f"profile component {axis} changes sign or vanishes {detail}".rstrip())


class SignChangeOnRange(FlatpencilError):
    """A profile component changes sign on the dressing integration range."""

    def __init__(self, component, lo, hi):
        self.component = component
        super().__init__(
            f"profile component {component} changes sign or vanishes on [{lo:g}, {hi:g}]"
        )


class ResidualsTooLarge(FlatpencilError):
    """Frame residuals exceed the gate for building a metric pair."""

    def __init__(self, residual, tol):
        self.residual = residual
        self.tol = tol
        super().__init__(f"frame residual {residual:.3e} exceeds gate {tol:.3e}")


class VanishingB(FlatpencilError):
    """An integrated diagonal entry b^i collapsed below the floor."""

    def __init__(self, node, value, floor):
        self.node = tuple(node)
        super().__init__(
            f"|b| = {abs(value):.3e} < floor {floor:.3e} at node {self.node}"
        )


class IllConditioned(FlatpencilError):
    """The collocation matrix condition number exceeds the trust cap."""

    def __init__(self, cond, cap):
        self.cond = cond
        self.cap = cap
        super().__init__(f"collocation matrix condition {cond:.3e} exceeds cap {cap:.3e}")


class TruncationInsufficient(FlatpencilError):
    """Kernel mass beyond the truncation length is not negligible."""

    def __init__(self, mass, tol, length):
        self.mass = mass
        self.tol = tol
        super().__init__(
            f"estimated kernel tail mass {mass:.3e} beyond length {length:g} "
            f"exceeds {tol:.3e}"
        )


class SchemaError(FlatpencilError):
    """A scenario file does not match the documented schema."""


class ExpressionParseError(FlatpencilError):
    """An expression string uses syntax outside the supported grammar."""
