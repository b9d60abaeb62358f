"""The complete two-component family of compatible flat diagonal pairs.

Every nonsingular compatible flat pair in two coordinates can be written as

    g2 = diag(eps1 / b1^2,       eps2 / b2^2)
    g1 = diag(eps1 f1(u1)/b1^2,  eps2 f2(u2)/b2^2)

with signs ``eps`` and nonvanishing ``b1, b2, f1, f2``.  Flatness of ``g2``
is equivalent to ``b`` solving the linear system

    d b2 / d u1 =  eps1 (dF/du2) b1
    d b1 / d u2 = -eps2 (dF/du1) b2                                   (*)

for some scalar potential ``F(u1, u2)``, and the *pair* is a compatible flat
pair exactly when that ``F`` additionally solves

    2 F_{u1 u2} (f1 - f2) + F_{u2} f1' - F_{u1} f2' = 0.             (**)

The distinguished solution family ``F = c ln(u1 - u2)`` with
``b1^2 = b2^2 = u1 - u2`` (``c = 1/2``, ``eps = (-1, 1)``) generates the
ladder ``G_n = diag(eps1 (u1)^n / b1^2, eps2 (u2)^n / b2^2)``: members 0..2
are pairwise flat-compatible, and member 3 has constant curvature
``K = eps2/(4 b^2/(u1-u2))`` when ``b^2`` is scaled to ``(eps2/4K)(u1-u2)``.

This module verifies (**), integrates (*) from two-edge data, and builds the
pair and the ladder.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from . import grid_calculus as gc
from .errors import VanishingB
from .geometry_core import MetricField, build_metric
from .grid_calculus import DEFAULT_ORDER, GridChart

B_FLOOR_SCALE = 1e-8


@dataclass(frozen=True)
class Potential:
    """Scalar potential ``F(u1, u2)`` with optional analytic partials.

    Missing partials fall back to 4th-order central differences of ``value``
    with a step of ``fd_step`` (absolute); analytic partials are preferred
    wherever residuals at the 1e-10 level matter.
    """

    value: Callable[[np.ndarray, np.ndarray], np.ndarray]
    du1: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None
    du2: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None
    du1du2: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None
    fd_step: float = 1e-3

    def _fd(self, fn, axis):
        d = self.fd_step

        def deriv(u1, u2):
            if axis == 0:
                stencil = (fn(u1 - 2 * d, u2), fn(u1 - d, u2),
                           fn(u1 + d, u2), fn(u1 + 2 * d, u2))
            else:
                stencil = (fn(u1, u2 - 2 * d), fn(u1, u2 - d),
                           fn(u1, u2 + d), fn(u1, u2 + 2 * d))
            m2, m1, p1, p2 = stencil
            return (m2 - 8 * m1 + 8 * p1 - p2) / (12 * d)

        return deriv

    def partial_u1(self) -> Callable:
        return self.du1 if self.du1 is not None else self._fd(self.value, 0)

    def partial_u2(self) -> Callable:
        return self.du2 if self.du2 is not None else self._fd(self.value, 1)

    def mixed(self) -> Callable:
        if self.du1du2 is not None:
            return self.du1du2
        return self._fd(self.partial_u1(), 1)


def log_potential(c: float) -> Potential:
    """``F = c ln(u1 - u2)`` — defined for ``u1 > u2``."""
    return Potential(
        value=lambda u1, u2: c * np.log(u1 - u2),
        du1=lambda u1, u2: c / (u1 - u2),
        du2=lambda u1, u2: -c / (u1 - u2),
        du1du2=lambda u1, u2: c / (u1 - u2) ** 2,
    )


def linear_potential(a: float, b: float) -> Potential:
    """``F = a u1 + b u2`` (constant gradient; ``a = b = 0`` is constant F)."""
    zero = lambda u1, u2: np.zeros(np.broadcast(u1, u2).shape)
    return Potential(
        value=lambda u1, u2: a * u1 + b * u2 + zero(u1, u2),
        du1=lambda u1, u2: a + zero(u1, u2),
        du2=lambda u1, u2: b + zero(u1, u2),
        du1du2=zero,
    )


def product_potential() -> Potential:
    """``F = u1 u2``."""
    one = lambda u1, u2: np.ones(np.broadcast(u1, u2).shape)
    return Potential(
        value=lambda u1, u2: u1 * u2,
        du1=lambda u1, u2: u2 * one(u1, u2),
        du2=lambda u1, u2: u1 * one(u1, u2),
        du1du2=one,
    )


def _identity(t):
    return t


@dataclass(frozen=True)
class TwoComponentSpec:
    """Chart, signs, profile functions, potential, and (optional) b fields."""

    chart: GridChart
    potential: Potential
    eps: tuple[int, int] = (-1, 1)
    f: tuple[Callable, Callable] = (_identity, _identity)
    b1: np.ndarray | None = None
    b2: np.ndarray | None = None

    def __post_init__(self):
        if self.chart.dim != 2:
            raise ValueError("two-component specs need a 2-D chart")
        if any(e not in (-1, 1) for e in self.eps):
            raise ValueError("eps entries must be +1 or -1")
        for name in ("b1", "b2"):
            b = getattr(self, name)
            if b is not None:
                b = np.asarray(b, dtype=float)
                if b.shape != self.chart.shape:
                    raise ValueError(f"{name} must be a grid scalar field")
                _check_nonvanishing(b, name)
                object.__setattr__(self, name, b)

    def with_b(self, b1: np.ndarray, b2: np.ndarray) -> "TwoComponentSpec":
        return replace(self, b1=b1, b2=b2)

    def f_values(self) -> tuple[np.ndarray, np.ndarray]:
        """``f1(u1)`` and ``f2(u2)`` broadcast over the grid."""
        x = self.chart.axis_coordinates(0)
        y = self.chart.axis_coordinates(1)
        f1 = np.asarray(self.f[0](x), dtype=float)
        f2 = np.asarray(self.f[1](y), dtype=float)
        if f1.shape != x.shape:
            f1 = np.vectorize(self.f[0])(x).astype(float)
        if f2.shape != y.shape:
            f2 = np.vectorize(self.f[1])(y).astype(float)
        return (
            np.broadcast_to(f1[:, None], self.chart.shape),
            np.broadcast_to(f2[None, :], self.chart.shape),
        )


def _check_nonvanishing(b: np.ndarray, name: str):
    floor = B_FLOOR_SCALE * max(1.0, float(np.max(np.abs(b))))
    worst = int(np.argmin(np.abs(b)))
    value = float(b.flat[worst])
    if abs(value) < floor:
        node = np.unravel_index(worst, b.shape)
        raise VanishingB(node, value, floor)


def lequa_residual(
    spec: TwoComponentSpec,
    order: int = DEFAULT_ORDER,
    margin: int | None = None,
    box: Sequence[tuple[float, float]] | None = None,
) -> float:
    """Max interior residual of the compatibility equation (**) for ``F``.

    Potential partials are analytic when supplied; the profile derivatives
    ``f'`` come from axis finite differences of the sampled profile.
    """
    chart = spec.chart
    u1, u2 = np.meshgrid(
        chart.axis_coordinates(0), chart.axis_coordinates(1), indexing="ij"
    )
    f1, f2 = spec.f_values()
    fp1 = gc.differentiate_array(f1, chart, 0, order)
    fp2 = gc.differentiate_array(f2, chart, 1, order)
    f_u1 = np.asarray(spec.potential.partial_u1()(u1, u2), dtype=float)
    f_u2 = np.asarray(spec.potential.partial_u2()(u1, u2), dtype=float)
    f_mixed = np.asarray(spec.potential.mixed()(u1, u2), dtype=float)
    res = 2.0 * f_mixed * (f1 - f2) + f_u2 * fp1 - f_u1 * fp2
    return gc.interior_max(res, chart, margin, box, order)


@dataclass
class IntegrationResult:
    b1: np.ndarray
    b2: np.ndarray
    consistency: dict[str, float]

    @property
    def max_consistency(self) -> float:
        return max(self.consistency.values())


def integrate_b(
    spec: TwoComponentSpec,
    b1_edge: Callable[[np.ndarray], np.ndarray],
    b2_edge: Callable[[float], float],
    order: int = DEFAULT_ORDER,
) -> IntegrationResult:
    """Integrate the linear system (*) from two-edge data.

    ``b1_edge`` supplies ``b1`` on the bottom edge (``u2 = lower``) as a
    function of ``u1``; ``b2_edge`` supplies ``b2`` on the left edge
    (``u1 = lower``) as a function of ``u2`` and must accept *arbitrary*
    ``u2`` values inside the range (the row marcher evaluates it at
    half-steps).

    Marching scheme, 4th order in both directions: at a fixed row ``u2``,
    ``b2`` over the row is the left-edge value plus the cumulative quadrature
    of ``eps1 F_{u2} b1``; rows of ``b1`` advance by classic Runge–Kutta in
    ``u2``, rebuilding the ``b2`` row at every stage.

    The returned consistency figures re-measure both equations of (*) by
    grid differentiation of the final fields.
    """
    chart = spec.chart
    x = chart.axis_coordinates(0)
    y = chart.axis_coordinates(1)
    hx, hy = chart.spacing
    eps1, eps2 = spec.eps
    f_u1 = spec.potential.partial_u1()
    f_u2 = spec.potential.partial_u2()

    def row_b2(row_b1: np.ndarray, yv: float) -> np.ndarray:
        integrand = eps1 * np.asarray(f_u2(x, yv), dtype=float) * row_b1
        return float(b2_edge(yv)) + gc.cumulative_integral(integrand, hx, 0)

    def rhs(row_b1: np.ndarray, yv: float) -> np.ndarray:
        return -eps2 * np.asarray(f_u1(x, yv), dtype=float) * row_b2(row_b1, yv)

    b1_grid = np.empty(chart.shape)
    b2_grid = np.empty(chart.shape)
    row = np.asarray(b1_edge(x), dtype=float)
    if row.shape != x.shape:
        row = np.vectorize(b1_edge)(x).astype(float)
    b1_grid[:, 0] = row
    b2_grid[:, 0] = row_b2(row, y[0])
    for r in range(len(y) - 1):
        yv = y[r]
        k1 = rhs(row, yv)
        k2 = rhs(row + 0.5 * hy * k1, yv + 0.5 * hy)
        k3 = rhs(row + 0.5 * hy * k2, yv + 0.5 * hy)
        k4 = rhs(row + hy * k3, yv + hy)
        row = row + (hy / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        b1_grid[:, r + 1] = row
        b2_grid[:, r + 1] = row_b2(row, y[r + 1])

    _check_nonvanishing(b1_grid, "b1")
    _check_nonvanishing(b2_grid, "b2")

    u1, u2 = np.meshgrid(x, y, indexing="ij")
    r_b2 = gc.differentiate_array(b2_grid, chart, 0, order) - eps1 * np.asarray(
        f_u2(u1, u2), dtype=float
    ) * b1_grid
    r_b1 = gc.differentiate_array(b1_grid, chart, 1, order) + eps2 * np.asarray(
        f_u1(u1, u2), dtype=float
    ) * b2_grid
    consistency = {
        "b2_equation": gc.interior_max(r_b2, chart, None, None, order),
        "b1_equation": gc.interior_max(r_b1, chart, None, None, order),
    }
    return IntegrationResult(b1_grid, b2_grid, consistency)


def system_residual(
    spec: TwoComponentSpec,
    order: int = DEFAULT_ORDER,
    margin: int | None = None,
    box: Sequence[tuple[float, float]] | None = None,
) -> float:
    """Max interior residual of (*) for *given* ``b`` fields."""
    if spec.b1 is None or spec.b2 is None:
        raise ValueError("system_residual needs b fields set on the TwoComponentSpec")
    chart = spec.chart
    u1, u2 = np.meshgrid(
        chart.axis_coordinates(0), chart.axis_coordinates(1), indexing="ij"
    )
    eps1, eps2 = spec.eps
    f_u1 = np.asarray(spec.potential.partial_u1()(u1, u2), dtype=float)
    f_u2 = np.asarray(spec.potential.partial_u2()(u1, u2), dtype=float)
    r_b2 = gc.differentiate_array(spec.b2, chart, 0, order) - eps1 * f_u2 * spec.b1
    r_b1 = gc.differentiate_array(spec.b1, chart, 1, order) + eps2 * f_u1 * spec.b2
    return max(
        gc.interior_max(r_b2, chart, margin, box, order),
        gc.interior_max(r_b1, chart, margin, box, order),
    )


def build_pair(
    spec: TwoComponentSpec,
    lambda_samples: Sequence[tuple[float, float]] | None = None,
):
    """The pair ``(g1, g2)`` of the normal form as a ``PencilSpec``."""
    from .pencil_checker import DEFAULT_LAMBDA_SAMPLES, PencilSpec

    if spec.b1 is None or spec.b2 is None:
        raise ValueError("build_pair needs b fields set on the TwoComponentSpec")
    _check_nonvanishing(spec.b1, "b1")
    _check_nonvanishing(spec.b2, "b2")
    chart = spec.chart
    eps1, eps2 = spec.eps
    f1, f2 = spec.f_values()
    zeros = np.zeros(chart.shape)
    g2_vals = np.stack(
        [
            np.stack([eps1 / spec.b1**2, zeros], axis=-1),
            np.stack([zeros, eps2 / spec.b2**2], axis=-1),
        ],
        axis=-2,
    )
    g1_vals = np.stack(
        [
            np.stack([eps1 * f1 / spec.b1**2, zeros], axis=-1),
            np.stack([zeros, eps2 * f2 / spec.b2**2], axis=-1),
        ],
        axis=-2,
    )
    g1 = build_metric(g1_vals, chart)
    g2 = build_metric(g2_vals, chart)
    if lambda_samples is None:
        lambda_samples = DEFAULT_LAMBDA_SAMPLES
    return PencilSpec(g1, g2, tuple(lambda_samples))


def g_family(spec: TwoComponentSpec, n: int) -> MetricField:
    """Ladder member ``G_n = diag(eps1 (u1)^n / b1^2, eps2 (u2)^n / b2^2)``."""
    if n not in (0, 1, 2, 3):
        raise ValueError("family index must be 0..3")
    if spec.b1 is None or spec.b2 is None:
        raise ValueError("g_family needs b fields set on the TwoComponentSpec")
    chart = spec.chart
    u1, u2 = np.meshgrid(
        chart.axis_coordinates(0), chart.axis_coordinates(1), indexing="ij"
    )
    eps1, eps2 = spec.eps
    zeros = np.zeros(chart.shape)
    vals = np.stack(
        [
            np.stack([eps1 * u1**n / spec.b1**2, zeros], axis=-1),
            np.stack([zeros, eps2 * u2**n / spec.b2**2], axis=-1),
        ],
        axis=-2,
    )
    return build_metric(vals, chart)


def log_family_spec(
    chart: GridChart, c: float = 0.5, k: float | None = 0.25
) -> TwoComponentSpec:
    """The closed-form spec behind the ladder: ``eps = (-1, 1)``,
    ``f = (u1, u2)``, log potential, and ``b1^2 = b2^2 = (1/4K)(u1-u2)``
    (``K = 1/4`` gives ``b = sqrt(u1-u2)``, matching ``c = 1/2``)."""
    u1, u2 = np.meshgrid(
        chart.axis_coordinates(0), chart.axis_coordinates(1), indexing="ij"
    )
    w = u1 - u2
    if np.min(w) <= 0:
        raise ValueError("chart must satisfy u1 > u2 for the log family")
    scale = 1.0 if k is None else 1.0 / (4.0 * k)
    b = np.sqrt(scale * w)
    return TwoComponentSpec(
        chart=chart,
        potential=log_potential(c),
        eps=(-1, 1),
        b1=b,
        b2=b,
    )
