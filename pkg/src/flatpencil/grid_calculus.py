"""Uniform tensor-product grids and finite-difference calculus on them.

All derivatives taken anywhere in the package go through :func:`partial`,
which applies centred stencils of the requested order in the interior and
one-sided stencils of the *same* order at the boundary, so the formal accuracy
is uniform across the box.  Boundary stencils have larger error constants,
which is why residual reducers quote maxima over an interior sub-box by
default (one differentiation chain's worth of margin).

First-derivative stencils (spacing h):

order 2
    interior   (f[i+1] - f[i-1]) / (2h)
    edge       (-3 f0 + 4 f1 - f2) / (2h)          and mirrored

order 4
    interior   (f[i-2] - 8 f[i-1] + 8 f[i+1] - f[i+2]) / (12h)
    node 0     (-25 f0 + 48 f1 - 36 f2 + 16 f3 - 3 f4) / (12h)
    node 1     (-3 f0 - 10 f1 + 18 f2 - 6 f3 + f4) / (12h)   and mirrored

Tensor fields are stored densely as ``values[grid index ..., tensor index ...]``
with one tensor axis of length N per slot of the variance signature.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ChartTooCoarse, NonFiniteSample

DEFAULT_ORDER = 4

#: minimum number of nodes per axis for which every stencil in the package
#: (including the five-point one-sided rows) is defined
MIN_AXIS_POINTS = 5


@dataclass(frozen=True)
class GridChart:
    """A uniform tensor-product grid on an axis-aligned box.

    ``lower[i] < upper[i]`` and ``points[i] >= 2``; differentiation requires
    at least :data:`MIN_AXIS_POINTS` nodes on the axis being differentiated
    and raises :class:`ChartTooCoarse` otherwise.
    """

    lower: tuple[float, ...]
    upper: tuple[float, ...]
    points: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "lower", tuple(float(x) for x in self.lower))
        object.__setattr__(self, "upper", tuple(float(x) for x in self.upper))
        object.__setattr__(self, "points", tuple(int(n) for n in self.points))
        if not (len(self.lower) == len(self.upper) == len(self.points)):
            raise ValueError("lower/upper/points must have equal length")
        if len(self.points) == 0:
            raise ValueError("chart needs at least one axis")
        for d, (lo, hi, n) in enumerate(zip(self.lower, self.upper, self.points)):
            if not hi > lo:
                raise ValueError(f"axis {d}: upper must exceed lower")
            if n < 2:
                raise ValueError(f"axis {d}: need at least 2 points, got {n}")

    @property
    def dim(self) -> int:
        return len(self.points)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.points

    @property
    def spacing(self) -> tuple[float, ...]:
        return tuple(
            (hi - lo) / (n - 1) for lo, hi, n in zip(self.lower, self.upper, self.points)
        )

    def axis_coordinates(self, axis: int) -> np.ndarray:
        return np.linspace(self.lower[axis], self.upper[axis], self.points[axis])

    def meshgrid(self) -> list[np.ndarray]:
        """Coordinate arrays of shape ``self.shape``, one per axis."""
        return np.meshgrid(
            *(self.axis_coordinates(d) for d in range(self.dim)), indexing="ij"
        )

    def node(self, index: Sequence[int]) -> np.ndarray:
        return np.array(
            [self.axis_coordinates(d)[i] for d, i in enumerate(index)], dtype=float
        )

    def interior(self, margin: int) -> tuple[slice, ...]:
        """Index slices excluding ``margin`` nodes per side, never empty."""
        out = []
        for n in self.points:
            m = min(int(margin), (n - 1) // 2)
            out.append(slice(m, n - m))
        return tuple(out)

    def box_slices(self, box: Sequence[tuple[float, float]]) -> tuple[slice, ...]:
        """Index slices for the nodes inside a physical sub-box."""
        if len(box) != self.dim:
            raise ValueError("sub-box must give (lo, hi) per axis")
        out = []
        for d, (lo, hi) in enumerate(box):
            x = self.axis_coordinates(d)
            eps = 1e-12 * max(1.0, abs(lo), abs(hi))
            keep = np.nonzero((x >= lo - eps) & (x <= hi + eps))[0]
            if keep.size == 0:
                raise ValueError(f"sub-box on axis {d} contains no grid nodes")
            out.append(slice(int(keep[0]), int(keep[-1]) + 1))
        return tuple(out)


@dataclass(frozen=True)
class TensorField:
    """Dense tensor values on a chart.

    ``variance`` is one character per tensor slot: ``'u'`` for a contravariant
    (upper) index, ``'d'`` for a covariant (lower) one, e.g. ``"uu"`` for a
    contravariant metric and ``"udd"`` for a connection.  ``symmetries`` lists
    pairs of slot positions whose exchange leaves the stored values exactly
    invariant.
    """

    chart: GridChart
    variance: str
    values: np.ndarray
    symmetries: tuple[tuple[int, int], ...] = field(default=())

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        expected = self.chart.shape + (self.chart.dim,) * len(self.variance)
        if vals.shape != expected:
            raise ValueError(f"values shape {vals.shape} != expected {expected}")
        if not np.all(np.isfinite(vals)):
            bad = np.argwhere(~np.isfinite(vals))[0][: self.chart.dim]
            raise NonFiniteSample(tuple(int(i) for i in bad))
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "symmetries", tuple(tuple(p) for p in self.symmetries))

    @property
    def rank(self) -> int:
        return len(self.variance)

    def component(self, *tensor_index: int) -> np.ndarray:
        return self.values[(Ellipsis,) + tensor_index]


# ---------------------------------------------------------------------------
# stencils


def _diff_axis0_order2(a: np.ndarray, h: float) -> np.ndarray:
    out = np.empty_like(a)
    out[1:-1] = (a[2:] - a[:-2]) / (2.0 * h)
    out[0] = (-3.0 * a[0] + 4.0 * a[1] - a[2]) / (2.0 * h)
    out[-1] = (3.0 * a[-1] - 4.0 * a[-2] + a[-3]) / (2.0 * h)
    return out


def _diff_axis0_order4(a: np.ndarray, h: float) -> np.ndarray:
    out = np.empty_like(a)
    out[2:-2] = (a[:-4] - 8.0 * a[1:-3] + 8.0 * a[3:-1] - a[4:]) / (12.0 * h)
    out[0] = (-25.0 * a[0] + 48.0 * a[1] - 36.0 * a[2] + 16.0 * a[3] - 3.0 * a[4]) / (
        12.0 * h
    )
    out[1] = (-3.0 * a[0] - 10.0 * a[1] + 18.0 * a[2] - 6.0 * a[3] + a[4]) / (12.0 * h)
    out[-2] = (
        3.0 * a[-1] + 10.0 * a[-2] - 18.0 * a[-3] + 6.0 * a[-4] - a[-5]
    ) / (12.0 * h)
    out[-1] = (
        25.0 * a[-1] - 48.0 * a[-2] + 36.0 * a[-3] - 16.0 * a[-4] + 3.0 * a[-5]
    ) / (12.0 * h)
    return out


_STENCILS = {2: _diff_axis0_order2, 4: _diff_axis0_order4}


def differentiate_array(
    values: np.ndarray, chart: GridChart, axis: int, order: int = DEFAULT_ORDER
) -> np.ndarray:
    """First derivative of raw grid values along one chart axis."""
    if order not in _STENCILS:
        raise ValueError(f"unsupported stencil order {order}; choose 2 or 4")
    if not 0 <= axis < chart.dim:
        raise ValueError(f"axis {axis} out of range for a {chart.dim}-D chart")
    if chart.points[axis] < MIN_AXIS_POINTS:
        raise ChartTooCoarse(axis, chart.points[axis], MIN_AXIS_POINTS)
    moved = np.moveaxis(np.asarray(values, dtype=float), axis, 0)
    out = _STENCILS[order](moved, chart.spacing[axis])
    return np.moveaxis(out, 0, axis)


# ---------------------------------------------------------------------------
# public operations


def sample(
    closure: Callable[[np.ndarray], object],
    chart: GridChart,
    variance: str = "",
    symmetries: Sequence[tuple[int, int]] = (),
    symmetry_tol: float = 1e-8,
) -> TensorField:
    """Evaluate a pointwise closure on every grid node.

    The closure receives the node coordinates as a 1-D array of length
    ``chart.dim`` and must return a scalar (``variance == ""``) or an array of
    shape ``(dim,) * rank``.  Declared symmetries are enforced exactly in
    storage: values are averaged over the index exchange, and the pre-average
    asymmetry must not exceed ``symmetry_tol`` relative to the field scale.
    """
    dim = chart.dim
    rank = len(variance)
    tshape = (dim,) * rank
    axes = [chart.axis_coordinates(d) for d in range(dim)]
    vals = np.empty(chart.shape + tshape, dtype=float)
    for idx in np.ndindex(chart.shape):
        u = np.array([axes[d][idx[d]] for d in range(dim)])
        v = np.asarray(closure(u), dtype=float)
        if v.shape != tshape:
            raise ValueError(
                f"closure returned shape {v.shape}, expected {tshape} at node {idx}"
            )
        if not np.all(np.isfinite(v)):
            raise NonFiniteSample(idx)
        vals[idx] = v

    grid_ndim = len(chart.shape)
    for a, b in symmetries:
        swapped = np.swapaxes(vals, grid_ndim + a, grid_ndim + b)
        scale = float(np.max(np.abs(vals))) or 1.0
        if float(np.max(np.abs(vals - swapped))) > symmetry_tol * scale:
            raise ValueError(
                f"closure violates declared symmetry in slots ({a}, {b})"
            )
        vals = 0.5 * (vals + swapped)
    return TensorField(chart, variance, vals, tuple(tuple(p) for p in symmetries))


def partial(field: TensorField, axis: int, order: int = DEFAULT_ORDER) -> TensorField:
    """Differentiate a tensor field along one chart axis.

    The result has the same stored variance; the new covariant derivative slot
    is tracked by the caller (callers that need all axes stack them with
    :func:`stacked_partials`).
    """
    out = differentiate_array(field.values, field.chart, axis, order)
    return TensorField(field.chart, field.variance, out, field.symmetries)


def stacked_partials(field: TensorField, order: int = DEFAULT_ORDER) -> np.ndarray:
    """All axis derivatives, stacked on a new leading tensor axis.

    Returns an array of shape ``chart.shape + (dim,) + tensor_shape`` whose
    entry ``[..., a, I]`` is the derivative of component ``I`` along axis
    ``a``.
    """
    grid_ndim = len(field.chart.shape)
    stack = [
        differentiate_array(field.values, field.chart, a, order)
        for a in range(field.chart.dim)
    ]
    return np.stack(stack, axis=grid_ndim)


def interior_max(
    values: np.ndarray,
    chart: GridChart,
    margin: int | None = None,
    box: Sequence[tuple[float, float]] | None = None,
    order: int = DEFAULT_ORDER,
) -> float:
    """Max absolute value over the interior sub-box.

    Default margin is ``order`` nodes per side: one-sided boundary rows pollute
    ``order // 2`` nodes per differentiation, and curvature-type residuals
    chain two derivatives.
    """
    if box is not None:
        sl = chart.box_slices(box)
    else:
        sl = chart.interior(order if margin is None else margin)
    region = values[sl]
    return float(np.max(np.abs(region)))


def cumulative_integral(values: np.ndarray, h: float, axis: int = 0) -> np.ndarray:
    """Fourth-order cumulative integral along one axis of uniform samples.

    Each interval is integrated with the cubic through its four nearest nodes
    (Adams-Moulton weights ``(9, 19, -5, 1)/24`` on the first and last
    interval, ``(-1, 13, 13, -1)/24`` inside), then accumulated from the first
    node.  Exact for polynomials up to degree 3.
    """
    a = np.moveaxis(np.asarray(values, dtype=float), axis, 0)
    n = a.shape[0]
    if n < 4:
        raise ValueError("cumulative integral needs at least 4 sample points")
    inc = np.empty_like(a)
    inc[0] = 0.0
    inc[1] = h * (9.0 * a[0] + 19.0 * a[1] - 5.0 * a[2] + a[3]) / 24.0
    inc[2:-1] = h * (-a[:-3] + 13.0 * a[1:-2] + 13.0 * a[2:-1] - a[3:]) / 24.0
    inc[-1] = h * (9.0 * a[-1] + 19.0 * a[-2] - 5.0 * a[-3] + a[-4]) / 24.0
    return np.moveaxis(np.cumsum(inc, axis=0), 0, axis)
