"""Metrics, Levi-Civita connections and curvature on gridded charts.

Conventions (all index arithmetic is plain einsum over dense arrays):

* the contravariant metric ``g^{ij}`` is the primary object; the covariant
  ``g_{ij}`` is its pointwise dense inverse,
* Christoffel symbols of the second kind::

      Gamma^i_{jk} = 1/2 g^{is} (d_j g_{sk} + d_k g_{js} - d_s g_{jk})

* the contravariant (raised) connection ``Gamma^{ij}_k = g^{is} Gamma^j_{sk}``,
* curvature::

      R^i_{jkl} = -d_k Gamma^i_{jl} + d_l Gamma^i_{jk}
                  - Gamma^i_{pk} Gamma^p_{jl} + Gamma^i_{pl} Gamma^p_{jk}

  with the raised form ``R^{ij}_{kl} = g^{is} R^j_{skl}``.

A metric has constant curvature K when ``R^{ij}_{kl} = K (delta^i_k delta^j_l
- delta^i_l delta^j_k)``; flat means K = 0.  Residual reducers quote maxima
over an interior sub-box because one-sided boundary stencils carry larger
error constants.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import grid_calculus as gc
from .errors import DegenerateMetric
from .grid_calculus import DEFAULT_ORDER, GridChart, TensorField

#: nondegeneracy floor is this multiple of the largest metric entry
DET_FLOOR_SCALE = 1e-8

#: |g^{is} g_{sj} - delta^i_j| allowed after pointwise inversion
INVERSE_TOL = 1e-10


@dataclass(frozen=True)
class MetricField:
    """A nondegenerate (pseudo-)metric with both index placements stored."""

    contra: TensorField
    cov: TensorField
    min_abs_det: float

    @property
    def chart(self) -> GridChart:
        return self.contra.chart

    @property
    def dim(self) -> int:
        return self.contra.chart.dim

    def scale(self) -> float:
        return float(np.max(np.abs(self.contra.values)))


@dataclass(frozen=True)
class ConnectionField:
    """Levi-Civita connection in mixed and raised index placement."""

    mixed: TensorField  # Gamma^i_{jk}, symmetric in (j, k)
    contra: TensorField  # Gamma^{ij}_k

    @property
    def chart(self) -> GridChart:
        return self.mixed.chart


@dataclass(frozen=True)
class CurvatureField:
    """Riemann curvature in mixed and raised index placement."""

    mixed: TensorField  # R^i_{jkl}
    contra: TensorField  # R^{ij}_{kl}

    @property
    def chart(self) -> GridChart:
        return self.mixed.chart


def build_metric(
    source: Callable[[np.ndarray], np.ndarray] | np.ndarray,
    chart: GridChart,
    floor_scale: float = DET_FLOOR_SCALE,
) -> MetricField:
    """Build a metric from a contravariant closure or a dense sample array.

    The determinant is checked pointwise against ``floor_scale * max|g|``;
    the first offending node raises :class:`DegenerateMetric`.  The covariant
    metric is the dense pointwise inverse (LAPACK LU) and is verified to
    invert the contravariant one to within ``1e-10``.
    """
    if callable(source):
        contra = gc.sample(source, chart, "uu", symmetries=((0, 1),))
    else:
        vals = np.asarray(source, dtype=float)
        sym = 0.5 * (vals + np.swapaxes(vals, -1, -2))
        contra = TensorField(chart, "uu", sym, ((0, 1),))

    mats = contra.values
    det = np.linalg.det(mats)
    floor = floor_scale * float(np.max(np.abs(mats)))
    if not np.all(np.abs(det) >= floor):
        bad = np.unravel_index(int(np.argmin(np.abs(det))), chart.shape)
        raise DegenerateMetric(bad, float(det[bad]), floor)

    inv = np.linalg.inv(mats)
    inv = 0.5 * (inv + np.swapaxes(inv, -1, -2))
    resid = np.einsum("...is,...sj->...ij", mats, inv) - np.eye(chart.dim)
    worst = float(np.max(np.abs(resid)))
    if worst > INVERSE_TOL * max(1.0, float(np.max(np.abs(mats)))):
        bad = np.unravel_index(
            int(np.argmax(np.max(np.abs(resid), axis=(-1, -2)))), chart.shape
        )
        raise DegenerateMetric(bad, float(det[bad]), floor)

    cov = TensorField(chart, "dd", inv, ((0, 1),))
    return MetricField(contra, cov, float(np.min(np.abs(det))))


def connection(metric: MetricField, order: int = DEFAULT_ORDER) -> ConnectionField:
    """Levi-Civita connection of a metric via finite differences."""
    dg = gc.stacked_partials(metric.cov, order)  # [..., a, j, k] = d_a g_{jk}
    # d_j g_{sk} + d_k g_{js} - d_s g_{jk}, exactly symmetric in (j, k)
    t = (
        np.einsum("...jsk->...sjk", dg)
        + np.einsum("...kjs->...sjk", dg)
        - dg
    )
    mixed = 0.5 * np.einsum("...is,...sjk->...ijk", metric.contra.values, t)
    contra = np.einsum("...is,...jsk->...ijk", metric.contra.values, mixed)
    chart = metric.chart
    return ConnectionField(
        TensorField(chart, "udd", mixed, ((1, 2),)),
        TensorField(chart, "uud", contra),
    )


def curvature(
    metric: MetricField,
    conn: ConnectionField | None = None,
    order: int = DEFAULT_ORDER,
) -> CurvatureField:
    """Riemann curvature of a metric (connection recomputed unless given)."""
    if conn is None:
        conn = connection(metric, order)
    gamma = conn.mixed.values
    dgamma = gc.stacked_partials(conn.mixed, order)  # [..., a, i, j, k]
    r = (
        -np.einsum("...kijl->...ijkl", dgamma)
        + np.einsum("...lijk->...ijkl", dgamma)
        - np.einsum("...ipk,...pjl->...ijkl", gamma, gamma)
        + np.einsum("...ipl,...pjk->...ijkl", gamma, gamma)
    )
    contra = np.einsum("...is,...jskl->...ijkl", metric.contra.values, r)
    chart = metric.chart
    return CurvatureField(
        TensorField(chart, "uddd", r), TensorField(chart, "uudd", contra)
    )


def flatness_residual(
    metric: MetricField,
    order: int = DEFAULT_ORDER,
    margin: int | None = None,
    box: Sequence[tuple[float, float]] | None = None,
) -> float:
    """Max |R^i_{jkl}| over the interior sub-box; zero for a flat metric."""
    curv = curvature(metric, order=order)
    return gc.interior_max(curv.mixed.values, metric.chart, margin, box, order)


def constant_curvature_residual(
    metric: MetricField,
    k_value: float,
    order: int = DEFAULT_ORDER,
    margin: int | None = None,
    box: Sequence[tuple[float, float]] | None = None,
) -> float:
    """Max deviation of R^{ij}_{kl} from K (d^i_k d^j_l - d^i_l d^j_k)."""
    curv = curvature(metric, order=order)
    dim = metric.dim
    eye = np.eye(dim)
    target = k_value * (
        np.einsum("ik,jl->ijkl", eye, eye) - np.einsum("il,jk->ijkl", eye, eye)
    )
    dev = curv.contra.values - target
    return gc.interior_max(dev, metric.chart, margin, box, order)
