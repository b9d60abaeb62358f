"""Diagonal-metric formulation: Lamé coefficients and rotation coefficients.

A diagonal contravariant metric with signature signs ``eps[i]`` and
``eps[i] * g^{ii} > 0`` is encoded by coefficients ``H_i = (eps[i]
g^{ii})^{-1/2}`` and rotation coefficients ``beta[i,k] = (1/H_i) d_i H_k``
(``i != k``).  Flatness of the metric is equivalent to the first-order system

* off-diagonal family: ``d_k beta_{ij} = beta_{ik} beta_{kj}`` for distinct
  ``i, j, k`` (vacuous for N=2);
* diagonal family: ``eps^i d_i beta_{ij} + eps^j d_j beta_{ji}
  + sum_{s != i,j} eps^s beta_{si} beta_{sj} = 0``.

The sign weights are the real-arithmetic form of the classical equations:
for a mixed-signature metric the textbook (all-positive) form acquires the
factors ``eps^s`` once imaginary coefficients are traded for signs.

A *reduction profile* is a tuple of nonvanishing single-variable functions
``f^i(u^i)``; the reduction residual is the same diagonal family with
``beta_{ij}`` replaced by ``sqrt(f^i) beta_{ij}`` inside the derivative and
``eps^s`` by ``eps^s f^s`` in the sum.  Passing it together with the Lamé
residuals certifies that ``diag(eps f / H^2)`` and ``diag(eps / H^2)`` form a
compatible flat pair.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import grid_calculus as gc
from .errors import (
    NotDiagonal,
    ResidualsTooLarge,
    SignChange,
    SignMismatch,
)
from .geometry_core import MetricField, build_metric
from .grid_calculus import DEFAULT_ORDER, GridChart

PROFILE_FLOOR = 1e-10


@dataclass(frozen=True)
class LameFrame:
    """Coefficients ``H_i``, rotation coefficients ``beta_{ik}``, signs."""

    chart: GridChart
    h: np.ndarray  # grid + (N,), strictly positive
    beta: np.ndarray  # grid + (N, N), zero diagonal
    eps: tuple[int, ...]

    def __post_init__(self):
        n = self.chart.dim
        h = np.asarray(self.h, dtype=float)
        beta = np.asarray(self.beta, dtype=float)
        if h.shape != self.chart.shape + (n,):
            raise ValueError("h must have shape grid + (N,)")
        if beta.shape != self.chart.shape + (n, n):
            raise ValueError("beta must have shape grid + (N, N)")
        if not np.all(np.isfinite(h)) or not np.all(np.isfinite(beta)):
            raise ValueError("frame values must be finite")
        if np.min(h) <= 0:
            raise ValueError("Lame coefficients must be strictly positive")
        if len(self.eps) != n or any(e not in (-1, 1) for e in self.eps):
            raise ValueError("eps must be a tuple of +1/-1 per axis")
        idx = np.arange(n)
        beta = beta.copy()
        beta[..., idx, idx] = 0.0
        beta.setflags(write=False)
        h = h.copy()
        h.setflags(write=False)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "eps", tuple(int(e) for e in self.eps))

    @property
    def dim(self) -> int:
        return self.chart.dim


@dataclass(frozen=True)
class ReductionProfile:
    """Single-variable functions ``f^i(u^i)``, nonvanishing per axis range."""

    funcs: tuple[Callable, ...]

    def __post_init__(self):
        object.__setattr__(self, "funcs", tuple(self.funcs))

    def axis_values(self, chart: GridChart, axis: int) -> np.ndarray:
        coords = chart.axis_coordinates(axis)
        out = np.asarray(self.funcs[axis](coords), dtype=float)
        if out.shape != coords.shape:
            out = np.asarray(np.vectorize(self.funcs[axis])(coords), dtype=float)
        return out

    def signs_on(self, chart: GridChart) -> tuple[int, ...]:
        """Constant sign of each ``f^i`` over its axis; :class:`SignChange`
        if any component vanishes or flips on its axis range."""
        if len(self.funcs) != chart.dim:
            raise ValueError("profile length must match chart dimension")
        signs = []
        for i in range(chart.dim):
            vals = self.axis_values(chart, i)
            floor = PROFILE_FLOOR * max(1.0, float(np.max(np.abs(vals))))
            if np.min(np.abs(vals)) < floor:
                raise SignChange(i, "profile function vanishes on axis range")
            if np.min(vals) < 0 < np.max(vals):
                raise SignChange(i, "profile function changes sign on axis range")
            signs.append(1 if vals.flat[0] > 0 else -1)
        return tuple(signs)

    def values_on(self, chart: GridChart) -> np.ndarray:
        """Grid array ``[..., i] = f^i(u^i)`` (broadcast along other axes)."""
        n = chart.dim
        out = np.empty(chart.shape + (n,))
        for i in range(n):
            vals = self.axis_values(chart, i)
            shape = [1] * n
            shape[i] = chart.shape[i]
            out[..., i] = vals.reshape(shape)
        return out


def constant_profile(values: Sequence[float]) -> ReductionProfile:
    return ReductionProfile(
        tuple((lambda t, a=float(a): np.full_like(np.asarray(t, float), a))
              for a in values)
    )


def identity_profile(n: int) -> ReductionProfile:
    return ReductionProfile(tuple((lambda t: t) for _ in range(n)))


# ---------------------------------------------------------------------------


def frame_from_metric(
    metric: MetricField,
    eps: Sequence[int] | None = None,
    order: int = DEFAULT_ORDER,
    diag_tol: float = 1e-8,
) -> LameFrame:
    """Extract the frame of a diagonal metric.

    ``eps`` defaults to the sign of each diagonal entry at the first node;
    a sign violation anywhere (``eps^i g^{ii} <= 0``) raises
    :class:`SignMismatch`, off-diagonal content raises :class:`NotDiagonal`.
    """
    chart = metric.chart
    n = chart.dim
    vals = metric.contra.values
    mask = ~np.eye(n, dtype=bool)
    off = float(np.max(np.abs(vals[..., mask]))) if n > 1 else 0.0
    if off > diag_tol * metric.scale():
        raise NotDiagonal(off, diag_tol * metric.scale())

    idx = np.arange(n)
    diag = vals[..., idx, idx]
    if eps is None:
        eps = tuple(1 if diag[(0,) * n + (i,)] > 0 else -1 for i in range(n))
    eps = tuple(int(e) for e in eps)
    signed = diag * np.asarray(eps, dtype=float)
    if np.min(signed) <= 0:
        flat_idx = int(np.argmin(signed))
        node = np.unravel_index(flat_idx, signed.shape)
        raise SignMismatch(node[:-1], node[-1], float(diag[node]))

    h = signed ** -0.5
    dh = np.stack(
        [gc.differentiate_array(h, chart, a, order) for a in range(n)],
        axis=len(chart.shape),
    )  # [..., i, k] = d_i H_k
    beta = dh / h[..., None, :].swapaxes(-1, -2)  # divide by H_i along axis i
    beta[..., idx, idx] = 0.0
    return LameFrame(chart, h, beta, eps)


@dataclass
class LameResidualReport:
    off_diagonal: dict[tuple[int, int, int], float]
    diagonal: dict[tuple[int, int], float]
    tolerance: float

    @property
    def r_offdiag(self) -> float:
        return max(self.off_diagonal.values()) if self.off_diagonal else 0.0

    @property
    def r_diag(self) -> float:
        return max(self.diagonal.values()) if self.diagonal else 0.0

    @property
    def max_residual(self) -> float:
        return max(self.r_offdiag, self.r_diag)

    @property
    def verdict(self) -> bool:
        return self.max_residual <= self.tolerance

    def as_dict(self) -> dict:
        return {
            "off_diagonal": {f"({i},{j},{k})": v
                             for (i, j, k), v in self.off_diagonal.items()},
            "diagonal": {f"({i},{j})": v for (i, j), v in self.diagonal.items()},
            "r_offdiag": self.r_offdiag,
            "r_diag": self.r_diag,
            "tolerance": self.tolerance,
            "verdict": "pass" if self.verdict else "fail",
        }


def _beta_partials(frame: LameFrame, order: int) -> np.ndarray:
    chart = frame.chart
    return np.stack(
        [
            gc.differentiate_array(frame.beta, chart, a, order)
            for a in range(chart.dim)
        ],
        axis=len(chart.shape),
    )  # [..., a, i, j] = d_a beta_{ij}


def lame_residuals(
    frame: LameFrame,
    order: int = DEFAULT_ORDER,
    tol: float = 1e-6,
    margin: int | None = None,
    box: Sequence[tuple[float, float]] | None = None,
) -> LameResidualReport:
    """Residuals of both equation families, per index tuple and overall."""
    chart = frame.chart
    n = frame.dim
    if n < 2:
        raise ValueError("need at least two coordinates")
    beta = frame.beta
    dbeta = _beta_partials(frame, order)
    eps = np.asarray(frame.eps, dtype=float)

    off_diagonal: dict[tuple[int, int, int], float] = {}
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if len({i, j, k}) < 3:
                    continue
                dev = dbeta[..., k, i, j] - beta[..., i, k] * beta[..., k, j]
                off_diagonal[(i, j, k)] = gc.interior_max(
                    dev, chart, margin, box, order
                )

    diagonal: dict[tuple[int, int], float] = {}
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            dev = eps[i] * dbeta[..., i, i, j] + eps[j] * dbeta[..., j, j, i]
            for s in range(n):
                if s in (i, j):
                    continue
                dev = dev + eps[s] * beta[..., s, i] * beta[..., s, j]
            diagonal[(i, j)] = gc.interior_max(dev, chart, margin, box, order)

    return LameResidualReport(off_diagonal, diagonal, tol)


@dataclass
class ReductionReport:
    pairs: dict[tuple[int, int], float]
    tolerance: float

    @property
    def residual(self) -> float:
        return max(self.pairs.values()) if self.pairs else 0.0

    @property
    def verdict(self) -> bool:
        return self.residual <= self.tolerance

    def as_dict(self) -> dict:
        return {
            "pairs": {f"({i},{j})": v for (i, j), v in self.pairs.items()},
            "residual": self.residual,
            "tolerance": self.tolerance,
            "verdict": "pass" if self.verdict else "fail",
        }


def reduction_residual(
    frame: LameFrame,
    profile: ReductionProfile,
    order: int = DEFAULT_ORDER,
    tol: float = 1e-6,
    margin: int | None = None,
    box: Sequence[tuple[float, float]] | None = None,
) -> ReductionReport:
    """Residual of the profile-weighted diagonal family.

    Per ordered pair ``i != j``::

        eps^i sgn(f^i) sqrt|f^i| d_i (sqrt|f^i| beta_{ij})
        + eps^j sgn(f^j) sqrt|f^j| d_j (sqrt|f^j| beta_{ji})
        + sum_{s != i,j} eps^s f^s beta_{si} beta_{sj}

    With ``f^i == 1`` this is exactly the plain diagonal family.  Square
    roots of negative profiles are taken through ``|f|`` with the sign kept
    as a separate factor, so everything stays real for pseudo-Riemannian
    frames.
    """
    chart = frame.chart
    n = frame.dim
    signs = profile.signs_on(chart)
    fvals = profile.values_on(chart)  # [..., s]
    gamma = np.sqrt(np.abs(fvals))  # [..., i]
    eps = np.asarray(frame.eps, dtype=float)
    beta = frame.beta

    weighted = gamma[..., :, None] * beta  # [..., i, j] = sqrt|f^i| beta_{ij}
    dweighted = np.stack(
        [
            gc.differentiate_array(weighted, chart, a, order)
            for a in range(n)
        ],
        axis=len(chart.shape),
    )  # [..., a, i, j]

    pairs: dict[tuple[int, int], float] = {}
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            dev = (
                eps[i] * signs[i] * gamma[..., i] * dweighted[..., i, i, j]
                + eps[j] * signs[j] * gamma[..., j] * dweighted[..., j, j, i]
            )
            for s in range(n):
                if s in (i, j):
                    continue
                dev = dev + eps[s] * fvals[..., s] * beta[..., s, i] * beta[..., s, j]
            pairs[(i, j)] = gc.interior_max(dev, chart, margin, box, order)
    return ReductionReport(pairs, tol)


def tilde_frame(frame: LameFrame, profile: ReductionProfile) -> LameFrame:
    """The frame of the profile-scaled partner metric ``diag(eps f / H^2)``.

    ``H~_i = H_i / sqrt|f^i|``, ``beta~_{ik} = (sqrt|f^i|/sqrt|f^k|)
    beta_{ik}``, ``eps~^i = eps^i sgn(f^i)``.
    """
    chart = frame.chart
    signs = profile.signs_on(chart)
    gamma = np.sqrt(np.abs(profile.values_on(chart)))
    h_t = frame.h / gamma
    beta_t = (gamma[..., :, None] / gamma[..., None, :]) * frame.beta
    eps_t = tuple(int(frame.eps[i] * signs[i]) for i in range(frame.dim))
    return LameFrame(chart, h_t, beta_t, eps_t)


def frame_metric(frame: LameFrame) -> MetricField:
    """The diagonal metric ``g^{ii} = eps^i / H_i^2`` of a frame."""
    n = frame.dim
    vals = np.zeros(frame.chart.shape + (n, n))
    idx = np.arange(n)
    vals[..., idx, idx] = np.asarray(frame.eps, dtype=float) / frame.h**2
    return build_metric(vals, frame.chart)


def metric_pair_from_frame(
    frame: LameFrame,
    profile: ReductionProfile,
    order: int = DEFAULT_ORDER,
    tol: float = 1e-6,
    lambda_samples: Sequence[tuple[float, float]] | None = None,
):
    """Assemble the pair ``(diag(eps f / H^2), diag(eps / H^2))``.

    The three residual families are evaluated first; any of them above
    ``tol`` raises :class:`ResidualsTooLarge` — the pair would not be a
    compatible flat pair, so refusing is more honest than returning it.
    Returns a ``pencil_checker.PencilSpec`` ready for the full geometric
    cross-check.
    """
    from .pencil_checker import DEFAULT_LAMBDA_SAMPLES, PencilSpec

    lame = lame_residuals(frame, order, tol)
    red = reduction_residual(frame, profile, order, tol)
    worst = max(lame.max_residual, red.residual)
    if worst > tol:
        raise ResidualsTooLarge(worst, tol)

    g2 = frame_metric(frame)
    g1 = frame_metric(tilde_frame(frame, profile))
    if lambda_samples is None:
        lambda_samples = DEFAULT_LAMBDA_SAMPLES
    return PencilSpec(g1, g2, tuple(lambda_samples))
