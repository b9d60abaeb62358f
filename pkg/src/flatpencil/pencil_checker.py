"""Compatibility checks for pairs of metrics forming a pencil.

A pair of contravariant metrics ``g1, g2`` on a shared chart is

* an *almost compatible pair* when for every combination ``g = l1 g1 + l2 g2``
  the raised connection combines the same way,
  ``Gamma^{ij}_k(g) = l1 Gamma^{ij}_{1,k} + l2 Gamma^{ij}_{2,k}``;
* a *compatible pair* when additionally the raised curvature combines
  linearly, ``R^{ij}_{kl}(g) = l1 R^{ij}_{1,kl} + l2 R^{ij}_{2,kl}``;
* a *flat pencil* when every sampled combination is flat (both endpoints
  included), connections combining linearly;
* a *constant-curvature pencil* when the combination has constant curvature
  ``l1 K1 + l2 K2``.

All definitions quantify over arbitrary combinations; the checker samples a
finite set of ``(l1, l2)`` pairs that spans the quadratic dependence of the
curvature on the combination, so linearity on the samples is linearity for
all combinations up to the discretisation error.

The *nonsingularity* of a pair refers to the roots of ``det(g1 - r g2) = 0``,
i.e. the eigenvalues of the affinor ``v^i_j = g1^{is} g_{2,sj}``; the pair is
nonsingular on the box when the pointwise eigenvalues stay pairwise distinct.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import geometry_core as geo
from . import grid_calculus as gc
from .errors import (
    DegenerateCombination,
    DegenerateMetric,
    EigensolveFailure,
    NotDiagonal,
    NotFlatCoordinates,
)
from .geometry_core import MetricField, build_metric, connection, curvature
from .grid_calculus import DEFAULT_ORDER, GridChart, TensorField

DEFAULT_LAMBDA_SAMPLES: tuple[tuple[float, float], ...] = (
    (1.0, 0.0),
    (0.0, 1.0),
    (1.0, 1.0),
    (1.0, -1.0),
    (2.0, 3.0),
)

DEFAULT_TOL = 1e-6


@dataclass(frozen=True)
class PencilSpec:
    """Two metrics on one chart plus the combination samples to check.

    Construction validates that the charts coincide and that every sampled
    combination passes the nondegeneracy floor (:class:`DegenerateCombination`
    otherwise).  Pick boxes that stay away from the singular loci of the
    combinations you sample.
    """

    g1: MetricField
    g2: MetricField
    lambda_samples: tuple[tuple[float, float], ...] = field(
        default=DEFAULT_LAMBDA_SAMPLES
    )

    def __post_init__(self):
        if self.g1.chart != self.g2.chart:
            raise ValueError("pencil metrics must share one chart")
        object.__setattr__(
            self,
            "lambda_samples",
            tuple((float(l1), float(l2)) for l1, l2 in self.lambda_samples),
        )
        for l1, l2 in self.lambda_samples:
            try:
                combine(self, l1, l2)
            except DegenerateCombination:
                raise

    @property
    def chart(self) -> GridChart:
        return self.g1.chart


def combine(pencil: PencilSpec, lam1: float, lam2: float) -> MetricField:
    """The combination ``lam1 g1 + lam2 g2`` as a full metric field."""
    vals = lam1 * pencil.g1.contra.values + lam2 * pencil.g2.contra.values
    try:
        return build_metric(vals, pencil.chart)
    except DegenerateMetric as exc:
        raise DegenerateCombination(lam1, lam2, exc) from exc


# ---------------------------------------------------------------------------
# reports


@dataclass
class AlmostCompatibilityReport:
    tolerance: float
    connection_by_sample: dict[tuple[float, float], float]

    @property
    def max_residual(self) -> float:
        return max(self.connection_by_sample.values())

    @property
    def verdict(self) -> bool:
        return self.max_residual <= self.tolerance

    def as_dict(self) -> dict:
        return {
            "tolerance": self.tolerance,
            "connection_by_sample": {
                f"({l1:g},{l2:g})": r
                for (l1, l2), r in self.connection_by_sample.items()
            },
            "max_residual": self.max_residual,
            "verdict": "pass" if self.verdict else "fail",
        }


@dataclass
class CompatibilityReport:
    mode: str
    tolerance: float
    connection_by_sample: dict[tuple[float, float], float]
    curvature_by_sample: dict[tuple[float, float], float]
    endpoint_residuals: dict[str, float]

    @property
    def max_connection(self) -> float:
        return max(self.connection_by_sample.values())

    @property
    def max_curvature(self) -> float:
        vals = list(self.curvature_by_sample.values()) + list(
            self.endpoint_residuals.values()
        )
        return max(vals) if vals else 0.0

    @property
    def max_residual(self) -> float:
        return max(self.max_connection, self.max_curvature)

    @property
    def verdict(self) -> bool:
        return self.max_residual <= self.tolerance

    def as_dict(self) -> dict:
        return {
            "mode": self.mode,
            "tolerance": self.tolerance,
            "connection_by_sample": {
                f"({l1:g},{l2:g})": r
                for (l1, l2), r in self.connection_by_sample.items()
            },
            "curvature_by_sample": {
                f"({l1:g},{l2:g})": r
                for (l1, l2), r in self.curvature_by_sample.items()
            },
            "endpoint_residuals": dict(self.endpoint_residuals),
            "max_residual": self.max_residual,
            "verdict": "pass" if self.verdict else "fail",
        }


@dataclass
class SpectrumReport:
    min_gap: float
    threshold: float
    has_complex_pairs: bool
    eigen_scale: float

    @property
    def verdict(self) -> bool:
        return self.min_gap > self.threshold

    def as_dict(self) -> dict:
        return {
            "min_gap": self.min_gap,
            "threshold": self.threshold,
            "has_complex_pairs": self.has_complex_pairs,
            "eigen_scale": self.eigen_scale,
            "verdict": "pass" if self.verdict else "fail",
        }


@dataclass
class DiagonalFormReport:
    f_values: np.ndarray  # [..., i] pointwise ratio g1^{ii}/g2^{ii}
    residual: float  # max |d f^i / d u^j|, j != i
    off_diagonal_max: float
    tolerance: float

    @property
    def verdict(self) -> bool:
        return self.residual <= self.tolerance

    def as_dict(self) -> dict:
        return {
            "residual": self.residual,
            "off_diagonal_max": self.off_diagonal_max,
            "tolerance": self.tolerance,
            "verdict": "pass" if self.verdict else "fail",
        }


# ---------------------------------------------------------------------------
# operations


def check_almost_compatible(
    pencil: PencilSpec,
    order: int = DEFAULT_ORDER,
    tol: float = DEFAULT_TOL,
    margin: int | None = None,
    box: Sequence[tuple[float, float]] | None = None,
) -> AlmostCompatibilityReport:
    """Connection-linearity residual for every sampled combination."""
    chart = pencil.chart
    c1 = connection(pencil.g1, order).contra.values
    c2 = connection(pencil.g2, order).contra.values
    out = {}
    for l1, l2 in pencil.lambda_samples:
        comb = combine(pencil, l1, l2)
        cc = connection(comb, order).contra.values
        dev = cc - l1 * c1 - l2 * c2
        out[(l1, l2)] = gc.interior_max(dev, chart, margin, box, order)
    return AlmostCompatibilityReport(tol, out)


def check_compatible(
    pencil: PencilSpec,
    mode: str = "flat",
    k1: float = 0.0,
    k2: float = 0.0,
    order: int = DEFAULT_ORDER,
    tol: float = DEFAULT_TOL,
    margin: int | None = None,
    box: Sequence[tuple[float, float]] | None = None,
) -> CompatibilityReport:
    """Full compatibility check in one of three modes.

    ``"flat"``
        flatness residual of each endpoint and each sampled combination;
    ``"constant_curvature"``
        deviation of each combination from constant curvature
        ``l1 k1 + l2 k2`` (endpoints against ``k1`` and ``k2``);
    ``"general"``
        curvature-linearity residual
        ``R(comb) - l1 R(g1) - l2 R(g2)`` in the raised placement.

    Connection linearity is always included.
    """
    if mode not in ("flat", "constant_curvature", "general"):
        raise ValueError(f"unknown mode {mode!r}")
    chart = pencil.chart
    almost = check_almost_compatible(pencil, order, tol, margin, box)

    endpoint = {}
    curv_by_sample = {}
    if mode == "flat":
        endpoint["g1_flatness"] = geo.flatness_residual(
            pencil.g1, order, margin, box
        )
        endpoint["g2_flatness"] = geo.flatness_residual(
            pencil.g2, order, margin, box
        )
        for l1, l2 in pencil.lambda_samples:
            comb = combine(pencil, l1, l2)
            curv_by_sample[(l1, l2)] = geo.flatness_residual(comb, order, margin, box)
    elif mode == "constant_curvature":
        endpoint["g1_constant_curvature"] = geo.constant_curvature_residual(
            pencil.g1, k1, order, margin, box
        )
        endpoint["g2_constant_curvature"] = geo.constant_curvature_residual(
            pencil.g2, k2, order, margin, box
        )
        for l1, l2 in pencil.lambda_samples:
            comb = combine(pencil, l1, l2)
            curv_by_sample[(l1, l2)] = geo.constant_curvature_residual(
                comb, l1 * k1 + l2 * k2, order, margin, box
            )
    else:  # general: curvature linearity only
        r1 = curvature(pencil.g1, order=order).contra.values
        r2 = curvature(pencil.g2, order=order).contra.values
        for l1, l2 in pencil.lambda_samples:
            comb = combine(pencil, l1, l2)
            rc = curvature(comb, order=order).contra.values
            curv_by_sample[(l1, l2)] = gc.interior_max(
                rc - l1 * r1 - l2 * r2, chart, margin, box, order
            )

    return CompatibilityReport(
        mode, tol, almost.connection_by_sample, curv_by_sample, endpoint
    )


@dataclass(frozen=True)
class AffinorField:
    """The recursion affinor ``v^i_j = g1^{is} g_{2,sj}`` with its spectrum."""

    field: TensorField  # variance "ud"
    eigenvalues: np.ndarray  # [..., i], complex

    @property
    def chart(self) -> GridChart:
        return self.field.chart


def affinor(pencil: PencilSpec) -> AffinorField:
    vals = np.einsum(
        "...is,...sj->...ij", pencil.g1.contra.values, pencil.g2.cov.values
    )
    try:
        eig = np.linalg.eigvals(vals)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise EigensolveFailure(str(exc)) from exc
    order = np.argsort(eig.real + 1e-9 * eig.imag, axis=-1)
    eig = np.take_along_axis(eig, order, axis=-1)
    return AffinorField(TensorField(pencil.chart, "ud", vals), eig)


def nonsingularity(
    pencil: PencilSpec,
    threshold: float | None = None,
) -> SpectrumReport:
    """Minimum pairwise eigenvalue gap of the pencil over the box."""
    aff = affinor(pencil)
    eig = aff.eigenvalues
    n = eig.shape[-1]
    scale = float(np.max(np.abs(eig))) or 1.0
    if threshold is None:
        threshold = 1e-6 * scale
    gap = np.inf
    for a in range(n):
        for b in range(a + 1, n):
            gap = min(gap, float(np.min(np.abs(eig[..., a] - eig[..., b]))))
    if n == 1:
        gap = np.inf
    has_complex = bool(np.max(np.abs(eig.imag)) > 1e-9 * scale)
    return SpectrumReport(gap, float(threshold), has_complex, scale)


def nijenhuis(
    aff: AffinorField,
    order: int = DEFAULT_ORDER,
    margin: int | None = None,
    box: Sequence[tuple[float, float]] | None = None,
) -> float:
    """Max interior component of the Nijenhuis tensor of the affinor.

    ``N^k_{ij} = v^s_i d_s v^k_j - v^s_j d_s v^k_i
    + v^k_s d_j v^s_i - v^k_s d_i v^s_j``
    """
    v = aff.field.values
    dv = gc.stacked_partials(aff.field, order)  # [..., a, k, j] = d_a v^k_j
    t1 = np.einsum("...si,...skj->...kij", v, dv)
    t2 = np.einsum("...sj,...ski->...kij", v, dv)
    t3 = np.einsum("...ks,...jsi->...kij", v, dv)
    t4 = np.einsum("...ks,...isj->...kij", v, dv)
    nt = t1 - t2 + t3 - t4
    return gc.interior_max(nt, aff.chart, margin, box, order)


def check_diagonal_form(
    pencil: PencilSpec,
    order: int = DEFAULT_ORDER,
    tol: float = DEFAULT_TOL,
    diag_tol: float = 1e-8,
    margin: int | None = None,
    box: Sequence[tuple[float, float]] | None = None,
) -> DiagonalFormReport:
    """Verify the diagonal normal form ``g1^{ii} = f^i(u^i) g2^{ii}``.

    Both metrics must be diagonal (:class:`NotDiagonal` otherwise, measured
    against ``diag_tol`` times the metric scale).  The ratio of diagonal
    entries is formed pointwise and the residual is the largest cross
    derivative ``|d f^i / d u^j|`` for ``j != i`` over the interior.
    """
    chart = pencil.chart
    n = chart.dim
    off = 0.0
    for m in (pencil.g1, pencil.g2):
        vals = m.contra.values
        mask = ~np.eye(n, dtype=bool)
        off = max(off, float(np.max(np.abs(vals[..., mask]))))
    scale = max(pencil.g1.scale(), pencil.g2.scale())
    if off > diag_tol * scale:
        raise NotDiagonal(off, diag_tol * scale)

    idx = np.arange(n)
    f = (
        pencil.g1.contra.values[..., idx, idx]
        / pencil.g2.contra.values[..., idx, idx]
    )
    residual = 0.0
    for i in range(n):
        for j in range(n):
            if j == i:
                continue
            d = gc.differentiate_array(f[..., i], chart, j, order)
            residual = max(residual, gc.interior_max(d, chart, margin, box, order))
    return DiagonalFormReport(f, residual, off, tol)


# ---------------------------------------------------------------------------
# quadratic-pencil construction from a covector potential


@dataclass
class DubrovinData:
    """Second-derivative data of the generating covector in flat coordinates.

    ``delta_up[..., i, j, k]`` holds ``D^{ijk} = grad^i grad^j f^k`` (indices
    raised with the reference metric) and ``delta_mixed[..., i, j, k]`` holds
    ``D^{ij}_k = d_k grad^i f^j``; the two are related by lowering the first
    index with the reference metric, which is checked at construction.
    """

    delta_up: np.ndarray
    delta_mixed: np.ndarray
    c: float

    def lowering_defect(self, g2: MetricField) -> float:
        lowered = np.einsum("...ks,...sij->...ijk", g2.cov.values, self.delta_up)
        return float(np.max(np.abs(lowered - self.delta_mixed)))


@dataclass
class DubrovinReport:
    g1: MetricField
    data: DubrovinData
    quadratic_residual: float
    bracket_residual: float
    delta_consistency: float
    lowering_defect: float
    compatibility: CompatibilityReport
    tolerance: float

    @property
    def verdict(self) -> bool:
        return (
            max(self.quadratic_residual, self.bracket_residual) <= self.tolerance
            and self.compatibility.verdict
        )

    def as_dict(self) -> dict:
        return {
            "quadratic_residual": self.quadratic_residual,
            "bracket_residual": self.bracket_residual,
            "delta_consistency": self.delta_consistency,
            "lowering_defect": self.lowering_defect,
            "tolerance": self.tolerance,
            "compatibility": self.compatibility.as_dict(),
            "verdict": "pass" if self.verdict else "fail",
        }


def dubrovin_construct(
    g2: MetricField,
    f: Callable[[np.ndarray], np.ndarray] | np.ndarray,
    c: float = 0.0,
    order: int = DEFAULT_ORDER,
    tol: float = DEFAULT_TOL,
    flat_tol: float = 1e-8,
    lambda_samples: Sequence[tuple[float, float]] = DEFAULT_LAMBDA_SAMPLES,
    margin: int | None = None,
    box: Sequence[tuple[float, float]] | None = None,
) -> DubrovinReport:
    """Build the partner metric of a flat pencil from a covector potential.

    In flat coordinates of the reference metric ``g2`` (its connection must
    vanish to ``flat_tol`` times the metric scale, else
    :class:`NotFlatCoordinates`) the candidate partner is::

        g1^{ij} = grad^i f^j + grad^j f^i + c g2^{ij}

    with ``grad^i = g2^{is} d_s``.  The construction reports

    * the quadratic residual ``D^{ij}_s D^{sk}_l - D^{ik}_s D^{sj}_l``,
    * the bracket residual
      ``(g1^{is} g2^{jp} - g2^{is} g1^{jp}) d_s d_p f^k``,
    * the agreement of ``D^{ijk}`` computed from second derivatives of ``f``
      with the connection-difference form
      ``g1^{is} g2^{jp} (Gamma^k_{2,ps} - Gamma^k_{1,ps})``,

    and cross-checks the pair with :func:`check_compatible` in flat mode.
    """
    chart = g2.chart
    n = chart.dim

    gamma2 = connection(g2, order)
    conn_res = float(np.max(np.abs(gamma2.contra.values)))
    if conn_res > flat_tol * max(1.0, g2.scale()):
        raise NotFlatCoordinates(conn_res, flat_tol * max(1.0, g2.scale()))

    if callable(f):
        f_field = gc.sample(f, chart, "u")
    else:
        f_field = TensorField(chart, "u", np.asarray(f, dtype=float))
    df = gc.stacked_partials(f_field, order)  # [..., s, k] = d_s f^k
    ddf = np.stack(
        [gc.differentiate_array(df, chart, a, order) for a in range(n)],
        axis=len(chart.shape),
    )  # [..., a, s, k] = d_a d_s f^k
    ddf = 0.5 * (ddf + np.swapaxes(ddf, -3, -2))

    g2c = g2.contra.values
    grad = np.einsum("...is,...sj->...ij", g2c, df)  # grad^i f^j
    g1_vals = grad + np.swapaxes(grad, -1, -2) + c * g2c
    g1 = build_metric(g1_vals, chart)

    delta_up = np.einsum("...is,...jp,...spk->...ijk", g2c, g2c, ddf)
    dgrad = np.stack(
        [gc.differentiate_array(grad, chart, a, order) for a in range(n)],
        axis=len(chart.shape),
    )  # [..., k, i, j] = d_k grad^i f^j
    delta_mixed = np.einsum("...kij->...ijk", dgrad)
    data = DubrovinData(delta_up, delta_mixed, float(c))

    term1 = np.einsum("...ijs,...skl->...ijkl", delta_mixed, delta_mixed)
    term2 = np.einsum("...iks,...sjl->...ijkl", delta_mixed, delta_mixed)
    quad = gc.interior_max(term1 - term2, chart, margin, box, order)

    g1c = g1.contra.values
    bracket = np.einsum("...is,...jp,...spk->...ijk", g1c, g2c, ddf) - np.einsum(
        "...is,...jp,...spk->...ijk", g2c, g1c, ddf
    )
    bracket_res = gc.interior_max(bracket, chart, margin, box, order)

    gamma1 = connection(g1, order)
    delta_conn = np.einsum(
        "...is,...jp,...kps->...ijk",
        g1c,
        g2c,
        gamma2.mixed.values - gamma1.mixed.values,
    )
    delta_consistency = gc.interior_max(
        delta_conn - delta_up, chart, margin, box, order
    )

    pencil = PencilSpec(g1, g2, tuple(lambda_samples))
    compat = check_compatible(
        pencil, "flat", order=order, tol=tol, margin=margin, box=box
    )
    return DubrovinReport(
        g1,
        data,
        quad,
        bracket_res,
        delta_consistency,
        data.lowering_defect(g2),
        compat,
        tol,
    )


# ---------------------------------------------------------------------------
# pencils generated by a pair of potential functions


@dataclass(frozen=True)
class PotentialPairSpec:
    """Constant reference metric plus one potential function per coordinate.

    The candidate partner metric is
    ``g2^{ij} = eta^{is} d_s h^j + eta^{js} d_s h^i`` with the associated
    coefficients ``b^{ij}_k = eta^{is} d_s d_k h^j``.
    """

    eta: np.ndarray
    h: tuple[Callable[[np.ndarray], float], ...]
    chart: GridChart

    def __post_init__(self):
        eta = np.asarray(self.eta, dtype=float)
        if eta.shape != (self.chart.dim, self.chart.dim):
            raise ValueError("eta must be a dim x dim constant matrix")
        if np.max(np.abs(eta - eta.T)) > 0:
            raise ValueError("eta must be symmetric")
        if abs(np.linalg.det(eta)) < 1e-12 * max(1.0, np.max(np.abs(eta))):
            raise ValueError("eta must be nondegenerate")
        if len(self.h) != self.chart.dim:
            raise ValueError("need one potential per coordinate")
        object.__setattr__(self, "eta", eta)


@dataclass
class PotentialsReport:
    g2: MetricField | None
    b_coefficients: np.ndarray
    degenerate: bool
    g2_flatness: float | None
    compatibility: CompatibilityReport | None
    tolerance: float

    @property
    def verdict(self) -> bool:
        if self.degenerate or self.compatibility is None:
            return False
        return (
            self.g2_flatness is not None
            and self.g2_flatness <= self.tolerance
            and self.compatibility.verdict
        )

    def as_dict(self) -> dict:
        return {
            "degenerate": self.degenerate,
            "g2_flatness": self.g2_flatness,
            "tolerance": self.tolerance,
            "compatibility": None
            if self.compatibility is None
            else self.compatibility.as_dict(),
            "verdict": "pass" if self.verdict else "fail",
        }


def generate_from_potentials(
    spec: PotentialPairSpec,
    order: int = DEFAULT_ORDER,
    tol: float = DEFAULT_TOL,
    lambda_samples: Sequence[tuple[float, float]] = DEFAULT_LAMBDA_SAMPLES,
    margin: int | None = None,
    box: Sequence[tuple[float, float]] | None = None,
) -> PotentialsReport:
    """Candidate flat pencil from one potential function per coordinate.

    A degenerate candidate is reported (``degenerate=True``), not raised: the
    construction is a *search* device and a degenerate outcome is informative.
    When the candidate is nondegenerate its flatness residual decides whether
    the full compatibility check runs; an arbitrary potential tuple yields the
    right algebraic form but need not yield a flat metric.
    """
    chart = spec.chart
    n = chart.dim
    h_field = gc.sample(
        lambda u: np.array([float(spec.h[j](u)) for j in range(n)]), chart, "u"
    )
    dh = gc.stacked_partials(h_field, order)  # [..., s, j]
    ddh = np.stack(
        [gc.differentiate_array(dh, chart, a, order) for a in range(n)],
        axis=len(chart.shape),
    )  # [..., a, s, j]
    g2_vals = np.einsum("is,...sj->...ij", spec.eta, dh)
    g2_vals = g2_vals + np.swapaxes(g2_vals, -1, -2)
    b_coeff = np.einsum("is,...ksj->...ijk", spec.eta, ddh)

    try:
        g2 = build_metric(g2_vals, chart)
    except DegenerateMetric:
        return PotentialsReport(None, b_coeff, True, None, None, tol)

    flatness = geo.flatness_residual(g2, order, margin, box)
    eta_metric = build_metric(
        np.broadcast_to(spec.eta, chart.shape + (n, n)).copy(), chart
    )
    compat = None
    if flatness <= tol:
        pencil = PencilSpec(g2, eta_metric, tuple(lambda_samples))
        compat = check_compatible(
            pencil, "flat", order=order, tol=tol, margin=margin, box=box
        )
    return PotentialsReport(g2, b_coeff, False, flatness, compat, tol)
