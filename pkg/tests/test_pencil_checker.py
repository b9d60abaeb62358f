import numpy as np
import numpy.testing as npt
import pytest

from flatpencil.errors import DegenerateCombination, NotDiagonal
from flatpencil.grid_calculus import GridChart
from flatpencil import geometry_core as geo
from flatpencil import pencil_checker as pc

from conftest import SAFE_LAMS

LAMS_UNIT = ((1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (3.0, -1.0), (1.0, 2.0))


def _identity(chart):
    return geo.build_metric(lambda u: np.eye(chart.dim), chart)


def _diag_pencil(points=65):
    """g1 = diag(u), g2 = id on a chart where the eigenvalue gap stays 0.5."""
    chart = GridChart((0.5, 2.0), (1.5, 3.0), (points, points))
    g1 = geo.build_metric(lambda u: np.diag([u[0], u[1]]), chart)
    return pc.PencilSpec(g1, _identity(chart), lambda_samples=SAFE_LAMS)


def _counter_pencil():
    """Not almost compatible: g1 depends on the coordinate it does not carry."""
    chart = GridChart((0.5, 0.5), (1.5, 1.5), (65, 65))
    g1 = geo.build_metric(lambda u: np.diag([1.0 + u[1] ** 2, 1.0]), chart)
    return pc.PencilSpec(g1, _identity(chart), lambda_samples=SAFE_LAMS)


def test_combine_is_exactly_bilinear():
    pen = _diag_pencil()
    comb = pc.combine(pen, 2.0, 3.0)
    manual = 2.0 * pen.g1.contra.values + 3.0 * pen.g2.contra.values
    npt.assert_array_equal(comb.contra.values, manual)


def test_degenerate_combination_is_rejected_at_construction():
    chart = GridChart((0.5, 0.5), (1.5, 1.5), (17, 17))
    g1 = geo.build_metric(lambda u: np.diag([u[0], u[1]]), chart)
    # default samples include (1, -1); u - 1 crosses zero on this chart
    with pytest.raises(DegenerateCombination):
        pc.PencilSpec(g1, _identity(chart))


def test_diagonal_pencil_is_flat_compatible():
    rep = pc.check_compatible(_diag_pencil(), "flat")
    assert rep.max_residual <= 1e-5
    assert set(rep.endpoint_residuals) == {"g1_flatness", "g2_flatness"}
    assert set(rep.connection_by_sample) == set(SAFE_LAMS)
    assert set(rep.curvature_by_sample) == set(SAFE_LAMS)
    # the pure endpoints are exact; mixtures carry stencil truncation
    assert rep.connection_by_sample[(1.0, 0.0)] == 0.0
    assert rep.connection_by_sample[(0.0, 1.0)] == 0.0
    assert rep.max_curvature <= 1e-10


def test_almost_compatible_pass_and_fail():
    ok = pc.check_almost_compatible(_diag_pencil())
    assert max(ok.connection_by_sample.values()) <= 1e-5
    bad = pc.check_almost_compatible(_counter_pencil())
    assert max(bad.connection_by_sample.values()) >= 1e-1


def test_nijenhuis_vanishes_for_diagonal_affinor():
    assert pc.nijenhuis(pc.affinor(_diag_pencil())) <= 1e-10


def test_nijenhuis_detects_incompatible_pair():
    val = pc.nijenhuis(pc.affinor(_counter_pencil()))
    assert val >= 1e-2
    assert val == pytest.approx(5.94091796875, rel=1e-6)


def test_nonsingularity_gap_and_scale():
    rep = pc.nonsingularity(_diag_pencil())
    assert rep.min_gap == pytest.approx(0.5, abs=1e-12)
    assert not rep.has_complex_pairs
    assert rep.eigen_scale == pytest.approx(3.0)
    assert rep.threshold == pytest.approx(1e-6 * rep.eigen_scale)


def test_nonsingularity_flags_complex_spectrum():
    chart = GridChart((0.5, 0.5), (1.5, 1.5), (17, 17))
    g1 = geo.build_metric(lambda u: np.array([[0.0, 1.0], [1.0, 0.0]]), chart)
    g2 = geo.build_metric(lambda u: np.diag([1.0, -1.0]), chart)
    lams = ((1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (2.0, 1.0), (1.0, 2.0))
    rep = pc.nonsingularity(pc.PencilSpec(g1, g2, lambda_samples=lams))
    assert rep.has_complex_pairs
    assert rep.min_gap == pytest.approx(2.0, abs=1e-12)


def test_diagonal_form_recovers_eigen_fields():
    pen = _diag_pencil()
    rep = pc.check_diagonal_form(pen)
    U1, U2 = pen.chart.meshgrid()
    npt.assert_allclose(rep.f_values[..., 0], U1, atol=1e-12)
    npt.assert_allclose(rep.f_values[..., 1], U2, atol=1e-12)
    assert rep.residual <= 1e-10
    assert rep.off_diagonal_max <= 1e-12


def test_diagonal_form_requires_diagonal_affinor():
    chart = GridChart((0.5, 0.5), (1.5, 1.5), (17, 17))
    g1 = geo.build_metric(lambda u: np.array([[2.0, 0.3], [0.3, 1.0]]), chart)
    with pytest.raises(NotDiagonal):
        pc.check_diagonal_form(pc.PencilSpec(g1, _identity(chart),
                                             lambda_samples=SAFE_LAMS))


# --- quadratic construction from a covector potential ------------------------

def _unit_eta(points=65, lo=1.0, hi=2.0):
    chart = GridChart((lo, lo), (hi, hi), (points, points))
    return chart, _identity(chart)


def test_quadratic_construction_passes_for_commuting_hessians():
    chart, eta = _unit_eta()
    f = lambda u: np.array([0.5 * u[0] ** 2, 0.5 * u[1] ** 2])
    rep = pc.dubrovin_construct(eta, f, c=0.0, lambda_samples=LAMS_UNIT)
    assert rep.quadratic_residual == 0.0
    assert rep.bracket_residual == 0.0
    assert rep.lowering_defect == 0.0
    assert rep.delta_consistency <= 1e-6
    assert rep.compatibility.max_residual <= 1e-6
    assert rep.as_dict()["verdict"] == "pass"


def test_quadratic_construction_offset_term():
    chart, eta = _unit_eta()
    f = lambda u: np.array([0.5 * u[0] ** 2, 0.5 * u[1] ** 2])
    rep = pc.dubrovin_construct(eta, f, c=1.0, lambda_samples=LAMS_UNIT)
    # g1 = diag(2 u^i) + 1
    U1, _ = chart.meshgrid()
    npt.assert_allclose(rep.g1.contra.values[..., 0, 0], 2 * U1 + 1.0, atol=1e-10)
    assert rep.as_dict()["verdict"] == "pass"


def test_quadratic_construction_rejects_noncommuting_potential():
    chart, eta = _unit_eta(lo=1.5, hi=2.5)
    f = lambda u: np.array([0.5 * u[0] ** 2, u[0] * u[1]])
    rep = pc.dubrovin_construct(eta, f, c=0.0, lambda_samples=LAMS_UNIT)
    assert rep.quadratic_residual >= 1e-2
    assert rep.bracket_residual >= 1e-2
    assert rep.as_dict()["verdict"] == "fail"


def test_potentials_route_builds_flat_pair():
    chart, _ = _unit_eta()
    spec = pc.PotentialPairSpec(
        np.eye(2),
        (lambda u: 0.5 * u[0] ** 2, lambda u: 0.5 * u[1] ** 2),
        chart)
    rep = pc.generate_from_potentials(spec, lambda_samples=SAFE_LAMS)
    assert not rep.degenerate
    assert rep.g2_flatness <= 1e-10
    assert rep.compatibility is not None
    assert rep.compatibility.max_residual <= 1e-6


def test_potentials_route_reports_degenerate_candidate():
    spec = pc.PotentialPairSpec(
        np.eye(2),
        (lambda u: u[0] + 2.0 * u[1], lambda u: u[1]),
        GridChart((1.0, 1.0), (2.0, 2.0), (17, 17)))
    rep = pc.generate_from_potentials(spec, lambda_samples=SAFE_LAMS)
    assert rep.degenerate
    assert rep.g2 is None
    assert rep.compatibility is None


def test_potentials_route_skips_compat_for_nonflat_candidate():
    spec = pc.PotentialPairSpec(
        np.eye(2),
        (lambda u: u[0] ** 2 * u[1], lambda u: u[1]),
        GridChart((1.0, 1.0), (1.8, 1.8), (33, 33)))
    rep = pc.generate_from_potentials(spec, lambda_samples=SAFE_LAMS)
    assert not rep.degenerate
    assert rep.g2_flatness > 1.0
    assert rep.compatibility is None
