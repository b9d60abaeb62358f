"""Integral-equation solver: closed forms, convergence, and reduction gates."""

import numpy as np
import numpy.testing as npt
import pytest

from flatpencil.errors import IllConditioned, SignChangeOnRange, TruncationInsufficient
from flatpencil.grid_calculus import GridChart
from flatpencil import lame_system as ls
from flatpencil import zakharov_dressing as zd

U2 = (0.1, -0.2)
PROBES = np.array([[0.2, 0.9], [-0.4, 0.3], [0.1, 1.4], [0.5, 2.0]])


def _identity_f(t):
    return np.asarray(t, dtype=float)


def _const_f(value):
    return lambda t: np.full_like(np.asarray(t, dtype=float), value)


def test_zero_kernel_has_zero_solution():
    prob = zd.DressingProblem(zd.gaussian_set(2, amplitude=0.0), u=U2)
    sol = zd.solve_marchenko(prob)
    assert np.max(np.abs(sol.k_nodes)) == 0.0
    assert np.max(np.abs(sol.beta())) == 0.0


def test_rank_one_kernel_matches_resolvent():
    from flatpencil.catalog import rank1_case
    kernel, exact = rank1_case()
    prob = zd.DressingProblem(zd.PotentialSet(1, {}, {}, envelope=6.0),
                              u=(0.0,), length=10.0, panels=16,
                              nodes_per_panel=6)
    sol = zd.solve_marchenko(prob, kernel=kernel)
    for sp in (0.2, 0.9, 1.7, 2.6):
        assert abs(sol.k_at(sp)[0, 0] - exact(0.0, sp)) <= 1e-12


def test_small_kernel_matches_two_term_expansion():
    """For a small-norm kernel the solution agrees with the truncated series
    K = F + F*F up to a cubic remainder."""
    prob = zd.DressingProblem(zd.gaussian_set(2, amplitude=0.005), u=U2,
                              panels=24, nodes_per_panel=6)
    sol = zd.solve_marchenko(prob)
    F, s = sol.kernel, sol.s
    x, w = np.polynomial.legendre.leggauss(120)
    qs, ws = [], []
    edges = np.linspace(s, s + 12.0, 13)
    for a, b in zip(edges[:-1], edges[1:]):
        qs.append(0.5 * (b - a) * x + 0.5 * (a + b))
        ws.append(0.5 * (b - a) * w)
    qs, ws = np.concatenate(qs), np.concatenate(ws)
    worst = 0.0
    for sp in (0.3, 1.0, 2.2):
        K = sol.k_at(sp)
        for i in range(2):
            for j in range(2):
                series = float(F.eval(i, j, s, sp)) + sum(
                    np.sum(ws * F.eval(i, l, np.full_like(qs, s), qs)
                           * F.eval(l, j, qs, np.full_like(qs, sp)))
                    for l in range(2))
                worst = max(worst, abs(K[i, j] - series))
    assert worst <= 1e-8


def test_collocation_residual_and_conditioning():
    prob = zd.DressingProblem(zd.gaussian_set(3, amplitude=0.4,
                                              include_diagonal=True),
                              u=(0.1, -0.2, 0.25))
    sol = zd.solve_marchenko(prob)
    assert sol.residual <= 1e-10
    assert sol.cond is not None and sol.cond < 1e3


def test_solution_is_grid_independent():
    """Collocation on refined panels moves point values at the quadrature
    convergence rate, far below the kernel scale."""
    vals = []
    for panels in (16, 32):
        prob = zd.DressingProblem(zd.gaussian_set(2, amplitude=0.4), u=U2,
                                  panels=panels, nodes_per_panel=6)
        sol = zd.solve_marchenko(prob)
        vals.append(sol.k_at(0.7))
    assert np.max(np.abs(vals[0] - vals[1])) <= 1e-10


def test_nonskew_diagonal_entry_is_rejected():
    with pytest.raises(ValueError, match="skew"):
        zd.PotentialSet(2, {}, {0: zd.gaussian_pair(0.3, 1.0)}, envelope=8.0)
    # and the built-in skew profile is accepted
    zd.PotentialSet(2, {}, {0: zd.skew_gaussian_pair(0.3, 1.0)}, envelope=8.0)


def test_declared_truncation_is_probed():
    prob = zd.DressingProblem(zd.gaussian_set(2, amplitude=0.4), u=U2,
                              length=2.0)
    with pytest.raises(TruncationInsufficient):
        zd.solve_marchenko(prob)


def test_conditioning_cap_is_enforced():
    prob = zd.DressingProblem(zd.gaussian_set(2, amplitude=0.4), u=U2)
    with pytest.raises(IllConditioned):
        zd.solve_marchenko(prob, cond_cap=1.0)


def test_translation_identity_of_displaced_kernels():
    pots = zd.PotentialSet(2, {(0, 1): zd.gaussian_pair(0.25, 1.3)}, {},
                           envelope=8.0)
    kernel = zd.DressingProblem(pots, u=(0.05, -0.3)).base_kernel()
    val = zd.reduction_identity_residual(kernel, seed=3)
    assert val <= 1e-8
    # seeded probe points are reproducible
    assert zd.reduction_identity_residual(kernel, seed=3) == val
    assert zd.reduction_identity_residual(kernel, seed=4) <= 1e-8


def test_reduction_pde_report_for_matched_profile():
    """Equal constant profile components annihilate the off-diagonal reduction
    equation for every kernel shape."""
    rep = zd.reduction_pde_residual(
        zd.gaussian_set(3, amplitude=0.4, include_diagonal=True),
        ls.constant_profile((2.0, 2.0, 2.0)))
    assert rep.max_residual <= 1e-10
    d = rep.as_dict()
    assert d["verdict"] == "pass"
    assert set(d) == {"off_diagonal", "diagonal", "max_residual", "tolerance",
                      "verdict"}


def test_reduction_pde_report_for_mismatched_profile():
    rep = zd.reduction_pde_residual(zd.gaussian_set(2, amplitude=0.4),
                                    ls.constant_profile((4.0, 1.0)))
    assert rep.max_residual >= 1e-2
    assert rep.as_dict()["verdict"] == "fail"


def test_offdiagonal_pde_closed_forms():
    sep = zd.separable_sum_pair(0.3, 0.2, 1.0)
    assert zd.pair_pde_residual(sep, _const_f(4.0), _const_f(1.0),
                                PROBES) == 0.0
    log = zd.log_pair(0.7)
    assert zd.pair_pde_residual(log, _identity_f, _identity_f, PROBES) <= 1e-10
    # product kernel with distinct constants: residual is 2 c (f1 - f2) = 6
    assert zd.pair_pde_residual(zd.product_pair(), _const_f(4.0),
                                _const_f(1.0), PROBES) == pytest.approx(6.0)


def test_diagonal_pde_closed_forms():
    log = zd.log_pair(0.7)
    assert zd.diagonal_pde_residual(log, _identity_f, PROBES) <= 1e-10
    # product kernel with the identity profile: residual is 3 (y - x)
    val = zd.diagonal_pde_residual(zd.product_pair(), _identity_f, PROBES)
    assert val == pytest.approx(4.5, rel=1e-10)


def test_scaled_kernel_consistency_for_constant_profile():
    prob = zd.DressingProblem(zd.gaussian_set(2, amplitude=0.4), u=U2,
                              profile=ls.constant_profile((2.0, 2.0)))
    rep = zd.verify_tilde_consistency(prob)
    assert rep.kernel_deviation <= 1e-12
    assert rep.beta_deviation <= 1e-12


def test_scaled_kernel_requires_signed_profile():
    crossing = zd.ReductionProfile((lambda t: t, lambda t: t))
    prob = zd.DressingProblem(zd.gaussian_set(2, amplitude=0.3), u=U2,
                              profile=crossing)
    with pytest.raises(SignChangeOnRange):
        zd.verify_tilde_consistency(prob)


def test_extracted_frame_satisfies_lame_system():
    chart = GridChart((-0.2, -0.2), (0.2, 0.2), (5, 5))
    field = zd.extract_beta(zd.gaussian_set(2, amplitude=0.3), chart,
                            profile=ls.constant_profile((2.0, 2.0)))
    frame = field.frame()
    assert frame.chart is chart
    rep = ls.lame_residuals(frame, order=2)
    assert max(rep.diagonal.values()) <= 1e-5


def test_dressed_seeds_are_positive():
    prob = zd.DressingProblem(zd.gaussian_set(2, amplitude=0.4), u=U2)
    sol = zd.solve_marchenko(prob)
    psi = sol.psi()
    assert psi.shape == (2,)
    assert np.all(psi > 0)
