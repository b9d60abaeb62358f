"""Built-in example data: metrics, pencils, two-component pairs, dressing sets.

Every entry freezes one fully specified configuration -- chart, coefficients,
combination samples, tolerances -- so that scenario runs and the test suite
exercise identical numbers.  Entries are listed in a stable order and each
one knows how to run its own battery of checks and report residual rows.

A note on the per-entry combination samples: a pencil check evaluates
``l1 g1 + l2 g2`` for several weight pairs, and a weight pair whose ratio
matches an attainable diagonal ratio of the two metrics produces a singular
combination (or a near-singular one whose finite differences are garbage).
Each entry therefore carries samples chosen to keep every combination well
conditioned on its own chart.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import geometry_core as geo
from . import lame_system as ls
from . import pencil_checker as pc
from . import two_component as tc
from . import zakharov_dressing as zd
from .errors import SchemaError
from .grid_calculus import DEFAULT_ORDER, GridChart

__all__ = [
    "CheckRow",
    "CatalogEntry",
    "ENTRIES",
    "names",
    "get",
    "run_entry",
    "metric_field",
    "metric_names",
    "s4_family",
    "two_component_case",
    "TWO_COMPONENT_POSITIVE",
    "TWO_COMPONENT_NEGATIVE",
    "rank1_case",
]


# combination samples, one safe set per chart family (see module docstring)
LAMS_S4 = ((1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (2.0, 3.0), (2.0, -3.0))
LAMS_UNIT = ((1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (3.0, -1.0), (1.0, 2.0))
LAMS_SHIFTED = ((1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (1.0, -3.0), (1.0, 2.0))


@dataclass(frozen=True)
class CheckRow:
    """One residual measurement with its acceptance bound.

    ``comparison`` is ``"le"`` for ordinary residuals and ``"ge"`` for
    negative controls, where a *large* residual is the expected outcome.
    """

    name: str
    residual: float
    bound: float
    comparison: str = "le"

    @property
    def passed(self) -> bool:
        if self.comparison == "le":
            return self.residual <= self.bound
        return self.residual >= self.bound

    def as_dict(self) -> dict:
        return {
            "check": self.name,
            "residual": self.residual,
            "bound": self.bound,
            "comparison": self.comparison,
            "verdict": "pass" if self.passed else "fail",
        }


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    kind: str
    summary: str
    runner: Callable[[int], list]

    def run(self, order: int = DEFAULT_ORDER) -> list:
        return self.runner(order)


# ---------------------------------------------------------------------------
# plain metrics


def metric_field(name: str, order: int = DEFAULT_ORDER) -> geo.MetricField:
    """The metric behind one of the plain-metric entries."""
    if name == "euclidean":
        chart = GridChart((0.5, 0.5), (1.5, 1.5), (33, 33))
        return geo.build_metric(lambda u: np.eye(2), chart)
    if name == "polar":
        chart = GridChart((1.0, 0.5), (2.0, 1.5), (101, 101))
        return geo.build_metric(lambda u: np.diag([1.0, 1.0 / u[0] ** 2]), chart)
    if name == "sphere":
        chart = GridChart((0.6, 0.4), (1.2, 1.2), (65, 65))
        return geo.build_metric(
            lambda u: np.diag([1.0, 1.0 / np.sin(u[0]) ** 2]), chart
        )
    if name == "diag-u":
        chart = GridChart((0.5, 0.5), (1.5, 1.5), (65, 65))
        return geo.build_metric(lambda u: np.diag([u[0], u[1]]), chart)
    raise SchemaError(f"no plain metric named {name!r}")


def metric_names() -> tuple[str, ...]:
    return ("euclidean", "polar", "sphere", "diag-u")


def _run_euclidean(order: int):
    m = metric_field("euclidean", order)
    return [CheckRow("flatness", geo.flatness_residual(m, order), 1e-12)]


def _run_polar(order: int):
    m = metric_field("polar", order)
    frame = ls.frame_from_metric(m, order=order)
    return [
        CheckRow("flatness", geo.flatness_residual(m, order), 1e-6),
        CheckRow("lame", ls.lame_residuals(frame, order).max_residual, 1e-6),
    ]


def _run_sphere(order: int):
    m = metric_field("sphere", order)
    return [
        CheckRow(
            "constant_curvature_k1", geo.constant_curvature_residual(m, 1.0, order), 1e-5
        ),
        CheckRow("not_flat", geo.flatness_residual(m, order), 1e-2, "ge"),
    ]


def _run_diag_u(order: int):
    m = metric_field("diag-u", order)
    frame = ls.frame_from_metric(m, order=order)
    return [
        CheckRow("flatness", geo.flatness_residual(m, order), 1e-10),
        CheckRow("lame", ls.lame_residuals(frame, order).max_residual, 1e-10),
    ]


# ---------------------------------------------------------------------------
# the logarithmic ladder


def s4_chart() -> GridChart:
    return GridChart((2.0, 0.5), (3.0, 1.0), (97, 65))


def s4_family(k: float = 0.25) -> tc.TwoComponentSpec:
    """The closed-form two-component data generating the metric ladder."""
    return tc.log_family_spec(s4_chart(), c=0.5, k=k)


def _run_s4_log_pencil(order: int):
    spec = s4_family()
    g = {n: tc.g_family(spec, n) for n in range(4)}
    rows = []
    for a, b in ((1, 0), (2, 1), (2, 0)):
        pen = pc.PencilSpec(g[a], g[b], LAMS_S4)
        rep = pc.check_compatible(pen, "flat", order=order)
        rows.append(CheckRow(f"pair_g{a}_g{b}_flat", rep.max_residual, 1e-5))
    rows.append(
        CheckRow("g3_not_flat", geo.flatness_residual(g[3], order), 1e-2, "ge")
    )
    return rows


def _run_s4_constant_curvature(order: int):
    spec = s4_family(k=0.25)
    g3, g2 = tc.g_family(spec, 3), tc.g_family(spec, 2)
    rows = [
        CheckRow(
            "g3_constant_curvature",
            geo.constant_curvature_residual(g3, 0.25, order),
            1e-5,
        )
    ]
    pen = pc.PencilSpec(g3, g2, LAMS_S4)
    rep = pc.check_compatible(pen, "constant_curvature", k1=0.25, k2=0.0, order=order)
    rows.append(CheckRow("pencil_constant_curvature", rep.max_residual, 1e-5))
    return rows


# ---------------------------------------------------------------------------
# two-component verification cases

TWO_COMPONENT_POSITIVE = ("tc-log-unit", "tc-separable", "tc-linear-exp")
TWO_COMPONENT_NEGATIVE = ("tc-product-bad", "tc-log-wrong-b")


def two_component_case(name: str):
    """Spec, combination samples, and expected verdict for a named case."""
    if name == "tc-log-unit":
        chart = GridChart((2.0, 0.5), (3.0, 1.0), (65, 65))
        u1, u2 = chart.meshgrid()
        w = u1 - u2
        spec = tc.TwoComponentSpec(
            chart=chart, potential=tc.log_potential(1.0), eps=(-1, 1),
            b1=w, b2=w.copy(),
        )
        return spec, LAMS_S4, True
    if name == "tc-separable":
        chart = GridChart((0.5, 0.5), (1.5, 1.5), (65, 65))
        u1, u2 = chart.meshgrid()
        spec = tc.TwoComponentSpec(
            chart=chart, potential=tc.linear_potential(0.0, 0.0), eps=(1, 1),
            f=(lambda t: 2.0 + t ** 2, lambda t: 3.0 + t),
            b1=np.exp(u1), b2=1.0 + 0.5 * u2 ** 2,
        )
        return spec, LAMS_S4, True
    if name == "tc-linear-exp":
        chart = GridChart((0.75, 0.75), (1.75, 1.75), (65, 65))
        u1, u2 = chart.meshgrid()
        b = np.exp(-0.3 * (u1 + u2))
        spec = tc.TwoComponentSpec(
            chart=chart, potential=tc.linear_potential(0.3, 0.3), eps=(-1, 1),
            b1=b, b2=b.copy(),
        )
        return spec, LAMS_SHIFTED, True
    if name == "tc-product-bad":
        chart = GridChart((0.75, 0.75), (1.75, 1.75), (65, 65))
        u1, u2 = chart.meshgrid()
        b = np.exp(-(u1 ** 2 + u2 ** 2) / 2.0)
        spec = tc.TwoComponentSpec(
            chart=chart, potential=tc.product_potential(), eps=(-1, 1),
            b1=b, b2=b.copy(),
        )
        return spec, LAMS_SHIFTED, False
    if name == "tc-log-wrong-b":
        chart = GridChart((2.0, 0.5), (3.0, 1.0), (65, 65))
        u1, u2 = chart.meshgrid()
        b = np.exp(u1 * u2)
        spec = tc.TwoComponentSpec(
            chart=chart, potential=tc.log_potential(1.0), eps=(-1, 1),
            b1=b, b2=b.copy(),
        )
        return spec, LAMS_S4, False
    raise SchemaError(f"no two-component case named {name!r}")


def _tc_runner(name: str):
    def run(order: int):
        spec, lams, positive = two_component_case(name)
        lequa = tc.lequa_residual(spec, order)
        system = tc.system_residual(spec, order)
        pen = tc.build_pair(spec, lams)
        flat = pc.check_compatible(pen, "flat", order=order).max_residual
        if positive:
            return [
                CheckRow("lequa", lequa, 1e-10),
                CheckRow("system", system, 1e-8),
                CheckRow("pair_flat", flat, 1e-5),
            ]
        if name == "tc-product-bad":
            # b genuinely solves the first-order system; the mixed equation
            # and the geometry are what fail
            return [
                CheckRow("system", system, 1e-6),
                CheckRow("lequa_fails", lequa, 1e-1, "ge"),
                CheckRow("pair_not_flat", flat, 1e-2, "ge"),
            ]
        return [
            CheckRow("system_fails", system, 1e-2, "ge"),
            CheckRow("pair_not_flat", flat, 1e-2, "ge"),
        ]

    return run


# ---------------------------------------------------------------------------
# constructions from potentials


def _quadratic_covector(u: np.ndarray) -> np.ndarray:
    return np.array([0.5 * u[0] ** 2, 0.5 * u[1] ** 2])


def _run_dubrovin_quadratic(order: int):
    chart = GridChart((1.0, 1.0), (2.0, 2.0), (65, 65))
    eye = geo.build_metric(lambda u: np.eye(2), chart)
    rep = pc.dubrovin_construct(
        eye, _quadratic_covector, c=0.0, order=order, lambda_samples=LAMS_UNIT
    )
    return [
        CheckRow("quadratic_relation", rep.quadratic_residual, 1e-10),
        CheckRow("bracket", rep.bracket_residual, 1e-10),
        CheckRow("delta_consistency", rep.delta_consistency, 1e-6),
        CheckRow("cross_check_flat", rep.compatibility.max_residual, 1e-6),
    ]


def _run_potentials_quadratic(order: int):
    chart = GridChart((1.0, 1.0), (2.0, 2.0), (65, 65))
    spec = pc.PotentialPairSpec(
        np.eye(2),
        (lambda u: 0.5 * u[0] ** 2, lambda u: 0.5 * u[1] ** 2),
        chart,
    )
    rep = pc.generate_from_potentials(spec, order=order, lambda_samples=LAMS_UNIT)
    if rep.degenerate or rep.compatibility is None:
        return [CheckRow("candidate_flat", float("inf"), 1e-10)]
    return [
        CheckRow("candidate_flat", rep.g2_flatness, 1e-10),
        CheckRow("compatibility", rep.compatibility.max_residual, 1e-6),
    ]


# ---------------------------------------------------------------------------
# dressing data


def dressing_gaussian_set() -> zd.PotentialSet:
    return zd.gaussian_set(3, amplitude=0.4, include_diagonal=True)


def _run_dressing_gaussian(order: int):
    pots = dressing_gaussian_set()
    prob = zd.DressingProblem(pots, (0.1, -0.2, 0.25))
    sol = zd.solve_marchenko(prob)
    ident = zd.reduction_identity_residual(prob.base_kernel())
    return [
        CheckRow("collocation_residual", sol.residual, 1e-10),
        CheckRow("translation_identity", ident, 1e-8),
        CheckRow("conditioning", sol.cond, 1e3),
    ]


def rank1_case():
    """A separable one-component kernel and its closed-form resolvent."""
    a = lambda t: 0.6 * np.exp(-0.5 * np.asarray(t, dtype=float) ** 2)
    b = lambda t: 0.5 * np.exp(-0.5 * (np.asarray(t, dtype=float) - 0.3) ** 2)
    raw = zd.RawKernel(1, lambda i, j, s, sp: a(s) * b(sp))

    def overlap(s: float, length: float = 40.0, panels: int = 60, m: int = 12):
        x, w = np.polynomial.legendre.leggauss(m)
        edges = np.linspace(s, s + length, panels + 1)
        total = 0.0
        for k in range(panels):
            mid = 0.5 * (edges[k] + edges[k + 1])
            half = 0.5 * (edges[k + 1] - edges[k])
            t = mid + half * x
            total += half * float(np.sum(w * a(t) * b(t)))
        return total

    def exact(s: float, sp) -> np.ndarray:
        return a(s) * b(sp) / (1.0 - overlap(s))

    return raw, exact


def separable_reduction_set() -> zd.PotentialSet:
    return zd.PotentialSet(
        2, {(0, 1): zd.separable_sum_pair(0.3, 0.2, 1.0)}, {}, envelope=8.0
    )


def _run_dressing_separable(order: int):
    raw, exact = rank1_case()
    dummy = zd.PotentialSet(1, {}, {}, envelope=6.0)
    prob = zd.DressingProblem(
        dummy, (0.0,), s=0.0, length=10.0, panels=16, nodes_per_panel=6
    )
    sol = zd.solve_marchenko(prob, kernel=raw)
    probes = np.array([0.2, 0.9, 1.7, 2.6])
    err = float(
        np.max(np.abs(np.array([sol.k_at(t)[0, 0] for t in probes]) - exact(0.0, probes)))
    )

    profile = ls.constant_profile((4.0, 1.0))
    good = zd.reduction_pde_residual(separable_reduction_set(), profile)
    bad = zd.reduction_pde_residual(
        zd.PotentialSet(2, {(0, 1): zd.product_pair()}, {}, envelope=8.0), profile
    )
    return [
        CheckRow("rank1_resolvent", err, 1e-9),
        CheckRow("separable_reduction_pde", good.max_residual, 1e-10),
        CheckRow("product_reduction_pde", bad.max_residual, 1e-1, "ge"),
    ]


def reduced_pipeline(order: int = DEFAULT_ORDER):
    """Windowed two-component data pushed through the whole chain."""
    pots = zd.gaussian_set(2, amplitude=0.4, include_diagonal=True)
    chart = GridChart((-0.3, -0.3), (0.3, 0.3), (9, 9))
    profile = ls.constant_profile((2.0, 2.0))
    field = zd.extract_beta(pots, chart, profile=profile)
    frame = field.frame()
    return pots, chart, profile, frame


def _run_dressing_reduced(order: int):
    pots, chart, profile, frame = reduced_pipeline(order)
    lame = ls.lame_residuals(frame, order)
    red = ls.reduction_residual(frame, profile, order)
    pen = ls.metric_pair_from_frame(frame, profile, order, tol=1e-4)
    flat = pc.check_compatible(pen, "flat", order=order)
    tilde = zd.verify_tilde_consistency(
        zd.DressingProblem(pots, (0.1, -0.1), profile=profile)
    )
    return [
        CheckRow("lame", lame.max_residual, 1e-5),
        CheckRow("reduction", red.residual, 1e-5),
        CheckRow("pair_flat", flat.max_residual, 1e-4),
        CheckRow("tilde_kernel", tilde.kernel_deviation, 1e-8),
        CheckRow("tilde_beta", tilde.beta_deviation, 1e-8),
    ]


# ---------------------------------------------------------------------------
# the table itself

ENTRIES: tuple[CatalogEntry, ...] = (
    CatalogEntry(
        "euclidean", "metric",
        "Identity metric on a square box; the flatness baseline.",
        _run_euclidean,
    ),
    CatalogEntry(
        "polar", "metric",
        "Flat plane metric written in polar coordinates (r, theta).",
        _run_polar,
    ),
    CatalogEntry(
        "sphere", "metric",
        "Round unit-sphere metric; curvature is constantly one.",
        _run_sphere,
    ),
    CatalogEntry(
        "diag-u", "metric",
        "Diagonal metric g^{ii} = u^i; flat despite coordinate-dependent entries.",
        _run_diag_u,
    ),
    CatalogEntry(
        "s4-log-pencil", "pencil",
        "Ladder of diagonal metrics from the logarithmic closed form; "
        "consecutive members form flat pairs.",
        _run_s4_log_pencil,
    ),
    CatalogEntry(
        "s4-constant-curvature", "pencil",
        "Curvature-normalized top of the logarithmic ladder: constant "
        "curvature 1/4, compatible with its flat neighbour.",
        _run_s4_constant_curvature,
    ),
    CatalogEntry(
        "tc-log-unit", "two-component",
        "Log potential with unit coefficient and b = u1 - u2; compatible pair.",
        _tc_runner("tc-log-unit"),
    ),
    CatalogEntry(
        "tc-separable", "two-component",
        "Constant potential with axis-separable b; compatible by construction.",
        _tc_runner("tc-separable"),
    ),
    CatalogEntry(
        "tc-linear-exp", "two-component",
        "Linear potential with exponential b; closed-form compatible pair.",
        _tc_runner("tc-linear-exp"),
    ),
    CatalogEntry(
        "tc-product-bad", "two-component",
        "Product potential whose b solves the first-order system yet fails "
        "the mixed equation; the pair must fail geometrically.",
        _tc_runner("tc-product-bad"),
    ),
    CatalogEntry(
        "tc-log-wrong-b", "two-component",
        "Log potential with a wrong b field; first-order system and pair both fail.",
        _tc_runner("tc-log-wrong-b"),
    ),
    CatalogEntry(
        "dubrovin-quadratic", "construction",
        "Flat partner metric from a quadratic covector potential over the identity.",
        _run_dubrovin_quadratic,
    ),
    CatalogEntry(
        "potentials-quadratic", "construction",
        "Candidate pair generated from per-coordinate quadratic potentials.",
        _run_potentials_quadratic,
    ),
    CatalogEntry(
        "dressing-gaussian", "dressing",
        "Three-component Gaussian scattering data: integral-equation solve "
        "plus kernel translation identities.",
        _run_dressing_gaussian,
    ),
    CatalogEntry(
        "dressing-separable", "dressing",
        "Rank-one separable kernel against its closed-form resolvent, with "
        "separable-potential reduction identities.",
        _run_dressing_separable,
    ),
    CatalogEntry(
        "dressing-reduced", "dressing",
        "Windowed two-component data with a constant reduction profile, "
        "carried through to a compatible flat pair.",
        _run_dressing_reduced,
    ),
)

_BY_NAME = {entry.name: entry for entry in ENTRIES}


def names() -> tuple[str, ...]:
    return tuple(entry.name for entry in ENTRIES)


def get(name: str) -> CatalogEntry:
    entry = _BY_NAME.get(name)
    if entry is None:
        raise SchemaError(
            f"unknown catalog entry {name!r}; known entries: {', '.join(names())}"
        )
    return entry


def run_entry(name: str, order: int = DEFAULT_ORDER) -> list:
    return get(name).run(order)
