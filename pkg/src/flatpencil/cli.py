"""Scenario-driven command line front end.

``flatpencil run scenario.json`` loads a JSON scenario, executes the named
pipeline, prints a machine-readable report, and exits 0 when every check
passes, 2 when some check fails, and 1 on configuration or runtime errors.
``flatpencil catalog`` lists the built-in examples.

Reports are byte-stable: floats are serialized with 17 significant digits,
row order is fixed by construction, and wall-clock timing goes to stderr
instead of the report body.  Flags may also be supplied through environment
variables with the prefix ``FLATPENCIL_`` (``FLATPENCIL_TOL``,
``FLATPENCIL_ORDER``, ``FLATPENCIL_SEED``, ``FLATPENCIL_OUT``,
``FLATPENCIL_DUMP_CSV``); an explicit flag wins over the environment, and
both win over the scenario file.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from typing import Callable, Sequence

import numpy as np

from . import __version__
from . import catalog as cat
from . import geometry_core as geo
from . import lame_system as ls
from . import pencil_checker as pc
from . import two_component as tc
from . import zakharov_dressing as zd
from .catalog import CheckRow
from .errors import FlatpencilError, SchemaError
from .expressions import compile_expression
from .grid_calculus import DEFAULT_ORDER, GridChart

KINDS = (
    "check-flat",
    "check-pencil",
    "nijenhuis",
    "diagonal-form",
    "dubrovin",
    "potentials",
    "lame",
    "reduce",
    "dress",
    "two-component",
    "catalog",
)

_SOLVER_BOUND = 1e-10  # linear-algebra exactness of the collocation solve
_IDENTITY_BOUND = 1e-8  # kernel translation / tilde consistency checks


# ---------------------------------------------------------------------------
# deterministic JSON


def _format_float(x: float) -> str:
    if x != x:
        return "NaN"
    if x == float("inf"):
        return "Infinity"
    if x == float("-inf"):
        return "-Infinity"
    return format(x, ".17g")


def dumps(obj, indent: int = 0) -> str:
    """JSON with floats at 17 significant digits and stable ordering."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = []
        for key, value in obj.items():
            items.append(f"{inner}{json.dumps(str(key))}: {dumps(value, indent + 1)}")
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(obj, (list, tuple)):
        if not len(obj):
            return "[]"
        items = [f"{inner}{dumps(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + f"\n{pad}]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _format_float(float(obj))
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    raise SchemaError(f"cannot serialize {type(obj).__name__} into a report")


# ---------------------------------------------------------------------------
# scenario parsing helpers


def _need(scenario: dict, field: str, kind: str):
    if field not in scenario:
        raise SchemaError(f"scenario kind {kind!r} requires field {field!r}")
    return scenario[field]


def _chart_from_spec(spec) -> GridChart:
    if not isinstance(spec, dict):
        raise SchemaError("chart must be an object with lower/upper/points")
    for key in ("lower", "upper", "points"):
        if key not in spec:
            raise SchemaError(f"chart is missing {key!r}")
    lower = tuple(float(v) for v in spec["lower"])
    upper = tuple(float(v) for v in spec["upper"])
    points = tuple(int(v) for v in spec["points"])
    if not len(lower) == len(upper) == len(points):
        raise SchemaError("chart lower/upper/points must have equal length")
    return GridChart(lower, upper, points)


def _coordinate_names(n: int) -> tuple[str, ...]:
    return tuple(f"u{i + 1}" for i in range(n))


def _compile_cell(cell, variables) -> Callable:
    if isinstance(cell, (int, float)) and not isinstance(cell, bool):
        value = float(cell)
        return lambda *args, value=value: value
    if isinstance(cell, str):
        return compile_expression(cell, variables)
    raise SchemaError(f"expected a number or expression string, got {cell!r}")


def _metric_from_spec(spec, chart: GridChart | None, kind: str):
    """Returns (metric, chart); a catalog reference supplies its own chart."""
    if not isinstance(spec, dict):
        raise SchemaError("metric must be an object")
    if "catalog" in spec:
        name = spec["catalog"]
        if name not in cat.metric_names():
            raise SchemaError(
                f"{name!r} is not a plain-metric catalog entry "
                f"(choose from {', '.join(cat.metric_names())})"
            )
        metric = cat.metric_field(name)
        return metric, metric.chart
    if chart is None:
        raise SchemaError(f"scenario kind {kind!r} needs a chart for inline metrics")
    rows = spec.get("contravariant")
    if rows is None:
        raise SchemaError("metric needs 'contravariant' rows or a 'catalog' name")
    n = chart.dim
    if len(rows) != n or any(len(r) != n for r in rows):
        raise SchemaError(f"metric must be a {n}x{n} matrix of entries")
    names = _coordinate_names(n)
    fns = [[_compile_cell(cell, names) for cell in row] for row in rows]

    def closure(u: np.ndarray) -> np.ndarray:
        return np.array([[float(fns[i][j](*u)) for j in range(n)] for i in range(n)])

    return geo.build_metric(closure, chart), chart


def _profile_from_spec(spec, n: int) -> ls.ReductionProfile:
    if not isinstance(spec, dict):
        raise SchemaError("profile must be an object")
    if "constant" in spec:
        values = [float(v) for v in spec["constant"]]
        if len(values) != n:
            raise SchemaError(f"profile needs {n} constants")
        return ls.constant_profile(values)
    if "expressions" in spec:
        exprs = spec["expressions"]
        if len(exprs) != n:
            raise SchemaError(f"profile needs {n} expressions in t")
        fns = tuple(_compile_cell(e, ("t",)) for e in exprs)
        return ls.ReductionProfile(fns)
    raise SchemaError("profile needs 'constant' values or 'expressions' in t")


def _lambda_samples(scenario: dict, fallback) -> tuple:
    raw = scenario.get("lambda_samples")
    if raw is None:
        return tuple(fallback)
    out = []
    for pair in raw:
        if len(pair) != 2:
            raise SchemaError("each lambda sample must be a [l1, l2] pair")
        out.append((float(pair[0]), float(pair[1])))
    if not out:
        raise SchemaError("lambda_samples must not be empty")
    return tuple(out)


def _potential_from_spec(spec) -> tc.Potential:
    if not isinstance(spec, dict) or "kind" not in spec:
        raise SchemaError("potential must be an object with a 'kind'")
    pkind = spec["kind"]
    if pkind == "log":
        return tc.log_potential(float(spec.get("c", 1.0)))
    if pkind == "linear":
        return tc.linear_potential(float(spec.get("a", 0.0)), float(spec.get("b", 0.0)))
    if pkind == "product":
        return tc.product_potential()
    if pkind == "expression":
        if "value" not in spec:
            raise SchemaError("expression potential needs 'value'")
        return tc.Potential(value=_compile_cell(spec["value"], ("u1", "u2")))
    raise SchemaError(f"unknown potential kind {pkind!r}")


def _field_from_expr(expr, chart: GridChart) -> np.ndarray:
    fn = _compile_cell(expr, _coordinate_names(chart.dim))
    grids = chart.meshgrid()
    return np.asarray(fn(*grids), dtype=float) + np.zeros(chart.shape)


def _potential_set_from_spec(spec) -> zd.PotentialSet:
    if not isinstance(spec, dict):
        raise SchemaError("potentials must be an object")
    preset = spec.get("preset", "gaussian")
    if preset != "gaussian":
        raise SchemaError(f"unknown potential preset {preset!r}")
    n = int(spec.get("components", 2))
    return zd.gaussian_set(
        n,
        amplitude=float(spec.get("amplitude", 0.2)),
        width=float(spec.get("width", 1.0)),
        include_diagonal=bool(spec.get("include_diagonal", False)),
    )


# ---------------------------------------------------------------------------
# per-kind pipelines; each returns (rows, metadata, csv fields)


def _csv_curvature(name: str, metric: geo.MetricField, order: int, fields: dict):
    curv = geo.curvature(metric, order=order)
    n = metric.dim
    point = np.max(np.abs(curv.mixed.values.reshape(metric.chart.shape + (n ** 4,))), axis=-1)
    fields[name] = (metric.chart, point)


def _run_check_flat(scenario, settings):
    chart = scenario.get("chart")
    chart = _chart_from_spec(chart) if chart is not None else None
    metric, chart = _metric_from_spec(_need(scenario, "metric", "check-flat"), chart, "check-flat")
    residual = geo.flatness_residual(metric, settings["order"])
    fields = {}
    _csv_curvature("flatness", metric, settings["order"], fields)
    return (
        [CheckRow("flatness", residual, settings["tolerance"])],
        {"chart": _chart_meta(chart)},
        fields,
    )


def _pencil_from_scenario(scenario, kind, settings, fallback_lams=pc.DEFAULT_LAMBDA_SAMPLES):
    chart = _chart_from_spec(_need(scenario, "chart", kind))
    g1, _ = _metric_from_spec(_need(scenario, "metric", kind), chart, kind)
    g2, _ = _metric_from_spec(_need(scenario, "metric2", kind), chart, kind)
    lams = _lambda_samples(scenario, fallback_lams)
    return pc.PencilSpec(g1, g2, lams), chart


def _run_check_pencil(scenario, settings):
    mode = scenario.get("mode", "flat")
    if mode not in ("flat", "constant_curvature", "general"):
        raise SchemaError(f"unknown pencil mode {mode!r}")
    pencil, chart = _pencil_from_scenario(scenario, "check-pencil", settings)
    rep = pc.check_compatible(
        pencil,
        mode,
        k1=float(scenario.get("k1", 0.0)),
        k2=float(scenario.get("k2", 0.0)),
        order=settings["order"],
        tol=settings["tolerance"],
    )
    tol = settings["tolerance"]
    rows = [
        CheckRow("connection_linearity", rep.max_connection, tol),
        CheckRow(f"curvature_{mode}", rep.max_curvature, tol),
    ]
    for name, value in rep.endpoint_residuals.items():
        rows.append(CheckRow(name, value, tol))
    fields = {}
    _csv_curvature("g1-curvature", pencil.g1, settings["order"], fields)
    _csv_curvature("g2-curvature", pencil.g2, settings["order"], fields)
    meta = {"chart": _chart_meta(chart), "mode": mode,
            "lambda_samples": [list(p) for p in pencil.lambda_samples]}
    return rows, meta, fields


def _run_nijenhuis(scenario, settings):
    safe = ((1.0, 0.0), (0.0, 1.0))
    pencil, chart = _pencil_from_scenario(scenario, "nijenhuis", settings, safe)
    aff = pc.affinor(pencil)
    spectrum = pc.nonsingularity(pencil)
    residual = pc.nijenhuis(aff, settings["order"])
    rows = [
        CheckRow("nijenhuis", residual, settings["tolerance"]),
        CheckRow("spectrum_gap", spectrum.min_gap, spectrum.threshold, "ge"),
    ]
    meta = {
        "chart": _chart_meta(chart),
        "spectrum": {
            "complex": spectrum.has_complex_pairs,
            "scale": spectrum.eigen_scale,
        },
    }
    return rows, meta, {}


def _run_diagonal_form(scenario, settings):
    safe = ((1.0, 0.0), (0.0, 1.0))
    pencil, chart = _pencil_from_scenario(scenario, "diagonal-form", settings, safe)
    rep = pc.check_diagonal_form(
        pencil, settings["order"], tol=settings["tolerance"]
    )
    rows = [
        CheckRow("ratio_cross_derivative", rep.residual, settings["tolerance"]),
    ]
    meta = {"chart": _chart_meta(chart), "off_diagonal_max": rep.off_diagonal_max}
    return rows, meta, {}


def _run_dubrovin(scenario, settings):
    chart = _chart_from_spec(_need(scenario, "chart", "dubrovin"))
    g2, _ = _metric_from_spec(_need(scenario, "metric", "dubrovin"), chart, "dubrovin")
    exprs = _need(scenario, "covector", "dubrovin")
    if len(exprs) != chart.dim:
        raise SchemaError(f"covector needs {chart.dim} components")
    names = _coordinate_names(chart.dim)
    fns = [_compile_cell(e, names) for e in exprs]
    f_closure = lambda u: np.array([float(fn(*u)) for fn in fns])
    lams = _lambda_samples(scenario, pc.DEFAULT_LAMBDA_SAMPLES)
    rep = pc.dubrovin_construct(
        g2,
        f_closure,
        c=float(scenario.get("c", 0.0)),
        order=settings["order"],
        tol=settings["tolerance"],
        lambda_samples=lams,
    )
    tol = settings["tolerance"]
    rows = [
        CheckRow("quadratic_relation", rep.quadratic_residual, tol),
        CheckRow("bracket", rep.bracket_residual, tol),
        CheckRow("delta_consistency", rep.delta_consistency, tol),
        CheckRow("cross_check_flat", rep.compatibility.max_residual, tol),
    ]
    return rows, {"chart": _chart_meta(chart)}, {}


def _run_potentials(scenario, settings):
    chart = _chart_from_spec(_need(scenario, "chart", "potentials"))
    eta = np.array(_need(scenario, "eta", "potentials"), dtype=float)
    exprs = _need(scenario, "potentials", "potentials")
    if len(exprs) != chart.dim:
        raise SchemaError(f"potentials needs {chart.dim} components")
    names = _coordinate_names(chart.dim)
    fns = [_compile_cell(e, names) for e in exprs]
    h = tuple((lambda u, fn=fn: float(fn(*u))) for fn in fns)
    lams = _lambda_samples(scenario, pc.DEFAULT_LAMBDA_SAMPLES)
    rep = pc.generate_from_potentials(
        pc.PotentialPairSpec(eta, h, chart),
        order=settings["order"],
        tol=settings["tolerance"],
        lambda_samples=lams,
    )
    tol = settings["tolerance"]
    if rep.degenerate or rep.compatibility is None:
        flat = float("inf") if rep.g2_flatness is None else rep.g2_flatness
        rows = [CheckRow("candidate_flat", flat, tol)]
    else:
        rows = [
            CheckRow("candidate_flat", rep.g2_flatness, tol),
            CheckRow("compatibility", rep.compatibility.max_residual, tol),
        ]
    meta = {"chart": _chart_meta(chart), "degenerate": rep.degenerate}
    return rows, meta, {}


def _frame_from_scenario(scenario, kind, settings):
    chart = scenario.get("chart")
    chart = _chart_from_spec(chart) if chart is not None else None
    metric, chart = _metric_from_spec(_need(scenario, "metric", kind), chart, kind)
    eps = scenario.get("eps")
    if eps is not None:
        eps = tuple(int(v) for v in eps)
    frame = ls.frame_from_metric(metric, eps=eps, order=settings["order"])
    return metric, frame, chart


def _run_lame(scenario, settings):
    metric, frame, chart = _frame_from_scenario(scenario, "lame", settings)
    rep = ls.lame_residuals(frame, settings["order"], settings["tolerance"])
    rows = [
        CheckRow("off_diagonal_system", rep.r_offdiag, settings["tolerance"]),
        CheckRow("diagonal_system", rep.r_diag, settings["tolerance"]),
    ]
    meta = {"chart": _chart_meta(chart), "eps": list(frame.eps)}
    return rows, meta, {}


def _run_reduce(scenario, settings):
    metric, frame, chart = _frame_from_scenario(scenario, "reduce", settings)
    profile = _profile_from_spec(_need(scenario, "profile", "reduce"), chart.dim)
    lame = ls.lame_residuals(frame, settings["order"], settings["tolerance"])
    red = ls.reduction_residual(frame, profile, settings["order"], settings["tolerance"])
    tilde = ls.tilde_frame(frame, profile)
    tilde_lame = ls.lame_residuals(tilde, settings["order"], settings["tolerance"])
    tol = settings["tolerance"]
    rows = [
        CheckRow("lame", lame.max_residual, tol),
        CheckRow("reduction", red.residual, tol),
        CheckRow("tilde_lame", tilde_lame.max_residual, tol),
    ]
    meta = {"chart": _chart_meta(chart), "eps": list(frame.eps),
            "tilde_eps": list(tilde.eps)}
    return rows, meta, {}


def _run_dress(scenario, settings):
    pots = _potential_set_from_spec(_need(scenario, "potentials", "dress"))
    point = tuple(float(v) for v in _need(scenario, "point", "dress"))
    profile_spec = scenario.get("profile")
    profile = (
        _profile_from_spec(profile_spec, pots.n) if profile_spec is not None else None
    )
    problem = zd.DressingProblem(
        pots,
        point,
        profile=profile,
        s=float(scenario.get("s", 0.0)),
        length=scenario.get("length"),
        panels=int(scenario.get("panels", zd.DEFAULT_PANELS)),
        nodes_per_panel=int(scenario.get("nodes_per_panel", zd.DEFAULT_NODES_PER_PANEL)),
    )
    sol = zd.solve_marchenko(problem)
    ident = zd.reduction_identity_residual(problem.base_kernel(), seed=settings["seed"])
    rows = [
        CheckRow("collocation_residual", sol.residual, _SOLVER_BOUND),
        CheckRow("translation_identity", ident, _IDENTITY_BOUND),
    ]
    if profile is not None:
        tilde = zd.verify_tilde_consistency(problem)
        rows.append(CheckRow("tilde_kernel", tilde.kernel_deviation, _IDENTITY_BOUND))
        rows.append(CheckRow("tilde_beta", tilde.beta_deviation, _IDENTITY_BOUND))
    meta = {
        "components": pots.n,
        "point": list(point),
        "truncation_length": problem.truncation_length(),
        "panels": problem.panels,
        "nodes_per_panel": problem.nodes_per_panel,
        "conditioning": sol.cond,
    }
    return rows, meta, {}


def _run_two_component(scenario, settings):
    chart = _chart_from_spec(_need(scenario, "chart", "two-component"))
    if chart.dim != 2:
        raise SchemaError("two-component scenarios need a 2-D chart")
    potential = _potential_from_spec(_need(scenario, "potential", "two-component"))
    eps_raw = scenario.get("eps", (-1, 1))
    eps = (int(eps_raw[0]), int(eps_raw[1]))
    kwargs = {}
    if "f" in scenario:
        exprs = scenario["f"]
        if len(exprs) != 2:
            raise SchemaError("f needs two expressions in t")
        kwargs["f"] = tuple(_compile_cell(e, ("t",)) for e in exprs)
    spec = tc.TwoComponentSpec(chart=chart, potential=potential, eps=eps, **kwargs)

    tol = settings["tolerance"]
    rows = [CheckRow("lequa", tc.lequa_residual(spec, settings["order"]), tol)]
    meta = {"chart": _chart_meta(chart), "eps": list(eps)}

    if "integrate" in scenario:
        integ = scenario["integrate"]
        b1_edge = _compile_cell(_need(integ, "b1_edge", "two-component"), ("u1",))
        b2_edge_fn = _compile_cell(_need(integ, "b2_edge", "two-component"), ("u2",))
        result = tc.integrate_b(
            spec, lambda x: np.asarray(b1_edge(x), dtype=float) + 0.0 * x,
            lambda y: float(b2_edge_fn(y)), settings["order"]
        )
        spec = spec.with_b(result.b1, result.b2)
        rows.append(CheckRow("integration_consistency", result.max_consistency, tol))
        meta["b_source"] = "integrated"
    elif "b1" in scenario and "b2" in scenario:
        spec = spec.with_b(
            _field_from_expr(scenario["b1"], chart),
            _field_from_expr(scenario["b2"], chart),
        )
        rows.append(CheckRow("system", tc.system_residual(spec, settings["order"]), tol))
        meta["b_source"] = "expressions"
    else:
        raise SchemaError(
            "two-component scenarios need either b1/b2 expressions or an "
            "'integrate' block with edge data"
        )

    lams = _lambda_samples(scenario, pc.DEFAULT_LAMBDA_SAMPLES)
    pen = tc.build_pair(spec, lams)
    rep = pc.check_compatible(pen, "flat", order=settings["order"], tol=tol)
    rows.append(CheckRow("pair_flat", rep.max_residual, tol))
    return rows, meta, {}


def _run_catalog(scenario, settings):
    name = _need(scenario, "name", "catalog")
    entry = cat.get(name)
    rows = entry.run(settings["order"])
    meta = {"catalog_entry": entry.name, "kind": entry.kind, "summary": entry.summary}
    return rows, meta, {}


_RUNNERS = {
    "check-flat": _run_check_flat,
    "check-pencil": _run_check_pencil,
    "nijenhuis": _run_nijenhuis,
    "diagonal-form": _run_diagonal_form,
    "dubrovin": _run_dubrovin,
    "potentials": _run_potentials,
    "lame": _run_lame,
    "reduce": _run_reduce,
    "dress": _run_dress,
    "two-component": _run_two_component,
    "catalog": _run_catalog,
}


def _chart_meta(chart: GridChart | None) -> dict | None:
    if chart is None:
        return None
    return {
        "lower": list(chart.lower),
        "upper": list(chart.upper),
        "points": list(chart.points),
        "spacing": list(chart.spacing),
    }


# ---------------------------------------------------------------------------
# report assembly


def run_scenario(scenario: dict, settings: dict) -> tuple[dict, dict]:
    kind = scenario.get("kind")
    if kind not in _RUNNERS:
        raise SchemaError(
            f"unknown scenario kind {kind!r}; expected one of {', '.join(KINDS)}"
        )
    rows, meta, fields = _RUNNERS[kind](scenario, settings)
    verdict = all(row.passed for row in rows)
    report = {
        "flatpencil_version": __version__,
        "scenario": scenario,
        "settings": {
            "tolerance": settings["tolerance"],
            "order": settings["order"],
            "seed": settings["seed"],
        },
        "checks": [row.as_dict() for row in rows],
        "metadata": {**meta, "timing": "stderr"},
        "verdict": "pass" if verdict else "fail",
    }
    return report, fields


def _write_csv_fields(fields: dict, directory: str):
    os.makedirs(directory, exist_ok=True)
    for name, (chart, values) in fields.items():
        path = os.path.join(directory, f"{name}.csv")
        n = chart.dim
        with open(path, "w") as handle:
            handle.write(",".join(_coordinate_names(n)) + ",residual\n")
            for idx in np.ndindex(chart.shape):
                u = chart.node(idx)
                coords = ",".join(_format_float(float(v)) for v in u)
                handle.write(f"{coords},{_format_float(float(values[idx]))}\n")


def _resolve_settings(args, scenario: dict) -> dict:
    def pick(flag, env, scenario_key, default, convert):
        if flag is not None:
            return convert(flag)
        env_val = os.environ.get(env)
        if env_val is not None:
            return convert(env_val)
        if scenario_key in scenario:
            return convert(scenario[scenario_key])
        return default

    tol = pick(args.tol, "FLATPENCIL_TOL", "tolerance", 1e-6, float)
    order = pick(args.order, "FLATPENCIL_ORDER", "order", DEFAULT_ORDER, int)
    seed = pick(args.seed, "FLATPENCIL_SEED", "seed", 0, int)
    out = pick(args.out, "FLATPENCIL_OUT", "out", None, str)
    dump = pick(args.dump_csv, "FLATPENCIL_DUMP_CSV", "dump_csv", None, str)
    if order not in (2, 4):
        raise SchemaError(f"order must be 2 or 4, got {order}")
    if tol <= 0:
        raise SchemaError("tolerance must be positive")
    return {"tolerance": tol, "order": order, "seed": seed, "out": out,
            "dump_csv": dump}


def _cmd_run(args) -> int:
    try:
        with open(args.scenario) as handle:
            scenario = json.load(handle)
    except OSError as exc:
        print(f"error: cannot read scenario: {exc}", file=sys.stderr)
        return 1
    except json.JSONDecodeError as exc:
        print(f"error: scenario is not valid JSON: {exc}", file=sys.stderr)
        return 1
    if not isinstance(scenario, dict):
        print("error: scenario must be a JSON object", file=sys.stderr)
        return 1

    started = time.perf_counter()
    try:
        settings = _resolve_settings(args, scenario)
        report, fields = run_scenario(scenario, settings)
        if settings["dump_csv"]:
            _write_csv_fields(fields, settings["dump_csv"])
    except (FlatpencilError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    text = dumps(report) + "\n"
    if settings["out"]:
        try:
            with open(settings["out"], "w") as handle:
                handle.write(text)
        except OSError as exc:
            print(f"error: cannot write report: {exc}", file=sys.stderr)
            return 1
    sys.stdout.write(text)
    elapsed = time.perf_counter() - started
    print(f"flatpencil: {report['verdict']} in {elapsed:.2f}s", file=sys.stderr)
    return 0 if report["verdict"] == "pass" else 2


def _cmd_catalog(_args) -> int:
    width = max(len(entry.name) for entry in cat.ENTRIES)
    for entry in cat.ENTRIES:
        print(f"{entry.name:<{width}}  {entry.summary}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flatpencil",
        description="Numerical checks and constructions for compatible metric pairs.",
    )
    parser.add_argument("--version", action="version", version=f"flatpencil {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute a scenario file and emit a report")
    run_p.add_argument("scenario", help="path to a scenario JSON file")
    run_p.add_argument("--out", help="also write the report to this path")
    run_p.add_argument("--dump-csv", dest="dump_csv", metavar="DIR",
                       help="write residual-per-node CSV files where supported")
    run_p.add_argument("--tol", type=float, help="residual tolerance override")
    run_p.add_argument("--order", type=int, choices=(2, 4),
                       help="finite-difference order")
    run_p.add_argument("--seed", type=int, help="seed for probe-based checks")
    run_p.set_defaults(fn=_cmd_run)

    cat_p = sub.add_parser("catalog", help="list built-in example entries")
    cat_p.set_defaults(fn=_cmd_catalog)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
