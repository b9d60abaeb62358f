"""Every catalog entry must hold up under its own checks."""

import pytest

from flatpencil import catalog
from flatpencil.errors import SchemaError

REQUIRED = {
    "euclidean", "polar", "sphere", "diag-u",
    "s4-log-pencil", "s4-constant-curvature",
    "tc-log-unit", "tc-separable", "tc-linear-exp",
    "tc-product-bad", "tc-log-wrong-b",
    "dubrovin-quadratic", "potentials-quadratic",
    "dressing-gaussian", "dressing-separable", "dressing-reduced",
}


def test_names_are_stable():
    names = catalog.names()
    assert len(names) == len(set(names))
    assert REQUIRED <= set(names)
    assert tuple(names) == tuple(e.name for e in catalog.ENTRIES)


def test_unknown_entry_raises_schema_error():
    with pytest.raises(SchemaError, match="polar"):
        catalog.get("no-such-entry")


@pytest.mark.parametrize("name", [e.name for e in catalog.ENTRIES])
def test_entry_passes_its_checks(name):
    rows = catalog.run_entry(name)
    assert rows, name
    for row in rows:
        d = row.as_dict()
        assert set(d) == {"check", "residual", "bound", "comparison", "verdict"}
        assert d["comparison"] in ("le", "ge")
        assert d["verdict"] in ("pass", "fail")
        assert row.passed, f"{name}/{row.name}: {row.residual!r} vs {row.bound!r}"


def test_two_component_case_partition():
    for name in catalog.TWO_COMPONENT_POSITIVE:
        _, _, positive = catalog.two_component_case(name)
        assert positive
    for name in catalog.TWO_COMPONENT_NEGATIVE:
        _, _, positive = catalog.two_component_case(name)
        assert not positive


def test_metric_names_cover_diagonal_catalog():
    assert set(catalog.metric_names()) == {"euclidean", "polar", "sphere",
                                           "diag-u"}
