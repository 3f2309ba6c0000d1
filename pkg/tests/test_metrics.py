"""Exact optimal-transport and Prokhorov computations."""

import time
from fractions import Fraction

import pytest

from finstoch.errors import ResourceError, SpecError
from finstoch.finprob import Distribution, dirac
from finstoch.metrics import (
    FiniteMetricSpace,
    MetricSuiteConfig,
    kantorovich_by_vertices,
    kantorovich_dual,
    metric_inequality_suite,
    prokhorov,
    prokhorov_detail,
    three_point_example,
    wasserstein_primal,
)

F = Fraction


def line_space(coords):
    pts = tuple(coords)
    dist = {
        (x, y): abs(coords[x] - coords[y])
        for x in pts for y in pts if x != y
    }
    return FiniteMetricSpace(pts, dist)


def test_metric_validation():
    with pytest.raises(SpecError):
        FiniteMetricSpace(("a", "b"), {("a", "b"): F(0)})
    with pytest.raises(SpecError):
        FiniteMetricSpace(
            ("a", "b", "c"),
            {("a", "b"): F(1), ("b", "c"): F(1), ("a", "c"): F(3)},
        )


def test_three_point_example_exact_values():
    space, p, q = three_point_example()
    assert kantorovich_dual(p, q, space) == F(3, 10)
    assert wasserstein_primal(p, q, space) == F(3, 10)
    value, attained, witness = prokhorov_detail(p, q, space)
    assert value == F(1, 2)
    assert attained
    assert "0" in witness


def test_identical_measures_have_distance_zero():
    space, p, _ = three_point_example()
    assert kantorovich_dual(p, p, space) == 0
    assert wasserstein_primal(p, p, space) == 0
    assert prokhorov(p, p, space) == 0


def test_diracs_at_distance_d():
    space = line_space({"x": F(0), "y": F(1, 3)})
    p = dirac("x", space.points)
    q = dirac("y", space.points)
    assert kantorovich_dual(p, q, space) == F(1, 3)
    assert wasserstein_primal(p, q, space) == F(1, 3)
    assert prokhorov(p, q, space) == F(1, 3)


def test_vertex_enumeration_cross_check():
    space, p, q = three_point_example()
    assert kantorovich_by_vertices(p, q, space) == F(3, 10)
    small = line_space({"a": F(0), "b": F(1, 4), "c": F(2, 4), "d": F(1)})
    pa = Distribution(small.points, {"a": F(1, 2), "c": F(1, 2)})
    qa = Distribution(small.points, {"b": F(1, 4), "d": F(3, 4)})
    assert kantorovich_by_vertices(pa, qa, small) == kantorovich_dual(
        pa, qa, small
    )


def test_vertex_enumeration_capped():
    pts = {f"p{i}": F(i, 7) for i in range(6)}
    space = line_space(pts)
    p = dirac("p0", space.points)
    q = dirac("p1", space.points)
    with pytest.raises(ResourceError):
        kantorovich_by_vertices(p, q, space)


def test_prokhorov_closed_fattening_breakpoint():
    # the attained value sits exactly at a pairwise distance
    space, p, q = three_point_example()
    value, attained, _ = prokhorov_detail(p, q, space)
    assert attained and value == F(1, 2)


def test_prokhorov_point_cap():
    coords = {f"p{i}": F(i, 20) for i in range(17)}
    space = line_space(coords)
    p = dirac("p0", space.points)
    with pytest.raises(ResourceError):
        prokhorov(p, p, space)


def test_suite_runs_clean_and_flags_gap():
    config = MetricSuiteConfig(seed=11, draws=40, max_points=5, grid=4)
    report = metric_inequality_suite(config)
    assert report.ok(), report.failures()[:3]
    dp, dk = report.counterexample_gap
    assert dp > dk


def test_suite_duality_checks_present():
    config = MetricSuiteConfig(seed=3, draws=30, max_points=4, grid=4)
    report = metric_inequality_suite(config)
    duality = [c for c in report.checks if c.name == "duality"]
    assert duality and all(c.ok for c in duality)
