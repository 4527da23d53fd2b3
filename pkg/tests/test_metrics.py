import math

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dpstream.graph import Snapshot
from dpstream.metrics import (METRICS, MetricsReport, MetricValue, assortativity, clustering_re,
                              degree_kl, density, density_re, eigen_node_overlap, evaluate,
                              kl_divergence, relative_error, transitivity)


def random_snapshot(rng, n=None, m=None):
    n = int(rng.integers(2, 40)) if n is None else n
    m = int(rng.integers(0, 3 * n)) if m is None else m
    return Snapshot.from_edges(rng.integers(0, n, (m, 2)), n)


def to_nx(s):
    g = nx.Graph()
    g.add_nodes_from(range(s.num_nodes))
    g.add_edges_from(s.edges.tolist())
    return g


def star(n=10, extra=()):
    return Snapshot.from_edges([(0, i) for i in range(1, n)] + list(extra), n)


def test_identical_graphs():
    s = random_snapshot(np.random.default_rng(0), 60, 200)
    values = {mv.name: mv.value for mv in evaluate(s, s)}
    assert values["eigen_overlap"] == 1.0
    assert values["degree_kl"] < 1e-8
    for name in ("assortativity_re", "density_re", "clustering_re"):
        assert values[name] == 0


def test_empty_synthetic_has_zero_overlap():
    s = star()
    assert eigen_node_overlap(s, Snapshot(1, 10, np.empty((0, 2)))) == 0.0


def test_star_hub_in_both_top_sets():
    assert eigen_node_overlap(star(), star(extra=[(1, 2)])) == 1.0


def test_kl_closed_form():
    assert np.isclose(kl_divergence([0.5, 0.5], [0.25, 0.75]),
                      0.5 * math.log(2) + 0.5 * math.log(2 / 3), atol=1e-8)
    assert np.isclose(kl_divergence([0.5, 0.5], [0.25, 0.75]), 0.1438, atol=1e-4)


def test_clustering_triangle_vs_path():
    tri = Snapshot.from_edges([(0, 1), (1, 2), (0, 2)])
    path = Snapshot.from_edges([(0, 1), (1, 2)], 3)
    assert clustering_re(tri, path) == 1.0


def test_density_k4_half():
    k4 = Snapshot.from_edges([(i, j) for i in range(4) for j in range(i + 1, 4)])
    half = Snapshot.from_edges([(0, 1), (1, 2), (2, 3)], 4)
    assert density(k4) == 1.0
    assert density_re(k4, half) == 0.5


def test_undefined_assortativity_is_flagged():
    cycle = Snapshot.from_edges([(0, 1), (1, 2), (2, 3), (0, 3)])
    assert math.isnan(assortativity(cycle))
    values = {mv.name: mv for mv in evaluate(cycle, star(4))}
    assert values["assortativity_re"].flagged
    assert values["assortativity_re"].value == abs(assortativity(star(4)))
    assert not values["density_re"].flagged


def test_relative_error_floor():
    assert relative_error(0.0, 0.0) == (0.0, False)
    assert relative_error(0.0, 1e-12)[0] == 1.0


@pytest.mark.parametrize("seed", range(30))
def test_scalar_metrics_match_networkx(seed):
    rng = np.random.default_rng(seed)
    s = random_snapshot(rng, int(rng.integers(5, 60)), int(rng.integers(5, 150)))
    g = to_nx(s)
    assert np.isclose(density(s), nx.density(g))
    t = transitivity(s)
    if not math.isnan(t):
        assert np.isclose(t, nx.transitivity(g))
    r = assortativity(s)
    if not math.isnan(r):
        assert np.isclose(r, nx.degree_assortativity_coefficient(g))


def test_isolated_nodes_never_crash():
    s = Snapshot.from_edges([(0, 1), (1, 2)], 3)
    base = {mv.name: mv.value for mv in evaluate(s, s)}
    padded = Snapshot(1, 50, s.edges)
    grown = {mv.name: mv.value for mv in evaluate(padded, padded)}
    assert set(grown) == set(METRICS)
    assert all(np.isfinite(v) for v in grown.values())
    assert density(padded) < density(s)
    assert base["density_re"] == grown["density_re"] == 0
    empty = Snapshot(1, 5, np.empty((0, 2)))
    assert all(np.isfinite(mv.value) for mv in evaluate(empty, empty))


@pytest.mark.parametrize("seed", range(10))
def test_overlap_invariant_under_relabeling(seed):
    rng = np.random.default_rng(seed)
    n = 150
    # heavy-tailed degrees keep the top set free of ties
    w = rng.pareto(2.0, n) + 1
    p = np.minimum(np.outer(w, w) / w.sum() * 2, 1)
    a = np.triu(rng.uniform(size=(n, n)) < p, 1)
    b = np.triu(rng.uniform(size=(n, n)) < p, 1)
    orig = Snapshot.from_edges(np.argwhere(a), n)
    syn = Snapshot.from_edges(np.argwhere(b), n)
    perm = rng.permutation(n)
    assert eigen_node_overlap(orig, syn) == eigen_node_overlap(
        Snapshot.from_edges(perm[orig.edges], n), Snapshot.from_edges(perm[syn.edges], n))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_metric_ranges(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 40))
    orig, syn = random_snapshot(rng, n), random_snapshot(rng, n)
    values = {mv.name: mv.value for mv in evaluate(orig, syn)}
    assert 0 <= values["eigen_overlap"] <= 1
    assert values["degree_kl"] >= 0
    for name in ("assortativity_re", "density_re", "clustering_re"):
        assert values[name] >= 0


def test_degree_kl_self_is_tiny():
    rng = np.random.default_rng(3)
    for _ in range(50):
        s = random_snapshot(rng)
        assert degree_kl(s, s) < 1e-8


def test_report_aggregates_constants():
    report = MetricsReport()
    for run in range(5):
        report.add(run, run, [MetricValue("density_re", 0.25, t) for t in range(1, 4)])
    assert report.aggregate() == {"density_re": (0.25, 0.0)}


def test_report_means_per_run_then_across_runs():
    report = MetricsReport()
    report.add(0, 0, [MetricValue("degree_kl", v, t) for t, v in enumerate([1.0, 3.0])])
    report.add(1, 1, [MetricValue("degree_kl", v, t) for t, v in enumerate([4.0, 6.0])])
    assert report.run_means("degree_kl").tolist() == [2.0, 5.0]
    assert report.aggregate()["degree_kl"] == (3.5, 1.5)


def test_unknown_metric_rejected():
    with pytest.raises(ValueError):
        evaluate(star(), star(), names=["diameter"])
