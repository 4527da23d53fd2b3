import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dpstream.community import CommunityPartition
from dpstream.datasets import planted_partition
from dpstream.dp import NoiseSource, ZeroNoise
from dpstream.graph import Snapshot
from dpstream.perturbation import extract
from dpstream.reconstruction import (edge_delta, expected_cross, expected_cross_matrix, gen_inter,
                                     gen_intra, inter_block_probs, inter_prob, intra_prob,
                                     post_process, reconstruct)


def assert_simple(edges, n):
    edges = np.asarray(edges).reshape(-1, 2)
    assert np.all(edges[:, 0] != edges[:, 1])
    assert np.all((edges >= 0) & (edges < n))
    canon = {tuple(sorted(map(int, e))) for e in edges}
    assert len(canon) == len(edges)


def test_intra_prob_examples():
    assert np.isclose(intra_prob(2, 2, 6), 2 / 3)
    assert intra_prob(0, 5, 6) == 0
    assert intra_prob(10, 10, 20) == 1.0
    assert intra_prob(1, 1, 0) == 0


def test_gen_intra_no_degrees_no_edges():
    part = CommunityPartition(np.array([0, 0, 0, 1]))
    assert len(gen_intra(part, np.zeros(4), NoiseSource(0))) == 0


def test_gen_intra_singleton_community():
    part = CommunityPartition(np.array([0, 1, 2]))
    assert len(gen_intra(part, np.array([3.0, 3.0, 3.0]), NoiseSource(0))) == 0


def test_gen_intra_mean_edge_count():
    part = CommunityPartition(np.zeros(3, dtype=int))
    d = np.array([2.0, 2.0, 2.0])
    ns = NoiseSource(7)
    counts = [len(gen_intra(part, d, ns)) for _ in range(10_000)]
    assert abs(np.mean(counts) - 2.0) <= 0.05


def test_expected_cross_examples():
    assert expected_cross(4, 3, 6) == 2
    assert expected_cross(4, 0, 6) == 0
    assert expected_cross(4, 2, 0) == 0
    # one other community gets all outward mass
    v = np.array([[0.0, 5.0], [5.0, 0.0]])
    e = expected_cross_matrix(CommunityPartition(np.array([0, 0, 1])), np.array([3.0, 1.0, 4.0]), v)
    assert e.tolist() == [[0, 3], [0, 1], [4, 0]]


def test_inter_prob_examples():
    # single node in C_b cancels
    assert np.isclose(inter_prob(0.4, 2.5, 2.5), 0.4)
    assert inter_prob(0, 3, 3) == 0
    assert inter_prob(1, 1, 0) == 0
    c, k = 1.5, 4
    p = inter_block_probs(np.full(3, c), np.full(k, c))
    assert np.allclose(p, c / k)


def test_gen_inter_zero_v_no_edges():
    part = CommunityPartition(np.array([0, 0, 1, 1]))
    assert len(gen_inter(part, np.ones(4), np.zeros((2, 2)), NoiseSource(0))) == 0


def test_gen_inter_two_single_nodes():
    part = CommunityPartition(np.array([0, 1]))
    v = np.array([[0.0, 1.0], [1.0, 0.0]])
    for seed in range(20):
        edges = gen_inter(part, np.array([1.0, 1.0]), v, NoiseSource(seed))
        assert sorted(edges[0].tolist()) == [0, 1] and len(edges) == 1


def test_gen_inter_mean_matches_probability_sum():
    part = CommunityPartition(np.array([0, 0, 0, 1, 1, 2]))
    d_out = np.array([1.0, 2.0, 0.5, 3.0, 1.0, 2.0])
    v = np.array([[0, 2, 1], [2, 0, 1], [1, 1, 0]], dtype=float)
    e = expected_cross_matrix(part, d_out, v)
    members = part.members()
    p = inter_block_probs(e[members[0], 1], e[members[1], 0])
    mu, var = p.sum(), (p * (1 - p)).sum()
    ns = NoiseSource(11)
    counts = []
    for _ in range(10_000):
        edges = gen_inter(part, d_out, v, ns)
        la, lb = part.labels[edges[:, 0]], part.labels[edges[:, 1]]
        counts.append(np.sum(((la == 0) & (lb == 1)) | ((la == 1) & (lb == 0))))
    assert abs(np.mean(counts) - mu) <= 3 * np.sqrt(var / 10_000)


def test_post_process_no_change_when_on_target():
    part = CommunityPartition(np.array([0, 0, 1, 1]))
    edges = np.array([[0, 1], [2, 3]])
    out = post_process(edges, part, np.ones(4), np.zeros(4), 2.0, NoiseSource(0))
    assert {tuple(e) for e in out.tolist()} == {(0, 1), (2, 3)}


def test_post_process_fills_empty_graph():
    part = CommunityPartition(np.array([0, 0, 0, 0]))
    for seed in range(20):
        out = post_process(np.empty((0, 2), dtype=int), part, np.full(4, 1.5), np.zeros(4),
                           3.0, NoiseSource(seed))
        assert len(out) == 3
        assert_simple(out, 4)


def test_post_process_complete_graph_saturated():
    n = 5
    edges = np.array([(i, j) for i in range(n) for j in range(i + 1, n)])
    part = CommunityPartition(np.zeros(n, dtype=int))
    out = post_process(edges, part, np.full(n, 10.0), np.zeros(n), 20.0, NoiseSource(0))
    assert len(out) == len(edges)


def test_post_process_removes_down_to_target():
    n = 6
    edges = np.array([(i, j) for i in range(n) for j in range(i + 1, n)])
    part = CommunityPartition(np.zeros(n, dtype=int))
    out = post_process(edges, part, np.full(n, 1.0), np.zeros(n), 4.0, NoiseSource(2))
    assert len(out) == 4
    assert_simple(out, n)


def test_edge_delta_has_two_entries_per_node():
    part = CommunityPartition(np.array([0, 0, 1]))
    d = edge_delta(np.array([[0, 1], [1, 2]]), part, np.array([2.0, 1, 0]), np.array([0.0, 1, 3]), 4.6)
    assert d.delta_nodes.tolist() == [1, 0, 0, 0, 0, 2]
    assert d.delta_edges == 3


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 30), st.integers(0, 2**31 - 1), st.floats(0, 80))
def test_post_process_monotone_and_simple(n, seed, m_pert):
    rng = np.random.default_rng(seed)
    part = CommunityPartition.from_labels(rng.integers(0, 3, n))
    d_in = rng.uniform(0, 6, n)
    d_out = rng.uniform(0, 4, n)
    k = part.num_communities
    v = rng.uniform(0, 5, (k, k))
    v = np.triu(v, 1) + np.triu(v, 1).T
    ns = NoiseSource(seed)
    raw = np.concatenate([gen_intra(part, d_in, ns), gen_inter(part, d_out, v, ns)])
    assert_simple(raw, n)
    out = post_process(raw, part, d_in, d_out, m_pert, ns)
    assert_simple(out, n)
    target = max(round(m_pert), 0)
    assert abs(len(out) - target) <= abs(len(raw) - target)


@settings(max_examples=200, deadline=None)
@given(st.floats(-50, 50), st.floats(-50, 50), st.floats(-100, 100))
def test_probabilities_in_unit_interval(a, b, c):
    assert 0 <= intra_prob(a, b, c) <= 1
    assert 0 <= inter_prob(a, b, c) <= 1


def test_noiseless_round_trip_degrees():
    s = planted_partition([25, 25], 0.3, 0.03, seed=4)
    labels = np.repeat([0, 1], 25)
    part = CommunityPartition(labels)
    prof, pairs = extract(s, part)
    m = len(s.edges)
    ns = ZeroNoise(0)
    total = np.zeros(s.num_nodes)
    for _ in range(200):
        edges = reconstruct(part, prof.d_in, prof.d_out, pairs, m, ns)
        assert_simple(edges, s.num_nodes)
        assert abs(len(edges) - m) <= 2
        total += np.bincount(edges.ravel(), minlength=s.num_nodes)
    mean = total / 200
    true = prof.d_in + prof.d_out
    rel = np.abs(mean - true) / np.maximum(true, 1)
    assert rel.max() <= 0.15


@pytest.mark.parametrize("post", [True, False])
def test_reconstruct_is_seed_deterministic(post):
    s = planted_partition([10, 10], 0.4, 0.05, seed=1)
    part = CommunityPartition(np.repeat([0, 1], 10))
    prof, pairs = extract(s, part)
    a = reconstruct(part, prof.d_in, prof.d_out, pairs, len(s.edges), NoiseSource(3), post)
    b = reconstruct(part, prof.d_in, prof.d_out, pairs, len(s.edges), NoiseSource(3), post)
    assert np.array_equal(a, b)
