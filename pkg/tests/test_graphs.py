import numpy as np
import pytest

from attrigraph.activations import AggregatedActivations
from attrigraph.errors import ValidationError
from attrigraph.graphs import (
    AttributionGraph,
    FullNetworkGraph,
    build_full_graph,
    extract_attribution_graph,
    personalized_pagerank,
)
from attrigraph.influences import AggregatedInfluences


def dense_pagerank_oracle(graph, damping, iterations, directed=False):
    """Independent dense-matrix power iteration."""
    n = graph.n_vertices
    offsets = graph.layer_offsets()
    v = np.concatenate(graph.personalization).astype(np.float64)
    v /= v.sum()
    adj = np.zeros((n, n))
    for layer_idx, i, j, w in graph.edges:
        u = offsets[layer_idx - 1] + i
        t = offsets[layer_idx] + j
        adj[t, u] += w
        if not directed:
            adj[u, t] += w
    out = adj.sum(axis=0)
    M = np.zeros((n, n))
    nonzero = out > 0
    M[:, nonzero] = adj[:, nonzero] / out[nonzero]
    p = v.copy()
    for _ in range(iterations):
        dangling = p[~nonzero].sum()
        p = damping * (M @ p + dangling * v) + (1 - damping) * v
    return p


def random_layered_graph(rng, n_layers=3, min_ch=5, max_ch=18):
    channels = [int(rng.integers(min_ch, max_ch + 1)) for _ in range(n_layers)]
    personalization = [rng.uniform(0, 1, size=c) for c in channels]
    for p in personalization:
        p /= p.max()
    edges = []
    for li in range(1, n_layers):
        for i in range(channels[li - 1]):
            for j in range(channels[li]):
                if rng.random() < 0.4:
                    edges.append((li, i, j, int(rng.integers(1, 20))))
    return FullNetworkGraph(
        class_id=0,
        layer_names=[f"l{i}" for i in range(n_layers)],
        layer_channels=channels,
        personalization=personalization,
        edges=edges,
    )


def make_aggs(a_counts_per_layer, i_counts, k=5):
    a_per_layer = [
        AggregatedActivations(layer=f"l{idx}", counts=np.asarray(c, dtype=np.int64), method="m1:5")
        for idx, c in enumerate(a_counts_per_layer)
    ]
    i_per_layer = {
        idx: AggregatedInfluences(layer=f"l{idx}", counts=np.asarray(c, dtype=np.int64), k=k)
        for idx, c in i_counts.items()
    }
    return a_per_layer, i_per_layer


class TestBuildFullGraph:
    def test_single_nonzero_entry_personalization(self):
        a, i = make_aggs(
            [[[0, 4, 0]], [[0, 0]]],
            {1: [np.zeros((3, 2), dtype=int)]},
        )
        g = build_full_graph(a, i, 0)
        assert g.personalization[0].tolist() == [0.0, 1.0, 0.0]
        assert g.personalization[1].tolist() == [0.0, 0.0]

    def test_edge_count_equals_nonzero_triplets(self):
        rng = np.random.default_rng(40)
        counts = rng.integers(0, 3, size=(1, 4, 3))
        a, i = make_aggs(
            [rng.integers(0, 5, size=(1, 4)), rng.integers(0, 5, size=(1, 3))],
            {1: counts},
        )
        g = build_full_graph(a, i, 0)
        assert len(g.edges) == int(np.count_nonzero(counts[0]))

    def test_personalization_maxima_are_one(self, toy_bundle_aggs):
        a_per_layer, i_per_layer = toy_bundle_aggs
        for class_id in range(5):
            g = build_full_graph(a_per_layer, i_per_layer, class_id)
            for p in g.personalization:
                if p.max() > 0:
                    assert p.max() == 1.0

    def test_layer_mismatch(self):
        a, i = make_aggs([[[1]], [[1]]], {1: [np.zeros((1, 1), dtype=int)]})
        i[1].layer = "wrong"
        with pytest.raises(ValidationError):
            build_full_graph(a, i, 0)


class TestPersonalizedPagerank:
    def test_two_vertex_symmetry(self):
        g = FullNetworkGraph(
            class_id=0,
            layer_names=["a", "b"],
            layer_channels=[1, 1],
            personalization=[np.array([1.0]), np.array([1.0])],
            edges=[(1, 0, 0, 1)],
        )
        scores = personalized_pagerank(g)
        assert np.allclose(scores, [0.5, 0.5], atol=1e-12)

    def test_star_center_dominates(self):
        g = FullNetworkGraph(
            class_id=0,
            layer_names=["a", "b"],
            layer_channels=[1, 5],
            personalization=[np.array([1.0]), np.full(5, 0.01)],
            edges=[(1, 0, j, 1) for j in range(5)],
        )
        scores = personalized_pagerank(g)
        assert scores[0] > scores[1:].max()

    def test_sums_to_one(self):
        rng = np.random.default_rng(41)
        for _ in range(5):
            g = random_layered_graph(rng)
            scores = personalized_pagerank(g)
            assert abs(scores.sum() - 1.0) <= 1e-9
            assert np.all(scores >= 0)

    def test_matches_dense_oracle(self):
        rng = np.random.default_rng(42)
        for _ in range(10):
            g = random_layered_graph(rng)
            scores = personalized_pagerank(g, damping=0.85, iterations=100)
            oracle = dense_pagerank_oracle(g, 0.85, 100)
            assert np.max(np.abs(scores - oracle)) <= 1e-8

    def test_directed_mode_matches_oracle(self):
        rng = np.random.default_rng(43)
        g = random_layered_graph(rng)
        scores = personalized_pagerank(g, directed=True)
        oracle = dense_pagerank_oracle(g, 0.85, 100, directed=True)
        assert np.max(np.abs(scores - oracle)) <= 1e-8

    def test_uniform_symmetric_graph(self):
        # A 2-layer complete bipartite graph with unit weights and uniform
        # personalization is vertex-transitive: scores must be uniform.
        n = 4
        g = FullNetworkGraph(
            class_id=0,
            layer_names=["a", "b"],
            layer_channels=[n, n],
            personalization=[np.ones(n), np.ones(n)],
            edges=[(1, i, j, 1) for i in range(n) for j in range(n)],
        )
        scores = personalized_pagerank(g)
        assert np.allclose(scores, 1.0 / (2 * n), atol=1e-12)

    def test_edge_weight_scale_invariance(self):
        rng = np.random.default_rng(44)
        g = random_layered_graph(rng)
        scaled = FullNetworkGraph(
            class_id=0,
            layer_names=g.layer_names,
            layer_channels=g.layer_channels,
            personalization=g.personalization,
            edges=[(li, i, j, w * 7) for li, i, j, w in g.edges],
        )
        a = personalized_pagerank(g)
        b = personalized_pagerank(scaled)
        assert np.max(np.abs(a - b)) <= 1e-12

    def test_all_zero_personalization(self):
        g = FullNetworkGraph(
            class_id=0,
            layer_names=["a", "b"],
            layer_channels=[1, 1],
            personalization=[np.array([0.0]), np.array([0.0])],
            edges=[(1, 0, 0, 1)],
        )
        with pytest.raises(ValidationError):
            personalized_pagerank(g)


class TestExtraction:
    def uniform_graph(self, n=100):
        return FullNetworkGraph(
            class_id=0,
            layer_names=["only", "next"],
            layer_channels=[n, 1],
            personalization=[np.ones(n), np.array([1.0])],
            edges=[],
        )

    def test_dominant_vertex_alone(self):
        g = FullNetworkGraph(
            class_id=0,
            layer_names=["a", "b"],
            layer_channels=[3, 1],
            personalization=[np.ones(3), np.array([1.0])],
            edges=[],
        )
        scores = np.array([0.99, 0.005, 0.005, 1.0])
        a = [
            AggregatedActivations(layer="a", counts=np.ones((1, 3), dtype=np.int64), method="m1:1"),
            AggregatedActivations(layer="b", counts=np.ones((1, 1), dtype=np.int64), method="m1:1"),
        ]
        out = extract_attribution_graph(g, scores, a, fraction=0.075)
        kept_a = [v for v in out.vertices if v.layer == "a"]
        assert len(kept_a) == 1 and kept_a[0].channel == 0

    def test_uniform_100_vertices_keeps_8(self):
        g = self.uniform_graph(100)
        scores = np.concatenate([np.full(100, 0.005), [0.5]])
        a = [
            AggregatedActivations(layer="only", counts=np.ones((1, 100), dtype=np.int64), method="m1:1"),
            AggregatedActivations(layer="next", counts=np.ones((1, 1), dtype=np.int64), method="m1:1"),
        ]
        out = extract_attribution_graph(g, scores, a, fraction=0.075)
        assert len([v for v in out.vertices if v.layer == "only"]) == 8

    def test_monotone_in_fraction(self):
        rng = np.random.default_rng(45)
        for _ in range(20):
            n = int(rng.integers(5, 30))
            scores_layer = rng.uniform(0, 1, size=n)
            g = FullNetworkGraph(
                class_id=0,
                layer_names=["x", "y"],
                layer_channels=[n, 1],
                personalization=[np.ones(n), np.array([1.0])],
                edges=[],
            )
            a = [
                AggregatedActivations(layer="x", counts=np.ones((1, n), dtype=np.int64), method="m1:1"),
                AggregatedActivations(layer="y", counts=np.ones((1, 1), dtype=np.int64), method="m1:1"),
            ]
            scores = np.concatenate([scores_layer, [1.0]])
            previous = set()
            for frac in (0.05, 0.2, 0.5, 0.8, 0.95):
                out = extract_attribution_graph(g, scores, a, fraction=frac)
                kept = {v.channel for v in out.vertices if v.layer == "x"}
                assert previous <= kept
                previous = kept

    def test_toy_class_graphs_structural_invariants(self, toy_bundle_aggs):
        a_per_layer, i_per_layer = toy_bundle_aggs
        for class_id in range(5):
            g = build_full_graph(a_per_layer, i_per_layer, class_id)
            scores = personalized_pagerank(g)
            out = extract_attribution_graph(g, scores, a_per_layer)
            kept = {(v.layer, v.channel) for v in out.vertices}
            full_edges = {
                (g.layer_names[li - 1], i, g.layer_names[li], j): w
                for li, i, j, w in g.edges
            }
            layer_index = {name: idx for idx, name in enumerate(g.layer_names)}
            for e in out.edges:
                # endpoints kept
                assert (e.src_layer, e.src_channel) in kept
                assert (e.dst_layer, e.dst_channel) in kept
                # subgraph of the full graph, weights preserved
                assert full_edges[(e.src_layer, e.src_channel, e.dst_layer, e.dst_channel)] == e.count
                # layered: spans exactly one layer gap
                assert layer_index[e.dst_layer] - layer_index[e.src_layer] == 1
            assert isinstance(out, AttributionGraph)
            assert len(out.vertices) >= len(g.layer_names)  # >= 1 vertex per layer
