"""Full-network graph assembly, Personalized PageRank, and attribution-graph extraction.

Vertices are (layer, channel) pairs with a per-layer max-normalized
personalization from the aggregated activations; edges carry positive integer
weights from the aggregated influences. PageRank runs a fixed number of power
iterations over the (by default undirected) weighted walk; the per-class
attribution graph keeps, per layer, the minimal descending-score prefix whose
cumulative share reaches the extraction threshold.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .activations import AggregatedActivations
from .errors import ValidationError
from .influences import AggregatedInfluences

DEFAULT_DAMPING = 0.85
DEFAULT_ITERATIONS = 100
DEFAULT_EXTRACTION_FRACTION = 0.075


@dataclass
class FullNetworkGraph:
    class_id: int
    layer_names: list[str]
    layer_channels: list[int]
    personalization: list[np.ndarray]  # per layer, values in [0, 1]
    edges: list[tuple[int, int, int, int]]  # (dst_layer_idx, prev_ch, cur_ch, weight)

    @property
    def n_vertices(self) -> int:
        return sum(self.layer_channels)

    def layer_offsets(self) -> list[int]:
        offsets, total = [], 0
        for c in self.layer_channels:
            offsets.append(total)
            total += c
        return offsets


@dataclass
class AttributionVertex:
    layer: str
    channel: int
    pagerank: float
    activation_count: int


@dataclass
class AttributionEdge:
    src_layer: str
    src_channel: int
    dst_layer: str
    dst_channel: int
    count: int


@dataclass
class AttributionGraph:
    class_id: int
    layer_names: list[str]
    vertices: list[AttributionVertex]
    edges: list[AttributionEdge]
    params: dict = field(default_factory=dict)


def build_full_graph(
    a_per_layer: list[AggregatedActivations],
    i_per_layer: dict[int, AggregatedInfluences],
    class_id: int,
) -> FullNetworkGraph:
    """Assemble one class's full network graph from its aggregates."""
    layer_names = [a.layer for a in a_per_layer]
    for idx, agg in i_per_layer.items():
        if idx < 1 or idx >= len(a_per_layer) or agg.layer != layer_names[idx]:
            raise ValidationError(
                f"influence aggregate {agg.layer!r} does not match layer index {idx}"
            )
        if agg.cur_channels != a_per_layer[idx].n_channels:
            raise ValidationError(
                f"layer {agg.layer}: influence has {agg.cur_channels} channels, "
                f"activations have {a_per_layer[idx].n_channels}"
            )
    personalization = []
    for a in a_per_layer:
        row = a.counts[class_id].astype(np.float64)
        peak = row.max()
        personalization.append(row / peak if peak > 0 else np.zeros_like(row))
    edges = []
    for idx in sorted(i_per_layer):
        counts = i_per_layer[idx].counts[class_id]
        for i, j in zip(*np.nonzero(counts)):
            edges.append((idx, int(i), int(j), int(counts[i, j])))
    return FullNetworkGraph(
        class_id=class_id,
        layer_names=layer_names,
        layer_channels=[a.n_channels for a in a_per_layer],
        personalization=personalization,
        edges=edges,
    )


def personalized_pagerank(
    graph: FullNetworkGraph,
    damping: float = DEFAULT_DAMPING,
    iterations: int = DEFAULT_ITERATIONS,
    directed: bool = False,
) -> np.ndarray:
    """Fixed-iteration power method; returns one score per vertex, summing to 1.

    Edges are treated as undirected by default so personalization mass can
    diffuse both up and down the layer stack; dangling mass is redistributed
    to the teleport distribution.
    """
    if not 0.0 < damping < 1.0:
        raise ValidationError(f"damping must be in (0, 1), got {damping}")
    if iterations < 1:
        raise ValidationError(f"iterations must be >= 1, got {iterations}")
    n = graph.n_vertices
    offsets = graph.layer_offsets()
    teleport = np.concatenate([p for p in graph.personalization]).astype(np.float64)
    total = teleport.sum()
    if total <= 0.0:
        raise ValidationError("personalization is all zero; nothing to teleport to")
    teleport /= total

    src_list, dst_list, w_list = [], [], []
    for layer_idx, i, j, weight in graph.edges:
        if weight < 1:
            raise ValidationError(f"edge weight must be >= 1, got {weight}")
        u = offsets[layer_idx - 1] + i
        v = offsets[layer_idx] + j
        src_list.append(u)
        dst_list.append(v)
        w_list.append(float(weight))
        if not directed:
            src_list.append(v)
            dst_list.append(u)
            w_list.append(float(weight))
    src = np.array(src_list, dtype=np.int64)
    dst = np.array(dst_list, dtype=np.int64)
    w = np.array(w_list, dtype=np.float64)

    out_weight = np.zeros(n, dtype=np.float64)
    np.add.at(out_weight, src, w)
    dangling = out_weight == 0.0

    p = teleport.copy()
    for _ in range(iterations):
        flow = np.zeros(n, dtype=np.float64)
        if src.size:
            np.add.at(flow, dst, p[src] / out_weight[src] * w)
        dangling_mass = p[dangling].sum()
        p = damping * (flow + dangling_mass * teleport) + (1.0 - damping) * teleport
    return p


def extract_attribution_graph(
    graph: FullNetworkGraph,
    scores: np.ndarray,
    a_per_layer: list[AggregatedActivations],
    fraction: float = DEFAULT_EXTRACTION_FRACTION,
    damping: float = DEFAULT_DAMPING,
    iterations: int = DEFAULT_ITERATIONS,
) -> AttributionGraph:
    """Keep per layer the smallest descending-score prefix reaching the
    cumulative-share threshold, then drop every edge missing an endpoint."""
    if not 0.0 < fraction < 1.0:
        raise ValidationError(f"fraction must be in (0, 1), got {fraction}")
    offsets = graph.layer_offsets()
    kept: list[set[int]] = []
    vertices = []
    for li, (name, channels) in enumerate(zip(graph.layer_names, graph.layer_channels)):
        layer_scores = np.asarray(scores[offsets[li] : offsets[li] + channels], dtype=np.float64)
        layer_sum = layer_scores.sum()
        keep: set[int] = set()
        if layer_sum > 0.0:
            order = np.argsort(-layer_scores, kind="stable")
            cumulative = 0.0
            for ch in order:
                keep.add(int(ch))
                cumulative += layer_scores[ch]
                if cumulative >= fraction * layer_sum:
                    break
        kept.append(keep)
        for ch in sorted(keep):
            vertices.append(
                AttributionVertex(
                    layer=name,
                    channel=ch,
                    pagerank=float(layer_scores[ch]),
                    activation_count=int(a_per_layer[li].counts[graph.class_id][ch]),
                )
            )
    edges = []
    for layer_idx, i, j, weight in graph.edges:
        if i in kept[layer_idx - 1] and j in kept[layer_idx]:
            edges.append(
                AttributionEdge(
                    src_layer=graph.layer_names[layer_idx - 1],
                    src_channel=i,
                    dst_layer=graph.layer_names[layer_idx],
                    dst_channel=j,
                    count=weight,
                )
            )
    return AttributionGraph(
        class_id=graph.class_id,
        layer_names=list(graph.layer_names),
        vertices=vertices,
        edges=edges,
        params={"fraction": fraction, "damping": damping, "iterations": iterations},
    )
