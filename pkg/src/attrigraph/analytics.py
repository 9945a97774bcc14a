"""Class-level summaries: similarity, accuracy, probability histograms,
top-activating examples, and the layer-chained 2D class embedding."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import orthogonal_procrustes

from .activations import AggregatedActivations, ChannelMaxMatrix
from .errors import ValidationError
from .model import ForwardTrace

HISTOGRAM_BINS = 10
DEFAULT_TOP_EXAMPLES = 10
EMBEDDING_METHOD = "pca-procrustes"


@dataclass
class ClassSummary:
    class_id: int
    name: str
    top1_accuracy: float
    histogram: list[int]  # 10 uniform bins over [0, 1] of p(true class)
    image_count: int


def class_similarity(a: AggregatedActivations, class_a: int, class_b: int) -> float:
    """Cosine similarity of two aggregated-activation rows; zero rows give 0."""
    u = a.counts[class_a].astype(np.float64)
    v = a.counts[class_b].astype(np.float64)
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return float(u @ v / (nu * nv))


def similarity_matrix(a: AggregatedActivations) -> np.ndarray:
    n = a.n_classes
    sim = np.zeros((n, n), dtype=np.float64)
    for i in range(n):
        for j in range(n):
            sim[i, j] = class_similarity(a, i, j)
    return sim


def rank_classes(a: AggregatedActivations, selected: int) -> list[int]:
    """All class ids, selected first, then by descending similarity (ties: lower id)."""
    if not 0 <= selected < a.n_classes:
        raise ValidationError(f"class {selected} out of range (have {a.n_classes})")
    others = [c for c in range(a.n_classes) if c != selected]
    others.sort(key=lambda c: (-class_similarity(a, selected, c), c))
    return [selected] + others


def class_summaries(
    traces: list[ForwardTrace], labels: list[int], class_names: list[str]
) -> list[ClassSummary]:
    """Top-1 accuracy and true-class probability histogram per class."""
    n_classes = len(class_names)
    correct = np.zeros(n_classes, dtype=np.int64)
    total = np.zeros(n_classes, dtype=np.int64)
    hists = np.zeros((n_classes, HISTOGRAM_BINS), dtype=np.int64)
    for trace, label in zip(traces, labels):
        probs = trace.probabilities
        total[label] += 1
        if int(np.argmax(probs)) == label:
            correct[label] += 1
        p_true = float(probs[label])
        hists[label, min(int(p_true * HISTOGRAM_BINS), HISTOGRAM_BINS - 1)] += 1
    return [
        ClassSummary(
            class_id=c,
            name=class_names[c],
            top1_accuracy=float(correct[c] / total[c]) if total[c] else 0.0,
            histogram=[int(x) for x in hists[c]],
            image_count=int(total[c]),
        )
        for c in range(n_classes)
    ]


def _pca_2d(matrix: np.ndarray) -> np.ndarray:
    """Deterministic 2D PCA: center, project to the top-2 right singular
    vectors, orient each component so its largest-|loading| entry is positive."""
    centered = matrix - matrix.mean(axis=0, keepdims=True)
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    components = np.zeros((2, matrix.shape[1]), dtype=np.float64)
    available = min(2, vt.shape[0])
    components[:available] = vt[:available]
    for c in range(available):
        pivot = int(np.argmax(np.abs(components[c])))
        if components[c, pivot] < 0:
            components[c] = -components[c]
    return centered @ components.T


def embed_classes(a_per_layer: list[AggregatedActivations]) -> dict[str, np.ndarray]:
    """Per-layer 2D class embedding, each layer rigidly aligned to the previous.

    Rows of each layer's count matrix are L2-normalized before projection so
    class size does not dominate geometry.
    """
    if not a_per_layer:
        raise ValidationError("no aggregated activations provided")
    if a_per_layer[0].n_classes < 2:
        raise ValidationError(
            f"embedding needs >= 2 classes, got {a_per_layer[0].n_classes}"
        )
    embeddings: dict[str, np.ndarray] = {}
    previous = None
    for a in a_per_layer:
        m = a.counts.astype(np.float64)
        norms = np.linalg.norm(m, axis=1, keepdims=True)
        norms[norms == 0.0] = 1.0
        coords = _pca_2d(m / norms)
        if previous is not None:
            rotation, _ = orthogonal_procrustes(coords, previous)
            coords = coords @ rotation
        embeddings[a.layer] = coords
        previous = coords
    return embeddings


def top_examples(z: ChannelMaxMatrix, channel: int, k: int = DEFAULT_TOP_EXAMPLES) -> list[int]:
    """Image ids with the k largest Z values for a channel (ties: lower id)."""
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    if not 0 <= channel < z.n_channels:
        raise ValidationError(f"channel {channel} out of range (have {z.n_channels})")
    column = z.values[:, channel]
    order = np.argsort(-column, kind="stable")
    return [int(z.image_ids[i]) for i in order[:k]]
