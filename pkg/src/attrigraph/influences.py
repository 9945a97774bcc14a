"""Channel-pair influence computation and per-class influence aggregation.

The influence of a previous-layer channel i on channel j is the spatial max
of the 2D convolution of channel i with the matching kernel slice. Depth-2
branches collapse to direct prev -> cur weights by max-min (widest path)
composition through the inner channels. Per column, the top-k influences per
image are counted into a class x prev x cur tensor.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ShapeMismatchError, ValidationError
from .model import ConvStep, ForwardTrace, ModelManifest
from .tensors import Kernel4, Tensor3, conv2d_single

DEFAULT_TOP_K = 5
UNCONNECTED = -np.inf


@dataclass
class AggregatedInfluences:
    layer: str
    counts: np.ndarray  # (n_classes, prev_channels, cur_channels) non-negative ints
    k: int

    @property
    def n_classes(self) -> int:
        return self.counts.shape[0]

    @property
    def prev_channels(self) -> int:
        return self.counts.shape[1]

    @property
    def cur_channels(self) -> int:
        return self.counts.shape[2]


def influence_pair(prev: Tensor3, kernel: Kernel4, i: int, j: int) -> float:
    """Spatial max of channel i convolved with kernel slice (i, j)."""
    if not 0 <= i < prev.channels:
        raise ValidationError(f"prev channel {i} out of range (has {prev.channels})")
    if not 0 <= j < kernel.out_channels:
        raise ValidationError(f"output channel {j} out of range (has {kernel.out_channels})")
    conv = conv2d_single(prev.data[:, :, i], kernel.data[:, :, i, j])
    return float(conv.max())


def influence_matrix_one_hop(prev: Tensor3, step: ConvStep) -> np.ndarray:
    """Dense (prev_channels, out_channels) influence block for one conv step."""
    k = step.kernel
    if prev.channels != k.in_channels:
        raise ShapeMismatchError(
            f"input has {prev.channels} channels, kernel expects {k.in_channels}"
        )
    block = np.empty((prev.channels, k.out_channels), dtype=np.float64)
    for i in range(prev.channels):
        for j in range(k.out_channels):
            block[i, j] = influence_pair(prev, k, i, j)
    return block


def merge_two_hop(block1: np.ndarray, block2: np.ndarray) -> np.ndarray:
    """Widest-path composition: out(i,j) = max over inner k of min(b1(i,k), b2(k,j))."""
    block1 = np.asarray(block1, dtype=np.float64)
    block2 = np.asarray(block2, dtype=np.float64)
    if block1.ndim != 2 or block2.ndim != 2 or block1.shape[1] != block2.shape[0]:
        raise ShapeMismatchError(
            f"cannot merge blocks of shapes {block1.shape} and {block2.shape}"
        )
    return np.minimum(block1[:, :, None], block2[None, :, :]).max(axis=1)


def influence_matrix(trace: ForwardTrace, model: ModelManifest, layer_index: int) -> np.ndarray:
    """Full (prev_channels, cur_channels) influence matrix for one image.

    Pairs not connected by any branch stay at the -inf sentinel. The first
    primary layer has no previous layer and therefore no influence matrix.
    """
    if layer_index < 1 or layer_index >= len(model.layers):
        raise ValidationError(f"layer index {layer_index} has no previous primary layer")
    layer = model.layers[layer_index]
    prev_layer = model.layers[layer_index - 1]
    prev = trace.layer_outputs[prev_layer.name]
    matrix = np.full((prev.channels, layer.out_channels), UNCONNECTED, dtype=np.float64)
    for bi, branch in enumerate(layer.branches):
        if len(branch.steps) == 1:
            block = influence_matrix_one_hop(prev, branch.steps[0])
        else:
            inner = trace.inner.get((layer.name, bi))
            if inner is None:
                raise ValidationError(
                    f"missing inner activation for layer {layer.name} branch {bi}"
                )
            block1 = influence_matrix_one_hop(prev, branch.steps[0])
            block2 = influence_matrix_one_hop(inner, branch.steps[1])
            block = merge_two_hop(block1, block2)
        lo = branch.channel_offset
        matrix[:, lo : lo + branch.out_channels] = block
    return matrix


def top_influences_column(column: np.ndarray, k: int) -> list[int]:
    """Indices of the k largest finite entries; ties go to the lower index."""
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    column = np.asarray(column, dtype=np.float64)
    order = np.argsort(-column, kind="stable")
    picked = [int(i) for i in order if np.isfinite(column[i])][:k]
    return sorted(picked)


def aggregate_influences(
    traces: list[ForwardTrace],
    model: ModelManifest,
    layer_index: int,
    labels: list[int],
    k: int = DEFAULT_TOP_K,
    blocklist_prev: set[int] | None = None,
    blocklist_cur: set[int] | None = None,
) -> AggregatedInfluences:
    """Count, per class and output channel, the top-k most influential prev channels."""
    if len(traces) != len(labels):
        raise ValidationError(f"{len(traces)} traces but {len(labels)} labels")
    blocklist_prev = set(blocklist_prev or ())
    blocklist_cur = set(blocklist_cur or ())
    layer = model.layers[layer_index]
    prev_channels = model.layers[layer_index - 1].out_channels
    n_classes = model.n_classes
    counts = np.zeros((n_classes, prev_channels, layer.out_channels), dtype=np.int64)
    for trace, label in zip(traces, labels):
        matrix = influence_matrix(trace, model, layer_index)
        if blocklist_prev:
            matrix[sorted(blocklist_prev), :] = UNCONNECTED
        for j in range(layer.out_channels):
            if j in blocklist_cur:
                continue
            for i in top_influences_column(matrix[:, j], k):
                counts[label, i, j] += 1
    return AggregatedInfluences(layer=layer.name, counts=counts, k=k)
