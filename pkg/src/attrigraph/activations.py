"""Channel-max extraction and per-class aggregated-activation counting.

Z holds one row per image of per-channel spatial maxima; aggregation turns it
into class x channel counts of how often each channel ranks among an image's
top channels, by fixed top-k ("m1") or cumulative-weight threshold ("m2").
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .model import ForwardTrace
from .tensors import channel_max

DEFAULT_M2_FRACTION = 0.03


@dataclass
class ChannelMaxMatrix:
    layer: str
    values: np.ndarray  # (n_images, n_channels)
    image_ids: list[int]
    labels: list[int]

    @property
    def n_images(self) -> int:
        return self.values.shape[0]

    @property
    def n_channels(self) -> int:
        return self.values.shape[1]


@dataclass
class AggregatedActivations:
    layer: str
    counts: np.ndarray  # (n_classes, n_channels) non-negative ints
    method: str  # "m1:<k>" or "m2:<fraction>"
    blocklist: list[int] = field(default_factory=list)

    @property
    def n_classes(self) -> int:
        return self.counts.shape[0]

    @property
    def n_channels(self) -> int:
        return self.counts.shape[1]


def build_channel_max(
    traces: list[ForwardTrace | None], layer: str, labels: list[int]
) -> ChannelMaxMatrix:
    """Stack per-image channel maxima for one layer into a Z matrix."""
    if not traces:
        raise ValidationError("empty corpus: no traces provided")
    missing = [i for i, t in enumerate(traces) if t is None or layer not in t.layer_outputs]
    if missing:
        raise ValidationError(f"missing traces for layer {layer!r}: image ids {missing}")
    if len(labels) != len(traces):
        raise ValidationError(f"{len(traces)} traces but {len(labels)} labels")
    rows = [channel_max(t.layer_outputs[layer]) for t in traces]
    return ChannelMaxMatrix(
        layer=layer,
        values=np.stack(rows).astype(np.float64),
        image_ids=list(range(len(traces))),
        labels=list(labels),
    )


def top_channels_m1(row: np.ndarray, k: int) -> list[int]:
    """Indices of the k largest values; ties go to the lower channel index."""
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    order = np.argsort(-np.asarray(row, dtype=np.float64), kind="stable")
    return sorted(int(i) for i in order[:k])


def top_channels_m2(row: np.ndarray, fraction: float) -> list[int]:
    """Channels in descending normalized weight until the cumulative sum
    first reaches the threshold; the crossing channel is included.

    An all-zero (or non-positive-sum) row selects nothing.
    """
    if not 0.0 < fraction < 1.0:
        raise ValidationError(f"fraction must be in (0, 1), got {fraction}")
    row = np.asarray(row, dtype=np.float64)
    total = row.sum()
    if total <= 0.0:
        return []
    normalized = row / total
    order = np.argsort(-normalized, kind="stable")
    selected = []
    cumulative = 0.0
    for idx in order:
        selected.append(int(idx))
        cumulative += normalized[idx]
        if cumulative >= fraction:
            break
    return sorted(selected)


def select_channels(row: np.ndarray, method: str, k: float, blocklist: set[int]) -> list[int]:
    """Apply the blocklist then the chosen per-image selection rule."""
    row = np.asarray(row, dtype=np.float64)
    if blocklist:
        row = row.copy()
        row[sorted(blocklist)] = 0.0
    if method == "m1":
        return top_channels_m1(row, int(k))
    if method == "m2":
        return top_channels_m2(row, float(k))
    raise ValidationError(f"unknown aggregation method {method!r}")


def aggregate_activations(
    z: ChannelMaxMatrix,
    n_classes: int,
    method: str = "m2",
    k: float = DEFAULT_M2_FRACTION,
    blocklist: set[int] | None = None,
) -> AggregatedActivations:
    """Count, per class and channel, how many images selected the channel."""
    blocklist = set(blocklist or ())
    if any(label < 0 or label >= n_classes for label in z.labels):
        raise ValidationError("label outside [0, n_classes) in Z matrix")
    counts = np.zeros((n_classes, z.n_channels), dtype=np.int64)
    for row, label in zip(z.values, z.labels):
        for j in select_channels(row, method, k, blocklist):
            counts[label, j] += 1
    tag = f"m1:{int(k)}" if method == "m1" else f"m2:{k}"
    return AggregatedActivations(
        layer=z.layer, counts=counts, method=tag, blocklist=sorted(blocklist)
    )
