"""Binary tensor files and deterministic JSON export helpers.

Tensor file layout: magic b"ATG1", rank as u8 (1..4), dims as little-endian
u32 per axis, then the float32 little-endian payload in C order.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .errors import FormatError

MAGIC = b"ATG1"
SCHEMA_VERSION = 1


def write_tensor(path: str | Path, array: np.ndarray) -> None:
    arr = np.ascontiguousarray(array, dtype="<f4")
    if not 1 <= arr.ndim <= 4:
        raise FormatError(f"tensor rank must be 1..4, got {arr.ndim}")
    header = MAGIC + struct.pack("<B", arr.ndim)
    header += struct.pack(f"<{arr.ndim}I", *arr.shape)
    Path(path).write_bytes(header + arr.tobytes())


def read_tensor(path: str | Path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if len(raw) < 5:
        raise FormatError(f"{path}: truncated header ({len(raw)} bytes, need >= 5)")
    if raw[:4] != MAGIC:
        raise FormatError(f"{path}: bad magic {raw[:4]!r} at byte 0")
    rank = raw[4]
    if not 1 <= rank <= 4:
        raise FormatError(f"{path}: rank {rank} out of range at byte 4")
    dims_end = 5 + 4 * rank
    if len(raw) < dims_end:
        raise FormatError(f"{path}: truncated dims, need {dims_end} bytes, have {len(raw)}")
    dims = struct.unpack(f"<{rank}I", raw[5:dims_end])
    expected = int(np.prod([int(d) for d in dims], dtype=np.int64)) * 4
    payload = raw[dims_end:]
    if len(payload) != expected:
        raise FormatError(
            f"{path}: payload length {len(payload)} at byte {dims_end}, expected {expected}"
        )
    return np.frombuffer(payload, dtype="<f4").reshape(dims).copy()


def write_json(path: str | Path, document: dict) -> None:
    """Deterministic JSON writer: fixed separators, sorted keys, newline at EOF."""
    text = json.dumps(document, sort_keys=True, indent=1, separators=(",", ": "))
    Path(path).write_text(text + "\n")


def read_json(path: str | Path) -> dict:
    return json.loads(Path(path).read_text())


def export_attribution_graph(graph) -> dict:
    """Serialize an AttributionGraph to its JSON document."""
    return {
        "schema": SCHEMA_VERSION,
        "class_id": graph.class_id,
        "params": dict(graph.params),
        "layers": list(graph.layer_names),
        "vertices": [
            {
                "layer": v.layer,
                "channel": v.channel,
                "pagerank": v.pagerank,
                "activation_count": v.activation_count,
            }
            for v in graph.vertices
        ],
        "edges": [
            {
                "from": {"layer": e.src_layer, "channel": e.src_channel},
                "to": {"layer": e.dst_layer, "channel": e.dst_channel},
                "influence_count": e.count,
            }
            for e in graph.edges
        ],
    }
