"""End-to-end pipeline orchestration: forward passes, aggregation, graphs,
analytics, and the on-disk export bundle the HTTP service reads."""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import analytics, formats
from .activations import aggregate_activations, build_channel_max
from .datasets import Dataset, load_dataset, save_dataset
from .errors import ValidationError
from .graphs import build_full_graph, extract_attribution_graph, personalized_pagerank
from .influences import aggregate_influences
from .model import ForwardTrace, ModelManifest, forward, load_model, save_model

ALL_STAGES = ("aggregate", "influence", "graph", "analyze")
WORKERS_ENV = "ATTRIGRAPH_WORKERS"


@dataclass
class PipelineConfig:
    model_manifest: Path
    dataset_manifest: Path
    output_dir: Path
    weights_dir: Path | None = None
    images_dir: Path | None = None
    k_m1: int = 5
    k_m2_activation: float = 0.03
    k_m2_extraction: float = 0.075
    pagerank_iterations: int = 100
    damping: float = 0.85
    blocklist: list[tuple[str, int]] = field(default_factory=list)
    workers: int = 1

    def __post_init__(self):
        self.model_manifest = Path(self.model_manifest)
        self.dataset_manifest = Path(self.dataset_manifest)
        self.output_dir = Path(self.output_dir)
        if self.weights_dir is None:
            self.weights_dir = self.model_manifest.parent / "weights"
        if self.images_dir is None:
            self.images_dir = self.dataset_manifest.parent / "images"
        if not 0.0 < self.k_m2_activation < 1.0:
            raise ValidationError(f"k_m2_activation must be in (0, 1), got {self.k_m2_activation}")
        if not 0.0 < self.k_m2_extraction < 1.0:
            raise ValidationError(f"k_m2_extraction must be in (0, 1), got {self.k_m2_extraction}")
        if not 0.0 < self.damping < 1.0:
            raise ValidationError(f"damping must be in (0, 1), got {self.damping}")
        if self.pagerank_iterations < 1:
            raise ValidationError(f"iterations must be >= 1, got {self.pagerank_iterations}")
        if self.k_m1 < 1:
            raise ValidationError(f"k_m1 must be >= 1, got {self.k_m1}")
        if self.workers < 1:
            raise ValidationError(f"workers must be >= 1, got {self.workers}")

    def layer_blocklist(self, layer: str) -> set[int]:
        return {ch for name, ch in self.blocklist if name == layer}


def load_config(path: str | Path, **overrides) -> PipelineConfig:
    doc = formats.read_json(path)
    base = Path(path).parent
    kwargs = {
        "model_manifest": base / doc["model_manifest"],
        "dataset_manifest": base / doc["dataset_manifest"],
        "output_dir": base / doc["output_dir"],
    }
    for key in (
        "k_m1",
        "k_m2_activation",
        "k_m2_extraction",
        "pagerank_iterations",
        "damping",
        "workers",
    ):
        if key in doc:
            kwargs[key] = doc[key]
    if "blocklist" in doc:
        kwargs["blocklist"] = [(str(layer), int(ch)) for layer, ch in doc["blocklist"]]
    kwargs.update({k: v for k, v in overrides.items() if v is not None})
    return PipelineConfig(**kwargs)


def resolve_workers(configured: int) -> int:
    env = os.environ.get(WORKERS_ENV)
    if env:
        return max(1, int(env))
    return configured


def compute_traces(model: ModelManifest, dataset: Dataset, workers: int) -> list[ForwardTrace]:
    """Forward-pass every image; worker count never changes the result."""
    if workers <= 1:
        return [forward(model, img) for img in dataset.images]
    results: list[ForwardTrace | None] = [None] * len(dataset.images)

    def run(i: int):
        results[i] = forward(model, dataset.images[i])

    with ThreadPoolExecutor(max_workers=workers) as pool:
        list(pool.map(run, range(len(dataset.images))))
    return results  # type: ignore[return-value]


def run_pipeline(
    config: PipelineConfig,
    stages: tuple[str, ...] = ALL_STAGES,
    class_ids: list[int] | None = None,
) -> Path:
    """Execute the pipeline and write the export bundle. Idempotent: re-runs
    overwrite byte-identical files. A `.incomplete` marker flags failed runs."""
    out = config.output_dir
    out.mkdir(parents=True, exist_ok=True)
    marker = out / ".incomplete"
    marker.write_text("pipeline in progress\n")
    try:
        _run_stages(config, stages, out, class_ids)
    except Exception as exc:
        raise ValidationError(f"pipeline halted: {exc}") from exc
    marker.unlink()
    return out


def _run_stages(
    config: PipelineConfig,
    stages: tuple[str, ...],
    out: Path,
    class_ids: list[int] | None = None,
) -> None:
    timings: list[tuple[str, float]] = []

    def timed(name):
        timings.append((name, time.perf_counter()))

    timed("load")
    model = load_model(config.model_manifest, config.weights_dir)
    dataset = load_dataset(config.dataset_manifest, config.images_dir)
    n_classes = model.n_classes
    workers = resolve_workers(config.workers)

    # Bundle inputs are re-serialized so bytes are deterministic regardless of
    # the input files' formatting.
    save_model(model, out / "model.json", out / "weights")
    save_dataset(dataset, out / "dataset.json", out / "images")

    timed("forward")
    traces = compute_traces(model, dataset, workers)

    timed("aggregate")
    z_per_layer = {
        layer.name: build_channel_max(traces, layer.name, dataset.labels)
        for layer in model.layers
    }
    a_per_layer = [
        aggregate_activations(
            z_per_layer[layer.name],
            n_classes,
            method="m2",
            k=config.k_m2_activation,
            blocklist=config.layer_blocklist(layer.name),
        )
        for layer in model.layers
    ]
    if "aggregate" in stages:
        (out / "aggregates").mkdir(exist_ok=True)
        for a in a_per_layer:
            formats.write_json(
                out / "aggregates" / f"A_{a.layer}.json",
                {
                    "schema": formats.SCHEMA_VERSION,
                    "layer": a.layer,
                    "method": a.method,
                    "blocklist": a.blocklist,
                    "counts": a.counts.tolist(),
                },
            )

    timed("influence")
    i_per_layer = {
        idx: aggregate_influences(
            traces,
            model,
            idx,
            dataset.labels,
            k=config.k_m1,
            blocklist_prev=config.layer_blocklist(model.layers[idx - 1].name),
            blocklist_cur=config.layer_blocklist(model.layers[idx].name),
        )
        for idx in range(1, len(model.layers))
    }
    if "influence" in stages:
        (out / "aggregates").mkdir(exist_ok=True)
        for agg in i_per_layer.values():
            entries = [
                [int(c), int(i), int(j), int(agg.counts[c, i, j])]
                for c, i, j in zip(*np.nonzero(agg.counts))
            ]
            formats.write_json(
                out / "aggregates" / f"I_{agg.layer}.json",
                {
                    "schema": formats.SCHEMA_VERSION,
                    "layer": agg.layer,
                    "k": agg.k,
                    "prev_channels": agg.prev_channels,
                    "cur_channels": agg.cur_channels,
                    "entries": entries,
                },
            )

    timed("graph")
    if "graph" in stages:
        (out / "graphs").mkdir(exist_ok=True)
        targets = class_ids if class_ids is not None else list(range(n_classes))
        for class_id in targets:
            if not 0 <= class_id < n_classes:
                raise ValidationError(f"class {class_id} out of range (have {n_classes})")
            graph = build_full_graph(a_per_layer, i_per_layer, class_id)
            scores = personalized_pagerank(
                graph, damping=config.damping, iterations=config.pagerank_iterations
            )
            extracted = extract_attribution_graph(
                graph,
                scores,
                a_per_layer,
                fraction=config.k_m2_extraction,
                damping=config.damping,
                iterations=config.pagerank_iterations,
            )
            formats.write_json(
                out / "graphs" / f"class_{class_id}.json",
                formats.export_attribution_graph(extracted),
            )

    timed("analyze")
    if "analyze" in stages:
        adir = out / "analytics"
        adir.mkdir(exist_ok=True)
        summaries = analytics.class_summaries(traces, dataset.labels, dataset.class_names)
        formats.write_json(
            adir / "summaries.json",
            {
                "schema": formats.SCHEMA_VERSION,
                "classes": [
                    {
                        "id": s.class_id,
                        "name": s.name,
                        "top1_accuracy": s.top1_accuracy,
                        "histogram": s.histogram,
                        "image_count": s.image_count,
                    }
                    for s in summaries
                ],
            },
        )
        formats.write_json(
            adir / "similarity.json",
            {
                "schema": formats.SCHEMA_VERSION,
                "default_layer": model.layers[-1].name,
                "layers": {a.layer: analytics.similarity_matrix(a).tolist() for a in a_per_layer},
            },
        )
        embeddings = analytics.embed_classes(a_per_layer)
        for layer, coords in embeddings.items():
            formats.write_json(
                adir / f"embedding_{layer}.json",
                {
                    "schema": formats.SCHEMA_VERSION,
                    "layer": layer,
                    "method": analytics.EMBEDDING_METHOD,
                    "classes": [
                        {
                            "id": c,
                            "name": dataset.class_names[c],
                            "x": float(coords[c, 0]),
                            "y": float(coords[c, 1]),
                        }
                        for c in range(coords.shape[0])
                    ],
                },
            )
        for layer in model.layer_names:
            z = z_per_layer[layer]
            order = [
                [
                    {"image": img, "label": int(dataset.labels[img]), "value": float(z.values[img, ch])}
                    for img in analytics.top_examples(z, ch, k=z.n_images)
                ]
                for ch in range(z.n_channels)
            ]
            formats.write_json(
                adir / f"examples_{layer}.json",
                {"schema": formats.SCHEMA_VERSION, "layer": layer, "channels": order},
            )

    timed("done")
    for (name, start), (_, end) in zip(timings, timings[1:]):
        print(f"[attrigraph] stage {name}: {end - start:.2f}s")
