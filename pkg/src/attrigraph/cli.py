"""Command-line entry points for the pipeline and the HTTP service."""

from __future__ import annotations

import functools
from pathlib import Path

import click

from . import pipeline, service
from .datasets import make_toy_corpus, save_dataset
from .model import make_toy_model, save_model


def _parse_blocklist(entries: tuple[str, ...]) -> list[tuple[str, int]] | None:
    if not entries:
        return None
    parsed = []
    for entry in entries:
        layer, _, channel = entry.partition(":")
        if not channel.isdigit():
            raise click.BadParameter(f"blocklist entries are layer:channel, got {entry!r}")
        parsed.append((layer, int(channel)))
    return parsed


def pipeline_options(fn):
    @click.option("--config", "config_path", required=True, type=click.Path(exists=True))
    @click.option("--output", type=click.Path(), help="Override the bundle output dir.")
    @click.option("--k-m1", type=int, help="Top-k for influence counting.")
    @click.option("--k-m2-activation", type=float, help="Cumulative-weight threshold for activation counting.")
    @click.option("--k-m2-extraction", type=float, help="Per-layer PageRank mass kept in extracted graphs.")
    @click.option("--iterations", type=int, help="PageRank iterations.")
    @click.option("--damping", type=float, help="PageRank damping factor.")
    @click.option("--workers", type=int, help="Worker count (ATTRIGRAPH_WORKERS overrides).")
    @click.option("--block", "blocklist", multiple=True, help="Exclude a channel, as layer:channel. Repeatable.")
    @functools.wraps(fn)
    def wrapper(config_path, output, k_m1, k_m2_activation, k_m2_extraction, iterations,
                damping, workers, blocklist, **kwargs):
        config = pipeline.load_config(
            config_path,
            output_dir=Path(output) if output else None,
            k_m1=k_m1,
            k_m2_activation=k_m2_activation,
            k_m2_extraction=k_m2_extraction,
            pagerank_iterations=iterations,
            damping=damping,
            workers=workers,
            blocklist=_parse_blocklist(blocklist),
        )
        return fn(config=config, **kwargs)

    return wrapper


@click.group()
def main():
    """Build and serve per-class attribution graphs for a convolutional classifier."""


@main.command()
@pipeline_options
def run(config):
    """Run every pipeline stage and write the full export bundle."""
    out = pipeline.run_pipeline(config)
    click.echo(f"bundle written to {out}")


@main.command()
@pipeline_options
def aggregate(config):
    """Compute and export the per-layer aggregated activation matrices."""
    pipeline.run_pipeline(config, stages=("aggregate",))


@main.command()
@pipeline_options
def influence(config):
    """Compute and export the per-layer aggregated influence tensors."""
    pipeline.run_pipeline(config, stages=("influence",))


@main.command()
@click.option("--class", "class_id", type=int, default=None, help="Only this class id.")
@pipeline_options
def graph(config, class_id):
    """Run PageRank and export attribution graphs."""
    ids = None if class_id is None else [class_id]
    pipeline.run_pipeline(config, stages=("graph",), class_ids=ids)


@main.command()
@pipeline_options
def analyze(config):
    """Export class summaries, similarity, embeddings, and top examples."""
    pipeline.run_pipeline(config, stages=("analyze",))


@main.command()
@click.option("--bundle", required=True, type=click.Path(exists=True))
@click.option("--port", type=int, default=8000)
@click.option("--host", default="127.0.0.1")
def serve(bundle, port, host):
    """Serve a finished bundle over the read-only HTTP API."""
    service.serve(bundle, port=port, host=host)


@main.command()
@click.option("--out", required=True, type=click.Path())
@click.option("--seed", type=int, default=0)
@click.option("--images-per-class", type=int, default=20)
def fixture(out, seed, images_per_class):
    """Generate the desk-scale toy model, corpus, and a ready-to-run config."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    model = make_toy_model(seed)
    save_model(model, out / "model.json", out / "weights")
    corpus = make_toy_corpus(seed, n_per_class=images_per_class)
    save_dataset(corpus, out / "dataset.json", out / "images")
    from . import formats

    formats.write_json(
        out / "config.json",
        {
            "schema": formats.SCHEMA_VERSION,
            "model_manifest": "model.json",
            "dataset_manifest": "dataset.json",
            "output_dir": "bundle",
        },
    )
    click.echo(f"fixture written to {out}")


if __name__ == "__main__":
    main()
