"""Command-line entry points (``sketchparts <subcommand>``)."""

from __future__ import annotations

import json
from pathlib import Path

import click
import numpy as np

from . import datasets as ds
from .corpus import load_corpus, save_corpus
from .evaluation import CNNFeatureExtractor, StubFeatureExtractor, compute_report, part_statistics
from .inference import InferenceConfig, complete_sketch
from .partgen import default_config, train_part_generator
from .raster_io import load_raster_png, save_raster_png
from .registry import ModelRegistry
from .sampler import sample_initial_stroke
from .selector import SelectorConfig, train_selector
from .sketch import Stroke
from .synthetic import make_corpus
from .vectorize import TraceConfig, vectorize_raster

_dataset_option = click.option(
    "--dataset", type=click.Choice(list(ds.DATASETS)), required=True
)


@click.group()
def main():
    """Part-based creative sketch generation toolkit."""


@main.command("sample-stroke")
@_dataset_option
@click.option("--count", type=int, default=1, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def sample_stroke_cmd(dataset, count, seed, out):
    """Sample random initial strokes to a JSON-lines file."""
    rng = np.random.default_rng(seed)
    with open(out, "w", encoding="utf-8") as fh:
        for _ in range(count):
            stroke = sample_initial_stroke(dataset, rng)
            fh.write(json.dumps({"points": stroke.points.tolist(),
                                 "width_px": stroke.width_px}) + "\n")
    click.echo(f"wrote {count} strokes to {out}")


@main.command("make-synthetic")
@_dataset_option
@click.option("--count", type=int, default=100, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def make_synthetic_cmd(dataset, count, seed, out):
    """Generate a procedural corpus (stand-in for the real datasets)."""
    save_corpus(make_corpus(dataset, count, seed), out)
    click.echo(f"wrote {count} synthetic {dataset} sketches to {out}")


@main.command("train-part")
@_dataset_option
@click.option("--part", required=True)
@click.option("--corpus", "corpus_path", type=click.Path(exists=True), required=True)
@click.option("--steps", type=int, default=None)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(file_okay=False), required=True)
@click.option("--batch-size", type=int, default=None)
def train_part_cmd(dataset, part, corpus_path, steps, seed, out, batch_size):
    """Train the conditional generator for one part."""
    corpus = load_corpus(corpus_path)
    overrides = {}
    if steps is not None:
        overrides["steps"] = steps
    if batch_size is not None:
        overrides["batch_size"] = batch_size
    cfg = default_config(dataset, **overrides)
    bundle = train_part_generator(corpus, part, cfg, seed=seed, out_dir=out, log_every=100)
    click.echo(f"trained {dataset}/{part} for {bundle.step} steps -> {out}")


@main.command("train-selector")
@_dataset_option
@click.option("--corpus", "corpus_path", type=click.Path(exists=True), required=True)
@click.option("--epochs", type=int, default=None)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(file_okay=False), required=True)
def train_selector_cmd(dataset, corpus_path, epochs, seed, out):
    """Train the next-part selector."""
    corpus = load_corpus(corpus_path)
    cfg = SelectorConfig(epochs=epochs) if epochs is not None else SelectorConfig()
    out_dir = Path(out) / dataset
    out_dir.mkdir(parents=True, exist_ok=True)
    bundle = train_selector(corpus, cfg, seed=seed, out_path=out_dir / "selector.ckpt")
    click.echo(f"selector test accuracy: {bundle.test_accuracy:.4f}")


@main.command("generate")
@_dataset_option
@click.option("--models", type=click.Path(exists=True, file_okay=False), required=True)
@click.option("--count", type=int, default=1, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(file_okay=False), required=True)
def generate_cmd(dataset, models, count, seed, out):
    """Complete sketches from sampled initial strokes; write PNGs + traces."""
    registry = ModelRegistry(models)
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    cfg = InferenceConfig()
    for i in range(count):
        rng = np.random.default_rng(seed + i)
        initial = sample_initial_stroke(dataset, rng)
        trace = complete_sketch(
            initial, registry.generators[dataset], registry.selector(dataset), cfg, rng
        )
        stem = out_dir / f"{dataset}_{seed + i:05d}"
        save_raster_png(trace.raster, f"{stem}.png")
        parts_dir = Path(f"{stem}_parts")
        parts_dir.mkdir(exist_ok=True)
        channel_paths = {}
        for label, raster in trace.part_rasters.items():
            path = parts_dir / f"{label}.png"
            save_raster_png(raster, path)
            channel_paths[label] = str(path)
        with open(f"{stem}.json", "w", encoding="utf-8") as fh:
            json.dump({"part_order": trace.part_order, "channels": channel_paths,
                       "initial_stroke": initial.points.tolist()}, fh, indent=2)
    click.echo(f"wrote {count} completions to {out}")


def _load_extractor(spec: str):
    if spec.startswith("stub:"):
        return StubFeatureExtractor(seed=int(spec.split(":", 1)[1]))
    return CNNFeatureExtractor.load(spec)


def _load_pngs(folder) -> np.ndarray:
    paths = sorted(Path(folder).glob("*.png"))
    if not paths:
        raise click.ClickException(f"no PNG files in {folder}")
    return np.stack([load_raster_png(p) for p in paths])


@main.command("evaluate")
@click.option("--generated", type=click.Path(exists=True, file_okay=False), required=True)
@click.option("--reference", type=click.Path(exists=True, file_okay=False), required=True)
@click.option("--extractor", default="stub:0", show_default=True,
              help="checkpoint path or stub:<seed>")
@click.option("--dataset", type=click.Choice(list(ds.DATASETS)), default=ds.BIRDS,
              show_default=True)
@click.option("--report", "report_path", type=click.Path(dir_okay=False), required=True)
def evaluate_cmd(generated, reference, extractor, dataset, report_path):
    """Compute FID/GD/CS/SDS for a directory of generated sketches."""
    report = compute_report(
        _load_pngs(generated), _load_pngs(reference), _load_extractor(extractor), dataset
    )
    Path(report_path).write_text(report.to_json(), encoding="utf-8")
    click.echo(report.to_json())


@main.command("analyze")
@click.option("--corpus", "corpus_path", type=click.Path(exists=True), required=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def analyze_cmd(corpus_path, out):
    """Part-order and stroke statistics for a corpus."""
    stats = part_statistics(load_corpus(corpus_path))
    Path(out).write_text(json.dumps(stats.to_dict(), indent=2), encoding="utf-8")
    click.echo(
        f"stroke length {stats.stroke_length_mean:.2f} +/- {stats.stroke_length_sd:.2f}, "
        f"count {stats.stroke_count_mean:.2f} +/- {stats.stroke_count_sd:.2f}"
    )


@main.command("vectorize")
@click.option("--in", "in_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True)
@click.option("--threshold", type=float, default=0.2, show_default=True)
@click.option("--radius", type=float, default=4.0, show_default=True)
@click.option("--scale", type=int, default=2, show_default=True)
def vectorize_cmd(in_path, out_path, threshold, radius, scale):
    """Convert a raster sketch PNG to SVG."""
    cfg = TraceConfig(threshold=threshold, filter_radius=radius, scale=scale)
    svg, paths, _ = vectorize_raster(load_raster_png(in_path), cfg)
    Path(out_path).write_text(svg, encoding="utf-8")
    click.echo(f"wrote {len(paths)} paths to {out_path}")


@main.command("serve")
@click.option("--models", type=click.Path(exists=True, file_okay=False), required=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--static", "static_dir", type=click.Path(file_okay=False), default=None,
              help="optional directory of UI assets to serve at /")
def serve_cmd(models, host, port, static_dir):
    """Run the HTTP suggestion service."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(models, static_dir=static_dir), host=host, port=port)


if __name__ == "__main__":
    main()
