"""Image corpus fixtures and the dataset manifest format."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import formats
from .errors import ValidationError
from .tensors import Tensor3


@dataclass
class Dataset:
    name: str
    class_names: list[str]
    images: list[Tensor3]
    labels: list[int]

    def __post_init__(self):
        if len(self.images) != len(self.labels):
            raise ValidationError(
                f"{len(self.images)} images but {len(self.labels)} labels"
            )


def make_toy_corpus(
    seed: int = 0, n_classes: int = 5, n_per_class: int = 20, dims: tuple[int, int, int] = (16, 16, 3)
) -> Dataset:
    """Seeded synthetic corpus with class-dependent structure.

    Each class gets a characteristic spatial stripe frequency and channel bias
    so activation and influence aggregates differ meaningfully across classes.
    """
    rng = np.random.default_rng(seed)
    h, w, c = dims
    yy, xx = np.meshgrid(np.arange(h), np.arange(w), indexing="ij")
    images, labels = [], []
    for cls in range(n_classes):
        freq = (cls + 1) / 4.0
        phase = cls * 0.7
        pattern = 0.5 + 0.5 * np.sin(freq * xx + phase) * np.cos(freq * yy - phase)
        bias = np.linspace(0.2, 1.0, c)[(np.arange(c) + cls) % c]
        for _ in range(n_per_class):
            noise = rng.uniform(0.0, 1.0, size=(h, w, c))
            img = 0.6 * pattern[:, :, None] * bias[None, None, :] + 0.4 * noise
            images.append(Tensor3(img.astype(np.float32)))
            labels.append(cls)
    return Dataset(
        name="toy",
        class_names=[f"class_{i}" for i in range(n_classes)],
        images=images,
        labels=labels,
    )


def save_dataset(dataset: Dataset, manifest_path: str | Path, images_dir: str | Path) -> None:
    images_dir = Path(images_dir)
    images_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    for i, (img, label) in enumerate(zip(dataset.images, dataset.labels)):
        fname = f"img_{i:04d}.atg"
        formats.write_tensor(images_dir / fname, img.data)
        entries.append({"id": i, "file": fname, "label": label})
    formats.write_json(
        manifest_path,
        {
            "schema": formats.SCHEMA_VERSION,
            "name": dataset.name,
            "class_names": dataset.class_names,
            "images": entries,
        },
    )


def load_dataset(manifest_path: str | Path, images_dir: str | Path) -> Dataset:
    doc = formats.read_json(manifest_path)
    images_dir = Path(images_dir)
    images, labels = [], []
    for entry in doc["images"]:
        path = images_dir / entry["file"]
        if not path.exists():
            raise ValidationError(f"missing image file {path}")
        images.append(Tensor3(formats.read_tensor(path)))
        labels.append(int(entry["label"]))
    return Dataset(
        name=doc["name"], class_names=list(doc["class_names"]), images=images, labels=labels
    )
