"""Network topology declaration, weight loading, and the instrumented forward pass.

A model is a stack of "primary" layers, each a group of parallel branches of
one or two convolution steps whose outputs concatenate along the channel axis,
optionally followed by 2x2 max pooling. The classifier head is global max
pooling over the last layer, a dense map, and softmax.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import formats
from .errors import ShapeMismatchError, ValidationError
from .tensors import Kernel4, Tensor3, channel_max, conv2d_full, maxpool2, relu


@dataclass
class ConvStep:
    kernel_name: str
    kernel: Kernel4
    relu: bool = True
    bias_name: str | None = None
    bias: np.ndarray | None = None


@dataclass
class Branch:
    steps: list[ConvStep]
    channel_offset: int

    @property
    def out_channels(self) -> int:
        return self.steps[-1].kernel.out_channels


@dataclass
class PrimaryLayer:
    name: str
    branches: list[Branch]
    pool: bool = False

    @property
    def out_channels(self) -> int:
        return sum(b.out_channels for b in self.branches)


@dataclass
class ModelManifest:
    name: str
    input_dims: tuple[int, int, int]  # (height, width, channels)
    layers: list[PrimaryLayer]
    head_weights: np.ndarray  # (last layer channels, n_classes)
    class_names: list[str]

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    @property
    def layer_names(self) -> list[str]:
        return [layer.name for layer in self.layers]

    def layer_channels(self, name: str) -> int:
        for layer in self.layers:
            if layer.name == name:
                return layer.out_channels
        raise ValidationError(f"unknown layer {name!r}")


@dataclass
class ForwardTrace:
    """Captured activations from one forward pass.

    layer_outputs holds each primary layer's final output (post-pool when the
    layer pools); inner holds the post-step-1 tensor of every 2-step branch,
    keyed by (layer name, branch index).
    """

    layer_outputs: dict[str, Tensor3]
    inner: dict[tuple[str, int], Tensor3] = field(default_factory=dict)
    probabilities: np.ndarray = field(default_factory=lambda: np.zeros(0))


def validate_model(model: ModelManifest) -> None:
    """Enforce structural invariants; raises ValidationError naming the culprit."""
    if len(model.layers) < 2:
        raise ValidationError(f"model needs >= 2 primary layers, has {len(model.layers)}")
    prev_channels = model.input_dims[2]
    for layer in model.layers:
        if not layer.branches:
            raise ValidationError(f"layer {layer.name}: no branches")
        covered = []
        for bi, branch in enumerate(layer.branches):
            if len(branch.steps) not in (1, 2):
                raise ValidationError(
                    f"layer {layer.name} branch {bi}: {len(branch.steps)} steps, need 1 or 2"
                )
            if branch.steps[0].kernel.in_channels != prev_channels:
                raise ValidationError(
                    f"layer {layer.name} branch {bi}: expects "
                    f"{branch.steps[0].kernel.in_channels} input channels, "
                    f"previous layer provides {prev_channels}"
                )
            if len(branch.steps) == 2:
                mid = branch.steps[0].kernel.out_channels
                if branch.steps[1].kernel.in_channels != mid:
                    raise ValidationError(
                        f"layer {layer.name} branch {bi}: step chain broken "
                        f"({mid} -> {branch.steps[1].kernel.in_channels})"
                    )
            for step in branch.steps:
                if step.bias is not None and step.bias.shape != (step.kernel.out_channels,):
                    raise ValidationError(
                        f"layer {layer.name} branch {bi}: bias shape {step.bias.shape} "
                        f"mismatches {step.kernel.out_channels} channels"
                    )
            covered.append(range(branch.channel_offset, branch.channel_offset + branch.out_channels))
        total = layer.out_channels
        seen = sorted(c for r in covered for c in r)
        if seen != list(range(total)):
            raise ValidationError(
                f"layer {layer.name}: branch channel offsets do not tile 0..{total - 1}"
            )
        prev_channels = total
    if model.head_weights.shape[0] != prev_channels:
        raise ValidationError(
            f"head weights expect {model.head_weights.shape[0]} channels, "
            f"last layer provides {prev_channels}"
        )
    if model.head_weights.shape[1] != model.n_classes:
        raise ValidationError(
            f"head weights map to {model.head_weights.shape[1]} classes, "
            f"manifest names {model.n_classes}"
        )


def forward(model: ModelManifest, image: Tensor3) -> ForwardTrace:
    """Run the instrumented forward pass, capturing every tensor aggregation needs."""
    h, w, c = model.input_dims
    if (image.height, image.width, image.channels) != (h, w, c):
        raise ShapeMismatchError(
            f"image is {image.height}x{image.width}x{image.channels}, "
            f"model expects {h}x{w}x{c}"
        )
    trace = ForwardTrace(layer_outputs={})
    current = image
    for layer in model.layers:
        out = np.zeros((current.height, current.width, layer.out_channels), dtype=np.float32)
        for bi, branch in enumerate(layer.branches):
            t = current
            for si, step in enumerate(branch.steps):
                t = conv2d_full(t, step.kernel, bias=step.bias)
                if step.relu:
                    t = relu(t)
                if si == 0 and len(branch.steps) == 2:
                    trace.inner[(layer.name, bi)] = t
            out[:, :, branch.channel_offset : branch.channel_offset + branch.out_channels] = t.data
        result = Tensor3(out)
        if layer.pool:
            result = maxpool2(result)
        trace.layer_outputs[layer.name] = result
        current = result
    pooled = channel_max(current).astype(np.float64)
    logits = pooled @ model.head_weights.astype(np.float64)
    logits -= logits.max()
    exp = np.exp(logits)
    trace.probabilities = exp / exp.sum()
    return trace


def load_model(manifest_path: str | Path, weights_dir: str | Path) -> ModelManifest:
    """Parse a model manifest and bind every referenced weight tensor."""
    doc = formats.read_json(manifest_path)
    weights_dir = Path(weights_dir)

    def tensor(name: str) -> np.ndarray:
        path = weights_dir / f"{name}.atg"
        if not path.exists():
            raise ValidationError(f"missing weight file {path}")
        return formats.read_tensor(path)

    layers = []
    for ldoc in doc["layers"]:
        branches = []
        for bdoc in ldoc["branches"]:
            steps = []
            for sdoc in bdoc["steps"]:
                kdata = tensor(sdoc["kernel"])
                if kdata.ndim != 4:
                    raise ValidationError(
                        f"kernel {sdoc['kernel']} has rank {kdata.ndim}, expected 4"
                    )
                bias = tensor(sdoc["bias"]) if sdoc.get("bias") else None
                steps.append(
                    ConvStep(
                        kernel_name=sdoc["kernel"],
                        kernel=Kernel4(kdata),
                        relu=bool(sdoc.get("relu", True)),
                        bias_name=sdoc.get("bias"),
                        bias=bias,
                    )
                )
            branches.append(Branch(steps=steps, channel_offset=int(bdoc["channel_offset"])))
        layers.append(
            PrimaryLayer(name=ldoc["name"], branches=branches, pool=bool(ldoc.get("pool", False)))
        )
    head = tensor(doc["head"]["weights"])
    if head.ndim != 2:
        raise ValidationError(f"head weights have rank {head.ndim}, expected 2")
    dims = doc["input_dims"]
    model = ModelManifest(
        name=doc["name"],
        input_dims=(int(dims["height"]), int(dims["width"]), int(dims["channels"])),
        layers=layers,
        head_weights=head,
        class_names=list(doc["head"]["class_names"]),
    )
    validate_model(model)
    return model


def save_model(model: ModelManifest, manifest_path: str | Path, weights_dir: str | Path) -> None:
    """Write the manifest JSON and one .atg weight file per kernel/bias/head."""
    weights_dir = Path(weights_dir)
    weights_dir.mkdir(parents=True, exist_ok=True)
    layers_doc = []
    for layer in model.layers:
        branches_doc = []
        for branch in layer.branches:
            steps_doc = []
            for step in branch.steps:
                formats.write_tensor(weights_dir / f"{step.kernel_name}.atg", step.kernel.data)
                sdoc = {"kernel": step.kernel_name, "relu": step.relu}
                if step.bias is not None:
                    formats.write_tensor(weights_dir / f"{step.bias_name}.atg", step.bias)
                    sdoc["bias"] = step.bias_name
                steps_doc.append(sdoc)
            branches_doc.append({"channel_offset": branch.channel_offset, "steps": steps_doc})
        layers_doc.append({"name": layer.name, "pool": layer.pool, "branches": branches_doc})
    formats.write_tensor(weights_dir / "head.atg", model.head_weights)
    formats.write_json(
        manifest_path,
        {
            "schema": formats.SCHEMA_VERSION,
            "name": model.name,
            "input_dims": {
                "height": model.input_dims[0],
                "width": model.input_dims[1],
                "channels": model.input_dims[2],
            },
            "layers": layers_doc,
            "head": {"weights": "head", "class_names": model.class_names},
        },
    )


def make_toy_model(seed: int = 0) -> ModelManifest:
    """Deterministic desk-scale fixture: 16x16x3 input, two pooled mixed layers, 5 classes.

    mixA = (1x1 -> 6) || (1x1 -> 4, 3x3 -> 6) = 12 channels, pooled;
    mixB = (1x1 -> 8) || (1x1 -> 4, 3x3 -> 8) = 16 channels, pooled.
    Weights uniform(-0.5, 0.5) from the given seed.
    """
    rng = np.random.default_rng(seed)

    def kern(name, kh, kw, cin, cout):
        data = rng.uniform(-0.5, 0.5, size=(kh, kw, cin, cout)).astype(np.float32)
        return ConvStep(kernel_name=name, kernel=Kernel4(data), relu=True)

    mix_a = PrimaryLayer(
        name="mixA",
        pool=True,
        branches=[
            Branch(steps=[kern("mixA_b0_s0", 1, 1, 3, 6)], channel_offset=0),
            Branch(
                steps=[kern("mixA_b1_s0", 1, 1, 3, 4), kern("mixA_b1_s1", 3, 3, 4, 6)],
                channel_offset=6,
            ),
        ],
    )
    mix_b = PrimaryLayer(
        name="mixB",
        pool=True,
        branches=[
            Branch(steps=[kern("mixB_b0_s0", 1, 1, 12, 8)], channel_offset=0),
            Branch(
                steps=[kern("mixB_b1_s0", 1, 1, 12, 4), kern("mixB_b1_s1", 3, 3, 4, 8)],
                channel_offset=8,
            ),
        ],
    )
    head = rng.uniform(-0.5, 0.5, size=(16, 5)).astype(np.float32)
    model = ModelManifest(
        name="toy",
        input_dims=(16, 16, 3),
        layers=[mix_a, mix_b],
        head_weights=head,
        class_names=[f"class_{i}" for i in range(5)],
    )
    validate_model(model)
    return model
