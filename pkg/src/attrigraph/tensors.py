"""Dense 3D/4D tensors and the numeric kernels used by every pipeline stage.

Layouts are fixed: Tensor3 is (height, width, channels) with channel
fastest-varying, Kernel4 is (kh, kw, in_channels, out_channels). All data is
float32.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import correlate2d

from .errors import ShapeMismatchError, ValidationError


@dataclass(frozen=True)
class Tensor3:
    """A (height, width, channels) float32 activation volume."""

    data: np.ndarray

    def __post_init__(self):
        if self.data.ndim != 3:
            raise ValidationError(f"Tensor3 requires 3 dims, got shape {self.data.shape}")
        if self.data.dtype != np.float32:
            object.__setattr__(self, "data", self.data.astype(np.float32))
        if not np.all(np.isfinite(self.data)):
            raise ValidationError("Tensor3 contains non-finite values")

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def channels(self) -> int:
        return self.data.shape[2]


@dataclass(frozen=True)
class Kernel4:
    """A (kh, kw, in_channels, out_channels) float32 convolution kernel.

    Spatial extents must be odd so that "same" zero padding preserves the
    input's height and width exactly.
    """

    data: np.ndarray

    def __post_init__(self):
        if self.data.ndim != 4:
            raise ValidationError(f"Kernel4 requires 4 dims, got shape {self.data.shape}")
        kh, kw = self.data.shape[:2]
        if kh % 2 == 0 or kw % 2 == 0:
            raise ValidationError(f"kernel extents must be odd, got {kh}x{kw}")
        if self.data.dtype != np.float32:
            object.__setattr__(self, "data", self.data.astype(np.float32))
        if not np.all(np.isfinite(self.data)):
            raise ValidationError("Kernel4 contains non-finite values")

    @property
    def kh(self) -> int:
        return self.data.shape[0]

    @property
    def kw(self) -> int:
        return self.data.shape[1]

    @property
    def in_channels(self) -> int:
        return self.data.shape[2]

    @property
    def out_channels(self) -> int:
        return self.data.shape[3]


def conv2d_single(x_channel: np.ndarray, k_slice: np.ndarray) -> np.ndarray:
    """Cross-correlate one 2D channel with one 2D kernel slice.

    "Same" zero padding, stride 1: the output has the input's spatial dims.
    """
    if x_channel.ndim != 2 or k_slice.ndim != 2:
        raise ShapeMismatchError(
            f"conv2d_single needs 2D operands, got {x_channel.shape} and {k_slice.shape}"
        )
    if x_channel.size == 0:
        raise ShapeMismatchError("conv2d_single input is empty")
    kh, kw = k_slice.shape
    if kh % 2 == 0 or kw % 2 == 0:
        raise ShapeMismatchError(f"kernel extents must be odd, got {kh}x{kw}")
    out = correlate2d(
        x_channel.astype(np.float32), k_slice.astype(np.float32), mode="same", boundary="fill"
    )
    return out.astype(np.float32)


def conv2d_full(x: Tensor3, k: Kernel4, bias: np.ndarray | None = None) -> Tensor3:
    """3D convolution: output channel j = sum over i of conv2d_single(x_i, k_ij)."""
    if x.channels != k.in_channels:
        raise ShapeMismatchError(
            f"channel mismatch: input has {x.channels} channels, kernel expects {k.in_channels}"
        )
    if bias is not None and bias.shape != (k.out_channels,):
        raise ShapeMismatchError(
            f"bias shape {bias.shape} does not match {k.out_channels} output channels"
        )
    out = np.zeros((x.height, x.width, k.out_channels), dtype=np.float32)
    for j in range(k.out_channels):
        acc = np.zeros((x.height, x.width), dtype=np.float32)
        for i in range(x.channels):
            acc += conv2d_single(x.data[:, :, i], k.data[:, :, i, j])
        out[:, :, j] = acc
    if bias is not None:
        out += bias.astype(np.float32)[None, None, :]
    return Tensor3(out)


def relu(x: Tensor3) -> Tensor3:
    return Tensor3(np.maximum(x.data, np.float32(0.0)))


def maxpool2(x: Tensor3) -> Tensor3:
    """2x2 max pooling with stride 2; height and width must be even."""
    if x.height % 2 != 0 or x.width % 2 != 0:
        raise ShapeMismatchError(
            f"maxpool2 requires even spatial dims, got {x.height}x{x.width}"
        )
    h2, w2 = x.height // 2, x.width // 2
    windows = x.data.reshape(h2, 2, w2, 2, x.channels)
    return Tensor3(windows.max(axis=(1, 3)))


def channel_max(x: Tensor3) -> np.ndarray:
    """Per-channel spatial maximum (global max pooling), length = channels."""
    if x.data.size == 0:
        raise ShapeMismatchError("channel_max input is empty")
    return x.data.max(axis=(0, 1))
