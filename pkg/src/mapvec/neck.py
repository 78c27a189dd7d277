"""Multi-scale feature neck: downsample pyramid with full-resolution fusion.

A (H, W, C) feature map is repeatedly 2x-downsampled (average pool +
per-pixel channel projection); every pyramid level is then upsampled back
to the input resolution, projected to a common width, and summed into one
fused map. Training mode also exposes the per-level full-resolution maps;
inference mode returns only the fused map, computed by the exact same
arithmetic so the two agree bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .geometry import InvalidInputError
from .nn import LinearParams, ShapeError, init_linear, linear_forward
from .rng import SeededRng

MODES = ("train", "infer")


@dataclass(frozen=True)
class MpnConfig:
    num_down_layers: int = 2
    in_channels: int = 16
    level_channels: tuple = (32, 32, 32)
    mode: str = "train"

    def __post_init__(self):
        if not 1 <= self.num_down_layers <= 3:
            raise ShapeError(
                f"num_down_layers must be in [1, 3], got {self.num_down_layers}"
            )
        object.__setattr__(self, "level_channels", tuple(self.level_channels))
        if len(self.level_channels) < self.num_down_layers:
            raise ShapeError(
                f"need at least {self.num_down_layers} level channel counts, "
                f"got {self.level_channels}"
            )
        if self.in_channels < 1 or any(c < 1 for c in self.level_channels):
            raise ShapeError("channel counts must be positive")
        if self.mode not in MODES:
            raise ShapeError(f"mode must be one of {MODES}, got {self.mode!r}")

    @property
    def fused_channels(self) -> int:
        # Fusion is element-wise addition, so the fused width is a single
        # level's width; the first level's count is the common target.
        return self.level_channels[0]


@dataclass(frozen=True)
class MpnParams:
    """One projection per downsample step plus one fusion projection per level."""

    down_projs: tuple
    fuse_projs: tuple


@dataclass(frozen=True)
class MpnOutput:
    fused: np.ndarray
    levels: Optional[tuple] = None


def _check_feature_map(f: np.ndarray, min_hw: int) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    if f.ndim != 3:
        raise ShapeError(f"feature map must be (H, W, C), got shape {f.shape}")
    if f.shape[0] < min_hw or f.shape[1] < min_hw or f.shape[2] < 1:
        raise ShapeError(
            f"feature map dims {f.shape} below minimum spatial extent {min_hw}"
        )
    return f


def _level_widths(cfg: MpnConfig):
    """Channel count entering each pyramid level, base level first."""
    return (cfg.in_channels,) + cfg.level_channels[: cfg.num_down_layers]


def init_mpn_params(cfg: MpnConfig, rng: SeededRng) -> MpnParams:
    """Draw order: downsample projections by level, then fusion projections."""
    widths = _level_widths(cfg)
    down_projs = tuple(
        init_linear(rng, widths[i], cfg.level_channels[i])
        for i in range(cfg.num_down_layers)
    )
    fuse_projs = tuple(
        init_linear(rng, width, cfg.fused_channels) for width in widths
    )
    return MpnParams(down_projs=down_projs, fuse_projs=fuse_projs)


def _project_pixels(f: np.ndarray, proj: LinearParams) -> np.ndarray:
    h, w, c = f.shape
    return linear_forward(f.reshape(h * w, c), proj).reshape(h, w, proj.out_dim)


def downsample2x(f: np.ndarray, proj: LinearParams) -> np.ndarray:
    """2x2 average pool (odd dims edge-replicated) + channel projection."""
    f = _check_feature_map(f, 2)
    h, w, _ = f.shape
    padded = np.pad(f, ((0, h % 2), (0, w % 2), (0, 0)), mode="edge")
    hc, wc = padded.shape[0] // 2, padded.shape[1] // 2
    pooled = padded.reshape(hc, 2, wc, 2, f.shape[2]).mean(axis=(1, 3))
    return _project_pixels(pooled, proj)


def _axis_lerp(f: np.ndarray, target: int, axis: int) -> np.ndarray:
    src = f.shape[axis]
    if src == 1:
        reps = [1, 1, 1]
        reps[axis] = target
        return np.tile(f, reps)
    pos = np.arange(target) * ((src - 1) / (target - 1)) if target > 1 else np.zeros(1)
    lo = np.minimum(pos.astype(int), src - 2)
    t = pos - lo
    a = np.take(f, lo, axis=axis)
    b = np.take(f, lo + 1, axis=axis)
    shape = [1, 1, 1]
    shape[axis] = target
    t = t.reshape(shape)
    return a * (1.0 - t) + b * t


def upsample2x(f: np.ndarray, target_h: int, target_w: int) -> np.ndarray:
    """Separable bilinear resize to exactly (target_h, target_w).

    Corner pixels map to corner pixels, so resizing to the source size is
    the identity.
    """
    f = _check_feature_map(f, 1)
    if target_h < f.shape[0] or target_w < f.shape[1]:
        raise InvalidInputError(
            f"target ({target_h}, {target_w}) smaller than source {f.shape[:2]}"
        )
    return _axis_lerp(_axis_lerp(f, target_h, 0), target_w, 1)


def _check_params(cfg: MpnConfig, params: MpnParams) -> None:
    widths = _level_widths(cfg)
    if len(params.down_projs) != cfg.num_down_layers:
        raise ShapeError(
            f"expected {cfg.num_down_layers} downsample projections, "
            f"got {len(params.down_projs)}"
        )
    if len(params.fuse_projs) != cfg.num_down_layers + 1:
        raise ShapeError(
            f"expected {cfg.num_down_layers + 1} fusion projections, "
            f"got {len(params.fuse_projs)}"
        )
    for i, proj in enumerate(params.down_projs):
        if (proj.in_dim, proj.out_dim) != (widths[i], cfg.level_channels[i]):
            raise ShapeError(
                f"downsample projection {i} maps {proj.in_dim}->{proj.out_dim}, "
                f"expected {widths[i]}->{cfg.level_channels[i]}"
            )
    for i, proj in enumerate(params.fuse_projs):
        if (proj.in_dim, proj.out_dim) != (widths[i], cfg.fused_channels):
            raise ShapeError(
                f"fusion projection {i} maps {proj.in_dim}->{proj.out_dim}, "
                f"expected {widths[i]}->{cfg.fused_channels}"
            )


def mpn_forward(f: np.ndarray, cfg: MpnConfig, params: MpnParams) -> MpnOutput:
    """Build the pyramid, fuse all levels at full resolution.

    Fusion accumulates level 0 upward so the result is bit-reproducible.
    Train mode attaches each level's full-resolution projected map (the
    summands); infer mode returns only the fused map.
    """
    f = _check_feature_map(f, 4)
    _check_params(cfg, params)
    if f.shape[2] != cfg.in_channels:
        raise ShapeError(
            f"input has {f.shape[2]} channels, config expects {cfg.in_channels}"
        )
    h, w, _ = f.shape

    pyramid = [f]
    for proj in params.down_projs:
        pyramid.append(downsample2x(pyramid[-1], proj))

    fused = None
    levels = []
    for level, proj in zip(pyramid, params.fuse_projs):
        full = _project_pixels(upsample2x(level, h, w), proj)
        levels.append(full)
        fused = full if fused is None else fused + full

    if cfg.mode == "train":
        return MpnOutput(fused=fused, levels=tuple(levels))
    return MpnOutput(fused=fused, levels=None)
