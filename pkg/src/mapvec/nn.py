"""Minimal deterministic neural-net primitives on float64 numpy arrays.

Forward-only: linear layers, ReLU MLPs, row softmax, and multi-head
self-attention, with reproducible parameter initialization from
:class:`mapvec.rng.SeededRng`. No autodiff — the attention blocks built on
top of these are validated through structural properties, not training.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .rng import SeededRng


class ShapeError(ValueError):
    """Raised when tensor shapes do not line up; message names both."""


def _as_matrix(x: np.ndarray, what: str) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 2:
        raise ShapeError(f"{what} must be 2-d, got shape {x.shape}")
    return x


@dataclass(frozen=True)
class LinearParams:
    """Dense layer: weight (out, in), bias (out,); y = x @ weight.T + bias."""

    weight: np.ndarray
    bias: np.ndarray

    def __post_init__(self):
        w = _as_matrix(self.weight, "weight")
        b = np.asarray(self.bias, dtype=float)
        if b.ndim != 1 or b.shape[0] != w.shape[0]:
            raise ShapeError(
                f"bias shape {b.shape} does not match weight shape {w.shape}"
            )
        if not (np.isfinite(w).all() and np.isfinite(b).all()):
            raise ShapeError("linear parameters must be finite")
        w.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "weight", w)
        object.__setattr__(self, "bias", b)

    @property
    def in_dim(self) -> int:
        return self.weight.shape[1]

    @property
    def out_dim(self) -> int:
        return self.weight.shape[0]


@dataclass(frozen=True)
class MhsaParams:
    """Multi-head self-attention parameters.

    One (query, key, value) projection triple per head, each mapping
    model_dim -> model_dim // num_heads, plus an output projection over the
    concatenated heads.
    """

    num_heads: int
    model_dim: int
    query: tuple
    key: tuple
    value: tuple
    out: LinearParams

    def __post_init__(self):
        if self.num_heads < 1 or self.model_dim % self.num_heads != 0:
            raise ShapeError(
                f"model_dim {self.model_dim} not divisible by "
                f"num_heads {self.num_heads}"
            )
        d_head = self.model_dim // self.num_heads
        for name, projs in (("query", self.query), ("key", self.key), ("value", self.value)):
            if len(projs) != self.num_heads:
                raise ShapeError(f"need {self.num_heads} {name} projections, got {len(projs)}")
            for p in projs:
                if (p.in_dim, p.out_dim) != (self.model_dim, d_head):
                    raise ShapeError(
                        f"{name} projection maps {p.in_dim}->{p.out_dim}, "
                        f"expected {self.model_dim}->{d_head}"
                    )
        if (self.out.in_dim, self.out.out_dim) != (self.model_dim, self.model_dim):
            raise ShapeError(
                f"output projection maps {self.out.in_dim}->{self.out.out_dim}, "
                f"expected {self.model_dim}->{self.model_dim}"
            )


def init_linear(rng: SeededRng, in_dim: int, out_dim: int) -> LinearParams:
    """uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)) weights and bias.

    Draw order is weight (row-major) then bias, so layers consume a fixed
    slice of the stream.
    """
    if in_dim < 1 or out_dim < 1:
        raise ShapeError(f"invalid linear dims ({in_dim}, {out_dim})")
    bound = 1.0 / np.sqrt(in_dim)
    weight = rng.uniforms(out_dim * in_dim, -bound, bound).reshape(out_dim, in_dim)
    bias = rng.uniforms(out_dim, -bound, bound)
    return LinearParams(weight=weight, bias=bias)


def init_mhsa(rng: SeededRng, model_dim: int, num_heads: int) -> MhsaParams:
    """Per head: query, key, value projections in that order; then output."""
    if num_heads < 1 or model_dim % num_heads != 0:
        raise ShapeError(
            f"model_dim {model_dim} not divisible by num_heads {num_heads}"
        )
    d_head = model_dim // num_heads
    query, key, value = [], [], []
    for _ in range(num_heads):
        query.append(init_linear(rng, model_dim, d_head))
        key.append(init_linear(rng, model_dim, d_head))
        value.append(init_linear(rng, model_dim, d_head))
    out = init_linear(rng, model_dim, model_dim)
    return MhsaParams(
        num_heads=num_heads,
        model_dim=model_dim,
        query=tuple(query),
        key=tuple(key),
        value=tuple(value),
        out=out,
    )


def linear_forward(x: np.ndarray, p: LinearParams) -> np.ndarray:
    x = _as_matrix(x, "input")
    if x.shape[1] != p.in_dim:
        raise ShapeError(
            f"input shape {x.shape} incompatible with weight shape {p.weight.shape}"
        )
    return x @ p.weight.T + p.bias


def relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0)


def softmax_rows(x: np.ndarray) -> np.ndarray:
    """Row-wise softmax, stabilized by subtracting the row max."""
    x = _as_matrix(x, "input")
    shifted = x - x.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def mlp_forward(x: np.ndarray, layers: Sequence[LinearParams]) -> np.ndarray:
    """Linear layers with ReLU between them and none after the last."""
    if not layers:
        raise ShapeError("mlp needs at least one layer")
    for i, layer in enumerate(layers):
        x = linear_forward(x, layer)
        if i + 1 < len(layers):
            x = relu(x)
    return x


def mhsa_forward(x: np.ndarray, p: MhsaParams) -> np.ndarray:
    """Scaled dot-product multi-head self-attention over token rows.

    No positional encoding, so the map is permutation-equivariant in the
    token dimension.
    """
    x = _as_matrix(x, "input")
    if x.shape[1] != p.model_dim:
        raise ShapeError(
            f"input shape {x.shape} incompatible with model_dim {p.model_dim}"
        )
    d_head = p.model_dim // p.num_heads
    scale = 1.0 / np.sqrt(d_head)
    heads = []
    for h in range(p.num_heads):
        q = linear_forward(x, p.query[h])
        k = linear_forward(x, p.key[h])
        v = linear_forward(x, p.value[h])
        attn = softmax_rows((q @ k.T) * scale)
        heads.append(attn @ v)
    return linear_forward(np.concatenate(heads, axis=1), p.out)
