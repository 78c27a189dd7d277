"""Two-stage interactive attention over instance/point query hierarchies.

A flat (N_i * N_p, C) embedding — instance-major, point-minor — goes through
an instance stage (merge each instance's points channel-wise, compress with
an MLP, self-attend across instances) and a point stage (add the instance
summary back, self-attend within each instance). Instances never exchange
information in the point stage, and nothing carries positional encoding, so
the whole block is equivariant to instance permutations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .nn import (
    MhsaParams,
    ShapeError,
    init_linear,
    init_mhsa,
    mhsa_forward,
    mlp_forward,
)
from .rng import SeededRng


@dataclass(frozen=True)
class IiaConfig:
    n_instances: int = 8
    n_points: int = 20
    channels: int = 32
    num_heads: int = 4
    mlp_hidden: int = 0  # 0 means 2 * channels

    def __post_init__(self):
        if self.n_instances < 1 or self.n_points < 1 or self.channels < 1:
            raise ShapeError(
                f"invalid dims: n_instances={self.n_instances} "
                f"n_points={self.n_points} channels={self.channels}"
            )
        if self.num_heads < 1 or self.channels % self.num_heads != 0:
            raise ShapeError(
                f"channels {self.channels} not divisible by num_heads {self.num_heads}"
            )
        if self.mlp_hidden == 0:
            object.__setattr__(self, "mlp_hidden", 2 * self.channels)
        if self.mlp_hidden < 1:
            raise ShapeError(f"mlp_hidden must be positive, got {self.mlp_hidden}")


@dataclass(frozen=True)
class IiaParams:
    """Merge MLP ((C*N_p) -> hidden -> C) plus the two attention stages."""

    n_points: int
    channels: int
    merge_mlp: tuple
    instance_attn: MhsaParams
    point_attn: MhsaParams

    def __post_init__(self):
        c, n_p = self.channels, self.n_points
        if not self.merge_mlp:
            raise ShapeError("merge_mlp needs at least one layer")
        if self.merge_mlp[0].in_dim != c * n_p:
            raise ShapeError(
                f"merge_mlp expects input width {self.merge_mlp[0].in_dim}, "
                f"layout needs {c} * {n_p} = {c * n_p}"
            )
        if self.merge_mlp[-1].out_dim != c:
            raise ShapeError(
                f"merge_mlp emits width {self.merge_mlp[-1].out_dim}, expected {c}"
            )
        for attn in (self.instance_attn, self.point_attn):
            if attn.model_dim != c:
                raise ShapeError(
                    f"attention model_dim {attn.model_dim} != channels {c}"
                )


def init_iia_params(cfg: IiaConfig, rng: SeededRng) -> IiaParams:
    """Draw order: merge MLP layers, instance attention, point attention."""
    merge_mlp = (
        init_linear(rng, cfg.channels * cfg.n_points, cfg.mlp_hidden),
        init_linear(rng, cfg.mlp_hidden, cfg.channels),
    )
    instance_attn = init_mhsa(rng, cfg.channels, cfg.num_heads)
    point_attn = init_mhsa(rng, cfg.channels, cfg.num_heads)
    return IiaParams(
        n_points=cfg.n_points,
        channels=cfg.channels,
        merge_mlp=merge_mlp,
        instance_attn=instance_attn,
        point_attn=point_attn,
    )


def compose_queries(q_ins: np.ndarray, q_pos: np.ndarray) -> np.ndarray:
    """Broadcast-sum instance and point queries into the flat hierarchy.

    Row i * N_p + j of the result is q_ins[i] + q_pos[j]; point-level
    queries are shared across instances.
    """
    q_ins = np.asarray(q_ins, dtype=float)
    q_pos = np.asarray(q_pos, dtype=float)
    if q_ins.ndim != 2 or q_pos.ndim != 2 or q_ins.shape[1] != q_pos.shape[1]:
        raise ShapeError(
            f"query shapes {q_ins.shape} and {q_pos.shape} have mismatched channels"
        )
    n_i, c = q_ins.shape
    n_p = q_pos.shape[0]
    return (q_ins[:, None, :] + q_pos[None, :, :]).reshape(n_i * n_p, c)


def _split_hierarchy(h: np.ndarray, p: IiaParams):
    h = np.asarray(h, dtype=float)
    if h.ndim != 2 or h.shape[1] != p.channels:
        raise ShapeError(
            f"embedding shape {h.shape} incompatible with channels {p.channels}"
        )
    if h.shape[0] % p.n_points != 0:
        raise ShapeError(
            f"embedding rows {h.shape[0]} not a multiple of n_points {p.n_points}"
        )
    return h, h.shape[0] // p.n_points


def instance_self_attention(h: np.ndarray, p: IiaParams) -> np.ndarray:
    """Compress each instance's point block and self-attend across instances.

    The merge concatenates the instance's points channel-wise in point
    order (a reshape under the instance-major layout), so the result is
    sensitive to point order within an instance by design.
    """
    h, n_i = _split_hierarchy(h, p)
    merged = h.reshape(n_i, p.n_points * p.channels)
    compressed = mlp_forward(merged, p.merge_mlp)
    return mhsa_forward(compressed, p.instance_attn)


def point_self_attention(h: np.ndarray, f_ins: np.ndarray, p: IiaParams) -> np.ndarray:
    """Add the instance summary to its rows, then attend within each instance.

    Attention runs independently per instance block; no information moves
    between instances here.
    """
    h, n_i = _split_hierarchy(h, p)
    f_ins = np.asarray(f_ins, dtype=float)
    if f_ins.shape != (n_i, p.channels):
        raise ShapeError(
            f"instance embedding shape {f_ins.shape}, expected {(n_i, p.channels)}"
        )
    enriched = h + np.repeat(f_ins, p.n_points, axis=0)
    out = np.empty_like(enriched)
    for i in range(n_i):
        block = slice(i * p.n_points, (i + 1) * p.n_points)
        out[block] = mhsa_forward(enriched[block], p.point_attn)
    return out


def iia_forward(h: np.ndarray, p: IiaParams) -> np.ndarray:
    """Instance stage then point stage; output shape equals input shape."""
    return point_self_attention(h, instance_self_attention(h, p), p)
