"""Direction-difference loss over predicted vs. ground-truth polylines.

Each segment of the prediction is compared to the corresponding GT segment
by the cosine of their angle; the (1 - cos) penalty of a segment is scaled
by the turn-sharpness weights of its two endpoint points, so sharply
turning parts of the ground truth attract more supervision. The loss has a
closed-form gradient with respect to the predicted points.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import InvalidInputError, MapInstance, segment_vectors


@dataclass(frozen=True)
class LossConfig:
    """Guards and weights for the combined training loss.

    ``epsilon`` is a degenerate-segment guard: a norm product below it is
    replaced by it, which zeroes the cosine of exact zero-length segments
    while leaving non-degenerate segments exactly scale-invariant.
    """

    epsilon: float = 1e-8
    l1_weight: float = 5.0
    direction_weight: float = 1.0

    def __post_init__(self):
        if not self.epsilon > 0.0:
            raise InvalidInputError(f"epsilon must be positive, got {self.epsilon}")
        if self.l1_weight < 0.0 or self.direction_weight < 0.0:
            raise InvalidInputError("loss weights must be non-negative")


@dataclass(frozen=True)
class LossBreakdown:
    """Per-segment and per-point detail of one loss evaluation.

    grad is the (N, 2) derivative of ``total`` w.r.t. the predicted points;
    GT points and the weights derived from them are constants.
    """

    segment_cos: np.ndarray
    gt_turn_cos: np.ndarray
    point_weights: np.ndarray
    total: float
    grad: np.ndarray


@dataclass(frozen=True)
class CombinedLoss:
    total: float
    l1: float
    direction: LossBreakdown
    grad: np.ndarray


def _check_pair(pred: MapInstance, gt: MapInstance) -> None:
    if pred.n_points != gt.n_points:
        raise InvalidInputError(
            f"point counts differ: pred has {pred.n_points}, gt has {gt.n_points}"
        )
    if pred.topology != gt.topology:
        raise InvalidInputError(
            f"topologies differ: pred is {pred.topology}, gt is {gt.topology}"
        )


def _guarded_cos(u: np.ndarray, g: np.ndarray, eps: float) -> np.ndarray:
    dots = (u * g).sum(axis=1)
    denom = np.sqrt((u**2).sum(axis=1)) * np.sqrt((g**2).sum(axis=1))
    # Clip: rounding can push a parallel pair a few ulp past 1, and the
    # loss/weight laws assume cosines in [-1, 1].
    return np.clip(dots / np.maximum(denom, eps), -1.0, 1.0)


def segment_cosines(
    pred: MapInstance, gt: MapInstance, cfg: LossConfig = LossConfig()
) -> np.ndarray:
    """Cosine between each predicted segment and its GT counterpart.

    One value per segment: N-1 for open topology, N for closed.
    """
    _check_pair(pred, gt)
    return _guarded_cos(segment_vectors(pred), segment_vectors(gt), cfg.epsilon)


def turn_cosines(gt: MapInstance, cfg: LossConfig = LossConfig()) -> np.ndarray:
    """Per-point cosine between the GT segments meeting at each point.

    Open endpoints have a single neighboring segment and record the sentinel
    value 1 (no turn). Closed instances treat every point as interior via
    wrap-around segments. Values are clamped to [-1, 1] so the derived
    weights stay exactly inside their bounds.
    """
    segs = segment_vectors(gt)
    if gt.is_closed:
        cos = _guarded_cos(np.roll(segs, 1, axis=0), segs, cfg.epsilon)
    else:
        cos = np.ones(gt.n_points)
        cos[1:-1] = _guarded_cos(segs[:-1], segs[1:], cfg.epsilon)
    return np.clip(cos, -1.0, 1.0)


def point_weights(gt: MapInstance, cfg: LossConfig = LossConfig()) -> np.ndarray:
    """Turn-sharpness weight exp((1 - cos)/2) per point, in [1, e].

    Open endpoints get exactly 1.0.
    """
    w = np.exp((1.0 - turn_cosines(gt, cfg)) / 2.0)
    if not gt.is_closed:
        w[0] = 1.0
        w[-1] = 1.0
    return w


def _segment_weight_sums(weights: np.ndarray, closed: bool) -> np.ndarray:
    if closed:
        return weights + np.roll(weights, -1)
    return weights[:-1] + weights[1:]


def direction_loss(
    pred: MapInstance, gt: MapInstance, cfg: LossConfig = LossConfig()
) -> LossBreakdown:
    """Weighted angular penalty between predicted and GT segment directions.

    total = sum over segments s of (1 - cos_s) * (W_start(s) + W_end(s)),
    which is the same as accumulating at every point the angle penalties of
    its adjacent segments; open endpoints contribute their single neighbor.
    Expects gt already canonicalized against pred (see
    :func:`mapvec.geometry.canonicalize_gt_order`); the loss itself never
    reorders points.
    """
    _check_pair(pred, gt)
    eps = cfg.epsilon
    u = segment_vectors(pred)
    g = segment_vectors(gt)

    dots = (u * g).sum(axis=1)
    nu = np.sqrt((u**2).sum(axis=1))
    ng = np.sqrt((g**2).sum(axis=1))
    denom = np.maximum(nu * ng, eps)
    cos = np.clip(dots / denom, -1.0, 1.0)

    weights = point_weights(gt, cfg)
    coef = _segment_weight_sums(weights, gt.is_closed)
    total = float(np.dot(1.0 - cos, coef))

    # d cos / d u = g/denom - cos * u/|u|^2; degenerate segments contribute 0.
    live = (nu * ng) > 0.0
    nu_sq = np.where(nu > 0.0, nu**2, 1.0)
    dcos = g / denom[:, None] - (cos / nu_sq)[:, None] * u
    dcos[~live] = 0.0

    n = pred.n_points
    contrib = coef[:, None] * dcos
    grad = np.zeros((n, 2))
    if gt.is_closed:
        starts = np.arange(n)
        ends = (starts + 1) % n
    else:
        starts = np.arange(n - 1)
        ends = starts + 1
    np.add.at(grad, starts, contrib)
    np.add.at(grad, ends, -contrib)

    return LossBreakdown(
        segment_cos=cos,
        gt_turn_cos=turn_cosines(gt, cfg),
        point_weights=weights,
        total=total,
        grad=grad,
    )


def direction_loss_grad(
    pred: MapInstance, gt: MapInstance, cfg: LossConfig = LossConfig()
) -> np.ndarray:
    """(N, 2) gradient of the direction loss w.r.t. the predicted points."""
    return direction_loss(pred, gt, cfg).grad


def combined_loss(
    pred: MapInstance, gt: MapInstance, cfg: LossConfig = LossConfig()
) -> CombinedLoss:
    """l1_weight * mean pointwise L1 + direction_weight * direction loss.

    The L1 gradient uses sign(0) = 0 at kink points.
    """
    _check_pair(pred, gt)
    diff = pred.points - gt.points
    n = pred.n_points
    l1 = float(np.abs(diff).sum() / n)
    l1_grad = np.sign(diff) / n
    breakdown = direction_loss(pred, gt, cfg)
    total = cfg.l1_weight * l1 + cfg.direction_weight * breakdown.total
    grad = cfg.l1_weight * l1_grad + cfg.direction_weight * breakdown.grad
    return CombinedLoss(total=total, l1=l1, direction=breakdown, grad=grad)
