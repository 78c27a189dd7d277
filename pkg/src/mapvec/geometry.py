"""Planar polyline primitives for vectorized map instances.

Coordinates are meters in a bird's-eye-view frame. An instance is an
ordered 2D point sequence with a class label and an open or closed
topology; closed instances never repeat their first point, closure is
implicit and handled by :func:`segment_vectors` alone.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

CLASS_LABELS = ("divider", "pedestrian_crossing", "boundary")
TOPOLOGIES = ("open", "closed")

# Default BEV extent (x_min, y_min, x_max, y_max) in meters.
DEFAULT_EXTENT = (-15.0, -30.0, 15.0, 30.0)


class InvalidInstanceError(ValueError):
    """An instance violates its structural invariants."""


class InvalidInputError(ValueError):
    """Operation inputs are malformed or mutually inconsistent."""


@dataclass(frozen=True, eq=False)
class MapInstance:
    """Ordered point sequence with class label, topology and optional score.

    ``points`` is an (N, 2) float64 array, N >= 2, all entries finite.
    ``confidence`` is present on predictions and ``None`` on ground truth.
    The array is frozen after construction; treat instances as immutable.
    """

    class_label: str
    points: np.ndarray
    topology: str = "open"
    confidence: float | None = None

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.float64, copy=True)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise InvalidInstanceError(f"points must have shape (N, 2), got {pts.shape}")
        if pts.shape[0] < 2:
            raise InvalidInstanceError(f"instance needs at least 2 points, got {pts.shape[0]}")
        if not np.isfinite(pts).all():
            raise InvalidInstanceError("points contain non-finite values")
        if self.class_label not in CLASS_LABELS:
            raise InvalidInstanceError(f"unknown class label {self.class_label!r}")
        if self.topology not in TOPOLOGIES:
            raise InvalidInstanceError(f"unknown topology {self.topology!r}")
        if self.confidence is not None:
            conf = float(self.confidence)
            if not (0.0 <= conf <= 1.0) or not np.isfinite(conf):
                raise InvalidInstanceError(f"confidence {conf} outside [0, 1]")
            object.__setattr__(self, "confidence", conf)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n_points(self) -> int:
        return self.points.shape[0]

    @property
    def is_closed(self) -> bool:
        return self.topology == "closed"

    def __eq__(self, other) -> bool:
        if not isinstance(other, MapInstance):
            return NotImplemented
        return (
            self.class_label == other.class_label
            and self.topology == other.topology
            and self.confidence == other.confidence
            and np.array_equal(self.points, other.points)
        )


@dataclass(frozen=True)
class Scene:
    """A set of map instances for one frame, with its BEV extent."""

    instances: tuple[MapInstance, ...] = ()
    frame_id: str = "frame_0000"
    extent: tuple[float, float, float, float] = DEFAULT_EXTENT

    def __post_init__(self):
        object.__setattr__(self, "instances", tuple(self.instances))
        ext = tuple(float(v) for v in self.extent)
        if len(ext) != 4 or ext[0] >= ext[2] or ext[1] >= ext[3]:
            raise InvalidInputError(f"degenerate extent {ext}")
        object.__setattr__(self, "extent", ext)


def segment_vectors(inst: MapInstance) -> np.ndarray:
    """Consecutive point differences; closed topology appends the wrap segment.

    Returns an (S, 2) array with S = N-1 for open and S = N for closed
    instances. Zero-length segments are permitted; consumers guard with an
    epsilon.
    """
    pts = inst.points
    if pts.shape[0] < 2:
        raise InvalidInstanceError("segment_vectors needs at least 2 points")
    segs = np.diff(pts, axis=0)
    if inst.is_closed:
        segs = np.vstack([segs, pts[0] - pts[-1]])
    return segs


def _as_point_array(points, name: str) -> np.ndarray:
    arr = np.asarray(points, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] == 0:
        raise InvalidInputError(f"{name} must be a non-empty (N, 2) point list, got shape {arr.shape}")
    return arr


def chamfer_distance(a, b) -> float:
    """Symmetric chamfer distance: sum of the two directed mean NN distances.

    CD(a, b) = mean_p min_q |p-q| + mean_q min_p |q-p|. Using means keeps
    the value independent of point count; the result is exactly symmetric.
    """
    pa = _as_point_array(a, "a")
    pb = _as_point_array(b, "b")
    d = np.sqrt(((pa[:, None, :] - pb[None, :, :]) ** 2).sum(axis=-1))
    return float(d.min(axis=1).mean() + d.min(axis=0).mean())


def arc_length(inst: MapInstance) -> float:
    """Total polyline length, including the wrap segment for closed shapes."""
    return float(np.sqrt((segment_vectors(inst) ** 2).sum(axis=1)).sum())


def resample(inst: MapInstance, n: int) -> MapInstance:
    """Place exactly n points at equal arc-length intervals.

    Open instances keep both endpoints exactly; closed instances keep point 0
    and distribute the rest along the loop. Class, topology and confidence
    are preserved. A zero-length instance collapses to n copies of its first
    point.
    """
    if n < 2:
        raise InvalidInputError(f"resample needs n >= 2, got {n}")
    pts = inst.points
    path = np.vstack([pts, pts[:1]]) if inst.is_closed else pts
    seg_len = np.sqrt((np.diff(path, axis=0) ** 2).sum(axis=1))
    cum = np.concatenate([[0.0], np.cumsum(seg_len)])
    total = cum[-1]
    if total == 0.0:
        new_pts = np.tile(pts[0], (n, 1))
    else:
        if inst.is_closed:
            targets = np.arange(n) * (total / n)
        else:
            targets = np.linspace(0.0, total, n)
        new_pts = np.column_stack(
            [np.interp(targets, cum, path[:, 0]), np.interp(targets, cum, path[:, 1])]
        )
        new_pts[0] = pts[0]
        if not inst.is_closed:
            new_pts[-1] = pts[-1]
    return replace(inst, points=new_pts)


def _equivalent_orderings(gt: MapInstance):
    """Yield (rotation, reversed_flag, index_array) for every equivalent order.

    Open instances admit identity and full reversal; closed instances admit
    every start point in both directions.
    """
    n = gt.n_points
    fwd = np.arange(n)
    if not gt.is_closed:
        yield 0, 0, fwd
        yield 0, 1, fwd[::-1]
        return
    for r in range(n):
        yield r, 0, (r + fwd) % n
        yield r, 1, (r - fwd) % n


def canonicalize_gt_order(pred: MapInstance, gt: MapInstance) -> MapInstance:
    """Reorder gt to the equivalent ordering closest to pred in pointwise L1.

    Ties prefer identity, then the lowest rotation index, then the forward
    direction, so the result is fully deterministic.
    """
    if pred.n_points != gt.n_points:
        raise InvalidInputError(
            f"point counts differ: pred has {pred.n_points}, gt has {gt.n_points}"
        )
    if pred.topology != gt.topology:
        raise InvalidInputError(
            f"topologies differ: pred is {pred.topology}, gt is {gt.topology}"
        )
    best_cost = None
    best_idx = None
    for _rot, _rev, idx in _equivalent_orderings(gt):
        cost = float(np.abs(gt.points[idx] - pred.points).sum())
        if best_cost is None or cost < best_cost:
            best_cost = cost
            best_idx = idx
    return replace(gt, points=gt.points[best_idx])
