"""Deterministic synthetic scenes and a jitter model for testing metrics.

Scenes place lane dividers and road boundaries as smooth curves in disjoint
vertical slots and pedestrian crossings as closed rectangles in disjoint
horizontal bands, keeping same-class instances more than 2 m apart so
greedy matching on fixtures is never ambiguous. The perturbation model
displaces points (white noise or an alternating perpendicular zigzag),
drops instances, and injects spurious ones, which is enough to exercise
losses, matching, and ranked average precision end to end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .direction_loss import direction_loss
from .evaluation import evaluate
from .geometry import (
    CLASS_LABELS,
    DEFAULT_EXTENT,
    InvalidInputError,
    MapInstance,
    Scene,
    resample,
)
from .rng import SeededRng

# Layout constants (meters). Curve slots must exceed twice the maximum
# lateral deviation by > 2 so neighboring curves stay separated; crossing
# bands likewise bound the rectangle half-extent (1.5 + 0.9 center play).
_MARGIN = 1.0
_CURVE_MAX_DEV = 1.0
_MIN_SLOT_W = 2.0 * _CURVE_MAX_DEV + 2.2
_MIN_BAND_H = 7.2
_DENSE_SAMPLES = 129

_SWEEP_JITTER_OFFSET = 1_000_000_007

JITTER_MODES = ("gaussian", "alternating_perpendicular")


@dataclass(frozen=True)
class SceneConfig:
    seed: int = 0
    n_dividers: int = 2
    n_boundaries: int = 2
    n_crossings: int = 1
    points_per_instance: int = 20
    extent: tuple = DEFAULT_EXTENT

    def __post_init__(self):
        if min(self.n_dividers, self.n_boundaries, self.n_crossings) < 0:
            raise InvalidInputError("instance counts must be non-negative")
        if self.points_per_instance < 4:
            raise InvalidInputError(
                f"points_per_instance must be >= 4, got {self.points_per_instance}"
            )
        ext = tuple(float(v) for v in self.extent)
        if len(ext) != 4 or ext[0] >= ext[2] or ext[1] >= ext[3]:
            raise InvalidInputError(f"degenerate extent {ext}")
        object.__setattr__(self, "extent", ext)


@dataclass(frozen=True)
class JitterConfig:
    sigma: float = 0.1
    mode: str = "gaussian"
    seed: int = 0
    drop_rate: float = 0.0
    spurious_rate: float = 0.0

    def __post_init__(self):
        if self.sigma < 0.0:
            raise InvalidInputError(f"sigma must be >= 0, got {self.sigma}")
        if self.mode not in JITTER_MODES:
            raise InvalidInputError(f"mode must be one of {JITTER_MODES}")
        if not 0.0 <= self.drop_rate <= 1.0:
            raise InvalidInputError(f"drop_rate {self.drop_rate} outside [0, 1]")
        if self.spurious_rate < 0.0:
            raise InvalidInputError("spurious_rate must be >= 0")


@dataclass(frozen=True)
class SweepRow:
    sigma: float
    mean_vddl: float
    mean_map: float
    mean_acd: Optional[float]


def _curve_points(xc, c1, c2, c3, y_lo, y_hi, n):
    """Monotone-in-y polynomial curve, centered on xc, resampled uniformly."""
    t = np.linspace(-1.0, 1.0, _DENSE_SAMPLES)
    # Centered basis keeps the curve's mean on xc: t, t^2 - 1/3, t^3 - 3t/5.
    x = xc + c1 * t + c2 * (t**2 - 1.0 / 3.0) + c3 * (t**3 - 0.6 * t)
    y = 0.5 * (y_lo + y_hi) + 0.5 * (y_hi - y_lo) * t
    dense = MapInstance("divider", np.column_stack([x, y]))
    return resample(dense, n).points


def _rectangle_points(cx, cy, width, height, n):
    hw, hh = 0.5 * width, 0.5 * height
    corners = np.array(
        [
            [cx - hw, cy - hh],
            [cx + hw, cy - hh],
            [cx + hw, cy + hh],
            [cx - hw, cy + hh],
        ]
    )
    box = MapInstance("pedestrian_crossing", corners, topology="closed")
    return resample(box, n).points


def generate_scene(cfg: SceneConfig, frame_id: Optional[str] = None) -> Scene:
    """Deterministic ground-truth scene for ``cfg.seed``.

    Dividers are quadratic curves, boundaries cubic, crossings rectangles;
    everything stays inside the extent and same-class instances sit in
    disjoint slots/bands. Raises when the extent cannot hold the requested
    counts at the guaranteed separation.
    """
    x0, y0, x1, y1 = cfg.extent
    usable_w = x1 - x0 - 2.0 * _MARGIN
    usable_h = y1 - y0 - 2.0 * _MARGIN
    n_curves = cfg.n_dividers + cfg.n_boundaries
    if n_curves > 0 and usable_w / n_curves < _MIN_SLOT_W:
        raise InvalidInputError(
            f"extent fits at most {int(usable_w / _MIN_SLOT_W)} curve instances, "
            f"requested {n_curves}"
        )
    if cfg.n_crossings > 0:
        if usable_h / cfg.n_crossings < _MIN_BAND_H:
            raise InvalidInputError(
                f"extent fits at most {int(usable_h / _MIN_BAND_H)} crossings, "
                f"requested {cfg.n_crossings}"
            )
        if usable_w < 16.0:
            raise InvalidInputError("extent too narrow for crossings (needs 18 m)")

    rng = SeededRng(cfg.seed)
    y_lo, y_hi = y0 + _MARGIN, y1 - _MARGIN
    n = cfg.points_per_instance
    instances = []

    slot_w = usable_w / n_curves if n_curves else 0.0
    for k in range(cfg.n_dividers):
        xc = x0 + _MARGIN + (k + 0.5) * slot_w
        c1 = rng.uniform(-0.6, 0.6)
        c2 = rng.uniform(-0.6, 0.6)
        pts = _curve_points(xc, c1, c2, 0.0, y_lo, y_hi, n)
        instances.append(MapInstance("divider", pts))
    for k in range(cfg.n_boundaries):
        xc = x0 + _MARGIN + (cfg.n_dividers + k + 0.5) * slot_w
        c1 = rng.uniform(-0.5, 0.5)
        c2 = rng.uniform(-0.45, 0.45)
        c3 = rng.uniform(-0.5, 0.5)
        pts = _curve_points(xc, c1, c2, c3, y_lo, y_hi, n)
        instances.append(MapInstance("boundary", pts))

    band_h = usable_h / cfg.n_crossings if cfg.n_crossings else 0.0
    for k in range(cfg.n_crossings):
        width = rng.uniform(8.0, 12.0)
        height = rng.uniform(2.0, 3.0)
        cx = 0.5 * (x0 + x1) + rng.uniform(-2.0, 2.0)
        cy = y_lo + (k + 0.5) * band_h + rng.uniform(-0.9, 0.9)
        pts = _rectangle_points(cx, cy, width, height, n)
        instances.append(MapInstance("pedestrian_crossing", pts, topology="closed"))

    if frame_id is None:
        frame_id = f"seed-{cfg.seed}"
    return Scene(instances=tuple(instances), frame_id=frame_id, extent=cfg.extent)


def _alternating_displacement(points: np.ndarray, closed: bool, sigma: float):
    """Zigzag field: +/- sigma along each point's local perpendicular."""
    n = points.shape[0]
    if closed:
        ahead = np.roll(points, -1, axis=0) - points
    else:
        ahead = np.empty_like(points)
        ahead[:-1] = points[1:] - points[:-1]
        ahead[-1] = points[-1] - points[-2]
    norms = np.sqrt((ahead**2).sum(axis=1))
    norms = np.where(norms > 0.0, norms, 1.0)
    perp = np.column_stack([-ahead[:, 1], ahead[:, 0]]) / norms[:, None]
    signs = np.where(np.arange(n) % 2 == 0, 1.0, -1.0)
    return sigma * signs[:, None] * perp


def perturb(scene: Scene, j: JitterConfig) -> Scene:
    """Jittered prediction scene for a ground-truth scene.

    Surviving instances keep class, topology, and point order; their
    confidence is exp(-sigma) clamped to [0.05, 1]. Spurious instances get
    half that confidence. Draw order is fixed (per instance: drop, then
    noise; then spurious placement), so results depend only on the configs.
    """
    rng = SeededRng(j.seed)
    confidence = min(1.0, max(0.05, math.exp(-j.sigma)))
    out = []
    for inst in scene.instances:
        dropped = rng.uniform() < j.drop_rate
        if dropped:
            continue
        if j.mode == "gaussian":
            disp = rng.normals(2 * inst.n_points, j.sigma).reshape(-1, 2)
        else:
            disp = _alternating_displacement(inst.points, inst.is_closed, j.sigma)
        out.append(
            MapInstance(
                inst.class_label,
                inst.points + disp,
                topology=inst.topology,
                confidence=confidence,
            )
        )

    x0, y0, x1, y1 = scene.extent
    for _ in range(rng.poisson(j.spurious_rate)):
        label = CLASS_LABELS[int(rng.uniform(0.0, 3.0))]
        cx = rng.uniform(x0 + 2.5, x1 - 2.5)
        cy = rng.uniform(y0 + 2.5, y1 - 2.5)
        theta = rng.uniform(0.0, 2.0 * math.pi)
        if label == "pedestrian_crossing":
            pts = _rectangle_points(cx, cy, 2.0, 2.0, 8)
            topology = "closed"
        else:
            center = np.array([cx, cy])
            d = 2.0 * np.array([math.cos(theta), math.sin(theta)])
            pts = np.linspace(center - d, center + d, 8)
            topology = "open"
        out.append(
            MapInstance(label, pts, topology=topology, confidence=0.5 * confidence)
        )

    return Scene(instances=tuple(out), frame_id=scene.frame_id, extent=scene.extent)


def _scene_vddl(pred: Scene, gt: Scene) -> float:
    pairs = list(zip(pred.instances, gt.instances))
    if not pairs:
        return 0.0
    return sum(direction_loss(p, g).total for p, g in pairs) / len(pairs)


def jitter_sweep(
    cfg: SceneConfig, sigmas: Sequence[float], trials: int
) -> list:
    """Mean direction loss / mAP / ACD per jitter amplitude.

    Each trial generates one scene (seed + trial index) and perturbs it at
    every sigma with the same noise stream, so the displacement field
    scales linearly with sigma and the metrics respond monotonically.
    Rows come back ordered by sigma.
    """
    if trials < 1:
        raise InvalidInputError(f"trials must be >= 1, got {trials}")
    sigma_list = sorted(float(s) for s in sigmas)
    if not sigma_list:
        raise InvalidInputError("need at least one sigma")
    if sigma_list[0] < 0.0:
        raise InvalidInputError("sigmas must be >= 0")

    vddl = {s: [] for s in sigma_list}
    maps = {s: [] for s in sigma_list}
    acds = {s: [] for s in sigma_list}
    for t in range(trials):
        gt = generate_scene(replace(cfg, seed=cfg.seed + t))
        for s in sigma_list:
            jcfg = JitterConfig(
                sigma=s, mode="gaussian", seed=cfg.seed + t + _SWEEP_JITTER_OFFSET
            )
            pred = perturb(gt, jcfg)
            report = evaluate([pred], [gt])
            vddl[s].append(_scene_vddl(pred, gt))
            maps[s].append(report.mean_ap)
            if report.acd is not None:
                acds[s].append(report.acd)

    rows = []
    for s in sigma_list:
        mean_acd = sum(acds[s]) / len(acds[s]) if acds[s] else None
        rows.append(
            SweepRow(
                sigma=s,
                mean_vddl=sum(vddl[s]) / trials,
                mean_map=sum(maps[s]) / trials,
                mean_acd=mean_acd,
            )
        )
    return rows
