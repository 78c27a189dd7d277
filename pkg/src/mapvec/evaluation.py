"""Chamfer-based matching and detection metrics for vectorized map instances.

Predictions are matched to ground truth per class with a greedy,
confidence-ranked assignment under a chamfer-distance threshold; average
precision is the 101-point interpolated area under the pooled
precision/recall curve. All ranking and AP arithmetic is done in plain
Python floats so results are reproducible bit-for-bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .geometry import (
    CLASS_LABELS,
    InvalidInputError,
    MapInstance,
    Scene,
    chamfer_distance,
)

CHAMFER_THRESHOLDS = (0.5, 1.0, 1.5)
ACD_THRESHOLD = 1.5


@dataclass(frozen=True)
class MatchResult:
    """Greedy assignment between one frame's predictions and ground truth.

    pairs holds (pred_index, gt_index, chamfer) in the order the
    assignments were made (descending confidence); every pair's chamfer is
    <= threshold.
    """

    pairs: tuple
    unmatched_preds: tuple
    unmatched_gts: tuple
    threshold: float


@dataclass(frozen=True)
class EvalReport:
    """Detection metrics over a list of frames.

    AP values are None for classes that appear in neither the predictions
    nor the ground truth; a class with predictions but no ground truth
    scores 0.0. mean_ap averages the classes that have ground truth.
    class_counts maps label -> (n_pred, n_gt). ACD values are the mean
    chamfer over matched pairs at the loosest threshold, or None when
    nothing matched.
    """

    class_ap_by_threshold: dict
    class_ap: dict
    mean_ap: float
    class_acd: dict
    acd: Optional[float]
    class_counts: dict

    def to_mapping(self) -> dict:
        """JSON-ready nested dict with stable key order."""
        return {
            "mean_ap": self.mean_ap,
            "acd": self.acd,
            "classes": {
                label: {
                    "n_pred": self.class_counts[label][0],
                    "n_gt": self.class_counts[label][1],
                    "ap": self.class_ap[label],
                    "ap_by_threshold": {
                        f"{tau:g}": self.class_ap_by_threshold[label][tau]
                        for tau in CHAMFER_THRESHOLDS
                    },
                    "acd": self.class_acd[label],
                }
                for label in CLASS_LABELS
            },
        }


def _conf(inst: MapInstance) -> float:
    """Ranking confidence; instances without one rank as certain."""
    return 1.0 if inst.confidence is None else inst.confidence


def match_at_threshold(
    preds: Sequence[MapInstance], gts: Sequence[MapInstance], tau: float
) -> MatchResult:
    """Greedily match same-class predictions to ground truth under ``tau``.

    Predictions are visited by descending confidence (ties: lower index
    first). Each takes the unmatched GT with the smallest chamfer distance
    (ties: lower index) provided that distance is <= tau.
    """
    if not tau > 0.0:
        raise InvalidInputError(f"threshold must be positive, got {tau}")
    labels = {inst.class_label for inst in preds} | {inst.class_label for inst in gts}
    if len(labels) > 1:
        raise InvalidInputError(f"matching expects one class, got {sorted(labels)}")

    order = sorted(range(len(preds)), key=lambda i: (-_conf(preds[i]), i))
    free = list(range(len(gts)))
    pairs = []
    unmatched_preds = []
    for pi in order:
        if not free:
            unmatched_preds.append(pi)
            continue
        best_gi = -1
        best_d = None
        for gi in free:
            d = chamfer_distance(preds[pi].points, gts[gi].points)
            if best_d is None or d < best_d:
                best_gi, best_d = gi, d
        if best_d <= tau:
            pairs.append((pi, best_gi, best_d))
            free.remove(best_gi)
        else:
            unmatched_preds.append(pi)
    return MatchResult(
        pairs=tuple(pairs),
        unmatched_preds=tuple(sorted(unmatched_preds)),
        unmatched_gts=tuple(free),
        threshold=float(tau),
    )


def average_precision(records: Sequence[tuple], n_gt: int) -> float:
    """101-point interpolated AP from pooled detection records.

    Each record is (confidence, frame_pos, pred_idx, is_tp); ranking is by
    descending confidence with (frame_pos, pred_idx) as the deterministic
    tie-break. With no ground truth the score is 0.0 by convention.
    """
    if n_gt < 0:
        raise InvalidInputError(f"n_gt must be non-negative, got {n_gt}")
    if n_gt == 0:
        return 0.0
    ordered = sorted(records, key=lambda r: (-r[0], r[1], r[2]))
    curve = []
    tp = 0
    for k, rec in enumerate(ordered, start=1):
        if rec[3]:
            tp += 1
        curve.append((tp / n_gt, tp / k))
    total = 0.0
    for i in range(101):
        r = i / 100
        best = 0.0
        for recall, precision in curve:
            if recall >= r and precision > best:
                best = precision
        total += best
    return total / 101


def acd(chamfers: Sequence[float]) -> Optional[float]:
    """Mean chamfer over matched pairs; None when nothing matched."""
    values = list(chamfers)
    if not values:
        return None
    return sum(values) / len(values)


def _class_instances(scene: Scene, label: str):
    return [inst for inst in scene.instances if inst.class_label == label]


def evaluate(pred_scenes: Sequence[Scene], gt_scenes: Sequence[Scene]) -> EvalReport:
    """Match every frame per class and report AP / mean AP / ACD.

    Frames are paired by position; annotations pool across frames for the
    precision/recall curve while matching stays within each frame.
    """
    if len(pred_scenes) != len(gt_scenes):
        raise InvalidInputError(
            f"frame count mismatch: {len(pred_scenes)} predicted vs "
            f"{len(gt_scenes)} ground truth"
        )
    for p, g in zip(pred_scenes, gt_scenes):
        if p.frame_id != g.frame_id:
            raise InvalidInputError(
                f"frame id mismatch: {p.frame_id!r} vs {g.frame_id!r}"
            )

    class_ap_by_threshold = {}
    class_ap = {}
    class_acd = {}
    class_counts = {}
    all_acd_chamfers = []

    for label in CLASS_LABELS:
        per_frame = [
            (_class_instances(p, label), _class_instances(g, label))
            for p, g in zip(pred_scenes, gt_scenes)
        ]
        n_pred = sum(len(ps) for ps, _ in per_frame)
        n_gt = sum(len(gs) for _, gs in per_frame)
        class_counts[label] = (n_pred, n_gt)

        if n_pred == 0 and n_gt == 0:
            class_ap_by_threshold[label] = {tau: None for tau in CHAMFER_THRESHOLDS}
            class_ap[label] = None
            class_acd[label] = None
            continue

        by_threshold = {}
        for tau in CHAMFER_THRESHOLDS:
            records = []
            for frame_pos, (ps, gs) in enumerate(per_frame):
                matched = {pi for pi, _, _ in match_at_threshold(ps, gs, tau).pairs}
                for i, inst in enumerate(ps):
                    records.append((_conf(inst), frame_pos, i, i in matched))
            by_threshold[tau] = average_precision(records, n_gt)
        class_ap_by_threshold[label] = by_threshold
        class_ap[label] = sum(by_threshold.values()) / len(CHAMFER_THRESHOLDS)

        chamfers = []
        for ps, gs in per_frame:
            result = match_at_threshold(ps, gs, ACD_THRESHOLD)
            chamfers.extend(d for _, _, d in result.pairs)
        class_acd[label] = acd(chamfers)
        all_acd_chamfers.extend(chamfers)

    with_gt = [label for label in CLASS_LABELS if class_counts[label][1] > 0]
    if with_gt:
        mean_ap = sum(class_ap[label] for label in with_gt) / len(with_gt)
    else:
        mean_ap = 0.0

    return EvalReport(
        class_ap_by_threshold=class_ap_by_threshold,
        class_ap=class_ap,
        mean_ap=mean_ap,
        class_acd=class_acd,
        acd=acd(all_acd_chamfers),
        class_counts=class_counts,
    )
