"""Slow, self-contained re-implementation of the evaluation protocol.

Used only as a cross-check: plain Python loops, no imports from
mapvec.evaluation. Arithmetic mirrors the documented protocol step by step
(directed mean chamfer sums in index order, greedy confidence-descending
matching, pooled 101-point interpolated AP) so results must agree exactly
with the library on small fixtures.
"""

import math

CLASS_LABELS = ("divider", "pedestrian_crossing", "boundary")
THRESHOLDS = (0.5, 1.0, 1.5)
ACD_TAU = 1.5


def oracle_chamfer(a, b):
    def directed(src, dst):
        total = 0.0
        for x, y in src:
            best = math.inf
            for u, v in dst:
                d = math.sqrt((x - u) * (x - u) + (y - v) * (y - v))
                if d < best:
                    best = d
            total += best
        return total / len(src)

    pa = [(float(p[0]), float(p[1])) for p in a]
    pb = [(float(p[0]), float(p[1])) for p in b]
    return directed(pa, pb) + directed(pb, pa)


def _confidence(inst):
    return 1.0 if inst.confidence is None else inst.confidence


def oracle_match(preds, gts, tau):
    """Greedy matching; returns (pairs, unmatched_pred_indices, free_gt_indices)."""
    remaining = list(range(len(preds)))
    visit = []
    while remaining:  # selection sort by (-confidence, index)
        best = remaining[0]
        for i in remaining[1:]:
            if _confidence(preds[i]) > _confidence(preds[best]):
                best = i
        visit.append(best)
        remaining.remove(best)

    free = list(range(len(gts)))
    pairs, unmatched = [], []
    for pi in visit:
        chosen, chosen_d = None, None
        for gi in free:
            d = oracle_chamfer(preds[pi].points, gts[gi].points)
            if chosen_d is None or d < chosen_d:
                chosen, chosen_d = gi, d
        if chosen is not None and chosen_d <= tau:
            pairs.append((pi, chosen, chosen_d))
            free.remove(chosen)
        else:
            unmatched.append(pi)
    return pairs, sorted(unmatched), free


def oracle_ap(records, n_gt):
    """records: (confidence, frame_pos, pred_idx, is_tp)."""
    if n_gt == 0:
        return 0.0
    ranked = sorted(records, key=lambda r: (-r[0], r[1], r[2]))
    points = []
    tp = 0
    for rank, rec in enumerate(ranked, start=1):
        if rec[3]:
            tp += 1
        points.append((tp / n_gt, tp / rank))
    area = 0.0
    for i in range(101):
        level = i / 100
        best = 0.0
        for recall, precision in points:
            if recall >= level and precision > best:
                best = precision
        area += best
    return area / 101


def oracle_evaluate(pred_scenes, gt_scenes):
    """Full protocol; returns a plain dict keyed like EvalReport fields."""
    ap_by_threshold = {}
    ap = {}
    class_acd = {}
    counts = {}
    pooled_chamfers = []

    for label in CLASS_LABELS:
        frames = []
        for p, g in zip(pred_scenes, gt_scenes):
            ps = [inst for inst in p.instances if inst.class_label == label]
            gs = [inst for inst in g.instances if inst.class_label == label]
            frames.append((ps, gs))
        n_pred = sum(len(ps) for ps, _ in frames)
        n_gt = sum(len(gs) for _, gs in frames)
        counts[label] = (n_pred, n_gt)

        if n_pred == 0 and n_gt == 0:
            ap_by_threshold[label] = {tau: None for tau in THRESHOLDS}
            ap[label] = None
            class_acd[label] = None
            continue

        per_tau = {}
        for tau in THRESHOLDS:
            records = []
            for frame_pos, (ps, gs) in enumerate(frames):
                pairs, _, _ = oracle_match(ps, gs, tau)
                hit = {pi for pi, _, _ in pairs}
                for i, inst in enumerate(ps):
                    records.append((_confidence(inst), frame_pos, i, i in hit))
            per_tau[tau] = oracle_ap(records, n_gt)
        ap_by_threshold[label] = per_tau
        ap[label] = sum(per_tau.values()) / len(THRESHOLDS)

        chamfers = []
        for ps, gs in frames:
            pairs, _, _ = oracle_match(ps, gs, ACD_TAU)
            chamfers.extend(d for _, _, d in pairs)
        class_acd[label] = sum(chamfers) / len(chamfers) if chamfers else None
        pooled_chamfers.extend(chamfers)

    with_gt = [label for label in CLASS_LABELS if counts[label][1] > 0]
    mean_ap = sum(ap[label] for label in with_gt) / len(with_gt) if with_gt else 0.0
    overall_acd = sum(pooled_chamfers) / len(pooled_chamfers) if pooled_chamfers else None
    return {
        "class_ap_by_threshold": ap_by_threshold,
        "class_ap": ap,
        "mean_ap": mean_ap,
        "class_acd": class_acd,
        "acd": overall_acd,
        "class_counts": counts,
    }
