"""Matching, AP and ACD behavior, cross-checked against the slow oracle."""

import numpy as np
import pytest

from mapvec.evaluation import (
    ACD_THRESHOLD,
    CHAMFER_THRESHOLDS,
    EvalReport,
    acd,
    average_precision,
    evaluate,
    match_at_threshold,
)
from mapvec.geometry import InvalidInputError, MapInstance, Scene

from reference_eval import oracle_evaluate


def _inst(points, label="divider", conf=None, topology="open"):
    return MapInstance(label, np.asarray(points, dtype=float), topology, conf)


def _pair_at_offset(dy, shift_x=0.0, conf=0.9, label="divider"):
    """Pred/GT instance pair whose chamfer distance is exactly 2*dy."""
    gt = _inst([[shift_x, 0.0], [shift_x + 1.0, 0.0]], label=label)
    pred = _inst([[shift_x, dy], [shift_x + 1.0, dy]], label=label, conf=conf)
    return pred, gt


def random_micro_pair(gen, n_frames=3):
    """Random (pred_scenes, gt_scenes) with <=4 preds and <=4 GT per class.

    Instances stay small (<=6 points) and scatter spans the chamfer
    thresholds, so matched/unmatched outcomes mix at every tau.
    """
    labels = ("divider", "pedestrian_crossing", "boundary")
    preds, gts = [], []
    for f in range(n_frames):
        frame_id = f"frame_{f:04d}"
        p_insts, g_insts = [], []
        for label in labels:
            topo = "closed" if label == "pedestrian_crossing" else "open"
            n_gt = int(gen.integers(0, 5))
            n_pred = int(gen.integers(0, 5))
            anchors = gen.uniform(-8, 8, size=(max(n_gt, n_pred), 2))
            for k in range(n_gt):
                n_pts = int(gen.integers(3, 7))
                pts = anchors[k] + np.cumsum(gen.uniform(-1, 1, size=(n_pts, 2)), axis=0)
                g_insts.append(MapInstance(label, pts, topo))
            for k in range(n_pred):
                n_pts = int(gen.integers(3, 7))
                if k < n_gt and gen.uniform() < 0.8:
                    base = g_insts[-n_gt + k].points
                    idx = gen.integers(0, len(base), size=n_pts)
                    pts = base[idx] + gen.normal(scale=gen.uniform(0.03, 1.2), size=(n_pts, 2))
                else:
                    pts = anchors[k] + gen.normal(scale=3.0, size=(n_pts, 2))
                conf = None if gen.uniform() < 0.1 else round(float(gen.uniform()), 2)
                p_insts.append(MapInstance(label, pts, topo, conf))
        preds.append(Scene(tuple(p_insts), frame_id))
        gts.append(Scene(tuple(g_insts), frame_id))
    return preds, gts


# ---------------------------------------------------------------------------
# match_at_threshold


def test_match_identical_pair():
    pred, gt = _pair_at_offset(0.0, conf=1.0)
    result = match_at_threshold([pred], [gt], 1.5)
    assert result.pairs == ((0, 0, 0.0),)
    assert result.unmatched_preds == ()
    assert result.unmatched_gts == ()
    assert result.threshold == 1.5


def test_match_no_predictions():
    _, gt = _pair_at_offset(0.0)
    result = match_at_threshold([], [gt, gt], 1.0)
    assert result.pairs == ()
    assert result.unmatched_gts == (0, 1)


def test_match_greedy_prefers_high_confidence():
    # conf 0.9 pred sits at CD 1.0, conf 0.8 pred at CD 0.4 from the only gt.
    gt = _inst([[0.0, 0.0], [1.0, 0.0]])
    far = _inst([[0.0, 0.5], [1.0, 0.5]], conf=0.9)
    near = _inst([[0.0, 0.2], [1.0, 0.2]], conf=0.8)
    result = match_at_threshold([far, near], [gt], 1.5)
    assert len(result.pairs) == 1
    pi, gi, d = result.pairs[0]
    assert (pi, gi) == (0, 0)
    assert d == pytest.approx(1.0, abs=1e-12)
    assert result.unmatched_preds == (1,)


def test_match_confidence_tie_breaks_by_index():
    gt = _inst([[0.0, 0.0], [1.0, 0.0]])
    a = _inst([[0.0, 0.3], [1.0, 0.3]], conf=0.7)
    b = _inst([[0.0, 0.1], [1.0, 0.1]], conf=0.7)
    result = match_at_threshold([a, b], [gt], 1.5)
    assert result.pairs[0][:2] == (0, 0)


def test_match_gt_tie_breaks_by_lowest_index():
    pred = _inst([[0.0, 0.0], [1.0, 0.0]], conf=0.9)
    left = _inst([[0.0, 0.4], [1.0, 0.4]])
    right = _inst([[0.0, -0.4], [1.0, -0.4]])
    result = match_at_threshold([pred], [left, right], 1.5)
    assert result.pairs[0][:2] == (0, 0)
    assert result.unmatched_gts == (1,)


def test_match_threshold_is_inclusive():
    pred, gt = _pair_at_offset(0.5)  # chamfer exactly 1.0
    assert len(match_at_threshold([pred], [gt], 1.0).pairs) == 1
    assert len(match_at_threshold([pred], [gt], 0.999).pairs) == 0


def test_match_missing_confidence_ranks_first():
    gt = _inst([[0.0, 0.0], [1.0, 0.0]])
    scored = _inst([[0.0, 0.1], [1.0, 0.1]], conf=0.99)
    unscored = _inst([[0.0, 0.2], [1.0, 0.2]], conf=None)
    result = match_at_threshold([scored, unscored], [gt], 1.5)
    assert result.pairs[0][0] == 1  # None ranks as 1.0 > 0.99


def test_match_rejects_mixed_classes():
    a = _inst([[0, 0], [1, 0]], label="divider")
    b = _inst([[0, 0], [1, 0]], label="boundary")
    with pytest.raises(InvalidInputError):
        match_at_threshold([a], [b], 1.0)


def test_match_rejects_nonpositive_threshold():
    with pytest.raises(InvalidInputError):
        match_at_threshold([], [], 0.0)


def test_match_storage_permutation_invariant():
    gen = np.random.default_rng(20)
    gts = [_inst(gen.normal(size=(3, 2)) + [4 * i, 0]) for i in range(3)]
    preds = [
        _inst(gts[i].points + gen.normal(scale=0.2, size=(3, 2)), conf=0.9 - 0.1 * i)
        for i in range(3)
    ]
    base = match_at_threshold(preds, gts, 1.5)
    shuffled = [preds[2], preds[0], preds[1]]
    other = match_at_threshold(shuffled, gts, 1.5)

    def keyed(result, plist):
        return {(plist[pi].confidence, gi, d) for pi, gi, d in result.pairs}

    assert keyed(base, preds) == keyed(other, shuffled)


# ---------------------------------------------------------------------------
# average_precision


def test_ap_perfect_detection():
    records = [(1.0, 0, i, True) for i in range(4)]
    assert average_precision(records, 4) == 1.0


def test_ap_no_predictions():
    assert average_precision([], 3) == 0.0


def test_ap_zero_gt_is_zero():
    assert average_precision([(0.9, 0, 0, False)], 0) == 0.0


def test_ap_fp_then_tp_hand_value():
    # FP outranks the TP: precision at full recall is 1/2, so AP = 0.5.
    records = [(0.9, 0, 0, False), (0.5, 0, 1, True)]
    assert average_precision(records, 1) == pytest.approx(0.5, abs=1e-12)


def test_ap_rejects_negative_gt_count():
    with pytest.raises(InvalidInputError):
        average_precision([], -1)


def test_ap_record_order_does_not_matter():
    records = [(0.9, 0, 0, False), (0.5, 0, 1, True), (0.7, 1, 0, True)]
    assert average_precision(records, 2) == average_precision(records[::-1], 2)


# ---------------------------------------------------------------------------
# acd helper


def test_acd_mean_and_absent():
    assert acd([0.2, 0.6, 1.0]) == pytest.approx(0.6, abs=1e-12)
    assert acd([]) is None


# ---------------------------------------------------------------------------
# evaluate


def _single_frame(preds, gts):
    return [Scene(tuple(preds), "frame_0000")], [Scene(tuple(gts), "frame_0000")]


def test_evaluate_identical_scenes():
    gen = np.random.default_rng(21)
    gts = [
        _inst(gen.normal(size=(4, 2)), label=label)
        for label in ("divider", "boundary", "pedestrian_crossing")
    ]
    preds = [MapInstance(g.class_label, g.points, g.topology, 1.0) for g in gts]
    report = evaluate(*_single_frame(preds, gts))
    assert report.mean_ap == 1.0
    assert report.acd == 0.0
    for label in ("divider", "boundary", "pedestrian_crossing"):
        assert report.class_ap[label] == 1.0


def test_evaluate_empty_predictions():
    _, gt = _pair_at_offset(0.0)
    report = evaluate(*_single_frame([], [gt]))
    assert report.mean_ap == 0.0
    assert report.class_ap["divider"] == 0.0
    assert report.acd is None


def test_evaluate_absent_class_is_skipped():
    pred, gt = _pair_at_offset(0.05, conf=1.0)
    report = evaluate(*_single_frame([pred], [gt]))
    assert report.class_ap["boundary"] is None
    assert report.class_ap_by_threshold["boundary"][0.5] is None
    # mean over classes with GT only: just the divider.
    assert report.mean_ap == report.class_ap["divider"]


def test_evaluate_zero_gt_class_with_preds_scores_zero_but_excluded():
    pred_div, gt_div = _pair_at_offset(0.05, conf=1.0)
    stray = _inst([[5.0, 5.0], [6.0, 5.0]], label="boundary", conf=0.8)
    report = evaluate(*_single_frame([pred_div, stray], [gt_div]))
    assert report.class_ap["boundary"] == 0.0
    assert report.class_counts["boundary"] == (1, 0)
    assert report.mean_ap == report.class_ap["divider"]


def test_evaluate_class_ap_is_mean_over_thresholds():
    gen = np.random.default_rng(22)
    preds, gts = random_micro_pair(gen)
    report = evaluate(preds, gts)
    for label, by_tau in report.class_ap_by_threshold.items():
        if report.class_ap[label] is None:
            continue
        mean = sum(by_tau[tau] for tau in CHAMFER_THRESHOLDS) / 3
        assert report.class_ap[label] == pytest.approx(mean, abs=1e-12)


def test_evaluate_ap_monotone_in_threshold():
    gen = np.random.default_rng(23)
    for _ in range(20):
        preds, gts = random_micro_pair(gen)
        report = evaluate(preds, gts)
        for by_tau in report.class_ap_by_threshold.values():
            if by_tau[0.5] is None:
                continue
            assert by_tau[0.5] <= by_tau[1.0] <= by_tau[1.5]


def test_evaluate_acd_bounded_by_threshold():
    gen = np.random.default_rng(24)
    for _ in range(20):
        preds, gts = random_micro_pair(gen)
        report = evaluate(preds, gts)
        if report.acd is not None:
            assert report.acd <= ACD_THRESHOLD
        for value in report.class_acd.values():
            if value is not None:
                assert value <= ACD_THRESHOLD


def test_evaluate_acd_fixture():
    pairs = [
        _pair_at_offset(0.1, shift_x=0.0, conf=0.9),
        _pair_at_offset(0.3, shift_x=100.0, conf=0.8),
        _pair_at_offset(0.5, shift_x=200.0, conf=0.7),
        _pair_at_offset(1.0, shift_x=300.0, conf=0.6),  # chamfer 2.0 > 1.5
    ]
    preds = [p for p, _ in pairs]
    gts = [g for _, g in pairs]
    report = evaluate(*_single_frame(preds, gts))
    assert report.class_acd["divider"] == pytest.approx(0.6, abs=1e-12)
    assert report.acd == pytest.approx(0.6, abs=1e-12)


def test_evaluate_frame_count_mismatch():
    scenes = [Scene((), "frame_0000")]
    with pytest.raises(InvalidInputError):
        evaluate(scenes, scenes * 2)


def test_evaluate_frame_id_mismatch():
    with pytest.raises(InvalidInputError, match="frame"):
        evaluate([Scene((), "frame_0000")], [Scene((), "frame_0001")])


def test_evaluate_report_mapping_shape():
    gen = np.random.default_rng(25)
    preds, gts = random_micro_pair(gen, n_frames=1)
    report = evaluate(preds, gts)
    mapping = report.to_mapping()
    assert set(mapping) == {"mean_ap", "acd", "classes"}
    for label in ("divider", "pedestrian_crossing", "boundary"):
        entry = mapping["classes"][label]
        assert set(entry) == {"n_pred", "n_gt", "ap", "ap_by_threshold", "acd"}
        assert set(entry["ap_by_threshold"]) == {"0.5", "1", "1.5"}


def test_protocol_constants():
    assert CHAMFER_THRESHOLDS == (0.5, 1.0, 1.5)
    assert ACD_THRESHOLD == 1.5


# ---------------------------------------------------------------------------
# oracle agreement


def test_evaluate_matches_oracle_exactly():
    gen = np.random.default_rng(26)
    for _ in range(50):
        preds, gts = random_micro_pair(gen)
        report = evaluate(preds, gts)
        expected = oracle_evaluate(preds, gts)
        assert report.class_ap_by_threshold == expected["class_ap_by_threshold"]
        assert report.class_ap == expected["class_ap"]
        assert report.mean_ap == expected["mean_ap"]
        assert report.class_acd == expected["class_acd"]
        assert report.acd == expected["acd"]
        assert report.class_counts == expected["class_counts"]


def test_three_frame_fixture_matches_oracle():
    gen = np.random.default_rng(27)
    preds, gts = random_micro_pair(gen, n_frames=3)
    report = evaluate(preds, gts)
    expected = oracle_evaluate(preds, gts)
    assert isinstance(report, EvalReport)
    assert report.mean_ap == expected["mean_ap"]
    assert report.acd == expected["acd"]
