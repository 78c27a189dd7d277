"""Command-line interface: scene generation, perturbation, metrics, demos.

Exit codes: 0 success, 1 property/tolerance failure, 2 unreadable or
unwritable path, 3 missing counterpart frame, 4 malformed file,
5 unpairable instances, 64 usage error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import os
import sys
from dataclasses import replace

import numpy as np

from . import __version__
from .attention import IiaConfig, iia_forward, init_iia_params
from .direction_loss import LossConfig, combined_loss, direction_loss
from .evaluation import CHAMFER_THRESHOLDS, ACD_THRESHOLD, EvalReport, evaluate
from .geometry import (
    CLASS_LABELS,
    InvalidInputError,
    InvalidInstanceError,
    MapInstance,
    canonicalize_gt_order,
)
from .neck import MpnConfig, init_mpn_params, mpn_forward
from .nn import ShapeError
from .rng import SeededRng
from .sceneio import (
    MalformedFileError,
    format_float,
    read_scene,
    to_json_text,
    write_scene,
)
from .synth import (
    JITTER_MODES,
    JitterConfig,
    SceneConfig,
    generate_scene,
    jitter_sweep,
    perturb,
)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_PATH = 2
EXIT_MISSING_FRAME = 3
EXIT_MALFORMED = 4
EXIT_UNPAIRABLE = 5
EXIT_USAGE = 64


class MissingFrameError(Exception):
    """Prediction/ground-truth directories disagree on frame ids."""


class UnpairableError(Exception):
    """Loss command could not pair prediction and GT instances."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="PRNG seed")
    common.add_argument("--out", default=None, help="output file or directory")
    common.add_argument(
        "--format", choices=("json", "csv"), default="json", help="report format"
    )

    parser = _Parser(prog="mapvec", description=__doc__)
    parser.add_argument("--version", action="version", version=f"mapvec {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("gen", parents=[common], help="write ground-truth scenes")
    p.add_argument("--frames", type=int, default=1)
    p.add_argument("--dividers", type=int, default=2)
    p.add_argument("--boundaries", type=int, default=2)
    p.add_argument("--crossings", type=int, default=1)
    p.add_argument("--points", type=int, default=20)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("perturb", parents=[common], help="jitter scene files")
    p.add_argument("--in", dest="in_dir", required=True, help="input scene directory")
    p.add_argument("--sigma", type=float, default=0.1)
    p.add_argument("--mode", choices=JITTER_MODES, default="gaussian")
    p.add_argument("--drop-rate", type=float, default=0.0)
    p.add_argument("--spurious-rate", type=float, default=0.0)
    p.set_defaults(func=cmd_perturb)

    p = sub.add_parser("eval", parents=[common], help="evaluate predictions")
    p.add_argument("--pred", required=True, help="predicted scene directory")
    p.add_argument("--gt", required=True, help="ground-truth scene directory")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("loss", parents=[common], help="loss between two scene files")
    p.add_argument("--pred", required=True, help="predicted scene file")
    p.add_argument("--gt", required=True, help="ground-truth scene file")
    p.add_argument("--lambda-l1", dest="lambda_l1", type=float, default=5.0)
    p.add_argument("--lambda-vddl", dest="lambda_vddl", type=float, default=1.0)
    p.add_argument("--grad", action="store_true", help="emit per-point gradients")
    p.set_defaults(func=cmd_loss)

    p = sub.add_parser("gradcheck", parents=[common], help="finite-difference check")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--points", type=int, default=20)
    p.add_argument("--step", type=float, default=1e-5)
    p.add_argument("--tolerance", type=float, default=1e-4)
    p.set_defaults(func=cmd_gradcheck)

    p = sub.add_parser("demo", parents=[common], help="run an attention/neck block")
    p.add_argument("block", choices=("iia", "mpn"))
    p.add_argument("--instances", type=int, default=8)
    p.add_argument("--points", type=int, default=20)
    p.add_argument("--channels", type=int, default=32)
    p.add_argument("--heads", type=int, default=4)
    p.add_argument("--height", type=int, default=16)
    p.add_argument("--width", type=int, default=16)
    p.add_argument("--in-channels", dest="in_channels", type=int, default=16)
    p.add_argument("--down-layers", dest="down_layers", type=int, default=2)
    p.set_defaults(func=cmd_demo)

    p = sub.add_parser("sweep", parents=[common], help="metrics vs jitter amplitude")
    p.add_argument("--sigmas", default="0.05,0.1,0.2,0.4")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--dividers", type=int, default=2)
    p.add_argument("--boundaries", type=int, default=2)
    p.add_argument("--crossings", type=int, default=1)
    p.add_argument("--points", type=int, default=20)
    p.set_defaults(func=cmd_sweep)

    return parser


def _require_out(args) -> str:
    if not args.out:
        raise UsageError(f"{args.command} requires --out")
    return args.out


class UsageError(Exception):
    pass


def _scene_files(directory: str):
    if not os.path.isdir(directory):
        raise FileNotFoundError(f"not a directory: {directory}")
    names = sorted(n for n in os.listdir(directory) if n.endswith(".json"))
    return [(os.path.splitext(n)[0], os.path.join(directory, n)) for n in names]


def _count_by_class(scene):
    return {
        label: sum(1 for inst in scene.instances if inst.class_label == label)
        for label in CLASS_LABELS
    }


def cmd_gen(args) -> int:
    out_dir = _require_out(args)
    if args.frames < 1:
        raise UsageError("--frames must be >= 1")
    os.makedirs(out_dir, exist_ok=True)
    for i in range(args.frames):
        cfg = SceneConfig(
            seed=args.seed + i,
            n_dividers=args.dividers,
            n_boundaries=args.boundaries,
            n_crossings=args.crossings,
            points_per_instance=args.points,
        )
        frame_id = f"frame_{i:04d}"
        scene = generate_scene(cfg, frame_id=frame_id)
        write_scene(os.path.join(out_dir, f"{frame_id}.json"), scene)
        counts = _count_by_class(scene)
        detail = ", ".join(f"{counts[label]} {label}" for label in CLASS_LABELS)
        print(f"{frame_id}: {len(scene.instances)} instances ({detail})")
    print(f"wrote {args.frames} scene file(s) to {out_dir}")
    return EXIT_OK


def cmd_perturb(args) -> int:
    out_dir = _require_out(args)
    files = _scene_files(args.in_dir)
    if not files:
        raise UsageError(f"no scene files found in {args.in_dir}")
    os.makedirs(out_dir, exist_ok=True)
    for idx, (stem, path) in enumerate(files):
        scene = read_scene(path)
        jcfg = JitterConfig(
            sigma=args.sigma,
            mode=args.mode,
            seed=args.seed + idx,
            drop_rate=args.drop_rate,
            spurious_rate=args.spurious_rate,
        )
        write_scene(os.path.join(out_dir, f"{stem}.json"), perturb(scene, jcfg))
    print(
        f"perturbed {len(files)} frame(s) with sigma={args.sigma:g} "
        f"mode={args.mode} into {out_dir}"
    )
    return EXIT_OK


def _load_frame_pairs(pred_dir: str, gt_dir: str):
    preds = dict(_scene_files(pred_dir))
    gts = dict(_scene_files(gt_dir))
    missing = sorted(set(preds) ^ set(gts))
    if missing:
        raise MissingFrameError(
            "frames present on one side only: " + ", ".join(missing)
        )
    stems = sorted(preds)
    pred_scenes = [read_scene(preds[s]) for s in stems]
    gt_scenes = [read_scene(gts[s]) for s in stems]
    for p, g in zip(pred_scenes, gt_scenes):
        if p.frame_id != g.frame_id:
            raise MissingFrameError(
                f"frame id mismatch between files: {p.frame_id!r} vs {g.frame_id!r}"
            )
    return pred_scenes, gt_scenes


def _report_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return format_float(v)
    return str(v)


def _write_eval_report(report: EvalReport, n_frames: int, args) -> list:
    """Write main report, companion AP table, and figure; return paths."""
    out_path = _require_out(args)
    base, _ = os.path.splitext(out_path)
    companion = f"{base}_ap.csv"
    figure = f"{base}.png"

    mapping = {
        "format_version": "1",
        "tool": "mapvec",
        "version": __version__,
        "kind": "eval_report",
        "config": {
            "chamfer_thresholds": list(CHAMFER_THRESHOLDS),
            "acd_threshold": ACD_THRESHOLD,
            "n_frames": n_frames,
        },
        "metrics": report.to_mapping(),
    }
    if args.format == "json":
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(to_json_text(mapping))
    else:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["record", "class", "threshold", "value"])
            writer.writerow(["version", "", "", __version__])
            writer.writerow(["n_frames", "", "", n_frames])
            writer.writerow(["mean_ap", "", "", _report_value(report.mean_ap)])
            writer.writerow(["acd", "", "", _report_value(report.acd)])
            for label in CLASS_LABELS:
                n_pred, n_gt = report.class_counts[label]
                writer.writerow(["n_pred", label, "", n_pred])
                writer.writerow(["n_gt", label, "", n_gt])
                writer.writerow(
                    ["class_ap", label, "", _report_value(report.class_ap[label])]
                )
                for tau in CHAMFER_THRESHOLDS:
                    writer.writerow(
                        [
                            "class_ap_threshold",
                            label,
                            f"{tau:g}",
                            _report_value(report.class_ap_by_threshold[label][tau]),
                        ]
                    )
                writer.writerow(
                    ["class_acd", label, "", _report_value(report.class_acd[label])]
                )

    with open(companion, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["class", "threshold", "ap"])
        for label in CLASS_LABELS:
            for tau in CHAMFER_THRESHOLDS:
                writer.writerow(
                    [
                        label,
                        f"{tau:g}",
                        _report_value(report.class_ap_by_threshold[label][tau]),
                    ]
                )

    from .plots import render_eval_figure

    render_eval_figure(report, figure)
    return [out_path, companion, figure]


def cmd_eval(args) -> int:
    pred_scenes, gt_scenes = _load_frame_pairs(args.pred, args.gt)
    report = evaluate(pred_scenes, gt_scenes)
    paths = _write_eval_report(report, len(pred_scenes), args)
    acd_txt = "n/a" if report.acd is None else f"{report.acd:.4f}"
    print(f"frames evaluated: {len(pred_scenes)}")
    print(f"mAP {report.mean_ap:.4f}  ACD {acd_txt}")
    per_class = "  ".join(
        f"{label}: "
        + ("n/a" if report.class_ap[label] is None else f"{report.class_ap[label]:.4f}")
        for label in CLASS_LABELS
    )
    print(per_class)
    for path in paths:
        print(f"wrote {path}")
    return EXIT_OK


def _pair_instances(pred_scene, gt_scene):
    """Pair by class, then by file order within the class."""
    pairs = []
    for label in CLASS_LABELS:
        preds = [i for i in pred_scene.instances if i.class_label == label]
        gts = [i for i in gt_scene.instances if i.class_label == label]
        if len(preds) != len(gts):
            raise UnpairableError(
                f"class {label}: {len(preds)} predictions vs {len(gts)} ground truth"
            )
        for idx, (p, g) in enumerate(zip(preds, gts)):
            pairs.append((label, idx, p, g))
    return pairs


def cmd_loss(args) -> int:
    pred_scene = read_scene(args.pred)
    gt_scene = read_scene(args.gt)
    try:
        cfg = LossConfig(l1_weight=args.lambda_l1, direction_weight=args.lambda_vddl)
    except InvalidInputError as e:
        raise UsageError(str(e)) from None

    rows = []
    for label, idx, pred, gt in _pair_instances(pred_scene, gt_scene):
        try:
            gt_aligned = canonicalize_gt_order(pred, gt)
            result = combined_loss(pred, gt_aligned, cfg)
        except (InvalidInputError, InvalidInstanceError) as e:
            raise UnpairableError(f"class {label}[{idx}]: {e}") from None
        rows.append((label, idx, result))

    for label, idx, result in rows:
        print(
            f"{label}[{idx}]: vddl {result.direction.total:.10g} "
            f"l1 {result.l1:.10g} combined {result.total:.10g}"
        )
        if args.grad:
            for k, (gx, gy) in enumerate(result.grad):
                print(f"  grad {k}: {gx:.10g} {gy:.10g}")
    n = len(rows)
    mean_vddl = sum(r.direction.total for _, _, r in rows) / n if n else 0.0
    mean_l1 = sum(r.l1 for _, _, r in rows) / n if n else 0.0
    mean_combined = sum(r.total for _, _, r in rows) / n if n else 0.0
    print(f"total: vddl {mean_vddl:.10g} l1 {mean_l1:.10g} combined {mean_combined:.10g}")

    if args.out:
        mapping = {
            "format_version": "1",
            "tool": "mapvec",
            "version": __version__,
            "kind": "loss_report",
            "config": {
                "lambda_l1": args.lambda_l1,
                "lambda_vddl": args.lambda_vddl,
            },
            "instances": [
                {
                    "class": label,
                    "index": idx,
                    "vddl": r.direction.total,
                    "l1": r.l1,
                    "combined": r.total,
                    **(
                        {"grad": [[float(gx), float(gy)] for gx, gy in r.grad]}
                        if args.grad
                        else {}
                    ),
                }
                for label, idx, r in rows
            ],
            "totals": {
                "vddl": mean_vddl,
                "l1": mean_l1,
                "combined": mean_combined,
            },
        }
        if args.format == "json":
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(to_json_text(mapping))
        else:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(["class", "index", "vddl", "l1", "combined"])
                for label, idx, r in rows:
                    writer.writerow(
                        [
                            label,
                            idx,
                            format_float(r.direction.total),
                            format_float(r.l1),
                            format_float(r.total),
                        ]
                    )
                writer.writerow(
                    [
                        "total",
                        "",
                        format_float(mean_vddl),
                        format_float(mean_l1),
                        format_float(mean_combined),
                    ]
                )
        print(f"wrote {args.out}")
    return EXIT_OK


def _random_open_polyline(rng: SeededRng, n: int) -> np.ndarray:
    heading = rng.uniform(0.0, 2.0 * np.pi)
    pts = [np.array([rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0)])]
    for _ in range(n - 1):
        heading += rng.uniform(-0.8, 0.8)
        step = rng.uniform(0.5, 2.0)
        pts.append(pts[-1] + step * np.array([np.cos(heading), np.sin(heading)]))
    return np.array(pts)


def _random_closed_polygon(rng: SeededRng, n: int) -> np.ndarray:
    cx, cy = rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)
    angles = 2.0 * np.pi * np.arange(n) / n + rng.uniforms(n, -0.1, 0.1)
    radii = rng.uniforms(n, 2.0, 5.0)
    return np.column_stack(
        [cx + radii * np.cos(angles), cy + radii * np.sin(angles)]
    )


def _finite_difference_grad(pred: MapInstance, gt: MapInstance, h: float) -> np.ndarray:
    base = np.asarray(pred.points, dtype=float)
    grad = np.zeros_like(base)
    for i in range(base.shape[0]):
        for d in range(2):
            plus = base.copy()
            plus[i, d] += h
            minus = base.copy()
            minus[i, d] -= h
            f_plus = direction_loss(
                MapInstance(pred.class_label, plus, topology=pred.topology), gt
            ).total
            f_minus = direction_loss(
                MapInstance(pred.class_label, minus, topology=pred.topology), gt
            ).total
            grad[i, d] = (f_plus - f_minus) / (2.0 * h)
    return grad


def run_gradcheck(seed: int, trials: int, n_points: int, step: float):
    """Max relative error between analytic and central-difference gradients.

    Alternates open and closed random instances; returns (max_error, worst)
    where worst describes the worst-offending pair.
    """
    rng = SeededRng(seed)
    max_err = 0.0
    worst = None
    for t in range(trials):
        topology = "closed" if t % 2 else "open"
        if topology == "open":
            gt_pts = _random_open_polyline(rng, n_points)
        else:
            gt_pts = _random_closed_polygon(rng, n_points)
        noise = rng.normals(2 * n_points, 0.3).reshape(-1, 2)
        gt = MapInstance("divider", gt_pts, topology=topology)
        pred = MapInstance("divider", gt_pts + noise, topology=topology)
        analytic = direction_loss(pred, gt).grad
        fd = _finite_difference_grad(pred, gt, step)
        denom = max(float(np.linalg.norm(fd)), 1e-12)
        err = float(np.linalg.norm(analytic - fd)) / denom
        if err > max_err:
            max_err = err
            worst = {
                "trial": t,
                "topology": topology,
                "relative_error": err,
                "pred_points": [[float(x), float(y)] for x, y in pred.points],
                "gt_points": [[float(x), float(y)] for x, y in gt.points],
            }
    return max_err, worst


def cmd_gradcheck(args) -> int:
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    max_err, worst = run_gradcheck(args.seed, args.trials, args.points, args.step)
    print(
        f"gradcheck: {args.trials} trials, {args.points} points, step {args.step:g}"
    )
    print(f"max relative error {max_err:.6e} (tolerance {args.tolerance:g})")
    if max_err < args.tolerance:
        print("gradcheck: PASS")
        return EXIT_OK
    dump_path = args.out or "gradcheck_failure.json"
    with open(dump_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(to_json_text(worst))
    print(f"gradcheck: FAIL, worst case written to {dump_path}")
    return EXIT_FAILURE


def _hash_array(a: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(a).tobytes()).hexdigest()[:16]


def _demo_iia(args) -> int:
    cfg = IiaConfig(
        n_instances=args.instances,
        n_points=args.points,
        channels=args.channels,
        num_heads=args.heads,
    )

    def forward(seed):
        rng = SeededRng(seed)
        params = init_iia_params(cfg, rng)
        h = rng.normals(cfg.n_instances * cfg.n_points * cfg.channels).reshape(
            -1, cfg.channels
        )
        return h, params, iia_forward(h, params)

    h, params, out = forward(args.seed)
    print(f"iia: input {h.shape} -> output {out.shape}")
    print(f"output hash {_hash_array(out)}")

    if out.shape != h.shape:
        print("FAIL: shape preservation violated")
        return EXIT_FAILURE

    _, _, out2 = forward(args.seed)
    if not np.array_equal(out, out2):
        print("FAIL: determinism violated (same seed, different output)")
        return EXIT_FAILURE
    print("determinism: pass")

    perm_rng = SeededRng(args.seed + 1)
    perm = np.argsort(perm_rng.uniforms(cfg.n_instances))
    row_perm = (
        perm[:, None] * cfg.n_points + np.arange(cfg.n_points)[None, :]
    ).reshape(-1)
    out_perm = iia_forward(h[row_perm], params)
    dev = float(np.abs(out_perm - out[row_perm]).max())
    print(f"instance permutation equivariance deviation {dev:.3e} (tolerance 1e-09)")
    if dev > 1e-9:
        print("FAIL: instance permutation equivariance violated")
        return EXIT_FAILURE
    print("equivariance: pass")
    return EXIT_OK


def _demo_mpn(args) -> int:
    cfg = MpnConfig(num_down_layers=args.down_layers, in_channels=args.in_channels)
    rng = SeededRng(args.seed)
    params = init_mpn_params(cfg, rng)
    f = rng.normals(args.height * args.width * cfg.in_channels).reshape(
        args.height, args.width, cfg.in_channels
    )
    train_out = mpn_forward(f, cfg, params)
    infer_out = mpn_forward(f, replace(cfg, mode="infer"), params)

    print(f"mpn: input {f.shape} -> fused {train_out.fused.shape}")
    print(f"fused hash {_hash_array(train_out.fused)}")
    levels = train_out.levels or ()
    print(f"train levels: {len(levels)}")

    if train_out.fused.shape[:2] != f.shape[:2]:
        print("FAIL: fused spatial dims differ from input")
        return EXIT_FAILURE
    if len(levels) != cfg.num_down_layers + 1:
        print("FAIL: train mode level count != num_down_layers + 1")
        return EXIT_FAILURE
    if infer_out.levels is not None:
        print("FAIL: infer mode produced level maps")
        return EXIT_FAILURE
    if not np.array_equal(train_out.fused, infer_out.fused):
        print("FAIL: train/infer fused maps differ")
        return EXIT_FAILURE
    print("train/infer fused equality: pass")
    return EXIT_OK


def cmd_demo(args) -> int:
    if args.block == "iia":
        return _demo_iia(args)
    return _demo_mpn(args)


def cmd_sweep(args) -> int:
    out_path = _require_out(args)
    try:
        sigmas = [float(s) for s in args.sigmas.split(",") if s.strip()]
    except ValueError:
        raise UsageError(f"cannot parse --sigmas {args.sigmas!r}") from None
    if not sigmas:
        raise UsageError("--sigmas must name at least one value")
    cfg = SceneConfig(
        seed=args.seed,
        n_dividers=args.dividers,
        n_boundaries=args.boundaries,
        n_crossings=args.crossings,
        points_per_instance=args.points,
    )
    rows = jitter_sweep(cfg, sigmas, args.trials)

    base, _ = os.path.splitext(out_path)
    figure = f"{base}.png"
    header = ["sigma", "mean_vddl", "mean_map", "mean_acd"]

    def row_values(r):
        return [
            format_float(r.sigma),
            format_float(r.mean_vddl),
            format_float(r.mean_map),
            "" if r.mean_acd is None else format_float(r.mean_acd),
        ]

    written = [out_path]
    if args.format == "json":
        mapping = {
            "format_version": "1",
            "tool": "mapvec",
            "version": __version__,
            "kind": "sweep_report",
            "config": {
                "seed": args.seed,
                "trials": args.trials,
                "sigmas": sorted(sigmas),
                "dividers": args.dividers,
                "boundaries": args.boundaries,
                "crossings": args.crossings,
                "points": args.points,
            },
            "rows": [
                {
                    "sigma": r.sigma,
                    "mean_vddl": r.mean_vddl,
                    "mean_map": r.mean_map,
                    "mean_acd": r.mean_acd,
                }
                for r in rows
            ],
        }
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(to_json_text(mapping))
        companion = f"{base}_rows.csv"
        with open(companion, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for r in rows:
                writer.writerow(row_values(r))
        written.append(companion)
    else:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for r in rows:
                writer.writerow(row_values(r))

    from .plots import render_sweep_figure

    render_sweep_figure(rows, figure)
    written.append(figure)

    for r in rows:
        acd_txt = "n/a" if r.mean_acd is None else f"{r.mean_acd:.4f}"
        print(
            f"sigma {r.sigma:g}: vddl {r.mean_vddl:.4f} "
            f"mAP {r.mean_map:.4f} acd {acd_txt}"
        )
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"mapvec {args.command}: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except MalformedFileError as e:
        print(f"mapvec {args.command}: malformed file: {e}", file=sys.stderr)
        return EXIT_MALFORMED
    except MissingFrameError as e:
        print(f"mapvec {args.command}: {e}", file=sys.stderr)
        return EXIT_MISSING_FRAME
    except UnpairableError as e:
        print(f"mapvec {args.command}: unpairable instances: {e}", file=sys.stderr)
        return EXIT_UNPAIRABLE
    except OSError as e:
        print(f"mapvec {args.command}: path error: {e}", file=sys.stderr)
        return EXIT_PATH
    except (InvalidInputError, InvalidInstanceError, ShapeError) as e:
        print(f"mapvec {args.command}: invalid input: {e}", file=sys.stderr)
        return EXIT_USAGE


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
