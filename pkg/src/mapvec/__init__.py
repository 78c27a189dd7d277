"""Toolkit for vectorized road-map construction experiments.

Provides polyline geometry primitives, a direction-difference training loss
with analytic gradients, chamfer-distance AP/ACD evaluation, minimal
self-attention and multi-scale neck forward passes, and a deterministic
synthetic scene generator with a controlled jitter model.
"""

__version__ = "0.1.0"

from .geometry import (
    CLASS_LABELS,
    DEFAULT_EXTENT,
    InvalidInputError,
    InvalidInstanceError,
    MapInstance,
    Scene,
    canonicalize_gt_order,
    chamfer_distance,
    resample,
    segment_vectors,
)
from .direction_loss import (
    CombinedLoss,
    LossBreakdown,
    LossConfig,
    combined_loss,
    direction_loss,
    direction_loss_grad,
    point_weights,
    segment_cosines,
    turn_cosines,
)
from .evaluation import (
    ACD_THRESHOLD,
    CHAMFER_THRESHOLDS,
    EvalReport,
    MatchResult,
    acd,
    average_precision,
    evaluate,
    match_at_threshold,
)
from .rng import SeededRng
from .synth import JitterConfig, SceneConfig, SweepRow, generate_scene, jitter_sweep, perturb

__all__ = [
    "__version__",
    "CLASS_LABELS",
    "DEFAULT_EXTENT",
    "InvalidInputError",
    "InvalidInstanceError",
    "MapInstance",
    "Scene",
    "canonicalize_gt_order",
    "chamfer_distance",
    "resample",
    "segment_vectors",
    "CombinedLoss",
    "LossBreakdown",
    "LossConfig",
    "combined_loss",
    "direction_loss",
    "direction_loss_grad",
    "point_weights",
    "segment_cosines",
    "turn_cosines",
    "ACD_THRESHOLD",
    "CHAMFER_THRESHOLDS",
    "EvalReport",
    "MatchResult",
    "acd",
    "average_precision",
    "evaluate",
    "match_at_threshold",
    "SeededRng",
    "JitterConfig",
    "SceneConfig",
    "SweepRow",
    "generate_scene",
    "jitter_sweep",
    "perturb",
]
