"""Unit-cycle angle resolvers for rotated boxes.

Encode a le90 angle onto a circle embedded in 2..5 dimensions, decode it
back, and train encodings under the circle-constraint loss that keeps
predictions on the manifold. Ships with rotated-box geometry, DOTA
annotation tooling, an AP evaluator, and a CLI (``ucr --help``).
"""

from .coder import (
    AmbiguousEncodingError,
    NonBijectiveWarning,
    ResolverConfig,
    ae2,
    constraint_residuals,
    decode,
    encode,
    encoding_gap,
)
from .dota_io import (
    RSAR_CATEGORIES,
    AnnotationRecord,
    DatasetStats,
    DotaParseError,
    ImageAnnotations,
    clean_dataset,
    compute_stats,
    hash_image_bytes,
    parse_dota_file,
    poly_to_rbox,
    write_dota_file,
)
from .evaluation import (
    IOU_THRESHOLDS,
    DetectionRecord,
    EvalResult,
    GroundTruth,
    average_precision,
    evaluate,
    match_detections,
)
from .geometry import (
    HorizontalBox,
    QuadPolygon,
    RotatedBox,
    aspect_ratio,
    convex_intersection,
    normalize_angle,
    rbox_to_hbb,
    rbox_to_polygon,
    rotated_iou,
)
from .losses import (
    LossBreakdown,
    LossConfig,
    LossKind,
    is_invalid,
    regression_loss,
    total_loss,
    total_loss_gradient,
    unit_cycle_loss,
)
from .optim import (
    FitDivergenceError,
    FitReport,
    FitTask,
    PairedBiasResult,
    ae2_histogram,
    boundary_demo,
    circular_distance,
    fit_encodings,
    initial_state,
    paired_bias_experiment,
)

__version__ = "0.1.0"

__all__ = [
    "AmbiguousEncodingError",
    "AnnotationRecord",
    "DatasetStats",
    "DetectionRecord",
    "DotaParseError",
    "EvalResult",
    "FitDivergenceError",
    "FitReport",
    "FitTask",
    "GroundTruth",
    "HorizontalBox",
    "ImageAnnotations",
    "IOU_THRESHOLDS",
    "LossBreakdown",
    "LossConfig",
    "LossKind",
    "NonBijectiveWarning",
    "PairedBiasResult",
    "QuadPolygon",
    "ResolverConfig",
    "RotatedBox",
    "RSAR_CATEGORIES",
    "ae2",
    "ae2_histogram",
    "aspect_ratio",
    "average_precision",
    "boundary_demo",
    "circular_distance",
    "clean_dataset",
    "compute_stats",
    "constraint_residuals",
    "convex_intersection",
    "decode",
    "encode",
    "encoding_gap",
    "evaluate",
    "fit_encodings",
    "hash_image_bytes",
    "initial_state",
    "is_invalid",
    "match_detections",
    "normalize_angle",
    "paired_bias_experiment",
    "parse_dota_file",
    "poly_to_rbox",
    "rbox_to_hbb",
    "rbox_to_polygon",
    "regression_loss",
    "rotated_iou",
    "total_loss",
    "total_loss_gradient",
    "unit_cycle_loss",
    "write_dota_file",
]
