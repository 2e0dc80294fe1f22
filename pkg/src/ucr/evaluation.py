"""Rotated-box detection evaluation: greedy IoU matching and AP50/AP75/mAP.

Average precision follows the 101-point interpolation convention at the ten
IoU thresholds 0.50:0.05:0.95. Matching is greedy in descending score order,
each detection taking the highest-IoU still-unmatched ground truth at or
above the threshold. Score ties are broken by a canonical identity key
(image_id, then the serialized box), so results are independent of input
order.

Ground truths flagged difficult are ignored by default: they contribute
nothing to the ground-truth count and detections matching them are dropped
from scoring rather than counted as false positives.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .geometry import RotatedBox, rotated_iou

IOU_THRESHOLDS = tuple(round(0.50 + 0.05 * i, 2) for i in range(10))

_RECALL_GRID = np.linspace(0.0, 1.0, 101)


@dataclass(frozen=True)
class DetectionRecord:
    image_id: str
    box: RotatedBox
    category: str
    score: float

    def __post_init__(self):
        if not (math.isfinite(self.score) and 0.0 <= self.score <= 1.0):
            raise ValueError(f"score must be in [0, 1], got {self.score}")


@dataclass(frozen=True)
class GroundTruth:
    image_id: str
    box: RotatedBox
    category: str
    difficulty: int = 0


def _det_sort_key(det: DetectionRecord):
    b = det.box
    return (-det.score, det.image_id, det.category, b.cx, b.cy, b.w, b.h, b.theta)


def match_detections(dets, gts, iou_threshold: float):
    """Greedy matching for one image and category.

    ``dets`` must already be sorted by descending score (stable on ties);
    ``gts`` is a sequence of RotatedBox. Returns one (detection, gt index or
    None) pair per detection, in the given order.
    """
    taken = [False] * len(gts)
    out = []
    for det in dets:
        best_iou = 0.0
        best_idx = None
        for j, gt in enumerate(gts):
            if taken[j]:
                continue
            iou = rotated_iou(det.box, gt)
            if iou >= iou_threshold and iou > best_iou:
                best_iou = iou
                best_idx = j
        if best_idx is not None:
            taken[best_idx] = True
        out.append((det, best_idx))
    return out


def average_precision(tp_flags, n_gt: int):
    """101-point interpolated AP from score-ordered true-positive flags.

    Returns None when there are no ground truths (undefined, excluded from
    any averaging).
    """
    if n_gt < 0:
        raise ValueError("n_gt must be non-negative")
    if n_gt == 0:
        return None
    flags = np.asarray(tp_flags, dtype=bool)
    if flags.size == 0:
        return 0.0
    tp = np.cumsum(flags)
    fp = np.cumsum(~flags)
    recall = tp / n_gt
    precision = tp / (tp + fp)
    # precision envelope from the right, then sample it on the recall grid
    envelope = np.maximum.accumulate(precision[::-1])[::-1]
    idx = np.searchsorted(recall, _RECALL_GRID, side="left")
    sampled = np.where(idx < flags.size, envelope[np.minimum(idx, flags.size - 1)], 0.0)
    return float(np.mean(sampled))


@dataclass(frozen=True, eq=False)
class EvalResult:
    """AP per category and threshold plus the aggregate metrics.

    ``per_category[cat][thr]`` is None for categories without ground truths;
    such cells are excluded from every mean. ``mean_ap`` averages the
    per-threshold category means over the ten thresholds.
    """

    thresholds: tuple[float, ...]
    per_category: dict[str, dict[float, float | None]]
    ap50: float
    ap75: float
    mean_ap: float


def _mean_defined(values) -> float:
    present = [v for v in values if v is not None]
    if not present:
        return 0.0
    return float(np.mean(present))


def evaluate(dets, gts, ignore_difficult: bool = True) -> EvalResult:
    """Full dataset evaluation across categories and IoU thresholds."""
    gt_cats = {g.category for g in gts}
    det_cats = {d.category for d in dets}
    unknown = det_cats - gt_cats
    if unknown:
        warnings.warn(
            f"detections for categories without ground truth: {sorted(unknown)}",
            UserWarning,
            stacklevel=2,
        )
    categories = sorted(gt_cats | det_cats)

    per_category: dict[str, dict[float, float | None]] = {}
    for cat in categories:
        cat_dets = sorted((d for d in dets if d.category == cat), key=_det_sort_key)
        cat_gts: dict[str, list[GroundTruth]] = {}
        for g in gts:
            if g.category == cat:
                cat_gts.setdefault(g.image_id, []).append(g)
        n_gt = sum(
            1 for glist in cat_gts.values() for g in glist
            if not (ignore_difficult and g.difficulty == 1)
        )

        # IoU against every gt of the detection's image, cached across thresholds
        iou_rows = []
        for det in cat_dets:
            glist = cat_gts.get(det.image_id, [])
            iou_rows.append([rotated_iou(det.box, g.box) for g in glist])

        per_category[cat] = {}
        for thr in IOU_THRESHOLDS:
            taken: dict[str, list[bool]] = {
                img: [False] * len(glist) for img, glist in cat_gts.items()
            }
            flags = []
            for det, ious in zip(cat_dets, iou_rows):
                glist = cat_gts.get(det.image_id, [])
                used = taken.get(det.image_id, [])
                best_iou = 0.0
                best_idx = None
                for j, iou in enumerate(ious):
                    if used[j]:
                        continue
                    if iou >= thr and iou > best_iou:
                        best_iou = iou
                        best_idx = j
                if best_idx is None:
                    flags.append(False)
                    continue
                if ignore_difficult and glist[best_idx].difficulty == 1:
                    # absorbed by an ignored gt (left matchable): neither TP nor FP
                    continue
                used[best_idx] = True
                flags.append(True)
            per_category[cat][thr] = average_precision(flags, n_gt)

    threshold_means = {
        thr: _mean_defined(per_category[cat][thr] for cat in categories)
        for thr in IOU_THRESHOLDS
    }
    return EvalResult(
        thresholds=IOU_THRESHOLDS,
        per_category=per_category,
        ap50=threshold_means[0.50],
        ap75=threshold_means[0.75],
        mean_ap=float(np.mean([threshold_means[t] for t in IOU_THRESHOLDS])),
    )
