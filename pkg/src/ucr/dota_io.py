"""DOTA-format annotation parsing, cleaning and per-category statistics.

A DOTA annotation file holds one object per line::

    x1 y1 x2 y2 x3 y3 x4 y4 category difficulty

with optional ``imagesource:`` / ``gsd:`` metadata lines first. The
difficulty token may be omitted (it defaults to 0, matching common devkit
behavior). Vertex order is normalized to counter-clockwise on parse.

Angles produced by ``poly_to_rbox`` follow the w-side convention: theta is
the orientation of the side connecting the first two vertices' edge pair,
wrapped to le90. Square-like polygons may therefore round-trip to the
pi/2-rotated parameterization of the same rectangle.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import QuadPolygon, RotatedBox, aspect_ratio, normalize_angle

#: Categories of the six-class SAR preset; parsing accepts any string.
RSAR_CATEGORIES = ("Ship", "Tank", "Bridge", "Aircraft", "Harbor", "Car")

_METADATA_PREFIXES = ("imagesource:", "gsd:")

# Opposite edges may differ by this relative amount and still take the
# exact-parallelogram path; beyond it we fall back to the min-area rectangle.
_PARALLELOGRAM_RTOL = 0.10


class DotaParseError(ValueError):
    """Malformed annotation text; ``line`` is the 1-based offending line."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class AnnotationRecord:
    polygon: QuadPolygon
    category: str
    difficulty: int = 0

    def __post_init__(self):
        if not self.category:
            raise ValueError("category must be non-empty")
        if self.difficulty not in (0, 1):
            raise ValueError(f"difficulty must be 0 or 1, got {self.difficulty}")


@dataclass(frozen=True)
class ImageAnnotations:
    image_id: str
    records: tuple[AnnotationRecord, ...]
    content_hash: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))


def hash_image_bytes(data: bytes) -> int:
    """Stable 64-bit digest of raw image bytes, for duplicate detection."""
    return int.from_bytes(hashlib.blake2b(data, digest_size=8).digest(), "big")


def parse_dota_file(text: str, image_id: str = "", content_hash: int | None = None) -> ImageAnnotations:
    """Parse annotation text; blank lines and metadata headers are skipped."""
    records = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or any(line.startswith(p) for p in _METADATA_PREFIXES):
            continue
        tokens = line.split()
        if len(tokens) not in (9, 10):
            raise DotaParseError(lineno, f"expected 9 or 10 fields, got {len(tokens)}")
        try:
            coords = [float(t) for t in tokens[:8]]
        except ValueError:
            raise DotaParseError(lineno, f"non-numeric coordinate in {tokens[:8]}") from None
        if not all(math.isfinite(c) for c in coords):
            raise DotaParseError(lineno, "coordinates must be finite")
        category = tokens[8]
        difficulty = 0
        if len(tokens) == 10:
            try:
                difficulty = int(tokens[9])
            except ValueError:
                raise DotaParseError(lineno, f"non-integer difficulty {tokens[9]!r}") from None
        try:
            polygon = QuadPolygon.from_points(list(zip(coords[0::2], coords[1::2])))
            records.append(AnnotationRecord(polygon, category, difficulty))
        except ValueError as exc:
            raise DotaParseError(lineno, str(exc)) from None
    return ImageAnnotations(image_id=image_id, records=tuple(records), content_hash=content_hash)


def write_dota_file(ann: ImageAnnotations) -> str:
    """Inverse of parse up to vertex-order normalization; coordinates use repr
    so numeric values round-trip exactly."""
    lines = []
    for rec in ann.records:
        coords = " ".join(repr(v) for xy in rec.polygon.vertices for v in xy)
        lines.append(f"{coords} {rec.category} {rec.difficulty}")
    return "\n".join(lines) + ("\n" if lines else "")


def _min_area_rect(points: np.ndarray) -> RotatedBox:
    """Minimum-area enclosing rectangle by rotating calipers over hull edges."""
    hull = _convex_hull(points)
    best = None
    for i in range(len(hull)):
        edge = hull[(i + 1) % len(hull)] - hull[i]
        norm = float(np.hypot(edge[0], edge[1]))
        if norm == 0.0:
            continue
        c, s = edge[0] / norm, edge[1] / norm
        rot = np.array([[c, s], [-s, c]])
        proj = points @ rot.T
        lo = proj.min(axis=0)
        hi = proj.max(axis=0)
        size = hi - lo
        area = float(size[0] * size[1])
        if best is None or area < best[0]:
            center_local = 0.5 * (lo + hi)
            center = rot.T @ center_local
            best = (area, center, size, math.atan2(s, c))
    if best is None:
        raise ValueError("degenerate polygon: no enclosing rectangle")
    _, center, size, theta = best
    if size[0] <= 0 or size[1] <= 0:
        raise ValueError("degenerate polygon: zero-area enclosing rectangle")
    return RotatedBox(float(center[0]), float(center[1]), float(size[0]), float(size[1]), theta)


def _convex_hull(points: np.ndarray) -> np.ndarray:
    pts = sorted(map(tuple, points))
    if len(pts) <= 2:
        return np.asarray(pts, dtype=float)

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return np.asarray(lower[:-1] + upper[:-1], dtype=float)


def poly_to_rbox(polygon: QuadPolygon) -> RotatedBox:
    """Recover (cx, cy, w, h, theta) from an annotation polygon.

    Polygons whose opposite edges match within 10% take the exact path:
    center is the vertex centroid and the sides are the vectors between
    opposite edge midpoints. Anything else gets its minimum-area enclosing
    rectangle. Degenerate (zero-area) polygons raise ValueError.
    """
    pts = polygon.as_array()
    edges = np.roll(pts, -1, axis=0) - pts
    lengths = np.hypot(edges[:, 0], edges[:, 1])
    if np.any(lengths == 0.0):
        raise ValueError("degenerate polygon: repeated vertices")
    ok01 = abs(lengths[0] - lengths[2]) <= _PARALLELOGRAM_RTOL * max(lengths[0], lengths[2])
    ok12 = abs(lengths[1] - lengths[3]) <= _PARALLELOGRAM_RTOL * max(lengths[1], lengths[3])
    if not (ok01 and ok12):
        return _min_area_rect(pts)
    center = pts.mean(axis=0)
    mids = 0.5 * (pts + np.roll(pts, -1, axis=0))
    w_vec = mids[1] - mids[3]
    h_vec = mids[2] - mids[0]
    w = float(np.hypot(w_vec[0], w_vec[1]))
    h = float(np.hypot(h_vec[0], h_vec[1]))
    if w <= 0.0 or h <= 0.0:
        raise ValueError("degenerate polygon: zero-length side")
    theta = math.atan2(w_vec[1], w_vec[0])
    return RotatedBox(float(center[0]), float(center[1]), w, h, normalize_angle(theta))


@dataclass(frozen=True)
class RemovalRecord:
    """One cleaning decision; serialize as JSON lines for the report."""

    image_id: str
    action: str
    reason: str


def clean_dataset(images) -> tuple[list[ImageAnnotations], list[RemovalRecord]]:
    """Apply the cleaning rules: one image per content hash, none unannotated.

    Among images sharing a content hash the one with the most records wins
    (ties: lexicographically smallest image_id). Images without a hash are
    never treated as duplicates of anything. Idempotent.
    """
    report: list[RemovalRecord] = []

    keep_for_hash: dict[int, ImageAnnotations] = {}
    for img in images:
        if img.content_hash is None:
            continue
        cur = keep_for_hash.get(img.content_hash)
        if cur is None:
            keep_for_hash[img.content_hash] = img
        elif (len(img.records), cur.image_id) > (len(cur.records), img.image_id):
            # img has strictly more records, or ties and a smaller id
            keep_for_hash[img.content_hash] = img

    deduped = []
    for img in images:
        if img.content_hash is not None and keep_for_hash[img.content_hash] is not img:
            kept = keep_for_hash[img.content_hash]
            report.append(
                RemovalRecord(img.image_id, "removed", f"duplicate of {kept.image_id}")
            )
            continue
        deduped.append(img)

    cleaned = []
    for img in deduped:
        if not img.records:
            report.append(RemovalRecord(img.image_id, "removed", "unannotated"))
            continue
        cleaned.append(img)
    return cleaned, report


@dataclass(frozen=True, eq=False)
class CategoryStats:
    count: int
    angle_hist: np.ndarray
    aspect_hist: np.ndarray
    mean_area: float


@dataclass(frozen=True, eq=False)
class DatasetStats:
    """Per-category histograms plus the shared bin edges used to build them."""

    per_category: dict[str, CategoryStats]
    angle_edges: np.ndarray
    aspect_edges: np.ndarray
    conversion_failures: int = 0
    failed_ids: tuple[str, ...] = field(default_factory=tuple)


def compute_stats(images, bins: int = 36) -> DatasetStats:
    """Angle/aspect-ratio histograms, counts and mean pixel area per category.

    Angle bins tile [-pi/2, pi/2); aspect bins tile [1, max ratio] across the
    whole dataset so categories share edges. Records whose polygon cannot be
    converted to a box are skipped and counted, never fatal.
    """
    if bins < 1:
        raise ValueError("bins must be >= 1")
    angles: dict[str, list[float]] = {}
    ratios: dict[str, list[float]] = {}
    areas: dict[str, list[float]] = {}
    failures = 0
    failed_ids: list[str] = []
    for img in images:
        for rec in img.records:
            try:
                box = poly_to_rbox(rec.polygon)
            except ValueError:
                failures += 1
                failed_ids.append(img.image_id)
                continue
            angles.setdefault(rec.category, []).append(box.theta)
            ratios.setdefault(rec.category, []).append(aspect_ratio(box))
            areas.setdefault(rec.category, []).append(box.area)

    angle_edges = np.linspace(-math.pi / 2, math.pi / 2, bins + 1)
    max_ratio = max((max(v) for v in ratios.values()), default=2.0)
    if max_ratio <= 1.0:
        max_ratio = 2.0
    aspect_edges = np.linspace(1.0, max_ratio, bins + 1)

    per_category = {}
    for cat in sorted(angles):
        a = np.asarray(angles[cat])
        r = np.asarray(ratios[cat])
        angle_hist, _ = np.histogram(a, bins=angle_edges)
        aspect_hist, _ = np.histogram(r, bins=aspect_edges)
        per_category[cat] = CategoryStats(
            count=len(a),
            angle_hist=angle_hist,
            aspect_hist=aspect_hist,
            mean_area=float(np.mean(areas[cat])),
        )
    return DatasetStats(
        per_category=per_category,
        angle_edges=angle_edges,
        aspect_edges=aspect_edges,
        conversion_failures=failures,
        failed_ids=tuple(failed_ids),
    )
