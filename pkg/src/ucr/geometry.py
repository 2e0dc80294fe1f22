"""Rotated-box geometry: le90 angles, polygon conversion, exact rotated IoU.

Boxes are ``(cx, cy, w, h, theta)`` with theta in radians, wrapped to the
le90 range ``[-pi/2, pi/2)``. theta measures the rotation of the w-side
from the +x axis; no ``w >= h`` canonicalization is applied, so square-like
boxes keep whatever side labelling their source used.

Everything here is pure and operates on immutable value records, so any
amount of concurrent use is fine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

HALF_PI = math.pi / 2.0

# Intersections thinner than this are treated as empty (edge contact).
_AREA_EPS = 1e-12


def normalize_angle(theta):
    """Wrap an angle (radians) into the le90 range ``[-pi/2, pi/2)``.

    Wrapping is modulo pi: a rotated rectangle is unchanged under
    theta -> theta +/- pi with the same (w, h). Accepts scalars or arrays;
    scalars come back as float. Non-finite input raises ValueError.
    """
    arr = np.asarray(theta, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("angle must be finite")
    wrapped = np.mod(arr + HALF_PI, math.pi) - HALF_PI
    # float rounding in mod can land exactly on +pi/2; fold it back
    wrapped = np.where(wrapped >= HALF_PI, wrapped - math.pi, wrapped)
    # in-range values pass through bit-exactly
    wrapped = np.where((arr >= -HALF_PI) & (arr < HALF_PI), arr, wrapped)
    if wrapped.ndim == 0:
        return float(wrapped)
    return wrapped


@dataclass(frozen=True)
class RotatedBox:
    """Oriented rectangle (cx, cy, w, h, theta), theta auto-wrapped to le90."""

    cx: float
    cy: float
    w: float
    h: float
    theta: float

    def __post_init__(self):
        vals = (self.cx, self.cy, self.w, self.h, self.theta)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError(f"box fields must be finite, got {vals}")
        if self.w <= 0 or self.h <= 0:
            raise ValueError(f"box sides must be positive, got w={self.w} h={self.h}")
        object.__setattr__(self, "theta", normalize_angle(self.theta))

    @property
    def area(self) -> float:
        return self.w * self.h


@dataclass(frozen=True)
class HorizontalBox:
    """Axis-aligned box (xmin, ymin, xmax, ymax)."""

    xmin: float
    ymin: float
    xmax: float
    ymax: float

    def __post_init__(self):
        if not (self.xmin < self.xmax and self.ymin < self.ymax):
            raise ValueError("horizontal box must have xmin < xmax and ymin < ymax")


def _signed_area(vertices) -> float:
    """Shoelace signed area; positive for counter-clockwise order."""
    total = 0.0
    k = len(vertices)
    for i in range(k):
        x0, y0 = vertices[i]
        x1, y1 = vertices[(i + 1) % k]
        total += x0 * y1 - x1 * y0
    return 0.5 * total


def _segments_cross(p, q, r, s) -> bool:
    """True when open segments pq and rs properly intersect."""

    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    d1 = orient(r, s, p)
    d2 = orient(r, s, q)
    d3 = orient(p, q, r)
    d4 = orient(p, q, s)
    return ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and d1 != d2 and d3 != d4


@dataclass(frozen=True)
class QuadPolygon:
    """Simple quadrilateral, vertices in counter-clockwise order."""

    vertices: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if len(self.vertices) != 4:
            raise ValueError("quadrilateral needs exactly 4 vertices")
        verts = tuple((float(x), float(y)) for x, y in self.vertices)
        for x, y in verts:
            if not (math.isfinite(x) and math.isfinite(y)):
                raise ValueError("vertices must be finite")
        if _signed_area(verts) <= 0.0:
            raise ValueError("vertices must be in counter-clockwise order with positive area")
        if _segments_cross(verts[0], verts[1], verts[2], verts[3]) or _segments_cross(
            verts[1], verts[2], verts[3], verts[0]
        ):
            raise ValueError("polygon is self-intersecting")
        object.__setattr__(self, "vertices", verts)

    @classmethod
    def from_points(cls, points) -> "QuadPolygon":
        """Build a quad, reversing clockwise input to counter-clockwise."""
        pts = [(float(x), float(y)) for x, y in points]
        if len(pts) != 4:
            raise ValueError("quadrilateral needs exactly 4 vertices")
        if _signed_area(pts) < 0.0:
            pts = [pts[0]] + pts[:0:-1]
        return cls(tuple(pts))

    @property
    def area(self) -> float:
        return _signed_area(self.vertices)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.vertices, dtype=float)


def rbox_to_polygon(box: RotatedBox) -> QuadPolygon:
    """Corners of the box, counter-clockwise, starting at (-w/2, -h/2)."""
    c = math.cos(box.theta)
    s = math.sin(box.theta)
    hw = 0.5 * box.w
    hh = 0.5 * box.h
    verts = []
    for dx, dy in ((-hw, -hh), (hw, -hh), (hw, hh), (-hw, hh)):
        verts.append((box.cx + dx * c - dy * s, box.cy + dx * s + dy * c))
    return QuadPolygon(tuple(verts))


def rbox_to_hbb(box: RotatedBox) -> HorizontalBox:
    """Tight axis-aligned bound of the rotated corners."""
    pts = rbox_to_polygon(box).vertices
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    return HorizontalBox(min(xs), min(ys), max(xs), max(ys))


def aspect_ratio(box: RotatedBox) -> float:
    """max(w, h) / min(w, h), independent of orientation."""
    return max(box.w, box.h) / min(box.w, box.h)


def convex_intersection(a: QuadPolygon, b: QuadPolygon) -> list[tuple[float, float]]:
    """Intersection of two convex polygons by half-plane clipping.

    Returns 0..8 counter-clockwise vertices; near-degenerate slivers
    (area < 1e-12) come back empty so IoU is continuous at edge contact.
    """
    output = list(a.vertices)
    clip = b.vertices
    for i in range(len(clip)):
        cx0, cy0 = clip[i]
        cx1, cy1 = clip[(i + 1) % len(clip)]
        ex = cx1 - cx0
        ey = cy1 - cy0
        subject = output
        output = []
        if not subject:
            return []
        prev = subject[-1]
        prev_in = ex * (prev[1] - cy0) - ey * (prev[0] - cx0) >= 0.0
        for cur in subject:
            cur_in = ex * (cur[1] - cy0) - ey * (cur[0] - cx0) >= 0.0
            if cur_in != prev_in:
                # segment crosses the clip line; add the crossing point
                dx = cur[0] - prev[0]
                dy = cur[1] - prev[1]
                denom = ex * dy - ey * dx
                t = (ex * (cy0 - prev[1]) - ey * (cx0 - prev[0])) / denom
                output.append((prev[0] + t * dx, prev[1] + t * dy))
            if cur_in:
                output.append(cur)
            prev = cur
            prev_in = cur_in
    if len(output) < 3 or abs(_signed_area(output)) < _AREA_EPS:
        return []
    return output


def rotated_iou(a: RotatedBox, b: RotatedBox) -> float:
    """area(a & b) / area(a | b), in [0, 1]."""
    inter = convex_intersection(rbox_to_polygon(a), rbox_to_polygon(b))
    inter_area = abs(_signed_area(inter)) if inter else 0.0
    union = a.area + b.area - inter_area
    if union <= 0.0:
        return 0.0
    return min(max(inter_area / union, 0.0), 1.0)
