"""Shared test helpers: independent oracles and random-input builders.

The oracles here deliberately avoid the library code paths they check:
Monte-Carlo membership sampling for IoU, central finite differences for
gradients, and plain-loop counting for histograms.
"""

from __future__ import annotations

import numpy as np
import pytest

from ucr import RotatedBox, rbox_to_polygon


def quad_membership(vertices: np.ndarray, px: np.ndarray, py: np.ndarray) -> np.ndarray:
    """Vectorized point-in-convex-CCW-polygon via half-plane tests."""
    inside = np.ones(px.shape, dtype=bool)
    k = len(vertices)
    for i in range(k):
        x0, y0 = vertices[i]
        x1, y1 = vertices[(i + 1) % k]
        inside &= (x1 - x0) * (py - y0) - (y1 - y0) * (px - x0) >= 0.0
    return inside


def iou_monte_carlo(a: RotatedBox, b: RotatedBox, points01: np.ndarray) -> float:
    """IoU estimate from point-membership sampling.

    ``points01`` is an (N, 2) low-discrepancy sample of the unit square; it
    is rescaled to the overlap of the two corner bounding boxes (which
    contains the intersection), so only the intersection area is estimated
    and the exact w*h areas close the union.
    """
    pa = rbox_to_polygon(a).as_array()
    pb = rbox_to_polygon(b).as_array()
    lo = np.maximum(pa.min(axis=0), pb.min(axis=0))
    hi = np.minimum(pa.max(axis=0), pb.max(axis=0))
    if np.any(hi <= lo):
        return 0.0
    span = hi - lo
    px = lo[0] + points01[:, 0] * span[0]
    py = lo[1] + points01[:, 1] * span[1]
    both = quad_membership(pa, px, py) & quad_membership(pb, px, py)
    inter = both.mean() * span[0] * span[1]
    union = a.area + b.area - inter
    return float(inter / union)


def finite_difference_gradient(fn, x: np.ndarray, step: float = 1e-6) -> np.ndarray:
    """Central finite differences of a scalar function of a vector."""
    grad = np.empty_like(x)
    for i in range(x.size):
        hi = x.copy()
        lo = x.copy()
        hi[i] += step
        lo[i] -= step
        grad[i] = (fn(hi) - fn(lo)) / (2.0 * step)
    return grad


def random_box(rng: np.random.Generator, center_span: float = 2.0) -> RotatedBox:
    return RotatedBox(
        cx=rng.uniform(-center_span, center_span),
        cy=rng.uniform(-center_span, center_span),
        w=rng.uniform(0.3, 3.0),
        h=rng.uniform(0.3, 3.0),
        theta=rng.uniform(-np.pi / 2, np.pi / 2),
    )


def random_box_pair(rng: np.random.Generator) -> tuple[RotatedBox, RotatedBox]:
    """A pair that overlaps often but not always."""
    a = random_box(rng)
    b = RotatedBox(
        cx=a.cx + rng.uniform(-2.0, 2.0),
        cy=a.cy + rng.uniform(-2.0, 2.0),
        w=rng.uniform(0.3, 3.0),
        h=rng.uniform(0.3, 3.0),
        theta=rng.uniform(-np.pi / 2, np.pi / 2),
    )
    return a, b


@pytest.fixture(scope="session")
def sobol_points() -> np.ndarray:
    """2^20 scrambled low-discrepancy points of the unit square, shared."""
    from scipy.stats import qmc

    return qmc.Sobol(d=2, scramble=True, seed=20240917).random(2**20)
