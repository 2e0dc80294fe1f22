"""Map a le90 angle onto a circle embedded in n-space and back, n in 1..5.

The 2-D mapping is the classic (cos, sin) pair; for n >= 3 the encoder is
the phase-shifted cosine family

    m_i = s * cos(omega * theta + 2*pi*i / n),   i = 1..n,

which traces a circle of radius r, r^2 = n*s^2/2, inside the plane cut out
by the dimension's linear constraints. n = 1 is the raw angle itself and
exists only as the discontinuity baseline.

All functions accept a trailing-axis batch: encode maps shape ``(...,)``
angles to ``(..., n)`` encodings and decode inverts that. Scalars in,
floats out.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .geometry import normalize_angle

#: Phasor magnitudes below this decode to nothing meaningful.
EPS_DECODE = 1e-12

SUPPORTED_DIMENSIONS = (1, 2, 3, 4, 5)


class AmbiguousEncodingError(ValueError):
    """Raised when an encoding's phasor is too close to zero to carry an angle."""


class NonBijectiveWarning(UserWarning):
    """The configured angular frequency makes decode non-injective on le90."""


@dataclass(frozen=True)
class ResolverConfig:
    """Dimension, angular frequency and per-component amplitude of the mapping.

    The default ``angular_frequency=2`` stretches the pi-wide le90 range over
    exactly one full turn of the circle, which is what makes decoding
    bijective; larger frequencies wrap the range onto itself and are only
    accepted with a warning. ``amplitude`` rescales every component, so the
    circle radius r obeys r^2 = dimension * amplitude^2 / 2 for n >= 3 and
    r = amplitude for n = 2.
    """

    dimension: int = 3
    angular_frequency: float = 2.0
    amplitude: float = 1.0

    def __post_init__(self):
        if self.dimension not in SUPPORTED_DIMENSIONS:
            raise ValueError(f"dimension must be one of {SUPPORTED_DIMENSIONS}")
        if not (math.isfinite(self.angular_frequency) and self.angular_frequency > 0):
            raise ValueError("angular_frequency must be positive and finite")
        if not (math.isfinite(self.amplitude) and self.amplitude > 0):
            raise ValueError("amplitude must be positive and finite")
        if self.angular_frequency * math.pi > 2.0 * math.pi * (1.0 + 1e-12):
            warnings.warn(
                "angular_frequency > 2 wraps the le90 range more than once; "
                "decode is no longer bijective",
                NonBijectiveWarning,
                stacklevel=2,
            )

    @property
    def circle_radius_sq(self) -> float:
        """Squared radius of the target circle (the sum-of-squares target)."""
        if self.dimension == 1:
            raise ValueError("the 1-D mapping has no circle")
        if self.dimension == 2:
            return self.amplitude**2
        return self.dimension * self.amplitude**2 / 2.0

    @property
    def phases(self) -> np.ndarray:
        """Phase offsets 2*pi*i/n, i = 1..n, of the cosine family (n >= 3)."""
        n = self.dimension
        return 2.0 * math.pi * np.arange(1, n + 1) / n


def encode(theta, cfg: ResolverConfig) -> np.ndarray:
    """Encode angles (radians, any wrap) into (..., n) encoding vectors."""
    t = np.asarray(normalize_angle(theta), dtype=float)
    wt = cfg.angular_frequency * t
    s = cfg.amplitude
    if cfg.dimension == 1:
        return t[..., None]
    if cfg.dimension == 2:
        return np.stack([s * np.cos(wt), s * np.sin(wt)], axis=-1)
    return s * np.cos(wt[..., None] + cfg.phases)


def phasor(m, cfg: ResolverConfig) -> np.ndarray:
    """Complex phasor whose argument is omega * theta.

    For n = 2 this is m_1 + j*m_2; for n >= 3 it is sum_i m_i * exp(-j*2*pi*i/n),
    which equals (n*s/2) * exp(j*omega*theta) on encoder output. Linear in m,
    hence decode's scale invariance.
    """
    arr = _as_encoding(m, cfg)
    if cfg.dimension == 1:
        raise ValueError("the 1-D mapping has no phasor")
    if cfg.dimension == 2:
        return arr[..., 0] + 1j * arr[..., 1]
    return arr @ np.exp(-1j * cfg.phases)


def decode(m, cfg: ResolverConfig):
    """Invert encode; scale-invariant (decode(c*m) == decode(m) for c > 0).

    Raises AmbiguousEncodingError when the phasor magnitude falls below
    EPS_DECODE, i.e. the encoding sits at the center of the circle where
    every angle is equally plausible.
    """
    if cfg.dimension == 1:
        arr = _as_encoding(m, cfg)
        return normalize_angle(arr[..., 0])
    z = phasor(m, cfg)
    if np.any(np.abs(z) < EPS_DECODE):
        raise AmbiguousEncodingError(
            f"phasor magnitude below {EPS_DECODE}; encoding does not determine an angle"
        )
    return normalize_angle(np.angle(z) / cfg.angular_frequency)


def constraint_residuals(m, cfg: ResolverConfig) -> np.ndarray:
    """Signed residuals of the dimension's constraint system, shape (..., k).

    n=2: (sum m^2 - s^2,); n=3: (sum m^2 - 3s^2/2, sum m);
    n=4: (sum m^2 - 2s^2, m1+m3, m2+m4);
    n=5: (sum m^2 - 5s^2/2, sum m, sum m^3). n=1 has no constraints (k=0).
    """
    arr = _as_encoding(m, cfg)
    n = cfg.dimension
    if n == 1:
        return np.empty(arr.shape[:-1] + (0,))
    sumsq = np.sum(arr * arr, axis=-1) - cfg.circle_radius_sq
    if n == 2:
        parts = [sumsq]
    elif n == 3:
        parts = [sumsq, np.sum(arr, axis=-1)]
    elif n == 4:
        parts = [sumsq, arr[..., 0] + arr[..., 2], arr[..., 1] + arr[..., 3]]
    else:
        parts = [sumsq, np.sum(arr, axis=-1), np.sum(arr**3, axis=-1)]
    return np.stack(parts, axis=-1)


def ae2(m) -> np.ndarray:
    """Sum of squared encoding components, the on-circle diagnostic.

    Equals circle_radius_sq (1 at the defaults for n = 2) exactly when the
    encoding lies on its target circle.
    """
    arr = np.asarray(m, dtype=float)
    out = np.sum(arr * arr, axis=-1)
    if out.ndim == 0:
        return float(out)
    return out


def encoding_gap(theta_a, theta_b, cfg: ResolverConfig):
    """Euclidean distance between the encodings of two angles."""
    gap = np.linalg.norm(encode(theta_a, cfg) - encode(theta_b, cfg), axis=-1)
    if gap.ndim == 0:
        return float(gap)
    return gap


def _as_encoding(m, cfg: ResolverConfig) -> np.ndarray:
    arr = np.asarray(m, dtype=float)
    if arr.ndim == 0 or arr.shape[-1] != cfg.dimension:
        raise ValueError(
            f"encoding must have {cfg.dimension} components on the last axis, "
            f"got shape {arr.shape}"
        )
    return arr
