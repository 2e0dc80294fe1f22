"""Constraint-aware loss stack for encoding regression.

Three pieces compose the total objective:

* ``unit_cycle_loss`` penalizes departure from the dimension's constraint
  system (one term per constraint, equal weights),
* ``regression_loss`` is the component-mean distance between predicted and
  target encodings,
* an invalid region: predictions with sum-of-squares below ``m_invalid``
  carry no regression signal and are steered by the constraint term alone.

``total_loss`` mirrors the classification + regression + constraint
composition of a detector head with the classification term held at zero,
so the breakdown keeps a ``cls`` slot for anyone wiring this into one.

All functions broadcast over leading batch axes; scalar encodings give
scalar losses. Everything is pure.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .coder import ResolverConfig, ae2, constraint_residuals, encode


class LossKind(Enum):
    """Penalty applied to each residual/difference term."""

    ABSOLUTE_DEVIATION = "l1"
    SQUARED_DEVIATION = "mse"


@dataclass(frozen=True)
class LossConfig:
    """Weights and shapes of the loss terms.

    ``m_invalid`` is the sum-of-squares threshold of the invalid region.
    It should stay below the circle's squared radius (n*s^2/2, or s^2 for
    n = 2); configurations that cover the whole circle are accepted for
    ablation runs but warned about, since they gate regression everywhere
    inside the circle.
    """

    lambda_reg: float = 1.0
    lambda_uc: float = 0.05
    m_invalid: float = 0.2
    uc_loss_kind: LossKind = LossKind.ABSOLUTE_DEVIATION
    reg_loss_kind: LossKind = LossKind.ABSOLUTE_DEVIATION

    def __post_init__(self):
        for name in ("lambda_reg", "lambda_uc", "m_invalid"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ValueError(f"{name} must be finite and non-negative, got {v}")
        if not isinstance(self.uc_loss_kind, LossKind) or not isinstance(
            self.reg_loss_kind, LossKind
        ):
            raise TypeError("loss kinds must be LossKind values")


@dataclass(frozen=True)
class LossBreakdown:
    """Per-term values; ``cls`` is the structural zero of the composition.

    ``reg`` is already gated: it is 0 whenever ``invalid`` is set, and
    ``total = cls + lambda_reg * reg + lambda_uc * uc``. Fields are floats
    for single encodings and arrays for batches.
    """

    uc: float
    reg: float
    cls: float
    total: float
    invalid: bool


def _penalty(values: np.ndarray, kind: LossKind) -> np.ndarray:
    if kind is LossKind.ABSOLUTE_DEVIATION:
        return np.abs(values)
    return values * values


def _penalty_outer_grad(values: np.ndarray, kind: LossKind) -> np.ndarray:
    # d penalty / d value; sign(0) = 0 is the subgradient at the |.| kink
    if kind is LossKind.ABSOLUTE_DEVIATION:
        return np.sign(values)
    return 2.0 * values


def unit_cycle_loss(m, rcfg: ResolverConfig, kind: LossKind = LossKind.ABSOLUTE_DEVIATION):
    """Sum of per-constraint penalties; zero exactly on the target circle."""
    if rcfg.dimension == 1:
        raise ValueError("the 1-D mapping has no constraint system")
    res = constraint_residuals(m, rcfg)
    out = np.sum(_penalty(res, kind), axis=-1)
    if out.ndim == 0:
        return float(out)
    return out


def is_invalid(m, cfg: LossConfig):
    """True where the encoding falls inside the invalid disc (sum m^2 < m_invalid)."""
    inv = np.asarray(ae2(m)) < cfg.m_invalid
    if inv.ndim == 0:
        return bool(inv)
    return inv


def regression_loss(pred, target, kind: LossKind = LossKind.ABSOLUTE_DEVIATION):
    """Component-mean deviation between two encodings of equal dimension."""
    p = np.asarray(pred, dtype=float)
    t = np.asarray(target, dtype=float)
    if p.shape[-1] != t.shape[-1]:
        raise ValueError(f"encoding dimensions differ: {p.shape[-1]} vs {t.shape[-1]}")
    out = np.mean(_penalty(p - t, kind), axis=-1)
    if out.ndim == 0:
        return float(out)
    return out


def _check_gate(rcfg: ResolverConfig, lcfg: LossConfig) -> None:
    if rcfg.dimension == 1:
        return
    if lcfg.m_invalid >= rcfg.circle_radius_sq:
        warnings.warn(
            f"m_invalid={lcfg.m_invalid} reaches the target circle "
            f"(radius^2={rcfg.circle_radius_sq}); regression is gated on it",
            UserWarning,
            stacklevel=3,
        )


def total_loss(pred, target_theta, rcfg: ResolverConfig, lcfg: LossConfig) -> LossBreakdown:
    """Constraint + gated regression against the encoding of ``target_theta``.

    The 1-D mapping is accepted only with ``lambda_uc == 0`` (it has no
    constraint system); its breakdown reports uc = 0.
    """
    _check_gate(rcfg, lcfg)
    p = np.asarray(pred, dtype=float)
    target = encode(target_theta, rcfg)
    if rcfg.dimension == 1 and lcfg.lambda_uc == 0.0:
        uc = np.zeros(p.shape[:-1])
    else:
        uc = np.asarray(unit_cycle_loss(p, rcfg, lcfg.uc_loss_kind))
    invalid = np.asarray(ae2(p)) < lcfg.m_invalid
    reg = np.where(invalid, 0.0, np.asarray(regression_loss(p, target, lcfg.reg_loss_kind)))
    cls = np.zeros_like(reg)
    total = cls + lcfg.lambda_reg * reg + lcfg.lambda_uc * uc
    if total.ndim == 0:
        return LossBreakdown(float(uc), float(reg), float(cls), float(total), bool(invalid))
    return LossBreakdown(uc, reg, cls, total, invalid)


def total_loss_gradient(pred, target_theta, rcfg: ResolverConfig, lcfg: LossConfig) -> np.ndarray:
    """Analytic d total / d pred, shape of ``pred``.

    Subgradient convention sign(0) = 0 at absolute-value kinks; inside the
    invalid region the regression part is exactly zero.
    """
    _check_gate(rcfg, lcfg)
    p = np.asarray(pred, dtype=float)
    n = rcfg.dimension
    grad = np.zeros_like(p)

    if lcfg.lambda_uc != 0.0:
        if n == 1:
            raise ValueError("the 1-D mapping has no constraint system")
        res = constraint_residuals(p, rcfg)
        outer = _penalty_outer_grad(res, lcfg.uc_loss_kind)
        # residual 0 is always sum m^2 - target, jacobian 2m
        g = outer[..., 0, None] * 2.0 * p
        if n in (3, 5):
            g += outer[..., 1, None]
        elif n == 4:
            g[..., 0] += outer[..., 1]
            g[..., 2] += outer[..., 1]
            g[..., 1] += outer[..., 2]
            g[..., 3] += outer[..., 2]
        if n == 5:
            g += outer[..., 2, None] * 3.0 * p * p
        grad += lcfg.lambda_uc * g

    if lcfg.lambda_reg != 0.0:
        target = encode(target_theta, rcfg)
        diff = p - target
        reg_grad = _penalty_outer_grad(diff, lcfg.reg_loss_kind) / n
        valid = ~(np.sum(p * p, axis=-1) < lcfg.m_invalid)
        grad += lcfg.lambda_reg * valid[..., None] * reg_grad

    return grad
