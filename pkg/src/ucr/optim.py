"""Desk-scale gradient-descent harness for the constraint's effect on angle bias.

Each target angle gets one free encoding vector, initialized uniformly in a
disc and optimized by plain full-batch gradient descent on the total loss
against a noise-perturbed copy of the target. The report carries the final
sum-of-squares (the on-circle diagnostic) and the decoded-angle error
against the clean target, so constrained and unconstrained runs can be
compared pairwise.

Per-sample randomness is keyed on (seed, sample index), so reports are
bitwise reproducible and independent of any batching or parallel split.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .coder import EPS_DECODE, ResolverConfig, encoding_gap, phasor
from .geometry import normalize_angle
from .losses import LossConfig, total_loss, total_loss_gradient

HALF_PI = math.pi / 2.0


class FitDivergenceError(RuntimeError):
    """Optimization produced a non-finite loss; ``step`` is the failing index."""

    def __init__(self, step: int):
        super().__init__(f"non-finite loss at step {step}")
        self.step = step


@dataclass(frozen=True)
class FitTask:
    """One harness run: targets, noise level, init spread and descent settings."""

    targets: tuple[float, ...]
    noise_sigma: float = 0.0
    init_scale: float = 1.0
    steps: int = 500
    learning_rate: float = 0.02
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(float(t) for t in self.targets))
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be positive")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be non-negative")
        if not self.init_scale > 0:
            raise ValueError("init_scale must be positive")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")


@dataclass(frozen=True, eq=False)
class FitReport:
    """Per-sample outcomes of a fit; quantiles are (p10, p50, p90)."""

    ae2: np.ndarray
    angle_error: np.ndarray
    loss_trajectory: np.ndarray
    ae2_quantiles: tuple[float, float, float]
    angle_error_quantiles: tuple[float, float, float]


def circular_distance(a, b):
    """Distance between le90 angles on the mod-pi circle, in [0, pi/2]."""
    d = np.abs(np.asarray(normalize_angle(a)) - np.asarray(normalize_angle(b)))
    out = np.minimum(d, math.pi - d)
    if out.ndim == 0:
        return float(out)
    return out


def initial_state(task: FitTask, rcfg: ResolverConfig) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic (init encodings (S, n), noisy target angles (S,)) for a task."""
    n = rcfg.dimension
    count = len(task.targets)
    inits = np.empty((count, n))
    noisy = np.empty(count)
    for k, theta in enumerate(task.targets):
        rng = np.random.default_rng([task.seed, k])
        delta = rng.normal(0.0, task.noise_sigma) if task.noise_sigma > 0 else 0.0
        noisy[k] = normalize_angle(theta + delta)
        direction = rng.normal(size=n)
        norm = np.linalg.norm(direction)
        if norm == 0.0:
            direction[0] = 1.0
            norm = 1.0
        radius = task.init_scale * rng.uniform() ** (1.0 / n)
        inits[k] = direction / norm * radius
    return inits, noisy


def fit_encodings(
    task: FitTask, rcfg: ResolverConfig, lcfg: LossConfig, on_step=None
) -> FitReport:
    """Run the descent and report final diagnostics.

    Angle error is the circular distance between the decoded final encoding
    and the clean target; samples whose final encoding is ambiguous (phasor
    magnitude below EPS_DECODE) score the maximal error pi/2.

    ``on_step(step, m)`` is called with the (S, n) iterate before every
    update, for instrumentation; the array must not be mutated.
    """
    m, noisy = initial_state(task, rcfg)
    targets = np.asarray(task.targets)
    loss_traj = np.empty(task.steps)
    for step in range(task.steps):
        breakdown = total_loss(m, noisy, rcfg, lcfg)
        total = np.asarray(breakdown.total)
        if not np.all(np.isfinite(total)):
            raise FitDivergenceError(step)
        loss_traj[step] = float(total.mean()) if total.size else 0.0
        if on_step is not None:
            on_step(step, m)
        m = m - task.learning_rate * total_loss_gradient(m, noisy, rcfg, lcfg)

    final_ae2 = np.sum(m * m, axis=-1)
    angle_error = np.full(len(targets), HALF_PI)
    if rcfg.dimension == 1:
        decoded = normalize_angle(m[..., 0]) if len(targets) else m[..., 0]
        angle_error = circular_distance(decoded, targets) if len(targets) else angle_error
    elif len(targets):
        z = phasor(m, rcfg)
        ok = np.abs(z) >= EPS_DECODE
        decoded = normalize_angle(np.angle(z[ok]) / rcfg.angular_frequency)
        angle_error[ok] = circular_distance(decoded, targets[ok])

    return FitReport(
        ae2=final_ae2,
        angle_error=np.asarray(angle_error),
        loss_trajectory=loss_traj,
        ae2_quantiles=_quantiles(final_ae2),
        angle_error_quantiles=_quantiles(angle_error),
    )


def _quantiles(values: np.ndarray) -> tuple[float, float, float]:
    if values.size == 0:
        return (math.nan, math.nan, math.nan)
    p10, p50, p90 = np.quantile(values, [0.1, 0.5, 0.9])
    return (float(p10), float(p50), float(p90))


def boundary_demo(epsilons, rcfg: ResolverConfig) -> list[tuple[float, float, float]]:
    """Rows (epsilon, 1-D angle distance, encoding gap) across the range boundary.

    The two probe angles -pi/2 + eps and pi/2 - eps describe nearly identical
    boxes; their raw 1-D distance approaches pi as eps shrinks while the
    encoding gap of any n >= 2 mapping vanishes.
    """
    rows = []
    for eps in epsilons:
        eps = float(eps)
        if not eps > 0:
            raise ValueError("epsilon must be positive")
        lo = -HALF_PI + eps
        hi = HALF_PI - eps
        loss_1d = abs(lo - hi)
        if rcfg.dimension == 1:
            gap = loss_1d
        else:
            gap = encoding_gap(lo, hi, rcfg)
        rows.append((eps, loss_1d, gap))
    return rows


def ae2_histogram(report: FitReport, bins: int) -> tuple[np.ndarray, np.ndarray]:
    """Counts of final sum-of-squares over uniform bins; (counts, edges).

    The range is [0, max(values)] (falling back to [0, 1] when empty), so an
    all-on-circle report occupies the single bin whose right edge is the
    circle value.
    """
    if bins < 1:
        raise ValueError("bins must be >= 1")
    if report.ae2.size == 0:
        return np.zeros(bins, dtype=int), np.linspace(0.0, 1.0, bins + 1)
    hi = float(report.ae2.max())
    if hi <= 0.0:
        hi = 1.0
    counts, edges = np.histogram(report.ae2, bins=bins, range=(0.0, hi))
    return counts, edges


@dataclass(frozen=True, eq=False)
class PairedBiasResult:
    """Paired-seed comparison of a constrained run against its no-constraint twin.

    ``*_medians`` are per-repetition medians; a win is a repetition where the
    constrained run is strictly better (smaller |sum-of-squares - circle
    target| median, smaller angle-error median).
    """

    repetitions: int
    baseline_ae2_dev_medians: np.ndarray
    constrained_ae2_dev_medians: np.ndarray
    baseline_angle_medians: np.ndarray
    constrained_angle_medians: np.ndarray
    ae2_wins: int
    angle_wins: int
    baseline_reports: tuple[FitReport, ...]
    constrained_reports: tuple[FitReport, ...]


def paired_bias_experiment(
    rcfg: ResolverConfig,
    lcfg: LossConfig,
    *,
    repetitions: int = 20,
    samples: int = 256,
    noise_sigma: float = 0.3,
    init_scale: float = 3.0,
    steps: int = 150,
    learning_rate: float = 0.1,
    seed: int = 0,
) -> PairedBiasResult:
    """Run the bias demonstration: lcfg as given vs the same lcfg with lambda_uc = 0.

    Every repetition draws fresh targets and shares its FitTask (hence inits
    and noise draws) between the two settings, so the comparison is a paired
    sign test over repetitions.
    """
    baseline_cfg = replace(lcfg, lambda_uc=0.0)
    target_sq = rcfg.circle_radius_sq

    base_dev, cons_dev, base_ang, cons_ang = [], [], [], []
    base_reports, cons_reports = [], []
    for rep in range(repetitions):
        target_rng = np.random.default_rng([seed, rep, 1])
        targets = target_rng.uniform(-HALF_PI, HALF_PI, samples)
        task_seed = int(np.random.SeedSequence([seed, rep]).generate_state(1)[0])
        task = FitTask(
            targets=tuple(targets),
            noise_sigma=noise_sigma,
            init_scale=init_scale,
            steps=steps,
            learning_rate=learning_rate,
            seed=task_seed,
        )
        base = fit_encodings(task, rcfg, baseline_cfg)
        cons = fit_encodings(task, rcfg, lcfg)
        base_reports.append(base)
        cons_reports.append(cons)
        base_dev.append(float(np.median(np.abs(base.ae2 - target_sq))))
        cons_dev.append(float(np.median(np.abs(cons.ae2 - target_sq))))
        base_ang.append(float(np.median(base.angle_error)))
        cons_ang.append(float(np.median(cons.angle_error)))

    base_dev = np.asarray(base_dev)
    cons_dev = np.asarray(cons_dev)
    base_ang = np.asarray(base_ang)
    cons_ang = np.asarray(cons_ang)
    return PairedBiasResult(
        repetitions=repetitions,
        baseline_ae2_dev_medians=base_dev,
        constrained_ae2_dev_medians=cons_dev,
        baseline_angle_medians=base_ang,
        constrained_angle_medians=cons_ang,
        ae2_wins=int(np.sum(cons_dev < base_dev)),
        angle_wins=int(np.sum(cons_ang < base_ang)),
        baseline_reports=tuple(base_reports),
        constrained_reports=tuple(cons_reports),
    )
