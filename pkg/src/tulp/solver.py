"""Restarted PDHG with adaptive restarts driven by the normalized gap.

One epoch runs plain PDHG steps while maintaining the running average of
the inner iterates.  Epoch 0 runs a fixed budget of tau0 steps; later
epochs restart as soon as the normalized gap at the running average has
contracted by the factor beta relative to the gap at the epoch start.
Each restart resets the iterate to the running average.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from tulp import kernels
from tulp.certify import sharpness_radius
from tulp.errors import ConfigError, DimensionError
from tulp.gap import GapGradient, normalized_gap, normalized_gap_limit
from tulp.lp_model import (PrimalDualPoint, StandardFormLP, kkt_from_gap_gradient,
                           spectral_norm_estimate)

REASON_OPTIMAL = "optimal"
REASON_KKT = "kkt_tolerance"
REASON_MAX_EPOCHS = "max_epochs"
REASON_MAX_ITERS = "max_total_iters"


class OpCounter:
    """Counts mat-vec products threaded through the solve."""

    __slots__ = ("total",)

    def __init__(self):
        self.total = 0

    def add(self, n: int):
        self.total += n


@dataclass
class SolverConfig:
    """Knobs for run_restarted.

    eta defaults to 1/(2 |A|) with |A| estimated by power iteration, and
    kkt_radius defaults to the sharpness radius of the instance.  The
    stride controls how often the restart test is evaluated (1 = every
    inner iteration, the faithful setting).
    """

    eta: float | None = None
    beta: float = math.exp(-1)
    tau0: int = 1
    max_epochs: int = 200
    max_total_iters: int = 100_000
    termination_kkt_tol: float = 1e-8
    gap_check_stride: int = 1
    kkt_radius: float | None = None
    seed: int = 0

    def validate(self):
        if self.eta is not None and self.eta <= 0:
            raise ConfigError("eta must be positive")
        if not 0.0 < self.beta < 1.0:
            raise ConfigError(f"beta = {self.beta} invalid: must satisfy β ∈ (0,1)")
        if self.tau0 < 1:
            raise ConfigError("tau0 must be at least 1")
        if self.max_epochs < 1 or self.max_total_iters < 1:
            raise ConfigError("iteration budgets must be at least 1")
        if self.termination_kkt_tol < 0:
            raise ConfigError("termination tolerance must be nonnegative")
        if self.gap_check_stride < 1:
            raise ConfigError("gap_check_stride must be at least 1")
        if self.kkt_radius is not None and self.kkt_radius <= 0:
            raise ConfigError("kkt_radius must be positive")


@dataclass
class EpochRecord:
    """Per-epoch log entry; optional fields stay None when no oracle or
    restart-length bound is attached."""

    epoch: int
    tau: int
    inner_iter_total: int
    rho_ref: float | None
    rho_at_restart: float | None
    z_start_norm: float
    kkt_norm: float
    dist_to_opt: float | None = None
    theta_ball_ok: bool | None = None
    tstar_bound_ok: bool | None = None
    tested_iters: list[int] = field(default_factory=list)


@dataclass
class ConvergenceLog:
    epochs: list[EpochRecord]
    total_iters: int
    total_matvecs: int
    gap_eval_matvecs: int
    gap_evals: int
    termination_reason: str
    final_point: PrimalDualPoint
    final_kkt_norm: float
    final_dist_to_opt: float | None
    eta: float
    beta: float
    tau0: int
    norm_a_estimate: float
    kkt_radius: float
    theta: float
    restart_bound: int | None

    def matvecs_reconcile(self) -> bool:
        """2 mat-vecs per inner iteration plus the logged gap-eval cost
        must account for every product."""
        return self.total_matvecs == 2 * self.total_iters + self.gap_eval_matvecs


def pdhg_step(lp: StandardFormLP, z: PrimalDualPoint, eta: float,
              counter: OpCounter | None = None) -> PrimalDualPoint:
    """One PDHG step: projected primal descent, extrapolated dual ascent.

    Exactly two mat-vecs (one transpose, one forward).
    """
    if z.x.shape != (lp.m2,) or z.y.shape != (lp.m1,):
        raise DimensionError("point dimensions do not match the problem")
    if not z.in_feasible_cone():
        raise ValueError("PDHG step requires x >= 0")
    cindptr, crows, cdata = lp.A._csc_arrays()
    x_new, y_new = kernels.pdhg_step(lp.A.indptr, lp.A.indices, lp.A.data,
                                     cindptr, crows, cdata,
                                     lp.b, lp.c, z.x, z.y, float(eta))
    if counter is not None:
        counter.add(2)
    return PrimalDualPoint(x_new, y_new)


def running_average(prev_avg: PrimalDualPoint, new_point: PrimalDualPoint,
                    t: int) -> PrimalDualPoint:
    """Average of t+1 iterates given the average of the first t."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    if t == 0:
        return new_point
    w = 1.0 / (t + 1)
    return PrimalDualPoint(prev_avg.x + w * (new_point.x - prev_avg.x),
                           prev_avg.y + w * (new_point.y - prev_avg.y))


def run_restarted(lp: StandardFormLP, z0: PrimalDualPoint, config: SolverConfig,
                  distance_oracle=None, restart_bound: int | None = None) -> ConvergenceLog:
    """Adaptive-restart outer loop around the PDHG step.

    Parameters
    ----------
    distance_oracle : callable or None
        Maps a PrimalDualPoint to its Euclidean distance from the optimal
        set; when given, per-epoch distances and the ball-containment flag
        are logged.
    restart_bound : int or None
        Upper bound on restart lengths (from certify.restart_length_bound);
        when given, each epoch logs whether its length respected it.

    Returns the full ConvergenceLog.  Termination reasons: "optimal"
    (degenerate zero reference gap), "kkt_tolerance", "max_epochs",
    "max_total_iters".
    """
    config.validate()
    if z0.x.shape != (lp.m2,) or z0.y.shape != (lp.m1,):
        raise DimensionError("z0 dimensions do not match the problem")
    if not z0.in_feasible_cone():
        raise ValueError("z0 must lie in the feasible cone (x >= 0)")

    est = spectral_norm_estimate(lp.A, seed=config.seed)
    norm_a = est.value
    eta = config.eta if config.eta is not None else (0.5 / norm_a if norm_a > 0 else 1.0)
    if eta * norm_a >= 1.0:
        raise ConfigError(f"eta = {eta} too large: eta * |A| must stay below 1")
    radius = config.kkt_radius if config.kkt_radius is not None else float(sharpness_radius(lp))
    theta = 2.0 * math.sqrt((1.0 + eta * norm_a) / (1.0 - eta * norm_a))

    counter = OpCounter()
    cindptr, crows, cdata = lp.A._csc_arrays()
    indptr, indices, data = lp.A.indptr, lp.A.indices, lp.A.data

    x = z0.x.copy()
    y = z0.y.copy()
    z00 = PrimalDualPoint(z0.x.copy(), z0.y.copy())
    prev_start: PrimalDualPoint | None = None

    epochs: list[EpochRecord] = []
    total_iters = 0
    gap_evals = 0
    gap_eval_matvecs = 0
    dist0 = None
    reason = None
    final_kkt = math.nan
    final_dist = None

    n = 0
    while True:
        z_start = PrimalDualPoint(x, y)
        grad = GapGradient(g_x=lp.A.rmatvec(y, counter) - lp.c,
                           g_y=lp.b - lp.A.matvec(x, counter))
        gap_eval_matvecs += 2
        kkt = kkt_from_gap_gradient(lp, z_start, grad, radius)

        dist_n = None
        theta_ok = None
        if distance_oracle is not None:
            dist_n = float(distance_oracle(z_start))
            if n == 0:
                dist0 = dist_n
            theta_ok = z_start.distance(z00) <= theta * dist0 + 1e-8

        rho_ref = None
        if n >= 1:
            ref_radius = z_start.distance(prev_start)
            if ref_radius == 0.0:
                rho_ref = normalized_gap_limit(lp, z_start, grad=grad)
            else:
                rho_ref = normalized_gap(lp, z_start, ref_radius, grad=grad)
            gap_evals += 1
            if ref_radius == 0.0 and rho_ref == 0.0:
                reason = REASON_OPTIMAL
            elif kkt.norm <= config.termination_kkt_tol:
                reason = REASON_KKT

        if reason is None and n >= config.max_epochs:
            reason = REASON_MAX_EPOCHS
        if reason is None and total_iters >= config.max_total_iters:
            reason = REASON_MAX_ITERS
        if reason is not None:
            final_kkt, final_dist = kkt.norm, dist_n
            break

        # inner loop: PDHG steps plus the running average
        t = 0
        avg_x = np.zeros_like(x)
        avg_y = np.zeros_like(y)
        tested: list[int] = []
        rho_cand = None
        while True:
            x, y = kernels.pdhg_step(indptr, indices, data, cindptr, crows, cdata,
                                     lp.b, lp.c, x, y, eta)
            counter.add(2)
            total_iters += 1
            t += 1
            w = 1.0 / t
            avg_x += w * (x - avg_x)
            avg_y += w * (y - avg_y)

            if n == 0:
                if t >= config.tau0:
                    break
            elif t % config.gap_check_stride == 0:
                z_avg = PrimalDualPoint(avg_x, avg_y)
                grad_avg = GapGradient(g_x=lp.A.rmatvec(avg_y, counter) - lp.c,
                                       g_y=lp.b - lp.A.matvec(avg_x, counter))
                gap_eval_matvecs += 2
                gap_evals += 1
                tested.append(t)
                cand_radius = z_avg.distance(z_start)
                if cand_radius == 0.0:
                    rho_cand = normalized_gap_limit(lp, z_avg, grad=grad_avg)
                else:
                    rho_cand = normalized_gap(lp, z_avg, cand_radius, grad=grad_avg)
                if rho_cand <= config.beta * rho_ref:
                    break
                rho_cand = None

            if total_iters >= config.max_total_iters:
                break

        epochs.append(EpochRecord(
            epoch=n, tau=t, inner_iter_total=total_iters,
            rho_ref=rho_ref, rho_at_restart=rho_cand,
            z_start_norm=z_start.norm(), kkt_norm=kkt.norm,
            dist_to_opt=dist_n, theta_ball_ok=theta_ok,
            tstar_bound_ok=(t <= restart_bound) if (restart_bound is not None and n >= 1) else None,
            tested_iters=tested))

        # restart from the running average; an exhausted iteration budget is
        # picked up by the next epoch-start evaluation
        x = avg_x.copy()
        y = avg_y.copy()
        prev_start = z_start
        n += 1

    return ConvergenceLog(
        epochs=epochs, total_iters=total_iters, total_matvecs=counter.total,
        gap_eval_matvecs=gap_eval_matvecs, gap_evals=gap_evals,
        termination_reason=reason, final_point=PrimalDualPoint(x, y),
        final_kkt_norm=final_kkt, final_dist_to_opt=final_dist,
        eta=eta, beta=config.beta, tau0=config.tau0,
        norm_a_estimate=norm_a, kkt_radius=radius, theta=theta,
        restart_bound=restart_bound)
