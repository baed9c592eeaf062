"""Normalized duality gap of the saddle problem.

For a radius r the gap at z is the best Lagrangian improvement available
inside the radius-r ball around z (intersected with x >= 0), divided by r.
Because L is bilinear the inner objective is the linear map
g.(zhat - z) with g_x = A.T y - c and g_y = b - A x, so the maximizer lies
on a one-parameter clipped ray and the radius equation is solved by
bracketing and bisection.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from tulp import kernels
from tulp.lp_model import PrimalDualPoint, StandardFormLP, _check_point

# relative flush threshold for near-zero gap values (beta comparisons of
# two noise-level floats are meaningless otherwise)
FLUSH_REL = 1e-14
_BISECT_TOL = 1e-12
_MAX_BISECT = 100


@dataclass(frozen=True, eq=False)
class GapGradient:
    """Gradient of zhat -> L(x, yhat) - L(xhat, y): the map is affine in
    zhat with zero constant term."""

    g_x: np.ndarray
    g_y: np.ndarray


def gap_gradient(lp: StandardFormLP, z: PrimalDualPoint, counter=None) -> GapGradient:
    """(A.T y - c, b - A x); exactly two mat-vecs."""
    _check_point(lp, z)
    return GapGradient(g_x=lp.A.rmatvec(z.y, counter) - lp.c,
                       g_y=lp.b - lp.A.matvec(z.x, counter))


def tangent_projected_gradient(z: PrimalDualPoint, grad: GapGradient) -> np.ndarray:
    """g_x with ascent directions blocked by x >= 0 zeroed out."""
    gx = grad.g_x.copy()
    gx[(z.x <= 0.0) & (gx < 0.0)] = 0.0
    return gx


def max_over_ball(z: PrimalDualPoint, grad: GapGradient,
                  radius: float) -> tuple[PrimalDualPoint, float]:
    """Maximize g.(zhat - z) over zhat with xhat >= 0, |zhat - z| <= radius.

    The maximizer has the form xhat = max(x + lam g_x, 0), yhat = y + lam g_y
    for some lam >= 0.  The ray radius is continuous and nondecreasing in
    lam, so lam is found by doubling and bisection; when every movable
    coordinate clips before the radius is reached (possible only if g_y = 0
    and g_x <= 0) the saturated point is returned instead.
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    x, gx = z.x, grad.g_x
    gy_sq = float(grad.g_y @ grad.g_y)
    ghat = tangent_projected_gradient(z, grad)
    ghat_sq = float(ghat @ ghat) + gy_sq
    if ghat_sq == 0.0:
        return z, 0.0

    def scan(lam):
        return kernels.ray_scan(x, gx, gy_sq, lam)

    def build(lam):
        xh = np.maximum(x + lam * gx, 0.0)
        yh = z.y + lam * grad.g_y
        return PrimalDualPoint(xh, yh)

    # coordinates that never clip grow forever; if none exist the ray
    # saturates at the last clip point
    free_sq = float(gx[gx > 0.0] @ gx[gx > 0.0]) + gy_sq
    if free_sq == 0.0:
        movers = (gx < 0.0) & (x > 0.0)
        lam_sat = float(np.max(x[movers] / -gx[movers]))
        rsq_sat, val_sat = scan(lam_sat)
        if np.sqrt(rsq_sat) <= radius:
            return build(lam_sat), val_sat

    # lam0 under-shoots or hits the radius exactly (clipping only shrinks it)
    lam0 = radius / np.sqrt(ghat_sq)
    rsq0, val0 = scan(lam0)
    if abs(np.sqrt(rsq0) - radius) <= _BISECT_TOL * radius:
        return build(lam0), val0

    lo = lam0
    hi = 2.0 * lam0
    for _ in range(200):
        if np.sqrt(scan(hi)[0]) >= radius:
            break
        lo = hi
        hi *= 2.0
    else:
        # analytic bracket: unclipped components alone reach the radius here
        hi = lam_sat if free_sq == 0.0 else radius / np.sqrt(free_sq)
    for _ in range(_MAX_BISECT):
        if hi - lo <= _BISECT_TOL * hi:
            break
        mid = 0.5 * (lo + hi)
        if np.sqrt(scan(mid)[0]) < radius:
            lo = mid
        else:
            hi = mid
    # lo keeps the iterate strictly inside the ball
    _, val = scan(lo)
    return build(lo), val


def _flush(value: float, lag_abs: float) -> float:
    return 0.0 if value < FLUSH_REL * (1.0 + lag_abs) else value


def normalized_gap(lp: StandardFormLP, z: PrimalDualPoint, radius: float,
                   grad: GapGradient | None = None, counter=None) -> float:
    """rho_r(z): ball-restricted maximum gap divided by the radius."""
    _check_point(lp, z)
    if not z.in_feasible_cone():
        raise ValueError("point is outside the feasible cone (x >= 0)")
    if radius <= 0:
        raise ValueError("radius must be positive")
    if grad is None:
        grad = gap_gradient(lp, z, counter)
    _, value = max_over_ball(z, grad, radius)
    lag = float(lp.c @ z.x + z.y @ grad.g_y)  # L(z), no extra mat-vec
    return _flush(max(value, 0.0) / radius, abs(lag))


def normalized_gap_limit(lp: StandardFormLP, z: PrimalDualPoint,
                         grad: GapGradient | None = None, counter=None) -> float:
    """rho_0(z): the radius -> 0 limit, i.e. the norm of the gradient
    projected on the feasible cone's tangent at z."""
    _check_point(lp, z)
    if not z.in_feasible_cone():
        raise ValueError("point is outside the feasible cone (x >= 0)")
    if grad is None:
        grad = gap_gradient(lp, z, counter)
    ghat = tangent_projected_gradient(z, grad)
    value = float(np.sqrt(ghat @ ghat + grad.g_y @ grad.g_y))
    lag = float(lp.c @ z.x + z.y @ grad.g_y)
    return _flush(value, abs(lag))
