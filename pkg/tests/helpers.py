"""Independent oracles used by the tests.

These deliberately avoid the code paths they check: the ball maximum is
recomputed by enumerating pinned coordinate sets in closed form, the dense
Lagrangian by plain dense arithmetic, and LP values by brute force.
"""

import itertools
import math

import numpy as np

from tulp.lp_model import PrimalDualPoint, StandardFormLP
from tulp.sparse import SparseMatrix


def dense_lagrangian(lp: StandardFormLP, z: PrimalDualPoint) -> float:
    a = lp.A.to_dense()
    return float(lp.c @ z.x + lp.b @ z.y - z.y @ (a @ z.x))


def dense_kkt_norm(lp: StandardFormLP, z: PrimalDualPoint, radius: float) -> float:
    a = lp.A.to_dense()
    gap = max(float(lp.c @ z.x - lp.b @ z.y), 0.0) / radius
    primal = a @ z.x - lp.b
    dual = np.maximum(a.T @ z.y - lp.c, 0.0)
    return float(np.sqrt(gap**2 + primal @ primal + dual @ dual))


def ball_max_active_set(z: PrimalDualPoint, g_x, g_y, radius: float) -> float:
    """Exact max of g.(zhat - z) over |zhat - z| <= radius, xhat >= 0.

    For each set of x-coordinates pinned to zero the remaining budget goes
    along the free gradient direction; the best feasible candidate over
    all pin sets is the exact maximum.
    """
    x = z.x
    n = x.size
    gy_sq = float(np.asarray(g_y) @ np.asarray(g_y))
    best = 0.0
    for pinned in itertools.chain.from_iterable(
            itertools.combinations(range(n), k) for k in range(n + 1)):
        pinned = set(pinned)
        fixed_sq = sum(x[i] ** 2 for i in pinned)
        if fixed_sq > radius**2 + 1e-15:
            continue
        free = [i for i in range(n) if i not in pinned]
        gfree_sq = sum(g_x[i] ** 2 for i in free) + gy_sq
        base = sum(-g_x[i] * x[i] for i in pinned)
        if gfree_sq > 0:
            step = math.sqrt(max(radius**2 - fixed_sq, 0.0) / gfree_sq)
        else:
            step = 0.0
        if any(x[i] + step * g_x[i] < -1e-12 for i in free):
            continue
        best = max(best, base + step * gfree_sq)
    return best


def ball_max_sampling(z: PrimalDualPoint, g_x, g_y, radius: float,
                      directions: int = 100_000, seed: int = 0) -> float:
    """Lower bound on the ball maximum from random feasible candidates."""
    rng = np.random.default_rng(seed)
    dim = z.x.size + z.y.size
    d = rng.standard_normal((directions, dim))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    cand_x = np.maximum(z.x + radius * d[:, :z.x.size], 0.0)
    cand_y = z.y + radius * d[:, z.x.size:]
    values = (cand_x - z.x) @ np.asarray(g_x) + (cand_y - z.y) @ np.asarray(g_y)
    return float(np.max(values, initial=0.0))


def brute_force_lp_value(lp: StandardFormLP, grid: int = 4, span: float = 3.0):
    """Crude primal check: best feasible grid point value (desk instances)."""
    a = lp.A.to_dense()
    best = None
    for point in itertools.product(np.linspace(0, span, grid), repeat=lp.m2):
        x = np.array(point)
        if np.allclose(a @ x, lp.b, atol=1e-9):
            v = float(lp.c @ x)
            best = v if best is None else min(best, v)
    return best


def assignment_value_by_permutations(costs) -> int:
    costs = np.asarray(costs)
    n = costs.shape[0]
    return min(sum(costs[i, p[i]] for i in range(n))
               for p in itertools.permutations(range(n)))


def random_integer_lp(rng, m1: int, m2: int, max_abs: int = 3) -> StandardFormLP:
    """Random dense-ish integer instance (no feasibility guarantees)."""
    while True:
        dense = rng.integers(-max_abs, max_abs + 1, (m1, m2))
        if np.linalg.matrix_rank(dense) == m1:
            break
    b = rng.integers(-max_abs, max_abs + 1, m1)
    c = rng.integers(-max_abs, max_abs + 1, m2)
    return StandardFormLP(SparseMatrix.from_dense(dense), b.astype(float),
                          c.astype(float))


def random_cone_point(rng, lp: StandardFormLP, scale: float = 1.0) -> PrimalDualPoint:
    return PrimalDualPoint(np.abs(rng.standard_normal(lp.m2)) * scale,
                           rng.standard_normal(lp.m1) * scale)
