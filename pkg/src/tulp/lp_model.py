"""Standard-form LP representation and first-order primitives.

The problem is  min c.x  s.t.  A x = b, x >= 0  with dual
max b.y  s.t.  A.T y <= c.  Both are folded into the bilinear saddle
function  L(x, y) = c.x + b.y - y.(A x)  minimized over x >= 0 and
maximized over y.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from tulp.errors import DimensionError
from tulp.sparse import SparseMatrix


@dataclass(frozen=True, eq=False)
class StandardFormLP:
    """Equality-form LP data (A, b, c) with the coefficient bound H.

    H is the largest magnitude among right-hand side and objective
    entries; the model assumes at least as many columns as rows.
    """

    A: SparseMatrix
    b: np.ndarray
    c: np.ndarray
    H: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "b", np.asarray(self.b, dtype=np.float64))
        object.__setattr__(self, "c", np.asarray(self.c, dtype=np.float64))
        if self.b.shape != (self.A.n_rows,) or self.c.shape != (self.A.n_cols,):
            raise DimensionError("b/c lengths must match the matrix shape")
        if self.A.n_cols < self.A.n_rows:
            raise DimensionError(
                f"need at least as many columns as rows, got {self.A.n_rows}x{self.A.n_cols}")
        h = 0.0
        if self.b.size:
            h = max(h, float(np.max(np.abs(self.b))))
        if self.c.size:
            h = max(h, float(np.max(np.abs(self.c))))
        object.__setattr__(self, "H", h)

    @property
    def m1(self) -> int:
        return self.A.n_rows

    @property
    def m2(self) -> int:
        return self.A.n_cols

    @property
    def is_integer(self) -> bool:
        """True when A, b and c are all exactly integral."""
        return (self.A.is_integer
                and bool(np.all(self.b == np.round(self.b)))
                and bool(np.all(self.c == np.round(self.c))))

    def fraction_b(self) -> list[Fraction]:
        return [Fraction(float(v)) for v in self.b]

    def fraction_c(self) -> list[Fraction]:
        return [Fraction(float(v)) for v in self.c]


@dataclass(frozen=True, eq=False)
class PrimalDualPoint:
    """A point z = (x, y); membership in Z additionally needs x >= 0."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=np.float64))
        object.__setattr__(self, "y", np.asarray(self.y, dtype=np.float64))

    @classmethod
    def zeros(cls, lp: StandardFormLP) -> "PrimalDualPoint":
        return cls(np.zeros(lp.m2), np.zeros(lp.m1))

    def in_feasible_cone(self) -> bool:
        """x >= 0 componentwise (the set Z)."""
        return bool(np.all(self.x >= 0.0))

    def norm(self) -> float:
        return float(np.sqrt(self.x @ self.x + self.y @ self.y))

    def distance(self, other: "PrimalDualPoint") -> float:
        dx = self.x - other.x
        dy = self.y - other.y
        return float(np.sqrt(dx @ dx + dy @ dy))


@dataclass(frozen=True, eq=False)
class KktResidual:
    """Stacked optimality residual: scaled positive duality gap, primal
    infeasibility A x - b, and clipped dual infeasibility (A.T y - c)+."""

    scaled_gap: float
    primal_infeas: np.ndarray
    dual_infeas: np.ndarray
    norm: float


def _check_point(lp: StandardFormLP, z: PrimalDualPoint):
    if z.x.shape != (lp.m2,) or z.y.shape != (lp.m1,):
        raise DimensionError("point dimensions do not match the problem")


def lagrangian(lp: StandardFormLP, z: PrimalDualPoint, counter=None) -> float:
    """L(x, y) = c.x + y.(b - A x); one mat-vec and two dot products."""
    _check_point(lp, z)
    residual = lp.b - lp.A.matvec(z.x, counter)
    return float(lp.c @ z.x + z.y @ residual)


def kkt_residual(lp: StandardFormLP, z: PrimalDualPoint, radius: float,
                 counter=None) -> KktResidual:
    """Optimality residual with the duality gap scaled by 1/radius."""
    _check_point(lp, z)
    if radius <= 0:
        raise ValueError("radius must be positive")
    primal = lp.A.matvec(z.x, counter) - lp.b
    dual = np.maximum(lp.A.rmatvec(z.y, counter) - lp.c, 0.0)
    gap = max(float(lp.c @ z.x - lp.b @ z.y), 0.0) / radius
    norm = float(np.sqrt(gap * gap + primal @ primal + dual @ dual))
    return KktResidual(scaled_gap=gap, primal_infeas=primal, dual_infeas=dual, norm=norm)


def kkt_from_gap_gradient(lp, z, grad, radius: float) -> KktResidual:
    """KktResidual assembled from an already-computed gap gradient
    (g_x = A.T y - c, g_y = b - A x); costs no extra mat-vecs."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    primal = -grad.g_y
    dual = np.maximum(grad.g_x, 0.0)
    gap = max(float(lp.c @ z.x - lp.b @ z.y), 0.0) / radius
    norm = float(np.sqrt(gap * gap + primal @ primal + dual @ dual))
    return KktResidual(scaled_gap=gap, primal_infeas=primal, dual_infeas=dual, norm=norm)


class SpectralNormEstimate(NamedTuple):
    value: float
    is_zero: bool
    iterations: int


def spectral_norm_estimate(A: SparseMatrix, rel_tol: float = 1e-8,
                           max_iters: int | None = None,
                           seed: int = 0) -> SpectralNormEstimate:
    """Power iteration on v -> A.T (A v).

    The returned value is a Rayleigh-quotient estimate, hence never above
    the true spectral norm.  Deterministic for a fixed seed; a zero matrix
    yields value 0 with is_zero set.
    """
    if A.nnz == 0 or not np.any(A.data):
        return SpectralNormEstimate(0.0, True, 0)
    if max_iters is None:
        max_iters = 10 * (A.n_rows + A.n_cols)
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(A.n_cols)
    v /= np.linalg.norm(v)
    sigma = 0.0
    its = 0
    for its in range(1, max_iters + 1):
        w = A.matvec(v)
        new_sigma = float(np.linalg.norm(w))
        if new_sigma == 0.0:
            # v landed in the null space; restart from a fresh direction
            v = rng.standard_normal(A.n_cols)
            v /= np.linalg.norm(v)
            continue
        # per-step change times the geometric tail overshoots the remaining
        # error, so stop well below the requested accuracy
        done = abs(new_sigma - sigma) <= 0.125 * rel_tol * new_sigma
        sigma = new_sigma
        if done:
            break
        v = A.rmatvec(w)
        v /= np.linalg.norm(v)
    return SpectralNormEstimate(sigma, False, its)


def weighted_norm(lp: StandardFormLP, z: PrimalDualPoint, eta: float,
                  norm_a: float | None = None) -> float:
    """sqrt(|x|^2 - 2 eta x.(A.T y) + |y|^2).

    The quadratic form is positive definite only for eta |A| < 1, so the
    call refuses step sizes at or beyond that threshold.
    """
    _check_point(lp, z)
    if norm_a is None:
        norm_a = spectral_norm_estimate(lp.A).value
    if eta < 0 or eta * norm_a >= 1.0:
        raise ValueError("weighted norm requires 0 <= eta * |A| < 1")
    cross = float(z.x @ lp.A.rmatvec(z.y))
    form = float(z.x @ z.x) - 2.0 * eta * cross + float(z.y @ z.y)
    if form < -1e-12 * (1.0 + z.norm() ** 2):
        raise ValueError("weighted form is negative; eta too large for this matrix")
    return float(np.sqrt(max(form, 0.0)))
