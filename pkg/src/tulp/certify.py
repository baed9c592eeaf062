"""Exact desk-scale certification machinery.

Everything here trades speed for trustworthiness: the LP oracle enumerates
bases in rational arithmetic, distances to optimal faces come from
active-set enumeration rather than an iterative QP, and nonsingularity
decisions inside the constant computations are exact.  All operations are
guarded to desk scale and raise GuardExceededError beyond it.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from tulp.errors import (CertificationError, GuardExceededError,
                         InfeasibleProblemError, SingularMatrixError,
                         UnboundedProblemError)
from tulp.exactlin import det_int, independent_rows, solve_square
from tulp.lp_model import PrimalDualPoint, StandardFormLP

SOLVE_GUARD_ROWS = 10
SOLVE_GUARD_COLS = 20
ENUM_GUARD = 8  # max rows/cols of a stacked matrix we fully enumerate


def sharpness_radius(lp: StandardFormLP) -> int:
    """ceil(8 * m1^1.5 * H), the ball radius on which sharpness is certified."""
    return math.ceil(8.0 * lp.m1**1.5 * lp.H)


def restart_length_bound(alpha: float, eta: float, norm_a: float, beta: float) -> int:
    """Explicit upper bound on adaptive restart lengths.

    With C = 2/(eta (1 - eta |A|)) and q = 4 (1 + eta |A|)/(1 - eta |A|)
    the bound is ceil(2 C (q + 2) / (alpha beta)).
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if not 0 < beta < 1:
        raise ValueError("beta must satisfy β ∈ (0,1)")
    if eta <= 0 or eta * norm_a >= 1:
        raise ValueError("need 0 < eta * |A| < 1")
    contraction = 1.0 - eta * norm_a
    big_c = 2.0 / (eta * contraction)
    q = 4.0 * (1.0 + eta * norm_a) / contraction
    return math.ceil(2.0 * big_c * (q + 2.0) / (alpha * beta))


# ---------------------------------------------------------------------------
# exact LP oracle
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class OptimalFace:
    """Optimal value and faces of a desk-scale LP, with a representative
    basic vertex pair certified in rational arithmetic.

    The primal face is {x : A x = b, x >= 0, c.x = value}; the dual face is
    {y : A.T y <= c, b.y = value}.
    """

    value: Fraction
    x_vertex: tuple[Fraction, ...]
    y_vertex: tuple[Fraction, ...]
    basis: tuple[int, ...]
    row_subset: tuple[int, ...]

    def x_star(self) -> np.ndarray:
        return np.array([float(v) for v in self.x_vertex])

    def y_star(self) -> np.ndarray:
        return np.array([float(v) for v in self.y_vertex])

    def z_star(self) -> PrimalDualPoint:
        return PrimalDualPoint(self.x_star(), self.y_star())

    def to_json(self) -> dict:
        return {
            "value": str(self.value),
            "value_float": float(self.value),
            "x_vertex": [str(v) for v in self.x_vertex],
            "y_vertex": [str(v) for v in self.y_vertex],
            "basis": list(self.basis),
            "row_subset": list(self.row_subset),
            "primal_face": "{x : Ax = b, x >= 0, c.x = value}",
            "dual_face": "{y : A.T y <= c, b.y = value}",
        }


def solve_exact(lp: StandardFormLP) -> OptimalFace:
    """Rational LP oracle by enumeration of basic solutions.

    Enumerates column subsets of a maximal independent row system, keeps
    primal-feasible basic solutions, and certifies optimality through a
    basis whose dual vertex is feasible (weak duality makes the pair
    optimal).  Raises InfeasibleProblemError / UnboundedProblemError when
    no such point or basis exists.
    """
    if lp.m1 > SOLVE_GUARD_ROWS or lp.m2 > SOLVE_GUARD_COLS:
        raise GuardExceededError(
            f"solve_exact guard: need m1 <= {SOLVE_GUARD_ROWS}, m2 <= {SOLVE_GUARD_COLS}")
    a = lp.A.fraction_dense()
    b = lp.fraction_b()
    c = lp.fraction_c()
    m2 = lp.m2

    rows = independent_rows(a)
    augmented = [a[i] + [b[i]] for i in range(lp.m1)]
    if len(independent_rows(augmented)) != len(rows):
        raise InfeasibleProblemError("infeasible: equality system is inconsistent")
    a_red = [a[i] for i in rows]
    b_red = [b[i] for i in rows]
    r = len(rows)

    best_value = None
    optimal = None  # (value, basis, x_basic, y_reduced)
    for basis in itertools.combinations(range(m2), r):
        square = [[a_red[i][j] for j in basis] for i in range(r)]
        try:
            x_basic = solve_square(square, b_red)
        except SingularMatrixError:
            continue
        if any(v < 0 for v in x_basic):
            continue
        value = sum((c[j] * x_basic[k] for k, j in enumerate(basis)), Fraction(0))
        if best_value is None or value < best_value:
            best_value = value
        if optimal is None:
            transposed = [[square[i][k] for i in range(r)] for k in range(r)]
            y_red = solve_square(transposed, [c[j] for j in basis])
            dual_ok = all(
                sum((a_red[i][j] * y_red[i] for i in range(r)), Fraction(0)) <= c[j]
                for j in range(m2))
            if dual_ok:
                optimal = (value, basis, x_basic, y_red)
    if best_value is None:
        raise InfeasibleProblemError("infeasible: no basic feasible solution")
    if optimal is None:
        raise UnboundedProblemError("unbounded: no dual-feasible basis exists")
    value, basis, x_basic, y_red = optimal
    assert value == best_value  # weak duality ties the certified basis to the minimum

    x_full = [Fraction(0)] * m2
    for k, j in enumerate(basis):
        x_full[j] = x_basic[k]
    y_full = [Fraction(0)] * lp.m1
    for k, i in enumerate(rows):
        y_full[i] = y_red[k]

    # rational verification of every face constraint
    for i in range(lp.m1):
        assert sum((a[i][j] * x_full[j] for j in range(m2)), Fraction(0)) == b[i]
    assert all(v >= 0 for v in x_full)
    assert sum((c[j] * x_full[j] for j in range(m2)), Fraction(0)) == value
    for j in range(m2):
        assert sum((a[i][j] * y_full[i] for i in range(lp.m1)), Fraction(0)) <= c[j]
    assert sum((b[i] * y_full[i] for i in range(lp.m1)), Fraction(0)) == value

    return OptimalFace(value=value, x_vertex=tuple(x_full), y_vertex=tuple(y_full),
                       basis=tuple(basis), row_subset=tuple(rows))


# ---------------------------------------------------------------------------
# projection onto polyhedra by active-set enumeration
# ---------------------------------------------------------------------------

def project_onto_polyhedron(point, eq_m, eq_rhs, ineq_m, ineq_rhs,
                            tol_scale: float | None = None):
    """Euclidean projection onto {p : eq_m p = eq_rhs, ineq_m p <= ineq_rhs}.

    Best-first search over active sets: each subset of tight inequalities
    defines an affine subspace, and the closest feasible subspace
    projection is the true polyhedron projection.  Returns (distance,
    point).  Raises InfeasibleProblemError when the set is empty.
    """
    point = np.asarray(point, dtype=np.float64)
    eq_m = np.asarray(eq_m, dtype=np.float64).reshape(-1, point.size)
    ineq_m = np.asarray(ineq_m, dtype=np.float64).reshape(-1, point.size)
    eq_rhs = np.asarray(eq_rhs, dtype=np.float64)
    ineq_rhs = np.asarray(ineq_rhs, dtype=np.float64)
    n_ineq = ineq_m.shape[0]
    if tol_scale is None:
        tol_scale = 1.0 + float(np.linalg.norm(point))
        for arr in (eq_rhs, ineq_rhs):
            if arr.size:
                tol_scale += float(np.max(np.abs(arr)))
    ctol = 1e-9 * tol_scale
    ftol = 1e-9 * tol_scale

    def solve_node(tight):
        m = np.vstack([eq_m, ineq_m[list(tight)]])
        q = np.concatenate([eq_rhs, ineq_rhs[list(tight)]])
        if m.shape[0] == 0:
            return 0.0, point
        resid = m @ point - q
        corr, *_ = np.linalg.lstsq(m, resid, rcond=None)
        p = point - corr
        if np.max(np.abs(m @ p - q), initial=0.0) > ctol:
            return None  # inconsistent: prune the branch
        return float(np.linalg.norm(corr)), p

    heap = []
    tie = itertools.count()
    root = solve_node(())
    if root is not None:
        heapq.heappush(heap, (root[0], next(tie), (), root[1]))
    while heap:
        dist, _, tight, p = heapq.heappop(heap)
        if np.all(ineq_m @ p <= ineq_rhs + ftol):
            return dist, p
        start = tight[-1] + 1 if tight else 0
        for i in range(start, n_ineq):
            node = solve_node(tight + (i,))
            if node is not None:
                heapq.heappush(heap, (node[0], next(tie), tight + (i,), node[1]))
    raise InfeasibleProblemError("polyhedron is empty")


def distance_to_optimal(lp: StandardFormLP, face: OptimalFace,
                        z: PrimalDualPoint) -> float:
    """Euclidean distance from z to the optimal product face."""
    a_dense = lp.A.to_dense()
    v_star = float(face.value)
    dx, _ = project_onto_polyhedron(
        z.x,
        eq_m=np.vstack([a_dense, lp.c.reshape(1, -1)]),
        eq_rhs=np.concatenate([lp.b, [v_star]]),
        ineq_m=-np.eye(lp.m2),
        ineq_rhs=np.zeros(lp.m2))
    dy, _ = project_onto_polyhedron(
        z.y,
        eq_m=lp.b.reshape(1, -1),
        eq_rhs=np.array([v_star]),
        ineq_m=a_dense.T,
        ineq_rhs=lp.c)
    return math.hypot(dx, dy)


def make_distance_oracle(lp: StandardFormLP, face: OptimalFace):
    """Closure computing distance_to_optimal with cached dense data."""
    a_dense = lp.A.to_dense()
    v_star = float(face.value)
    primal_eq = np.vstack([a_dense, lp.c.reshape(1, -1)])
    primal_rhs = np.concatenate([lp.b, [v_star]])
    neg_eye = -np.eye(lp.m2)
    zeros = np.zeros(lp.m2)
    dual_eq = lp.b.reshape(1, -1)
    dual_rhs = np.array([v_star])
    at_dense = a_dense.T

    def oracle(z: PrimalDualPoint) -> float:
        dx, _ = project_onto_polyhedron(z.x, primal_eq, primal_rhs, neg_eye, zeros)
        dy, _ = project_onto_polyhedron(z.y, dual_eq, dual_rhs, at_dense, lp.c)
        return math.hypot(dx, dy)

    return oracle


# ---------------------------------------------------------------------------
# Hoffman constants
# ---------------------------------------------------------------------------

class SubmatrixWitness(NamedTuple):
    rows: tuple[int, ...]
    cols: tuple[int, ...]
    inverse_norm: float


def _max_inverse_norm(int_mat, float_mat, on_nonsingular=None):
    """Max of |G^-1|_2 over square nonsingular submatrices.

    Nonsingularity is decided exactly on int_mat, a copy of float_mat
    scaled by a common positive integer (which cannot change whether any
    square submatrix is singular).  Returns (max_norm, witness, count).
    """
    n_rows = len(int_mat)
    n_cols = len(int_mat[0]) if n_rows else 0
    best = 0.0
    witness = None
    checked = 0
    for k in range(1, min(n_rows, n_cols) + 1):
        for rows in itertools.combinations(range(n_rows), k):
            int_rows = [int_mat[i] for i in rows]
            for cols in itertools.combinations(range(n_cols), k):
                checked += 1
                sub = [[row[j] for j in cols] for row in int_rows]
                if det_int(sub) == 0:
                    continue
                fsub = float_mat[np.ix_(rows, cols)]
                sigma_min = float(np.linalg.svd(fsub, compute_uv=False)[-1])
                inv_norm = 1.0 / sigma_min
                if on_nonsingular is not None:
                    on_nonsingular(rows, cols, inv_norm)
                if inv_norm > best:
                    best = inv_norm
                    witness = SubmatrixWitness(rows, cols, inv_norm)
    return best, witness, checked


def _to_int_matrix(mat):
    """Exact integer-scaled copy (rows x lcm of denominators)."""
    fracs = [[Fraction(v) for v in row] for row in mat]
    denom = math.lcm(*(v.denominator for row in fracs for v in row)) if fracs else 1
    return [[int(v * denom) for v in row] for row in fracs], denom


def hoffman_alpha(ineq_m, ineq_rhs, eq_m, eq_rhs, sign_set):
    """Hoffman constant of {u in U : ineq_m u <= ineq_rhs, eq_m u = eq_rhs}
    where U constrains the sign_set coordinates to be nonnegative.

    The constant is 1 / max |G^-1|_2 over all square nonsingular
    submatrices of the stacked [ineq_m; eq_m]; the right-hand sides and
    the sign set do not enter it.  Returns (alpha, witness).
    """
    n = None
    stacked = []
    for block in (ineq_m, eq_m):
        arr = np.asarray(block, dtype=np.float64)
        if arr.size == 0:
            continue
        if arr.ndim == 1:
            arr = arr.reshape(1, -1)
        if n is None:
            n = arr.shape[1]
        elif arr.shape[1] != n:
            raise ValueError("ineq_m and eq_m must have matching column counts")
        stacked.extend(arr.tolist())
    if not stacked:
        raise ValueError("no constraint rows: Hoffman constant undefined")
    if len(stacked) > ENUM_GUARD or len(stacked[0]) > ENUM_GUARD:
        raise GuardExceededError(
            f"hoffman_alpha guard: stacked matrix must be at most {ENUM_GUARD}x{ENUM_GUARD}")
    int_mat, _ = _to_int_matrix(stacked)
    float_mat = np.asarray(stacked, dtype=np.float64)
    best, witness, _ = _max_inverse_norm(int_mat, float_mat)
    if witness is None:
        raise SingularMatrixError("matrix has no nonsingular submatrix")
    return 1.0 / best, witness


def hoffman_inequality_check(ineq_m, ineq_rhs, eq_m, eq_rhs, sign_set,
                             samples: int = 200, seed: int = 0,
                             alpha: float | None = None) -> float:
    """Empirically verify alpha * dist(u, P) <= |((ineq residual)+, eq residual)|.

    Samples points of U, projects them onto P by active-set enumeration,
    and returns the worst ratio (asserted <= 1 + 1e-9).  P must be
    nonempty; emptiness raises InfeasibleProblemError.
    """
    ineq_m = np.asarray(ineq_m, dtype=np.float64)
    eq_m = np.asarray(eq_m, dtype=np.float64)
    ineq_rhs = np.asarray(ineq_rhs, dtype=np.float64).reshape(-1)
    eq_rhs = np.asarray(eq_rhs, dtype=np.float64).reshape(-1)
    n = ineq_m.shape[1] if ineq_m.size else eq_m.shape[1]
    ineq_m = ineq_m.reshape(-1, n)
    eq_m = eq_m.reshape(-1, n)
    if alpha is None:
        alpha, _ = hoffman_alpha(ineq_m, ineq_rhs, eq_m, eq_rhs, sign_set)
    sign_rows = -np.eye(n)[sorted(sign_set)] if sign_set else np.zeros((0, n))
    all_ineq = np.vstack([ineq_m, sign_rows])
    all_rhs = np.concatenate([ineq_rhs, np.zeros(sign_rows.shape[0])])

    # nonemptiness certificate: the projection of the origin exists
    project_onto_polyhedron(np.zeros(n), eq_m, eq_rhs, all_ineq, all_rhs)

    rng = np.random.default_rng(seed)
    scale = 1.0 + float(np.max(np.abs(ineq_rhs), initial=0.0)) \
        + float(np.max(np.abs(eq_rhs), initial=0.0))
    worst = 0.0
    for _ in range(samples):
        u = rng.standard_normal(n) * scale
        for i in sign_set:
            u[i] = abs(u[i])
        dist, _ = project_onto_polyhedron(u, eq_m, eq_rhs, all_ineq, all_rhs)
        if dist <= 1e-12 * scale:
            continue
        residual = math.hypot(
            float(np.linalg.norm(np.maximum(ineq_m @ u - ineq_rhs, 0.0))),
            float(np.linalg.norm(eq_m @ u - eq_rhs)))
        ratio = math.inf if residual == 0.0 else alpha * dist / residual
        worst = max(worst, ratio)
    if worst > 1.0 + 1e-9:
        raise CertificationError(f"Hoffman inequality violated: worst ratio {worst}")
    return worst


# ---------------------------------------------------------------------------
# sharpness constant of the saddle problem
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class SharpnessReport:
    """Measured sharpness data for one instance.

    alpha is 1 / max |G^-1|_2 over nonsingular submatrices of the stacked
    optimality system; theoretical_alpha_lower is the fully explicit
    chain bound evaluated with the worst-case row count 2 m1 and the
    coefficient-norm bound, so measured alpha must dominate it.
    """

    radius: int
    alpha: float
    witness: SubmatrixWitness
    theoretical_alpha_lower: float
    submatrices_checked: int

    def to_json(self) -> dict:
        return {
            "radius": int(self.radius),
            "alpha": float(self.alpha),
            "witness_rows": list(self.witness.rows),
            "witness_cols": list(self.witness.cols),
            "witness_inverse_norm": float(self.witness.inverse_norm),
            "theoretical_alpha_lower": float(self.theoretical_alpha_lower),
            "submatrices_checked": int(self.submatrices_checked),
        }


def optimality_stack(lp: StandardFormLP, radius: int):
    """The (1 + m1 + m2) x (m2 + m1) stacked system whose Hoffman constant
    is the sharpness constant: scaled duality-gap row, primal rows [A 0],
    dual rows [0 A.T]."""
    if not lp.is_integer:
        raise ValueError("optimality stack requires exact-integer instance data")
    m1, m2 = lp.m1, lp.m2
    stack = [[Fraction(0)] * (m2 + m1) for _ in range(1 + m1 + m2)]
    for j in range(m2):
        stack[0][j] = Fraction(int(round(lp.c[j])), radius)
    for i in range(m1):
        stack[0][m2 + i] = Fraction(-int(round(lp.b[i])), radius)
    for r, c, v in lp.A.triplets():
        stack[1 + r][c] = Fraction(v)
        stack[1 + m1 + c][m2 + r] = Fraction(v)
    return stack


def sharpness_alpha(lp: StandardFormLP, radius: int | None = None) -> SharpnessReport:
    """Enumerate the optimality stack for the sharpness constant.

    Every nonsingular submatrix containing the scaled objective row is
    also checked against the explicit rank-one-update inverse bound
    (diameter M = radius); a violation raises CertificationError.
    """
    if not lp.is_integer:
        raise ValueError("sharpness_alpha requires exact-integer instance data")
    if lp.m1 + lp.m2 > ENUM_GUARD:
        raise GuardExceededError(
            f"sharpness_alpha guard: m1 + m2 must be at most {ENUM_GUARD}")
    if radius is None:
        radius = sharpness_radius(lp)
    if radius <= 0:
        raise ValueError("radius must be positive (is H zero?)")
    stack = optimality_stack(lp, radius)
    int_mat, _ = _to_int_matrix(stack)
    float_mat = np.array([[float(v) for v in row] for row in stack])
    obj_row = float_mat[0]

    def check_rank_one_bound(rows, cols, inv_norm):
        if rows[0] != 0:
            return
        k = len(rows)
        v_norm = float(np.linalg.norm(obj_row[list(cols)]))
        bound = k + radius * (k**1.5 * v_norm + k)
        if inv_norm > bound * (1.0 + 1e-9):
            raise CertificationError(
                f"rank-one inverse bound violated: {inv_norm} > {bound} "
                f"at rows {rows} cols {cols}")

    best, witness, checked = _max_inverse_norm(int_mat, float_mat,
                                               on_nonsingular=check_rank_one_bound)
    if witness is None:
        raise SingularMatrixError("optimality stack has no nonsingular submatrix")
    k = 2 * lp.m1 + 1
    v_bound = 2.0 * lp.H * math.sqrt(lp.m1) / radius
    chain = k + radius * (k**1.5 * v_bound + k)
    return SharpnessReport(radius=int(radius), alpha=1.0 / best, witness=witness,
                           theoretical_alpha_lower=1.0 / chain,
                           submatrices_checked=checked)


# ---------------------------------------------------------------------------
# rank-one update and Schur limit checks
# ---------------------------------------------------------------------------

def sherman_morrison_bound_check(v, tu_matrix, denom: int):
    """Check |[v; V]^-1|_2 against n+1 + M ((n+1)^1.5 |v|_2 + n+1).

    v must have entries k_i / denom with integer k_i, and V must be a
    certified totally unimodular matrix with one fewer row than columns.
    Returns (measured, bound); a violation raises CertificationError.
    """
    from tulp.tu import is_totally_unimodular  # local import avoids a cycle

    if denom < 1 or int(denom) != denom:
        raise ValueError("denom must be a positive integer")
    v_frac = [Fraction(x) for x in v]
    for x in v_frac:
        if (x * denom).denominator != 1:
            raise ValueError(f"entry {x} is not an integer multiple of 1/{denom}")
    rows_v = tu_matrix.exact_dense()
    n = len(rows_v)
    if len(v_frac) != n + 1 or any(len(r) != n + 1 for r in rows_v):
        raise ValueError("stack [v; V] must be square: V needs shape n x (n+1)")
    cert = is_totally_unimodular(tu_matrix)
    if not cert.verdict:
        raise ValueError("V is not totally unimodular")
    int_stack = [[int(x * denom) for x in v_frac]] + rows_v
    if det_int(int_stack) == 0:
        raise SingularMatrixError("stack [v; V] is singular")
    float_stack = np.array([[float(x) for x in v_frac]] + rows_v, dtype=np.float64)
    measured = 1.0 / float(np.linalg.svd(float_stack, compute_uv=False)[-1])
    v_norm = float(np.linalg.norm([float(x) for x in v_frac]))
    bound = (n + 1) + denom * ((n + 1) ** 1.5 * v_norm + (n + 1))
    if measured > bound * (1.0 + 1e-9):
        raise CertificationError(f"inverse norm {measured} exceeds bound {bound}")
    return measured, bound


class SchurCheckResult(NamedTuple):
    max_deviation: float
    lambdas: tuple[float, ...]
    deviations: tuple[float, ...]


def schur_limit_check(m11, m12, m22, lambdas=None) -> SchurCheckResult:
    """Deviation of [[M11, M12], [0, lam M22]]^-1 from blockdiag(M11^-1, 0).

    The deviation must decay like 1/lam: consecutive deviations are ratio
    tested against the lambda spacing (window [half, double] the expected
    ratio, i.e. [0.05, 0.2] for decades).
    """
    m11 = np.asarray(m11, dtype=np.float64)
    m12 = np.asarray(m12, dtype=np.float64)
    m22 = np.asarray(m22, dtype=np.float64)
    if lambdas is None:
        lambdas = tuple(10.0**k for k in range(1, 7))
    k, p = m11.shape[0], m22.shape[0]
    if m11.shape != (k, k) or m22.shape != (p, p) or m12.shape != (k, p):
        raise ValueError("block shapes are inconsistent")
    try:
        inv11 = np.linalg.inv(m11)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError("M11 is singular") from exc
    reference = np.zeros((k + p, k + p))
    reference[:k, :k] = inv11
    deviations = []
    for lam in lambdas:
        full = np.zeros((k + p, k + p))
        full[:k, :k] = m11
        full[:k, k:] = m12
        full[k:, k:] = lam * m22
        try:
            inv_full = np.linalg.inv(full)
        except np.linalg.LinAlgError as exc:
            raise SingularMatrixError(f"M_lambda singular at lambda={lam}") from exc
        deviations.append(float(np.linalg.norm(inv_full - reference, 2)))
    for i in range(len(lambdas) - 1):
        expected = lambdas[i] / lambdas[i + 1]
        ratio = deviations[i + 1] / deviations[i]
        if not 0.5 * expected <= ratio <= 2.0 * expected:
            raise CertificationError(
                f"deviation ratio {ratio} outside window at lambda={lambdas[i + 1]}")
    return SchurCheckResult(max(deviations), tuple(float(x) for x in lambdas),
                            tuple(deviations))
