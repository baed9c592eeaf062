from fractions import Fraction

import numpy as np
import pytest

from tulp.certify import (distance_to_optimal, hoffman_alpha,
                          hoffman_inequality_check, project_onto_polyhedron,
                          restart_length_bound, schur_limit_check,
                          sharpness_alpha, sharpness_radius,
                          sherman_morrison_bound_check, solve_exact)
from tulp.errors import (GuardExceededError, InfeasibleProblemError,
                         SingularMatrixError, UnboundedProblemError)
from tulp.lp_model import PrimalDualPoint, StandardFormLP
from tulp.sparse import SparseMatrix
from tulp.tu import incidence_matrix


def test_solve_exact_lp1(lp1):
    face = solve_exact(lp1)
    assert face.value == 1
    assert face.x_vertex == (Fraction(1), Fraction(0))
    assert face.y_vertex == (Fraction(1),)


def test_solve_exact_errors():
    infeasible = StandardFormLP(SparseMatrix(1, 2, [(0, 0, 1), (0, 1, 1)]),
                                np.array([-1.0]), np.zeros(2))
    with pytest.raises(InfeasibleProblemError):
        solve_exact(infeasible)
    unbounded = StandardFormLP(SparseMatrix(1, 2, [(0, 0, 1), (0, 1, -1)]),
                               np.array([0.0]), np.array([-1.0, 0.0]))
    with pytest.raises(UnboundedProblemError):
        solve_exact(unbounded)
    big = StandardFormLP(SparseMatrix.eye(11), np.zeros(11), np.zeros(11))
    with pytest.raises(GuardExceededError):
        solve_exact(big)


def test_solve_exact_redundant_rows(triangle_lp):
    # keep the dependent conservation row: same optimum, zero-padded dual
    from tulp.tu import FlowInstanceSpec, gen_min_cost_flow
    spec = FlowInstanceSpec(3, ((0, 1), (1, 2), (0, 2)), supplies=(1, 0, -1),
                            costs=(1, 1, 1), drop_last_row=False)
    lp = gen_min_cost_flow(spec)
    face = solve_exact(lp)
    assert face.value == 1
    assert len(face.y_vertex) == 3


def test_distance_examples(lp1):
    face = solve_exact(lp1)
    assert distance_to_optimal(lp1, face, face.z_star()) == pytest.approx(0.0, abs=1e-9)
    assert distance_to_optimal(lp1, face, PrimalDualPoint([0, 0], [1])) == pytest.approx(1.0)
    assert distance_to_optimal(lp1, face, PrimalDualPoint([1, 0], [0])) == pytest.approx(1.0)


def test_distance_onto_dual_segment(triangle_lp):
    # Y* = {y1 = 1, 0 <= y2 <= 1}: projection clips onto the segment
    face = solve_exact(triangle_lp)
    z = PrimalDualPoint(face.x_star(), np.array([1.0, 2.0]))
    assert distance_to_optimal(triangle_lp, face, z) == pytest.approx(1.0)
    inside = PrimalDualPoint(face.x_star(), np.array([1.0, 0.5]))
    assert distance_to_optimal(triangle_lp, face, inside) == pytest.approx(0.0, abs=1e-9)


def test_project_onto_polyhedron_empty():
    with pytest.raises(InfeasibleProblemError):
        project_onto_polyhedron(np.zeros(1), np.array([[1.0]]), np.array([1.0]),
                                np.array([[1.0]]), np.array([0.0]))


def test_projection_matches_brute_force():
    rng = np.random.default_rng(15)
    for _ in range(20):
        # project onto {p >= 0, sum p = 1} (the simplex): compare to cvx-free
        # exhaustive active-set reference computed the same closed-form way
        n = int(rng.integers(2, 5))
        point = rng.standard_normal(n) * 2
        dist, proj = project_onto_polyhedron(
            point, np.ones((1, n)), np.array([1.0]), -np.eye(n), np.zeros(n))
        assert np.all(proj >= -1e-9)
        assert np.sum(proj) == pytest.approx(1.0)
        for other in rng.dirichlet(np.ones(n), size=50):
            assert np.linalg.norm(other - point) >= dist - 1e-9


def test_hoffman_alpha_examples():
    alpha, witness = hoffman_alpha(np.zeros((0, 1)), [], np.array([[1.0]]), [1.0], {0})
    assert alpha == pytest.approx(1.0)
    assert witness.inverse_norm == pytest.approx(1.0)
    alpha_eye, _ = hoffman_alpha(np.eye(2), np.zeros(2), np.zeros((0, 2)), [], set())
    assert alpha_eye == pytest.approx(1.0)


def test_hoffman_alpha_matches_independent_enumeration():
    import itertools
    rng = np.random.default_rng(16)
    ineq = rng.integers(-2, 3, (2, 4)).astype(float)
    eq = rng.integers(-2, 3, (1, 4)).astype(float)
    alpha, _ = hoffman_alpha(ineq, np.zeros(2), eq, np.zeros(1), set())
    stacked = np.vstack([ineq, eq])
    worst = 0.0
    for k in (1, 2, 3):
        for rows in itertools.combinations(range(3), k):
            for cols in itertools.combinations(range(4), k):
                sub = stacked[np.ix_(rows, cols)]
                sigma = np.linalg.svd(sub, compute_uv=False)[-1]
                if sigma > 1e-9:
                    worst = max(worst, 1.0 / sigma)
    assert alpha == pytest.approx(1.0 / worst, rel=1e-9)


def test_hoffman_alpha_invariance_under_row_ops():
    rng = np.random.default_rng(17)
    eq = rng.integers(-2, 3, (2, 3)).astype(float)
    base, _ = hoffman_alpha(np.zeros((0, 3)), [], eq, np.zeros(2), set())
    permuted, _ = hoffman_alpha(np.zeros((0, 3)), [], eq[::-1], np.zeros(2), set())
    negated, _ = hoffman_alpha(np.zeros((0, 3)), [], -eq, np.zeros(2), set())
    assert base == pytest.approx(permuted, rel=1e-12)
    assert base == pytest.approx(negated, rel=1e-12)


def test_hoffman_guard():
    with pytest.raises(GuardExceededError):
        hoffman_alpha(np.eye(9), np.zeros(9), np.zeros((0, 9)), [], set())


def test_hoffman_inequality_tightness_on_scalar_system():
    # P = {u >= 0 : u = 1}; at u = 3 distance and residual are both 2
    worst = hoffman_inequality_check(np.zeros((0, 1)), [], np.array([[1.0]]),
                                     [1.0], {0}, samples=100, seed=0)
    assert worst <= 1.0 + 1e-9
    assert worst == pytest.approx(1.0, rel=1e-6)


def test_hoffman_inequality_random_system():
    rng = np.random.default_rng(18)
    ineq = rng.integers(-2, 3, (2, 3)).astype(float)
    eq = rng.integers(-2, 3, (1, 3)).astype(float)
    u0 = np.abs(rng.standard_normal(3))
    d = ineq @ u0 + rng.random(2)  # strictly feasible for u0
    f = eq @ u0
    worst = hoffman_inequality_check(ineq, d, eq, f, {0, 1, 2}, samples=200, seed=5)
    assert worst <= 1.0 + 1e-9


def test_hoffman_inequality_empty_polytope():
    with pytest.raises(InfeasibleProblemError):
        hoffman_inequality_check(np.array([[1.0]]), [-1.0], np.zeros((0, 1)), [],
                                 {0}, samples=1)


def test_sharpness_radius_examples(lp1):
    assert sharpness_radius(lp1) == 16
    lp_m4 = StandardFormLP(SparseMatrix.eye(4), np.ones(4), np.ones(4))
    assert sharpness_radius(lp_m4) == 64
    lp_m1 = StandardFormLP(SparseMatrix.eye(1), np.ones(1), np.ones(1))
    assert sharpness_radius(lp_m1) == 8


def test_sharpness_alpha_lp1(lp1):
    report = sharpness_alpha(lp1)
    assert report.radius == 16
    assert report.alpha > 0
    assert report.alpha >= report.theoretical_alpha_lower
    assert report.alpha == pytest.approx(1.0 / report.witness.inverse_norm)
    # stacked matrix is 4x3: sum_k C(4,k) C(3,k) submatrices
    assert report.submatrices_checked == 34


def test_sharpness_alpha_degenerate_objective_row():
    # b = c = 0: the objective row vanishes, TU blocks determine alpha
    lp = StandardFormLP(SparseMatrix(1, 2, [(0, 0, 1), (0, 1, 1)]),
                        np.zeros(1), np.zeros(2))
    report = sharpness_alpha(lp, radius=1)
    assert report.alpha == pytest.approx(1.0)  # blocks of [1 1] have norm-1 inverses
    assert 0 not in report.witness.rows


def test_sharpness_alpha_guard():
    lp = StandardFormLP(SparseMatrix.eye(5), np.ones(5), np.ones(5))
    with pytest.raises(GuardExceededError):
        sharpness_alpha(lp)


def test_sherman_morrison_examples():
    measured, bound = sherman_morrison_bound_check(
        [Fraction(1), Fraction(0)], SparseMatrix(1, 2, [(0, 1, 1)]), 1)
    assert measured == pytest.approx(1.0)
    assert bound == pytest.approx(2 + 2**1.5 + 2)
    measured2, bound2 = sherman_morrison_bound_check(
        [Fraction(1, 2), Fraction(1, 2)], SparseMatrix(1, 2, [(0, 0, 1), (0, 1, -1)]), 2)
    assert measured2 <= bound2


def test_sherman_morrison_rejects_bad_inputs():
    with pytest.raises(ValueError):
        sherman_morrison_bound_check([Fraction(1, 3), Fraction(0)],
                                     SparseMatrix(1, 2, [(0, 1, 1)]), 2)
    with pytest.raises(SingularMatrixError):
        sherman_morrison_bound_check([Fraction(0), Fraction(1)],
                                     SparseMatrix(1, 2, [(0, 1, 1)]), 1)


def test_sherman_morrison_sweep_on_incidence_submatrices():
    rng = np.random.default_rng(19)
    from tulp.tu import random_flow_spec, sample_tu_submatrix
    matrix = incidence_matrix(5, random_flow_spec(5, 9, seed=8).arcs)
    done = 0
    while done < 25:
        n = int(rng.integers(1, 4))
        sub = sample_tu_submatrix(matrix, n, rng, square=False, extra_cols=1)
        if sub is None:
            continue
        denom = int(rng.integers(1, 17))
        v = [Fraction(int(k), denom) for k in rng.integers(-2 * denom, 2 * denom + 1, n + 1)]
        try:
            measured, bound = sherman_morrison_bound_check(v, sub, denom)
        except SingularMatrixError:
            continue
        assert measured <= bound * (1 + 1e-9)
        done += 1


def test_schur_examples():
    res = schur_limit_check(np.eye(2), np.zeros((2, 2)), np.eye(2))
    for lam, dev in zip(res.lambdas, res.deviations):
        assert dev == pytest.approx(1.0 / lam, rel=1e-9)
    res2 = schur_limit_check([[1, 0], [1, 1]], [[1], [0]], [[2]])
    slope = np.polyfit(np.log10(res2.lambdas), np.log10(res2.deviations), 1)[0]
    assert slope == pytest.approx(-1.0, abs=1e-6)


def test_schur_singular_blocks_rejected():
    with pytest.raises(SingularMatrixError):
        schur_limit_check(np.zeros((1, 1)), np.zeros((1, 1)), np.eye(1))


def test_restart_length_bound_examples():
    assert restart_length_bound(1.0, 0.5, 1.0, 0.5) == 448
    base = restart_length_bound(1.0, 0.5, 1.0, 0.5)
    near_one = restart_length_bound(1.0, 0.5, 1.0, 0.999999)
    assert base / 2 <= near_one <= base / 2 + 1  # halves, up to the ceiling
    halved_alpha = restart_length_bound(2.0, 0.5, 1.0, 0.5)
    assert base / 2 <= halved_alpha <= base / 2 + 1
    with pytest.raises(ValueError):
        restart_length_bound(0.0, 0.5, 1.0, 0.5)
    with pytest.raises(ValueError):
        restart_length_bound(1.0, 2.0, 1.0, 0.5)
