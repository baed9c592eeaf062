import numpy as np
import pytest
from helpers import ball_max_active_set, ball_max_sampling, random_cone_point

from tulp.gap import (GapGradient, gap_gradient, max_over_ball, normalized_gap,
                      normalized_gap_limit)
from tulp.lp_model import PrimalDualPoint, kkt_residual, lagrangian


def test_gradient_examples(lp1):
    g = gap_gradient(lp1, PrimalDualPoint([0, 0], [0]))
    np.testing.assert_array_equal(g.g_x, [-1.0, -2.0])
    np.testing.assert_array_equal(g.g_y, [1.0])
    g_star = gap_gradient(lp1, PrimalDualPoint([1, 0], [1]))
    np.testing.assert_array_equal(g_star.g_x, [0.0, -1.0])
    np.testing.assert_array_equal(g_star.g_y, [0.0])


def test_gap_objective_is_affine_with_zero_constant(triangle_lp):
    # L(x, yhat) - L(xhat, y) must equal g.(zhat - z) exactly
    rng = np.random.default_rng(5)
    z = random_cone_point(rng, triangle_lp, 2.0)
    g = gap_gradient(triangle_lp, z)
    for _ in range(20):
        zh = random_cone_point(rng, triangle_lp, 2.0)
        direct = (lagrangian(triangle_lp, PrimalDualPoint(z.x, zh.y))
                  - lagrangian(triangle_lp, PrimalDualPoint(zh.x, z.y)))
        linear = float(g.g_x @ (zh.x - z.x) + g.g_y @ (zh.y - z.y))
        assert direct == pytest.approx(linear, rel=1e-10, abs=1e-10)


def test_max_over_ball_examples():
    z = PrimalDualPoint([0, 0], [0])
    zh, val = max_over_ball(z, GapGradient(np.array([1.0, 0.0]), np.array([0.0])), 1.0)
    np.testing.assert_allclose(zh.x, [1, 0], atol=1e-12)
    assert val == pytest.approx(1.0)

    zh, val = max_over_ball(z, GapGradient(np.array([-1.0, 1.0]), np.array([0.0])), 1.0)
    np.testing.assert_allclose(zh.x, [0, 1], atol=1e-12)
    assert val == pytest.approx(1.0)

    zh, val = max_over_ball(z, GapGradient(np.zeros(2), np.zeros(1)), 1.0)
    assert val == 0.0
    np.testing.assert_array_equal(zh.x, z.x)


def test_max_over_ball_saturated_interior_maximum():
    # all mass clips before the ball boundary: the saturated point wins
    z = PrimalDualPoint([1.0, 0.0], [0.0])
    g = GapGradient(np.array([-1.0, 0.0]), np.array([0.0]))
    zh, val = max_over_ball(z, g, 5.0)
    np.testing.assert_allclose(zh.x, [0, 0], atol=1e-12)
    assert val == pytest.approx(1.0)


def test_max_over_ball_respects_radius_and_cone():
    rng = np.random.default_rng(6)
    for _ in range(50):
        n, m = rng.integers(1, 6, 2)
        z = PrimalDualPoint(np.abs(rng.standard_normal(n)) * rng.integers(0, 2, n),
                            rng.standard_normal(m))
        g = GapGradient(rng.standard_normal(n), rng.standard_normal(m))
        r = float(rng.random() * 3 + 1e-3)
        zh, val = max_over_ball(z, g, r)
        assert zh.distance(z) <= r + 1e-9
        assert np.all(zh.x >= 0)
        assert val >= -1e-15


def test_max_over_ball_matches_active_set_oracle():
    rng = np.random.default_rng(7)
    for _ in range(60):
        n = int(rng.integers(1, 5))
        m = int(rng.integers(1, 3))
        z = PrimalDualPoint(np.abs(rng.standard_normal(n)) * rng.integers(0, 2, n),
                            rng.standard_normal(m))
        gx = rng.standard_normal(n)
        gy = rng.standard_normal(m)
        r = float(rng.random() * 2 + 1e-2)
        _, val = max_over_ball(z, GapGradient(gx, gy), r)
        want = ball_max_active_set(z, gx, gy, r)
        assert val == pytest.approx(want, rel=1e-9, abs=1e-11)


def test_normalized_gap_zero_at_optimum(lp1):
    z_star = PrimalDualPoint([1, 0], [1])
    for r in (0.25, 0.5, 1.0, 4.0):
        assert normalized_gap(lp1, z_star, r) == 0.0
    assert normalized_gap_limit(lp1, z_star) == 0.0


def test_normalized_gap_matches_sampling_oracle(lp1):
    z = PrimalDualPoint([0, 0], [0])
    g = gap_gradient(lp1, z)
    got = normalized_gap(lp1, z, 1.0)
    lower = ball_max_sampling(z, g.g_x, g.g_y, 1.0, directions=20_000, seed=1)
    exact = ball_max_active_set(z, g.g_x, g.g_y, 1.0)
    assert got >= lower - 1e-9
    assert got == pytest.approx(exact, rel=1e-6)


def test_normalized_gap_nonincreasing_in_radius(triangle_lp):
    rng = np.random.default_rng(8)
    for _ in range(50):
        z = random_cone_point(rng, triangle_lp, 3.0)
        r = float(rng.random() * 2 + 1e-3)
        assert (normalized_gap(triangle_lp, z, 2 * r)
                <= normalized_gap(triangle_lp, z, r) + 1e-10)


def test_normalized_gap_rejects_bad_input(lp1):
    with pytest.raises(ValueError):
        normalized_gap(lp1, PrimalDualPoint([-0.1, 0], [0]), 1.0)
    with pytest.raises(ValueError):
        normalized_gap(lp1, PrimalDualPoint([0, 0], [0]), 0.0)


def test_limit_interior_point_is_gradient_norm(lp1):
    z = PrimalDualPoint([0.5, 0.5], [0.3])
    g = gap_gradient(lp1, z)
    want = float(np.sqrt(g.g_x @ g.g_x + g.g_y @ g.g_y))
    assert normalized_gap_limit(lp1, z) == pytest.approx(want)


def test_limit_agrees_with_small_radius(triangle_lp):
    rng = np.random.default_rng(9)
    for _ in range(20):
        z = random_cone_point(rng, triangle_lp, 2.0)
        small = normalized_gap(triangle_lp, z, 1e-6)
        limit = normalized_gap_limit(triangle_lp, z)
        assert small == pytest.approx(limit, rel=1e-4, abs=1e-4)


def test_gap_lower_bounds_kkt(triangle_lp):
    # half the KKT residual norm never exceeds the normalized gap
    rng = np.random.default_rng(10)
    radius = 23.0
    for _ in range(50):
        z = random_cone_point(rng, triangle_lp, 5.0)
        if z.norm() > radius:
            continue
        r = float(rng.random()) * radius or radius
        rho = normalized_gap(triangle_lp, z, r)
        assert 0.5 * kkt_residual(triangle_lp, z, radius).norm <= rho + 1e-9
