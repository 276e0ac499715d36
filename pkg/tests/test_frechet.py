import math

import numpy as np
import pytest

from geosubdiv.errors import (
    ContractViolation,
    LeftCertifiedBall,
    NoConvergence,
    PointsOutsideBall,
)
from geosubdiv.frechet import (
    Method,
    SolverSettings,
    check_well_defined,
    geodesic_average,
    karcher_mean,
    karcher_mean_batch,
    max_input_radius,
    radius_interval,
    well_defined_for_radius,
)
from geosubdiv.sphere_core import WeightedConfiguration, exp_map, geodesic_distance, objective_gradient
from geosubdiv.validation import grid_search_mean, random_configuration

NORTH = np.array([0.0, 0.0, 1.0])


def test_single_point_mean_is_the_point():
    cfg = WeightedConfiguration(np.array([NORTH]), np.array([1.0]))
    assert np.array_equal(karcher_mean(cfg), NORTH)


def test_two_point_mean_is_geodesic_interpolant():
    a = exp_map(NORTH, [0.3, 0, 0])
    b = exp_map(NORTH, [0, -0.2, 0])
    cfg = WeightedConfiguration(np.array([a, b]), np.array([0.7, 0.3]))
    m = karcher_mean(cfg)
    assert np.allclose(m, geodesic_average(a, b, 0.3), atol=1e-12)
    assert math.isclose(geodesic_distance(a, m), 0.3 * geodesic_distance(a, b), rel_tol=1e-10)


def test_symmetric_configuration_mean_is_centre():
    pts = np.array([exp_map(NORTH, 0.4 * np.array([math.cos(t), math.sin(t), 0])) for t in 2 * math.pi / 3 * np.arange(3)])
    cfg = WeightedConfiguration(pts, np.full(3, 1 / 3))
    assert np.allclose(karcher_mean(cfg), NORTH, atol=1e-12)


@pytest.mark.parametrize("negative", [False, True])
def test_fixed_point_and_newton_agree(rng, negative):
    for _ in range(10):
        cfg = random_configuration(rng, 4, 0.3, negative=negative)
        a = karcher_mean(cfg, SolverSettings(method=Method.FIXED_POINT))
        b = karcher_mean(cfg, SolverSettings(method=Method.NEWTON))
        assert np.allclose(a, b, atol=1e-10)
        assert np.linalg.norm(objective_gradient(cfg, a)) <= 1e-12


def test_mean_matches_grid_oracle(rng):
    cfg = random_configuration(rng, 3, 0.4)
    m = karcher_mean(cfg)
    g = grid_search_mean(cfg.points, cfg.weights)
    assert geodesic_distance(m, g) < 2e-6


def test_batch_matches_single(rng):
    cfgs = [random_configuration(rng, 4, 0.3) for _ in range(5)]
    w = np.array([0.1, 0.2, 0.3, 0.4])
    pts = np.stack([c.points for c in cfgs])
    batch = karcher_mean_batch(pts, w)
    for p, m in zip(pts, batch):
        assert np.allclose(m, karcher_mean(WeightedConfiguration(p, w)), atol=1e-11)


def test_iteration_cap_raises():
    a = exp_map(NORTH, [0.5, 0, 0])
    b = exp_map(NORTH, [-0.5, 0.2, 0])
    c = exp_map(NORTH, [0.1, 0.5, 0])
    cfg = WeightedConfiguration(np.array([a, b, c]), np.array([0.5, 0.3, 0.2]))
    with pytest.raises(NoConvergence):
        karcher_mean(cfg, SolverSettings(max_iterations=1), initial=a)


def test_leaving_ball_raises():
    a = exp_map(NORTH, [0.5, 0, 0])
    cfg = WeightedConfiguration(np.array([a]), np.array([1.0]))
    with pytest.raises(LeftCertifiedBall):
        karcher_mean(cfg, initial=NORTH, ball=(NORTH, 0.1))


def test_settings_validation():
    with pytest.raises(ContractViolation):
        SolverSettings(gradient_tolerance=0)
    with pytest.raises(ContractViolation):
        SolverSettings(max_iterations=0)
    assert SolverSettings(method="newton").method is Method.NEWTON


def test_radius_interval_without_negative_weights():
    lo, hi = radius_interval(0.0, 0.3)
    assert lo == pytest.approx(0.3)
    assert hi == pytest.approx(math.pi / 4)


def test_gate_rejects_large_radius():
    rep = well_defined_for_radius(0.0, 0.8)
    assert not rep.ok and rep.status == "Violated"
    rep = well_defined_for_radius(0.125, 0.3)
    assert rep.ok and rep.certified_radius is not None


def test_gate_negative_weights_shrink_interval():
    # upper end for alpha_minus = 1/8 is (pi/4)/(1 + (1 + pi/2)/8)
    upper = (math.pi / 4) / (1 + (1 + math.pi / 2) / 8)
    assert radius_interval(0.125, 0.0)[1] == pytest.approx(upper)
    r_edge = upper / 1.25
    assert well_defined_for_radius(0.125, r_edge * 0.999).ok
    assert not well_defined_for_radius(0.125, r_edge).ok


def test_check_well_defined_requires_containment():
    a = exp_map(NORTH, [0.5, 0, 0])
    cfg = WeightedConfiguration(np.array([a, NORTH]), np.array([0.5, 0.5]))
    with pytest.raises(PointsOutsideBall):
        check_well_defined(cfg, NORTH, 0.2)
    assert check_well_defined(cfg, NORTH, 0.5).ok


def test_max_input_radius_four_point_odd_rule():
    r = max_input_radius(0.125, 1.5)
    assert r == pytest.approx(0.31700, abs=5e-5)


def test_geodesic_average_endpoints():
    a = exp_map(NORTH, [0.5, 0, 0])
    assert np.allclose(geodesic_average(NORTH, a, 0.0), NORTH)
    assert np.allclose(geodesic_average(NORTH, a, 1.0), a)
    with pytest.raises(ContractViolation):
        geodesic_average(NORTH, a, 1.5)
