from fractions import Fraction

import numpy as np
import pytest
from conftest import closed, equator, regular_polygon

from geosubdiv.errors import ContractViolation, GateViolation, LengthMismatch, UnknownScheme
from geosubdiv.frechet import Method, SolverSettings
from geosubdiv.schemes import (
    BUILTIN_NAMES,
    EVEN,
    ODD,
    Boundary,
    Mask,
    PointSequence,
    builtin_mask,
    diagnostics,
    iterate,
    linear_subdivide,
    riemannian_subdivide,
    subdivide_periodic_batch,
)
from geosubdiv.validation import random_rotation


def test_builtin_masks_are_affine_invariant():
    for name in BUILTIN_NAMES:
        m = builtin_mask(name)
        for parity in (EVEN, ODD):
            assert sum(m.rule(parity).weights) == 1


def test_mask_rule_convention():
    lr = builtin_mask("lane-riesenfeld-cubic")
    assert lr.even.offsets == (-1, 0, 1)
    assert lr.even.weights == (Fraction(1, 8), Fraction(3, 4), Fraction(1, 8))
    assert lr.odd.offsets == (0, 1)
    fp = builtin_mask("four-point")
    assert fp.even.offsets == (0,)
    assert fp.odd.offsets == (-1, 0, 1, 2)
    assert fp.odd.alpha_minus == pytest.approx(0.125)
    assert fp.odd.span_factor == 1.5


def test_four_point_tension_in_name():
    m = builtin_mask("four-point(1/32)")
    assert m.coefficients[3] == Fraction(-1, 32)
    assert m.name == "four-point(1/32)"


def test_mask_rejects_non_affine():
    with pytest.raises(ContractViolation):
        Mask({0: Fraction(1, 2), 1: Fraction(1)})
    with pytest.raises(ContractViolation):
        Mask({0: 1.0, 1: 0.9})


def test_unknown_scheme():
    with pytest.raises(UnknownScheme):
        builtin_mask("chaikin")


def test_mask_json_roundtrip():
    for name in BUILTIN_NAMES:
        m = builtin_mask(name)
        assert Mask.from_json(m.to_json()) == m


@pytest.mark.parametrize("name", ["lane-riesenfeld-cubic", "four-point"])
def test_linear_rules_reproduce_linear_data(name):
    out = linear_subdivide(builtin_mask(name), np.arange(12.0), periodic=False)
    assert out.size > 12
    assert np.allclose(np.diff(out), 0.5)
    assert out[0] % 0.5 == 0


def test_neg_rule_maps_linear_data_to_shifted_positions():
    # even outputs sit at i + 3/8 and odd ones at i + 5/8
    out = linear_subdivide(builtin_mask("neg-13-21"), np.arange(12.0), periodic=False)
    assert np.allclose(out[0::2] % 1, 0.375)
    assert np.allclose(out[1::2] % 1, 0.625)


def test_periodic_linear_length():
    out = linear_subdivide(builtin_mask("neg-13-21"), np.random.default_rng(0).random((7, 2)))
    assert out.shape == (14, 2)


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_geodesic_data_matches_linear_rule_on_angles(name, rng):
    mask = builtin_mask(name)
    angles = np.cumsum(rng.uniform(0.05, 0.2, 14))
    seq = PointSequence(equator(angles), 0, Boundary.TRUNCATE)
    refined = riemannian_subdivide(mask, seq)
    expect = linear_subdivide(mask, angles, periodic=False)
    got = np.arctan2(refined.points[:, 1], refined.points[:, 0])
    got = np.unwrap(got)
    assert len(refined) == expect.size
    assert np.allclose(got, expect, atol=1e-12)


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_rotation_equivariance(name, rng):
    mask = builtin_mask(name)
    pts = regular_polygon(0.2, 8)
    rot = random_rotation(rng)
    a = riemannian_subdivide(mask, closed(pts)).points @ rot.T
    b = riemannian_subdivide(mask, closed(pts @ rot.T)).points
    assert np.allclose(a, b, atol=1e-12)


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_constant_polygon_is_fixed(name):
    pts = np.tile([0.0, 0.6, 0.8], (6, 1))
    levels = iterate(builtin_mask(name), closed(pts), 2)
    for seq, diag in levels:
        assert np.allclose(seq.points, pts[0], atol=1e-15)
        assert diag.contraction_ratio == 0.0
        assert diag.displacement == pytest.approx(0.0, abs=1e-15)


def test_four_point_interpolates(rng):
    pts = regular_polygon(0.25, 9) @ random_rotation(rng).T
    out = riemannian_subdivide(builtin_mask("four-point"), closed(pts))
    assert np.allclose(out.points[0::2], pts, atol=1e-15)


def test_lane_riesenfeld_six_point_example():
    levels = iterate(builtin_mask("lane-riesenfeld-cubic"), closed(regular_polygon(0.2)), 5)
    assert len(levels[-1][0]) == 192
    assert all(d.contraction_ratio <= 0.89 for _, d in levels)


def test_batch_matches_sequence(rng):
    mask = builtin_mask("neg-13-21")
    polys = np.stack([regular_polygon(0.2, 7) @ random_rotation(rng).T for _ in range(3)])
    batch = subdivide_periodic_batch(mask, polys)
    for p, b in zip(polys, batch):
        assert np.allclose(riemannian_subdivide(mask, closed(p)).points, b, atol=1e-14)


def test_newton_settings_give_same_result():
    pts = regular_polygon(0.3, 7)
    mask = builtin_mask("neg-13-21")
    a = riemannian_subdivide(mask, closed(pts))
    b = riemannian_subdivide(mask, closed(pts), SolverSettings(method=Method.NEWTON))
    assert np.allclose(a.points, b.points, atol=1e-11)


def test_open_sequence_indices():
    angles = np.linspace(0, 1, 8)
    seq = PointSequence(equator(angles), 0, Boundary.TRUNCATE)
    out = riemannian_subdivide(builtin_mask("lane-riesenfeld-cubic"), seq)
    # even outputs need i in [1, 6], odd ones i in [0, 6]
    assert out.start == 1 and len(out) == 13
    diag = diagnostics(seq, out)
    assert diag.displacement == pytest.approx(0.0, abs=1e-14)


def test_open_four_point_keeps_interior_run():
    seq = PointSequence(equator(np.linspace(0, 1, 8)), 0, Boundary.TRUNCATE)
    out = riemannian_subdivide(builtin_mask("four-point"), seq)
    assert out.start == 2 and len(out) == 11
    assert np.allclose(out.points[0::2], seq.points[1:7], atol=1e-15)


def test_gate_violation_reports_output_index():
    angles = np.array([0.0, 0.1, 0.2, 0.3, 1.5, 1.6, 1.7, 1.8, 1.9])
    seq = PointSequence(equator(angles), 0, Boundary.TRUNCATE)
    with pytest.raises(GateViolation) as info:
        riemannian_subdivide(builtin_mask("neg-13-21"), seq)
    assert info.value.index is not None
    assert info.value.conditions


def test_convergence_gate_rejects_at_threshold():
    mask = builtin_mask("four-point")
    with pytest.raises(GateViolation):
        iterate(mask, closed(regular_polygon(0.31, 12)), 1, max_delta=0.31)
    assert len(iterate(mask, closed(regular_polygon(0.3, 12)), 1, max_delta=0.31)) == 1


def test_diagnostics_length_mismatch():
    a = closed(regular_polygon(0.2, 6))
    with pytest.raises(LengthMismatch):
        diagnostics(a, closed(regular_polygon(0.2, 10)))


def test_sequence_validation():
    with pytest.raises(ContractViolation):
        PointSequence(np.array([[0.0, 0.0, 2.0]]))
    with pytest.raises(ContractViolation):
        riemannian_subdivide(builtin_mask("four-point"), closed([[0.0, 0.0, 1.0]]))
    with pytest.raises(ContractViolation):
        iterate(builtin_mask("four-point"), closed(regular_polygon(0.2)), -1)
