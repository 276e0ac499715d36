import json
import math

import numpy as np
import pytest

from geosubdiv import certify as c
from geosubdiv.errors import AssumptionViolated, ContractViolation, UnknownScheme
from geosubdiv.schemes import builtin_mask
from geosubdiv.validation import random_stencil


def spec(name, **changes):
    s = dict(c.builtin_spec(name))
    s.update(changes)
    return s


@pytest.fixture(scope="module")
def certs():
    return {name: c.certify_spec(c.builtin_spec(name)) for name in c.builtin_spec_names()}


def test_builtins_certify(certs):
    for cert in certs.values():
        assert cert.certified, cert.reasons
        assert cert.mu < 1


def test_lane_riesenfeld_small_radius_constants(certs):
    cert = certs["lane-riesenfeld-cubic@0.25"]
    assert cert.C1 == pytest.approx(0.52375, abs=1e-4)
    assert cert.mu == pytest.approx(0.889, abs=1e-3)
    assert cert.displacement_coeff == pytest.approx(0.389, abs=1e-3)


def test_four_point_constants(certs):
    cert = certs["four-point"]
    assert 0.25 < cert.initial_speed_coeff <= 50 / 198 + 1e-4
    assert cert.displacement_coeff == 0.0
    assert cert.reported_radius == 0.31
    assert cert.well_defined_radius == pytest.approx(0.3170, abs=1e-4)


def test_neg_constants(certs):
    cert = certs["neg-13-21"]
    assert cert.initial_speed_coeff < 0.14
    assert cert.reported_radius == 0.4


def test_four_point_fails_bootstrap_with_small_C0():
    cert = c.certify_spec(spec("four-point", C0_even=0.26, C0_odd=0.26))
    assert cert.status == "Failed"
    assert any("Assumption 3" in r for r in cert.reasons)
    assert not any("Assumption 2" in r for r in cert.reasons)
    with pytest.raises(AssumptionViolated):
        cert.raise_for_status()


def test_four_point_fails_initial_gate_below_initial_speed():
    cert = c.certify_spec(spec("four-point", C0_even=0.25, C0_odd=0.25))
    assert any("Assumption 2" in r for r in cert.reasons)


def test_radius_beyond_quarter_pi_fails_well_definedness():
    cert = c.certify_spec(spec("lane-riesenfeld-cubic", r0=1.0))
    assert cert.status == "Failed"
    assert cert.reasons[0].startswith("well-definedness")


def test_L_at_zero_for_four_point():
    _, odd = c.four_point_paths()
    s = 0.155
    assert c.L_bound(odd, 0.31, 0.45, 0.0) == pytest.approx(2 - 2 * s / math.tan(s), rel=1e-12)


def test_L_vectorised_matches_scalar():
    _, odd = c.four_point_paths()
    t = np.linspace(0, 1, 5)
    vec = c.L_bound(odd, 0.31, 0.45, t)
    assert np.allclose(vec, [c.L_bound(odd, 0.31, 0.45, float(x)) for x in t])


def test_bootstrap_records_iterated_limit():
    path = c.CoefficientPath.from_json(c.builtin_spec("lane-riesenfeld-cubic")["paths"]["even"])
    bound = c.bootstrap(path, 0.6, 0.69, span_factor=1.0)
    assert bound.passed
    assert bound.audit["C1_iterated_limit"] <= bound.C1


def test_bootstrap_argument_checks():
    even, _ = c.four_point_paths()
    with pytest.raises(ContractViolation):
        c.bootstrap(even, 0.3, 0.45, t_grid_step=0)
    with pytest.raises(ContractViolation):
        c.bootstrap(even, -0.3, 0.45)


def test_trivial_path_has_zero_bounds():
    even, _ = c.four_point_paths()
    b = c.bootstrap(even, 0.31, 0.45)
    assert b.C1 == 0.0 and b.distance_coeff == 0.0 and b.initial_speed_coeff == 0.0


def test_path_validation():
    ref = c.ReferenceRule("midpoint", 0)
    with pytest.raises(ContractViolation):
        c.CoefficientPath([0.5, 0.6], [0, 0], [0.5, 0.5], ref)
    with pytest.raises(ContractViolation):
        c.CoefficientPath([0.5, 0.5], [0.1, 0], [0.5, 0.5], ref)
    with pytest.raises(ContractViolation):
        c.CoefficientPath([1.0, 0.0], [0, 0], [0.5, 0.5], ref)
    with pytest.raises(ContractViolation):
        c.CoefficientPath(["1/2", "1/2"], [0, 0], [0.5, 0.5], c.ReferenceRule("midpoint", 1))
    with pytest.raises(ContractViolation):
        c.ReferenceRule("centroid", 0)


def test_path_json_roundtrip_and_rational_strings():
    path = c.CoefficientPath.from_json(c.builtin_spec("neg-13-21")["paths"]["even"])
    again = c.CoefficientPath.from_json(json.loads(json.dumps(path.to_json())))
    assert np.array_equal(path.slope, again.slope)
    assert path.reference == again.reference
    assert np.allclose(path.target, [float(w) for w in builtin_mask("neg-13-21").even.weights])


def test_path_must_end_at_rule():
    s = spec("four-point")
    s["paths"] = dict(s["paths"])
    s["paths"]["odd"] = {**s["paths"]["odd"], "slope": ["-1/32", "1/32", "1/32", "-1/32"]}
    with pytest.raises(ContractViolation):
        c.certify_spec(s)


def test_compose_formula():
    mu, disp, audit = c.compose(0.25, 0.0, 0.25, 0.5)
    assert mu == pytest.approx(1.0)
    assert disp == pytest.approx(0.25)
    assert len(audit) == 3


def test_certificate_json(certs):
    obj = json.loads(json.dumps(certs["neg-13-21"].to_json()))
    assert obj["schema_version"] == 1
    assert obj["status"] == "Certified"
    assert set(obj["rules"]) == {"even", "odd"}


def test_unknown_builtin_spec():
    with pytest.raises(UnknownScheme):
        c.builtin_spec("chaikin")


def test_missing_spec_field():
    s = spec("four-point")
    del s["r0"]
    with pytest.raises(ContractViolation):
        c.certify_spec(s)


def test_convergence_radius():
    assert c.convergence_radius("lane-riesenfeld-cubic") == 0.6
    assert c.convergence_radius("four-point") == 0.31
    assert c.convergence_radius("neg-13-21") == 0.4


@pytest.mark.parametrize("name", ["lane-riesenfeld-cubic", "four-point", "neg-13-21"])
def test_traced_speed_below_bound(name, rng):
    s = c.builtin_spec(name)
    r0 = s["r0"]
    for label in ("even", "odd"):
        path = c.CoefficientPath.from_json(s["paths"][label])
        if not np.any(path.slope):
            continue
        C0 = s[f"C0_{label}"]
        for _ in range(3):
            pts = random_stencil(rng, len(path), r0)
            for sample in c.trace_gamma(pts, path, samples=6):
                assert sample.fd_speed == pytest.approx(sample.analytic_speed, rel=1e-5, abs=1e-9)
                assert sample.analytic_speed <= c.speed_bound(path, r0, C0, sample.t) + 1e-12
