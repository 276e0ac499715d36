"""
Convergence certificates for Riemannian subdivision on the sphere.

For one refinement rule with target weights ``alpha_j`` the weights are
deformed along an affine path ``alpha_j(t) = base_j + t * slope_j`` that
starts at a configuration whose minimiser (the reference point) is known
and ends at the rule. Along the curve of minimisers ``gamma(t)`` the speed is
bounded, for data with consecutive distances at most ``r``, by

    |gamma'(t)| <= 2 / |2 - L(t)| * sum_j |slope_j| (C0 r t + l_j r),
    L(t)       = sum_j |alpha_j(t)| (2 - 2 psi(C0 r t + l_j r)),

where ``l_j r`` bounds the distance of ``x_j`` to the reference point and
``C0 r`` is an a-priori speed bound. If the initial speed is below ``C0 r``
and the bound above improves ``C0`` to some ``C1 < C0``, the a-priori bound
holds on all of [0, 1] and the displacement of the new point from the
reference point follows by integrating the bound. Composing the rules with
the triangle inequality yields the contractivity factor and the
displacement constant of the scheme.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import (
    AssumptionViolated,
    CompositionFailure,
    ContractViolation,
    DegenerateDenominator,
    DomainError,
    UnknownScheme,
)
from .frechet import SolverSettings, Method, geodesic_average, karcher_mean, max_input_radius, well_defined_for_radius
from .schemes import EVEN, ODD, Mask, Stencil, builtin_mask
from .sphere_core import (
    WeightedConfiguration,
    geodesic_distance,
    log_map,
    objective_hessian,
    psi,
    tangent_basis,
)

DENOMINATOR_GUARD = 0.01
NON_MONOTONE_SLACK = 1.01
DEFAULT_GRID_STEP = 1e-3
_SUM_TOL = 1e-12


def _num(value) -> float:
    """Accept numbers or rational strings such as ``"1/8"``."""
    if isinstance(value, str):
        return float(Fraction(value))
    return float(value)


@dataclass(frozen=True)
class ReferenceRule:
    """Known minimiser of the path's starting configuration.

    ``kind`` is ``"input"`` (stencil point ``index``), ``"midpoint"`` (geodesic
    midpoint of stencil points ``index`` and ``index + 1``) or ``"weighted"``
    (geodesic average of the same pair with weight ``beta`` on the second).
    Indices count positions within the stencil, starting at 0.
    """

    kind: str
    index: int
    beta: float = 0.0

    def __post_init__(self):
        if self.kind not in ("input", "midpoint", "weighted"):
            raise ContractViolation(f"unknown reference kind {self.kind!r}")
        if self.kind == "midpoint":
            object.__setattr__(self, "beta", 0.5)
        elif self.kind == "input":
            object.__setattr__(self, "beta", 0.0)
        if not 0.0 <= self.beta <= 1.0:
            raise ContractViolation("beta must lie in [0, 1]")

    def initial_weights(self, size: int) -> np.ndarray:
        w = np.zeros(size)
        if self.kind == "input":
            w[self.index] = 1.0
        else:
            w[self.index] = 1.0 - self.beta
            w[self.index + 1] = self.beta
        return w

    def position(self, offsets) -> float:
        """Index-space location of the reference point relative to ``i``."""
        o = offsets[self.index]
        if self.kind == "input":
            return float(o)
        return float(o + self.beta * (offsets[self.index + 1] - o))

    def point(self, stencil_points: np.ndarray) -> np.ndarray:
        if self.kind == "input":
            return np.asarray(stencil_points[self.index], dtype=float)
        return geodesic_average(stencil_points[self.index], stencil_points[self.index + 1], self.beta)

    def to_json(self) -> dict:
        out = {"kind": self.kind, "index": self.index}
        if self.kind == "weighted":
            out["beta"] = self.beta
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "ReferenceRule":
        return cls(obj["kind"], int(obj["index"]), _num(obj.get("beta", 0.0)))


@dataclass(frozen=True)
class CoefficientPath:
    base: np.ndarray
    slope: np.ndarray
    offsets: np.ndarray
    reference: ReferenceRule

    def __post_init__(self):
        base = np.asarray([_num(v) for v in self.base])
        slope = np.asarray([_num(v) for v in self.slope])
        offsets = np.asarray([_num(v) for v in self.offsets])
        if not base.shape == slope.shape == offsets.shape:
            raise ContractViolation("base, slope and offsets must have equal length")
        if abs(base.sum() - 1.0) > _SUM_TOL or abs(slope.sum()) > _SUM_TOL:
            raise ContractViolation("path weights must sum to 1 for every t (sum(base) = 1, sum(slope) = 0)")
        if np.any(offsets < 0):
            raise ContractViolation("offsets must be nonnegative")
        last = self.reference.index + (0 if self.reference.kind == "input" else 1)
        if not (0 <= self.reference.index and last < base.size):
            raise ContractViolation("reference indices lie outside the stencil")
        if np.max(np.abs(base - self.reference.initial_weights(base.size))) > _SUM_TOL:
            raise ContractViolation("starting weights do not match the reference rule, so its minimiser is unknown")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "slope", slope)
        object.__setattr__(self, "offsets", offsets)

    def __len__(self):
        return self.base.size

    def alpha(self, t) -> np.ndarray:
        """Weights at ``t``; shape ``(..., len(path))`` for array ``t``."""
        t = np.asarray(t, dtype=float)[..., None]
        return self.base + t * self.slope

    @property
    def target(self) -> np.ndarray:
        return self.base + self.slope

    @property
    def span_factor(self) -> float:
        return (len(self) - 1) / 2.0

    def to_json(self) -> dict:
        return {
            "base": self.base.tolist(),
            "slope": self.slope.tolist(),
            "offsets": self.offsets.tolist(),
            "reference": self.reference.to_json(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "CoefficientPath":
        return cls(obj["base"], obj["slope"], obj["offsets"], ReferenceRule.from_json(obj["reference"]))


def _arguments(path: CoefficientPath, r: float, C0: float, t):
    t = np.asarray(t, dtype=float)[..., None]
    return C0 * r * t + path.offsets * r


def L_bound(path: CoefficientPath, r: float, C0: float, t):
    """``L(t) = sum_j |alpha_j(t)| (2 - 2 psi(C0 r t + l_j r))``."""
    args = _arguments(path, r, C0, t)
    val = np.sum(np.abs(path.alpha(t)) * (2.0 - 2.0 * psi(args)), axis=-1)
    return float(val) if np.ndim(val) == 0 else val


def hessian_inverse_bound(path: CoefficientPath, r: float, C0: float, t):
    """Spectral bound ``1 / |2 - L(t)|`` on the inverse Hessian along the path."""
    denom = np.abs(2.0 - np.asarray(L_bound(path, r, C0, t)))
    if np.any(denom < 1e-9):
        raise DegenerateDenominator("|2 - L(t)| vanishes")
    out = 1.0 / denom
    return float(out) if np.ndim(out) == 0 else out


def grad_derivative_bound(path: CoefficientPath, r: float, C0: float, t):
    """``2 sum_j |alpha_j'| (r C0 t + l_j r)``, bounding the t-derivative of the gradient."""
    args = _arguments(path, r, C0, t)
    val = 2.0 * np.sum(np.abs(path.slope) * args, axis=-1)
    return float(val) if np.ndim(val) == 0 else val


def speed_bound(path: CoefficientPath, r: float, C0: float, t):
    """Upper bound on ``|gamma'(t)|`` under the a-priori bound ``C0 r``."""
    out = hessian_inverse_bound(path, r, C0, t) * np.asarray(grad_derivative_bound(path, r, C0, t))
    return float(out) if np.ndim(out) == 0 else out


def initial_speed_bound(path: CoefficientPath, r: float) -> float:
    """Bound on ``|gamma'(0)| / r``; no a-priori constant enters at ``t = 0``."""
    return speed_bound(path, r, 0.0, 0.0) / r


@dataclass
class RuleBound:
    """Outcome of the bootstrap for one refinement rule."""

    C0: float
    initial_speed_coeff: float = math.nan
    C1: float = math.nan
    distance_coeff: float = math.nan
    L_max: float = math.nan
    L_monotone: bool = False
    failures: list[str] = field(default_factory=list)
    audit: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures

    def raise_for_status(self):
        if self.failures:
            raise AssumptionViolated("; ".join(self.failures), assumption=self.failures[0].split(":")[0])

    def to_json(self) -> dict:
        return {
            "C0": self.C0,
            "C1": self.C1,
            "initial_speed_coeff": self.initial_speed_coeff,
            "distance_coeff": self.distance_coeff,
            "L_max": self.L_max,
            "L_monotone": self.L_monotone,
            "passed": self.passed,
            "failures": list(self.failures),
            "audit": self.audit,
        }


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def bootstrap(
    path: CoefficientPath,
    r0: float,
    C0: float,
    t_grid_step: float = DEFAULT_GRID_STEP,
    span_factor: float | None = None,
) -> RuleBound:
    """Verify the three assumptions of the speed bootstrap at radius ``r0``.

    Assumption 1: the minimiser is well defined for every ``t`` on the grid.
    Assumption 2: the initial speed coefficient is below ``C0``.
    Assumption 3: the speed bound under ``C0`` improves it to ``C1 < C0``.
    On success ``distance_coeff`` bounds ``dist(reference, minimiser) / r``.
    """
    if not 0 < t_grid_step <= 1:
        raise ContractViolation("t_grid_step must lie in (0, 1]")
    if r0 <= 0 or C0 <= 0:
        raise ContractViolation("r0 and C0 must be positive")
    span = path.span_factor if span_factor is None else span_factor
    out = RuleBound(C0=C0)
    t = np.linspace(0.0, 1.0, int(round(1.0 / t_grid_step)) + 1)

    # Assumption 1 along the whole path, with the instantaneous negative mass.
    alphas = path.alpha(t)
    neg_mass = np.sum(np.clip(-alphas, 0.0, None), axis=1)
    worst = int(np.argmax(neg_mass))
    for k in sorted({0, worst, t.size - 1}):
        report = well_defined_for_radius(float(neg_mass[k]), span * r0)
        if not report.ok:
            out.failures.append(f"Assumption 1: not well defined at t = {t[k]:.3g}: {'; '.join(report.violations)}")
            break
    out.audit["alpha_minus_max"] = float(neg_mass.max())
    out.audit["stencil_radius"] = span * r0

    try:
        out.initial_speed_coeff = initial_speed_bound(path, r0)
        L = np.asarray(L_bound(path, r0, C0, t))
    except DomainError as exc:
        out.failures.append(f"Assumption 1: psi argument leaves [0, pi/2): {exc}")
        return out
    except DegenerateDenominator as exc:
        out.failures.append(f"Hessian bound: {exc}")
        return out

    out.audit["L(0)"] = float(L[0])
    out.audit["L(1)"] = float(L[-1])
    if out.initial_speed_coeff >= C0:
        out.failures.append(
            f"Assumption 2: initial speed coefficient {_fmt(out.initial_speed_coeff)} is not below C0 = {_fmt(C0)}"
        )

    monotone = bool(np.all(np.diff(L) >= -1e-15))
    out.L_monotone = monotone
    L_max = float(L.max()) if monotone else float(L.max()) * NON_MONOTONE_SLACK
    out.L_max = L_max
    out.audit["L_max_rule"] = "L(1), L monotone on grid" if monotone else f"grid max x {NON_MONOTONE_SLACK}"
    denom = 2.0 - L_max
    out.audit["2 - L_max"] = denom
    if denom < DENOMINATOR_GUARD:
        out.failures.append(f"Hessian bound: 2 - L = {_fmt(denom)} below guard {DENOMINATOR_GUARD}")
        return out
    out.audit["hessian_inverse_bound"] = 1.0 / denom

    grid_speed = 2.0 / (2.0 - L) * np.sum(np.abs(path.slope) * (C0 * t[:, None] + path.offsets), axis=1)
    out.audit["grid_sup_speed_coeff"] = float(grid_speed.max())

    a_dot = np.abs(path.slope)
    # sup over t of the speed bound, using L(t) <= L_max and the gradient term at t = 1
    out.C1 = 2.0 / denom * float(np.sum(a_dot * (C0 + path.offsets)))
    # integral over [0, 1] of the same bound
    out.distance_coeff = 2.0 / denom * float(np.sum(a_dot * (0.5 * C0 + path.offsets)))
    if not out.C1 < C0:
        out.failures.append(f"Assumption 3: speed bound gives C1 = {_fmt(out.C1)}, not below C0 = {_fmt(C0)}")
    out.audit["C1_iterated_limit"] = _iterated_limit(path, r0, C0, out.C1) if out.C1 < C0 else math.nan
    return out


def _iterated_limit(path: CoefficientPath, r0: float, C0: float, C1: float, rounds: int = 200) -> float:
    """Fixed point of repeatedly feeding the improved constant back into the bound."""
    a_dot = np.abs(path.slope)
    c = C1
    for _ in range(rounds):
        L = float(np.sum(np.abs(path.target) * (2.0 - 2.0 * psi(c * r0 + path.offsets * r0))))
        nxt = 2.0 / (2.0 - L) * float(np.sum(a_dot * (c + path.offsets)))
        if abs(nxt - c) < 1e-15:
            break
        c = min(nxt, c)
    return c


@dataclass
class Certificate:
    scheme: str
    r0: float
    C0: float
    C1: float
    initial_speed_coeff: float
    mu: float
    displacement_coeff: float
    well_defined_radius: float
    status: str
    reasons: list[str] = field(default_factory=list)
    rules: dict = field(default_factory=dict)
    audit: list[dict] = field(default_factory=list)

    @property
    def certified(self) -> bool:
        return self.status == "Certified"

    @property
    def reported_radius(self) -> float:
        """Well-definedness radius rounded down to two decimals."""
        return math.floor(self.well_defined_radius * 100.0 + 1e-9) / 100.0

    def raise_for_status(self):
        if self.certified:
            return
        if any(r.startswith("composition") for r in self.reasons):
            raise CompositionFailure("; ".join(self.reasons))
        raise AssumptionViolated("; ".join(self.reasons))

    def to_json(self) -> dict:
        return {
            "schema_version": 1,
            "scheme": self.scheme,
            "status": self.status,
            "reasons": list(self.reasons),
            "r0": self.r0,
            "C0": self.C0,
            "C1": self.C1,
            "initial_speed_coeff": self.initial_speed_coeff,
            "mu": self.mu,
            "displacement_coeff": self.displacement_coeff,
            "well_defined_radius": self.well_defined_radius,
            "reported_radius": self.reported_radius,
            "rules": {k: v.to_json() for k, v in self.rules.items()},
            "audit": self.audit,
        }


def _check_path_against_rule(path: CoefficientPath, rule: Stencil, label: str) -> list[str]:
    problems = []
    if len(path) != len(rule.offsets):
        return [f"{label} path has {len(path)} weights but the rule has {len(rule.offsets)} stencil points"]
    if np.max(np.abs(path.target - rule.weight_array)) > _SUM_TOL:
        problems.append(f"{label} path does not end at the rule weights {[str(w) for w in rule.weights]}")
    p = path.reference.position(rule.offsets)
    needed = np.abs(np.asarray(rule.offsets, dtype=float) - p)
    if np.any(path.offsets < needed - 1e-12):
        problems.append(f"{label} offsets {path.offsets.tolist()} undercut the distances {needed.tolist()} to the reference point")
    return problems


def _rule_radius(rule: Stencil) -> float:
    if rule.span_factor == 0:
        return math.inf
    return max_input_radius(rule.alpha_minus, rule.span_factor)


def compose(
    d_even: float, p_even: float, d_odd: float, p_odd: float
) -> tuple[float, float, list[dict]]:
    """Contractivity factor and displacement constant from per-rule bounds.

    ``d_*`` bound the distance of a new point to its reference point and
    ``p_*`` locate that reference point on the input polyline (index units,
    relative to ``i``), all in multiples of the largest consecutive distance.
    Consecutive new points are ``(2i, 2i+1)`` and ``(2i+1, 2i+2)``; the
    polyline distance between reference points at positions ``p < q`` is at
    most ``q - p``.
    """
    pair_a = d_even + d_odd + abs(p_odd - p_even)
    pair_b = d_odd + d_even + abs(1.0 + p_even - p_odd)
    mu = max(pair_a, pair_b)
    disp = d_even + abs(p_even)
    audit = [
        {"name": "dist(T_2i, T_2i+1) / delta", "value": pair_a},
        {"name": "dist(T_2i+1, T_2i+2) / delta", "value": pair_b},
        {"name": "dist(T_2i, x_i) / delta", "value": disp},
    ]
    return mu, disp, audit


def certify_scheme(
    mask: Mask,
    even_path: CoefficientPath,
    odd_path: CoefficientPath,
    r0: float,
    C0_even: float,
    C0_odd: float,
    grid_step: float = DEFAULT_GRID_STEP,
    r_checks: int = 16,
) -> Certificate:
    """Certify contractivity and displacement safety for all ``0 < delta <= r0``."""
    reasons, audit, rules = [], [], {}
    for label, path, parity in (("even", even_path, EVEN), ("odd", odd_path, ODD)):
        problems = _check_path_against_rule(path, mask.rule(parity), label)
        if problems:
            raise ContractViolation("; ".join(problems))

    wd = min(_rule_radius(mask.rule(p)) for p in (EVEN, ODD))
    audit.append({"name": "well_defined_radius", "value": wd})
    if not r0 < wd:
        reasons.append(f"well-definedness: r0 = {_fmt(r0)} is not below the admissible radius {_fmt(wd)}")

    per_rule = {}
    for label, path, parity, C0 in (("even", even_path, EVEN, C0_even), ("odd", odd_path, ODD, C0_odd)):
        rule = mask.rule(parity)
        bound = bootstrap(path, r0, C0, grid_step, span_factor=rule.span_factor)
        rules[label] = bound
        for f in bound.failures:
            reasons.append(f"{label} rule: {f}")
        per_rule[label] = (bound.distance_coeff, path.reference.position(rule.offsets))
        audit.append({"name": f"{label}: reference position", "value": per_rule[label][1]})
        for key, value in bound.audit.items():
            audit.append({"name": f"{label}: {key}", "value": value})

    (d_e, p_e), (d_o, p_o) = per_rule["even"], per_rule["odd"]
    mu, disp, comp_audit = compose(d_e, p_e, d_o, p_o)
    audit.extend(comp_audit)
    if not all(b.passed for b in rules.values()):
        mu = disp = math.nan
    elif not mu < 1.0:
        reasons.append(f"composition: contractivity factor {_fmt(mu)} is not below 1")
    if not math.isfinite(disp) and not reasons:
        reasons.append("composition: displacement constant is not finite")

    if not reasons and r_checks > 0:
        # the bounds are monotone in r; confirm on a grid of smaller radii
        worst = 0.0
        for r in np.linspace(r0 / r_checks, r0, r_checks):
            b_e = bootstrap(even_path, float(r), C0_even, grid_step, span_factor=mask.even.span_factor)
            b_o = bootstrap(odd_path, float(r), C0_odd, grid_step, span_factor=mask.odd.span_factor)
            if not (b_e.passed and b_o.passed):
                reasons.append(f"radius sweep: certificate fails at r = {_fmt(float(r))}")
                break
            m, _, _ = compose(b_e.distance_coeff, p_e, b_o.distance_coeff, p_o)
            worst = max(worst, m)
        audit.append({"name": "radius sweep max mu", "value": worst})

    binding = max(rules.values(), key=lambda b: (b.C1 if math.isfinite(b.C1) else math.inf) / b.C0)
    return Certificate(
        scheme=mask.name,
        r0=r0,
        C0=binding.C0,
        C1=binding.C1,
        initial_speed_coeff=binding.initial_speed_coeff,
        mu=mu,
        displacement_coeff=disp,
        well_defined_radius=wd,
        status="Certified" if not reasons else "Failed",
        reasons=reasons,
        rules=rules,
        audit=audit,
    )


# ---------------------------------------------------------------------------
# built-in certificate specs


def four_point_paths(omega: float = 1 / 16) -> tuple[CoefficientPath, CoefficientPath]:
    even = CoefficientPath([1.0], [0.0], [0.0], ReferenceRule("input", 0))
    odd = CoefficientPath(
        [0.0, 0.5, 0.5, 0.0],
        [-omega, omega, omega, -omega],
        [1.5, 0.5, 0.5, 1.5],
        ReferenceRule("midpoint", 1),
    )
    return even, odd


def _builtin_specs() -> dict:
    lr_paths = {
        "even": {"base": [0, 1, 0], "slope": ["1/8", "-1/4", "1/8"], "offsets": [1, 0, 1], "reference": {"kind": "input", "index": 1}},
        "odd": {"base": ["1/2", "1/2"], "slope": [0, 0], "offsets": ["1/2", "1/2"], "reference": {"kind": "midpoint", "index": 0}},
    }
    fp_paths = {
        "even": {"base": [1], "slope": [0], "offsets": [0], "reference": {"kind": "input", "index": 0}},
        "odd": {"base": [0, "1/2", "1/2", 0], "slope": ["-1/16", "1/16", "1/16", "-1/16"], "offsets": ["3/2", "1/2", "1/2", "3/2"], "reference": {"kind": "midpoint", "index": 1}},
    }
    neg_paths = {
        "even": {"base": [0, 0.65, 0.35, 0], "slope": ["-1/32", "1/160", "9/160", "-1/32"], "offsets": [1.35, 0.35, 0.65, 1.65], "reference": {"kind": "weighted", "index": 1, "beta": 0.35}},
        "odd": {"base": [0, 0.35, 0.65, 0], "slope": ["-1/32", "9/160", "1/160", "-1/32"], "offsets": [1.65, 0.65, 0.35, 1.35], "reference": {"kind": "weighted", "index": 1, "beta": 0.65}},
    }
    return {
        "lane-riesenfeld-cubic": {"scheme": "lane-riesenfeld-cubic", "r0": 0.6, "C0_even": 0.69, "C0_odd": 0.69, "paths": lr_paths, "grid_step": DEFAULT_GRID_STEP},
        "lane-riesenfeld-cubic@0.25": {"scheme": "lane-riesenfeld-cubic", "r0": 0.25, "C0_even": 0.53, "C0_odd": 0.53, "paths": lr_paths, "grid_step": DEFAULT_GRID_STEP},
        "four-point": {"scheme": "four-point(1/16)", "r0": 0.31, "C0_even": 0.45, "C0_odd": 0.45, "paths": fp_paths, "grid_step": DEFAULT_GRID_STEP},
        "neg-13-21": {"scheme": "neg-13-21", "r0": 0.4, "C0_even": 0.16, "C0_odd": 0.16, "paths": neg_paths, "grid_step": DEFAULT_GRID_STEP},
    }


def builtin_spec(name: str) -> dict:
    """Certificate spec (JSON form) of a built-in scheme.

    ``lane-riesenfeld-cubic`` is the r0 = 0.6 variant; the r0 = 0.25 variant
    is available as ``lane-riesenfeld-cubic@0.25``.
    """
    specs = _builtin_specs()
    key = "four-point" if name.startswith("four-point") else name
    if key not in specs:
        raise UnknownScheme(f"no built-in certificate for {name!r}; available: {', '.join(specs)}")
    return specs[key]


def builtin_spec_names() -> list[str]:
    return list(_builtin_specs())


def mask_from_spec(spec: dict) -> Mask:
    scheme = spec["scheme"]
    if isinstance(scheme, dict):
        return Mask.from_json(scheme)
    return builtin_mask(scheme)


def certify_spec(spec: dict) -> Certificate:
    """Run ``certify_scheme`` on a JSON-style certificate spec."""
    try:
        mask = mask_from_spec(spec)
        paths = spec["paths"]
        even = CoefficientPath.from_json(paths["even"])
        odd = CoefficientPath.from_json(paths["odd"])
        r0 = _num(spec["r0"])
        c_even = _num(spec["C0_even"])
        c_odd = _num(spec.get("C0_odd", spec["C0_even"]))
        step = _num(spec.get("grid_step", DEFAULT_GRID_STEP))
    except KeyError as exc:
        raise ContractViolation(f"certificate spec is missing field {exc}") from exc
    return certify_scheme(mask, even, odd, r0, c_even, c_odd, step)


@lru_cache(maxsize=None)
def convergence_radius(name: str) -> float:
    """Certified bound on the largest consecutive distance for a built-in scheme."""
    cert = certify_spec(builtin_spec(name))
    if not cert.certified:
        raise AssumptionViolated(f"built-in certificate for {name} failed: {cert.reasons}")
    return cert.r0


# ---------------------------------------------------------------------------
# numerical trace of the minimiser curve


@dataclass(frozen=True)
class TraceSample:
    t: float
    point: np.ndarray
    fd_speed: float
    analytic_speed: float


def _path_config(points: np.ndarray, path: CoefficientPath, t: float) -> WeightedConfiguration:
    return WeightedConfiguration(points, path.alpha(t))


def analytic_speed(points: np.ndarray, path: CoefficientPath, t: float, x: np.ndarray) -> float:
    """``|H^{-1} d/ds grad f_alpha(s)|`` at the minimiser ``x`` of ``f_alpha(t)``."""
    cfg = _path_config(points, path, t)
    basis = tangent_basis(x)
    h = basis.T @ objective_hessian(cfg, x) @ basis
    dgrad = -2.0 * (path.slope @ log_map(np.broadcast_to(x, points.shape), points))
    return float(np.linalg.norm(np.linalg.solve(h, basis.T @ dgrad)))


def trace_gamma(stencil_points, path: CoefficientPath, samples: int = 21, fd_step: float = 1e-5) -> list[TraceSample]:
    """Sample ``gamma(t) = argmin f_alpha(t)`` on ``samples`` equally spaced ``t``.

    Each sample is solved by Newton iterations warm-started from the previous
    one. Speeds are reported both as a central finite difference of the
    solved curve and through the implicit-function formula.
    """
    pts = np.asarray(stencil_points, dtype=float)
    if pts.shape[0] != len(path):
        raise ContractViolation(f"path has {len(path)} weights but {pts.shape[0]} points were given")
    settings = SolverSettings(gradient_tolerance=1e-13, max_iterations=50, method=Method.NEWTON)
    x = path.reference.point(pts)

    def solve(t, start):
        try:
            return karcher_mean(_path_config(pts, path, t), settings, initial=start)
        except Exception as exc:
            raise type(exc)(f"at t = {t:.6g}: {exc}") from exc

    out = []
    for t in np.linspace(0.0, 1.0, samples):
        x = solve(float(t), x)
        lo, hi = max(0.0, t - fd_step), min(1.0, t + fd_step)
        x_lo = solve(float(lo), x) if lo < t else x
        x_hi = solve(float(hi), x) if hi > t else x
        fd = geodesic_distance(x_lo, x_hi) / (hi - lo)
        out.append(TraceSample(float(t), x, float(fd), analytic_speed(pts, path, float(t), x)))
    return out
