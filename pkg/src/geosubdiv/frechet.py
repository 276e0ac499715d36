"""
Weighted Riemannian centre of mass on the sphere.

``check_well_defined`` is the local existence/uniqueness gate for weighted
means with possibly negative weights on a space of curvature 1 and
injectivity radius pi: data in ``B_r(c)`` has a unique minimiser in
``B_{r*}(c)`` whenever some ``r*`` satisfies

    (1 + 2 a) r  <  r*  <  (pi/4) / (1 + (1 + pi/2) a),    r* < pi/4,

with ``a`` the total mass of negative weights.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ContractViolation,
    LeftCertifiedBall,
    NoConvergence,
    PointsOutsideBall,
    SingularHessian,
)
from .sphere_core import (
    WeightedConfiguration,
    exp_map,
    geodesic_distance,
    log_map,
    objective_gradient,
    objective_hessian,
    tangent_basis,
)

QUARTER_PI = math.pi / 4.0
_BALL_SLACK = 1e-12


class Method(str, enum.Enum):
    FIXED_POINT = "fixed_point"
    NEWTON = "newton"


@dataclass(frozen=True)
class SolverSettings:
    gradient_tolerance: float = 1e-12
    max_iterations: int = 100
    method: Method = Method.FIXED_POINT

    def __post_init__(self):
        if not self.gradient_tolerance > 0:
            raise ContractViolation("gradient_tolerance must be positive")
        if self.max_iterations < 1:
            raise ContractViolation("max_iterations must be >= 1")
        object.__setattr__(self, "method", Method(self.method))


@dataclass(frozen=True)
class WellDefinednessReport:
    alpha_minus: float
    data_radius: float
    certified_radius: float | None
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def status(self) -> str:
        return "WellDefined" if self.ok else "Violated"


def radius_interval(alpha_minus: float, r: float) -> tuple[float, float]:
    """Open interval of admissible ``r*`` for data radius ``r``."""
    lower = (1.0 + 2.0 * alpha_minus) * r
    upper = min(QUARTER_PI, QUARTER_PI / (1.0 + (1.0 + math.pi / 2.0) * alpha_minus))
    return lower, upper


def well_defined_for_radius(alpha_minus: float, r: float) -> WellDefinednessReport:
    """The gate on the numbers alone, without checking any containment."""
    if alpha_minus < 0 or r < 0:
        raise ContractViolation("alpha_minus and r must be nonnegative")
    lower, upper = radius_interval(alpha_minus, r)
    violations = []
    if not r < QUARTER_PI:
        violations.append(f"r = {r:.6g} must be < pi/4")
    if not lower < upper:
        violations.append(
            f"no r* with (1 + 2*alpha_minus)*r = {lower:.6g} < r* < "
            f"(pi/4)/(1 + (1 + pi/2)*alpha_minus) = {upper:.6g}"
        )
    r_star = 0.5 * (lower + upper) if not violations else None
    return WellDefinednessReport(alpha_minus, r, r_star, violations)


def check_well_defined(config: WeightedConfiguration, center, r: float) -> WellDefinednessReport:
    """Gate a configuration whose points all lie in the closed ball ``B_r(center)``."""
    dist = np.atleast_1d(geodesic_distance(config.points, np.broadcast_to(center, config.points.shape)))
    if np.any(dist > r + _BALL_SLACK):
        raise PointsOutsideBall(
            f"point at distance {dist.max():.6g} from the centre exceeds the radius {r:.6g}"
        )
    return well_defined_for_radius(config.alpha_minus, r)


def max_input_radius(alpha_minus: float, span_factor: float) -> float:
    """Supremum of consecutive-point distances ``r0`` passing the gate.

    ``span_factor`` converts ``r0`` to the radius of the ball holding a
    stencil, e.g. 3/2 for four consecutive points around the middle pair.
    The bound is strict: any ``r0`` below the returned value passes.
    """
    if alpha_minus < 0 or span_factor <= 0:
        raise ContractViolation("need alpha_minus >= 0 and span_factor > 0")
    _, upper = radius_interval(alpha_minus, 0.0)
    return upper / ((1.0 + 2.0 * alpha_minus) * span_factor)


def initial_guess(config: WeightedConfiguration) -> np.ndarray:
    """Normalized weighted ambient average, or the first weighted point."""
    avg = config.weights @ config.points
    nrm = np.linalg.norm(avg)
    if nrm >= 0.5:
        return avg / nrm
    return config.points[np.flatnonzero(config.weights)[0]]


def karcher_mean(
    config: WeightedConfiguration,
    settings: SolverSettings | None = None,
    initial=None,
    ball: tuple[np.ndarray, float] | None = None,
) -> np.ndarray:
    """Local minimiser of ``sum_j alpha_j dist(x_j, x)^2``.

    Two iterations are available: the fixed-point gradient step
    ``x <- exp_x(sum_j alpha_j log_x(x_j))`` and a Newton step on the
    tangent block of the Hessian. ``ball = (centre, radius)`` makes the
    solver fail if any iterate leaves that ball.
    """
    settings = settings or SolverSettings()
    active = config.active()
    x = initial_guess(active) if initial is None else np.asarray(initial, dtype=float)
    x = x / np.linalg.norm(x)

    for it in range(settings.max_iterations + 1):
        if ball is not None:
            d = geodesic_distance(ball[0], x)
            if d > ball[1] + _BALL_SLACK:
                raise LeftCertifiedBall(f"iterate {it} at distance {d:.6g} left the ball of radius {ball[1]:.6g}")
        grad = objective_gradient(active, x)
        if np.linalg.norm(grad) <= settings.gradient_tolerance:
            return x
        if it == settings.max_iterations:
            break
        if settings.method is Method.NEWTON:
            basis = tangent_basis(x)
            h = basis.T @ objective_hessian(active, x) @ basis
            lam_min = np.linalg.eigvalsh(h)[0]
            if lam_min < 1e-10:
                raise SingularHessian(f"tangent Hessian has smallest eigenvalue {lam_min:.3g}")
            step = basis @ np.linalg.solve(h, -(basis.T @ grad))
        else:
            step = -0.5 * grad
        x = exp_map(x, step)

    raise NoConvergence(
        f"gradient norm {np.linalg.norm(grad):.3g} above {settings.gradient_tolerance:g} "
        f"after {settings.max_iterations} iterations",
        iterations=settings.max_iterations,
    )


def karcher_mean_batch(
    points: np.ndarray,
    weights: np.ndarray,
    initial: np.ndarray | None = None,
    tolerance: float = 1e-12,
    max_iterations: int = 200,
) -> np.ndarray:
    """Fixed-point means of many stencils sharing one weight vector.

    ``points`` has shape ``(B, s, d)`` and ``weights`` shape ``(s,)``.
    Returns an array ``(B, d)``. Entries with zero weight are ignored.
    """
    weights = np.asarray(weights, dtype=float)
    keep = weights != 0.0
    pts = points[:, keep, :]
    w = weights[keep]
    if initial is None:
        avg = np.einsum("s,bsd->bd", w, pts)
        nrm = np.linalg.norm(avg, axis=1, keepdims=True)
        x = np.where(nrm >= 0.5, avg / np.where(nrm > 0, nrm, 1.0), pts[:, 0, :])
    else:
        x = np.array(initial, dtype=float)
    for _ in range(max_iterations):
        logs = log_map(x[:, None, :], pts)
        step = np.einsum("s,bsd->bd", w, logs)
        if np.max(2.0 * np.linalg.norm(step, axis=1), initial=0.0) <= tolerance:
            return x
        x = exp_map(x, step)
    raise NoConvergence(f"batched mean did not reach gradient tolerance {tolerance:g}", iterations=max_iterations)


def geodesic_average(x, y, beta: float) -> np.ndarray:
    """Point at fraction ``beta`` of the way from ``x`` to ``y`` (weight ``beta`` on ``y``)."""
    if not 0.0 <= beta <= 1.0:
        raise ContractViolation(f"beta must lie in [0, 1], got {beta!r}")
    x = np.asarray(x, dtype=float)
    return exp_map(x, beta * log_map(x, y))
