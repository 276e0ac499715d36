"""
Binary subdivision driven by a finitely supported mask.

A mask ``a`` defines the linear rule ``(Sx)_i = sum_j a_{i-2j} x_j``. Its
Riemannian analogue replaces each affine average by the weighted Karcher
mean of the same points with the same weights. The output with index ``2i+e``
(``e`` in {0, 1}) is built from the stencil ``x_{i+o}`` with weight
``a_{e-2o}`` for each offset ``o``.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ContractViolation, GateViolation, LeftCertifiedBall, LengthMismatch, NoConvergence, UnknownScheme
from .frechet import (
    SolverSettings,
    Method,
    karcher_mean,
    karcher_mean_batch,
    max_input_radius,
    radius_interval,
)
from .sphere_core import WeightedConfiguration, geodesic_distance

EVEN, ODD = 0, 1


@dataclass(frozen=True)
class Stencil:
    """Offsets (relative to ``i``) and weights of one refinement rule."""

    offsets: tuple[int, ...]
    weights: tuple[Fraction | float, ...]

    @property
    def weight_array(self) -> np.ndarray:
        return np.array([float(w) for w in self.weights])

    @property
    def alpha_minus(self) -> float:
        return float(sum(-w for w in self.weights if w < 0))

    @property
    def span_factor(self) -> float:
        """Radius, in units of the consecutive-point distance, of the ball around the stencil centre."""
        return (self.offsets[-1] - self.offsets[0]) / 2.0

    @property
    def centre(self) -> float:
        """Index-space position of the stencil centre relative to ``i``."""
        return (self.offsets[-1] + self.offsets[0]) / 2.0


@dataclass(frozen=True)
class Mask:
    coefficients: dict[int, Fraction | float]
    name: str = "custom"

    def __post_init__(self):
        coeffs = {int(k): v for k, v in self.coefficients.items() if v != 0}
        if not coeffs:
            raise ContractViolation("mask has empty support")
        for parity in (EVEN, ODD):
            total = sum(v for k, v in coeffs.items() if k % 2 == parity)
            exact = all(isinstance(v, (int, Fraction)) for v in coeffs.values())
            if (total != 1) if exact else abs(float(total) - 1.0) > 1e-12:
                label = "even" if parity == EVEN else "odd"
                raise ContractViolation(f"{label} sub-mask sums to {float(total)!r}, not 1 (affine invariance)")
        object.__setattr__(self, "coefficients", dict(sorted(coeffs.items())))

    def rule(self, parity: int) -> Stencil:
        """Stencil producing outputs ``2i + parity``."""
        # a_{parity - 2o} multiplies x_{i+o}
        pairs = sorted(((parity - k) // 2, v) for k, v in self.coefficients.items() if k % 2 == parity)
        return Stencil(tuple(o for o, _ in pairs), tuple(v for _, v in pairs))

    @property
    def even(self) -> Stencil:
        return self.rule(EVEN)

    @property
    def odd(self) -> Stencil:
        return self.rule(ODD)

    def to_json(self) -> dict:
        return {"name": self.name, "coefficients": {str(k): str(v) for k, v in self.coefficients.items()}}

    @classmethod
    def from_json(cls, obj: dict) -> "Mask":
        coeffs = {int(k): Fraction(str(v)) if isinstance(v, str) else v for k, v in obj["coefficients"].items()}
        return cls(coeffs, obj.get("name", "custom"))


_FOUR_POINT = re.compile(r"^four-point(?:\((?P<omega>[^)]+)\))?$")
BUILTIN_NAMES = ("lane-riesenfeld-cubic", "four-point", "neg-13-21")


def builtin_mask(name: str, omega: Fraction | float | None = None) -> Mask:
    """Exact rational masks of the built-in schemes.

    ``four-point`` takes its tension ``omega`` either as an argument or in the
    name, as in ``four-point(1/16)``; the default is 1/16.
    """
    if name == "lane-riesenfeld-cubic":
        f = Fraction
        return Mask({-2: f(1, 8), -1: f(1, 2), 0: f(3, 4), 1: f(1, 2), 2: f(1, 8)}, name)
    m = _FOUR_POINT.match(name)
    if m:
        if m.group("omega") is not None:
            omega = Fraction(m.group("omega"))
        w = Fraction(1, 16) if omega is None else Fraction(omega).limit_denominator(10**9)
        half = Fraction(1, 2)
        return Mask({-3: -w, -1: half + w, 0: Fraction(1), 1: half + w, 3: -w}, f"four-point({w})")
    if name == "neg-13-21":
        f = lambda n: Fraction(n, 32)  # noqa: E731
        return Mask({-4: f(-1), -3: f(-1), -2: f(13), -1: f(21), 0: f(21), 1: f(13), 2: f(-1), 3: f(-1)}, name)
    raise UnknownScheme(f"unknown scheme {name!r}; built-ins are {', '.join(BUILTIN_NAMES)}")


class Boundary(str, enum.Enum):
    PERIODIC = "periodic"
    TRUNCATE = "truncate"


@dataclass(frozen=True)
class PointSequence:
    points: np.ndarray
    start: int = 0
    boundary: Boundary = Boundary.PERIODIC

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] < 3:
            raise ContractViolation(f"points must have shape (N, n+1) with n >= 2, got {pts.shape}")
        if np.any(np.abs(np.linalg.norm(pts, axis=1) - 1.0) > 1e-9):
            raise ContractViolation("sequence contains non-unit points")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "boundary", Boundary(self.boundary))

    def __len__(self):
        return self.points.shape[0]

    @property
    def periodic(self) -> bool:
        return self.boundary is Boundary.PERIODIC

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.start, self.start + len(self))

    def consecutive_distances(self) -> np.ndarray:
        pts = self.points
        nxt = np.roll(pts, -1, axis=0) if self.periodic else pts[1:]
        cur = pts if self.periodic else pts[:-1]
        if len(cur) == 0:
            return np.zeros(0)
        return np.atleast_1d(geodesic_distance(cur, nxt))

    @property
    def delta(self) -> float:
        d = self.consecutive_distances()
        return float(d.max()) if d.size else 0.0


@dataclass(frozen=True)
class RefinementDiagnostics:
    delta_before: float
    delta_after: float
    displacement: float

    @property
    def contraction_ratio(self) -> float:
        if self.delta_before == 0.0:
            return 0.0
        return self.delta_after / self.delta_before

    def to_json(self) -> dict:
        return {
            "delta_before": self.delta_before,
            "delta_after": self.delta_after,
            "contraction_ratio": self.contraction_ratio,
            "displacement": self.displacement,
        }


def linear_subdivide(mask: Mask, data, periodic: bool = True) -> np.ndarray:
    """Apply the linear rule to scalars ``(N,)`` or vectors ``(N, d)``.

    Periodic data yields ``2N`` values, index ``2i + e`` at position ``2i + e``.
    Non-periodic data yields only outputs whose full stencil is available,
    starting at the smallest such output index.
    """
    x = np.asarray(data, dtype=float)
    n = x.shape[0]
    if periodic:
        out = np.zeros((2 * n,) + x.shape[1:])
        for parity in (EVEN, ODD):
            rule = mask.rule(parity)
            for o, w in zip(rule.offsets, rule.weights):
                out[parity::2] += float(w) * np.roll(x, -o, axis=0)
        return out
    values = {}
    for parity in (EVEN, ODD):
        rule = mask.rule(parity)
        for i in range(-rule.offsets[0], n - rule.offsets[-1]):
            values[2 * i + parity] = sum(float(w) * x[i + o] for o, w in zip(rule.offsets, rule.weights))
    return np.array([values[k] for k in _contiguous_run(sorted(values))])


def _contiguous_run(keys: list[int]) -> list[int]:
    """Longest run of consecutive integers in sorted ``keys`` (the first one on ties)."""
    best, run = [], []
    for k in keys:
        run = run + [k] if run and k == run[-1] + 1 else [k]
        if len(run) > len(best):
            best = run
    return best


def _stencil_centres(stencils: np.ndarray) -> np.ndarray:
    """Middle point, or geodesic midpoint of the middle pair, of each stencil ``(B, s, d)``."""
    s = stencils.shape[1]
    if s % 2 == 1:
        return stencils[:, s // 2, :]
    mid = stencils[:, s // 2 - 1, :] + stencils[:, s // 2, :]
    return mid / np.linalg.norm(mid, axis=1, keepdims=True)


def gate_stencils(rule: Stencil, stencils: np.ndarray):
    """Vectorised well-definedness gate.

    Returns ``(ok, centres, radii, r_star)`` where ``ok`` is a boolean array
    over the batch and ``r_star`` the certified radius per stencil (NaN when
    the gate fails).
    """
    w = rule.weight_array
    active = stencils[:, w != 0.0, :]
    centres = _stencil_centres(active)
    dists = geodesic_distance(active, np.broadcast_to(centres[:, None, :], active.shape))
    radii = np.max(np.atleast_2d(dists), axis=1)
    a = rule.alpha_minus
    limit = max_input_radius(a, 1.0)
    ok = radii < limit
    _, upper = radius_interval(a, 0.0)
    lower = (1.0 + 2.0 * a) * radii
    r_star = np.where(ok, 0.5 * (lower + upper), np.nan)
    return ok, centres, radii, r_star


def _refine_arrays(mask: Mask, pts: np.ndarray, index_sets, settings: SolverSettings, labels):
    """Solve every output of one refinement step.

    ``pts`` has shape ``(P, N, d)``; ``index_sets[parity]`` is ``(i_values, idx)``
    with ``idx`` of shape ``(M, s)`` indexing into axis 1 of ``pts``.
    Returns ``{parity: (P, M, d)}``.
    """
    out = {}
    n_poly, _, dim = pts.shape
    for parity in (EVEN, ODD):
        rule = mask.rule(parity)
        i_values, idx = index_sets[parity]
        m = idx.shape[0]
        if m == 0:
            out[parity] = np.zeros((n_poly, 0, dim))
            continue
        stencils = pts[:, idx, :].reshape(n_poly * m, len(rule.offsets), dim)
        ok, centres, radii, r_star = gate_stencils(rule, stencils)
        if not np.all(ok):
            bad = int(np.flatnonzero(~ok)[0])
            p, k = divmod(bad, m)
            where = labels(p, 2 * int(i_values[k]) + parity)
            report = well_defined_message(rule, float(radii[bad]))
            raise GateViolation(f"stencil for output {where} is not well defined: {report}", index=2 * int(i_values[k]) + parity, conditions=[report])
        w = rule.weight_array
        if settings.method is Method.NEWTON:
            means = np.array([
                karcher_mean(WeightedConfiguration(st, w), settings, ball=(c, rs))
                for st, c, rs in zip(stencils, centres, r_star)
            ])
        else:
            try:
                means = karcher_mean_batch(stencils, w, tolerance=settings.gradient_tolerance, max_iterations=settings.max_iterations)
            except NoConvergence as exc:
                raise NoConvergence(f"parity {parity} rule: {exc}", exc.iterations) from exc
            dist = np.atleast_1d(geodesic_distance(means, centres))
            outside = dist > r_star + 1e-12
            if np.any(outside):
                bad = int(np.flatnonzero(outside)[0])
                p, k = divmod(bad, m)
                raise LeftCertifiedBall(f"mean for output {labels(p, 2 * int(i_values[k]) + parity)} left the certified ball")
        out[parity] = means.reshape(n_poly, m, dim)
    return out


def well_defined_message(rule: Stencil, radius: float) -> str:
    a = rule.alpha_minus
    limit = max_input_radius(a, 1.0)
    return f"stencil radius {radius:.6g} >= {limit:.6g} allowed for alpha_minus = {a:g}"


def _periodic_index_sets(mask: Mask, n: int):
    sets = {}
    i = np.arange(n)
    for parity in (EVEN, ODD):
        offs = np.array(mask.rule(parity).offsets)
        sets[parity] = (i, (i[:, None] + offs[None, :]) % n)
    return sets


def subdivide_periodic_batch(mask: Mask, polygons: np.ndarray, settings: SolverSettings | None = None) -> np.ndarray:
    """Refine many closed polygons of equal length at once; ``(P, N, d) -> (P, 2N, d)``."""
    settings = settings or SolverSettings(max_iterations=200)
    pts = np.asarray(polygons, dtype=float)
    n_poly, n, dim = pts.shape
    res = _refine_arrays(mask, pts, _periodic_index_sets(mask, n), settings, lambda p, o: f"{o} (polygon {p})")
    out = np.empty((n_poly, 2 * n, dim))
    out[:, 0::2] = res[EVEN]
    out[:, 1::2] = res[ODD]
    return out


def riemannian_subdivide(mask: Mask, data: PointSequence, settings: SolverSettings | None = None) -> PointSequence:
    """One step of the Riemannian analogue of ``mask`` on ``data``."""
    settings = settings or SolverSettings(max_iterations=200)
    if len(data) < 2:
        raise ContractViolation("subdivision needs at least two points")
    if data.periodic:
        out = subdivide_periodic_batch(mask, data.points[None], settings)[0]
        return PointSequence(out, 2 * data.start, data.boundary)

    n = len(data)
    index_sets, valid = {}, set()
    for parity in (EVEN, ODD):
        offs = np.array(mask.rule(parity).offsets)
        i_values = np.arange(data.start - offs[0], data.start + n - offs[-1])
        index_sets[parity] = (i_values, i_values[:, None] + offs[None, :] - data.start)
        valid.update(2 * i_values + parity)
    run = _contiguous_run(sorted(int(v) for v in valid))
    if not run:
        raise ContractViolation(f"sequence of {n} points is too short for the mask support")
    res = _refine_arrays(mask, data.points[None], index_sets, settings, lambda p, o: str(o))
    by_index = {}
    for parity in (EVEN, ODD):
        for i, pt in zip(index_sets[parity][0], res[parity][0]):
            by_index[2 * int(i) + parity] = pt
    return PointSequence(np.array([by_index[k] for k in run]), run[0], data.boundary)


def diagnostics(before: PointSequence, after: PointSequence) -> RefinementDiagnostics:
    """Contraction and displacement of one refinement step."""
    if before.periodic != after.periodic:
        raise LengthMismatch("boundary policies differ")
    if before.periodic and len(after) != 2 * len(before):
        raise LengthMismatch(f"periodic refinement of {len(before)} points must have {2 * len(before)}, got {len(after)}")
    shared = [i for i in before.indices if before.start <= i and 2 * i - after.start in range(len(after))]
    if not before.periodic and not shared and len(after):
        raise LengthMismatch("refined sequence shares no even index with its input")
    disp = 0.0
    if shared:
        idx = np.array(shared)
        d = geodesic_distance(after.points[2 * idx - after.start], before.points[idx - before.start])
        disp = float(np.max(np.atleast_1d(d)))
    return RefinementDiagnostics(before.delta, after.delta, disp)


def iterate(
    mask: Mask,
    data: PointSequence,
    k: int,
    settings: SolverSettings | None = None,
    max_delta: float | None = None,
) -> list[tuple[PointSequence, RefinementDiagnostics]]:
    """Apply ``k`` refinement steps, returning each level with its diagnostics.

    ``max_delta`` is an optional convergence gate: input whose largest
    consecutive distance is not strictly below it is rejected up front.
    """
    if k < 0:
        raise ContractViolation("k must be nonnegative")
    if max_delta is not None and not data.delta < max_delta:
        raise GateViolation(
            f"largest consecutive distance {data.delta:.6g} is not below the certified radius {max_delta:g}",
            conditions=[f"delta < {max_delta:g}"],
        )
    levels = []
    current = data
    for _ in range(k):
        refined = riemannian_subdivide(mask, current, settings)
        levels.append((refined, diagnostics(current, refined)))
        current = refined
    return levels
