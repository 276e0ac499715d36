"""
Independent numerical oracles and the seeded validation suite.

The oracles deliberately avoid the library's own geometry: distances use a
clipped ``arccos``, tangent frames come from ``scipy.linalg.null_space`` and
charts are built inline. Finite differences check the gradient and Hessian
formulas, exhaustive grid search checks the Karcher mean, and numerical
traces of the minimiser curve check the certificate speed bounds.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.linalg import null_space

from . import certify as cert_mod
from .frechet import SolverSettings, karcher_mean
from .schemes import builtin_mask, subdivide_periodic_batch
from .sphere_core import (
    WeightedConfiguration,
    exp_map,
    log_map,
    objective_gradient,
    objective_hessian,
)

SCHEMA_VERSION = 1


def random_points(rng: np.random.Generator, count: int, dim: int = 3) -> np.ndarray:
    p = rng.normal(size=(count, dim))
    return p / np.linalg.norm(p, axis=1, keepdims=True)


def random_rotation(rng: np.random.Generator, dim: int = 3) -> np.ndarray:
    q, r = np.linalg.qr(rng.normal(size=(dim, dim)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def random_tangent(rng: np.random.Generator, x: np.ndarray, length: float) -> np.ndarray:
    v = rng.normal(size=x.shape)
    v -= (v @ x) * x
    return length * v / np.linalg.norm(v)


def _acos_dist(x, y):
    return np.arccos(np.clip(np.sum(x * y, axis=-1), -1.0, 1.0))


def _chord_dist(x, y):
    """Accurate for nearby points, unlike the clipped arccos."""
    return 2.0 * np.arcsin(np.clip(0.5 * np.linalg.norm(x - y, axis=-1), 0.0, 1.0))


def _oracle_objective(points, weights, x):
    return float(weights @ _acos_dist(points, x) ** 2)


def _chart_point(x, frame, u):
    """Exponential chart at ``x`` built from scratch: cos|w| x + sin|w| w/|w|."""
    w = frame @ u
    n = np.linalg.norm(w)
    if n == 0.0:
        return x
    return math.cos(n) * x + math.sin(n) * w / n


def random_configuration(rng, count: int, radius: float, dim: int = 3, negative: bool = False):
    """Points in a ball of the given radius with weights summing to one."""
    centre = random_points(rng, 1, dim)[0]
    pts = np.array([exp_map(centre, random_tangent(rng, centre, radius * rng.uniform(0, 1))) for _ in range(count)])
    w = rng.uniform(0.1, 1.0, count)
    if negative and count > 2:
        w[0] = -rng.uniform(0.02, 0.15)
    w = w / w.sum()
    return WeightedConfiguration(pts, w)


def gradient_fd_error(config: WeightedConfiguration, x: np.ndarray, h: float = 1e-5) -> float:
    """Relative error of the analytic gradient against central differences."""
    frame = null_space(x[None, :])
    fd = np.empty(frame.shape[1])
    for k in range(frame.shape[1]):
        e = np.zeros(frame.shape[1])
        e[k] = h
        fp = _oracle_objective(config.points, config.weights, _chart_point(x, frame, e))
        fm = _oracle_objective(config.points, config.weights, _chart_point(x, frame, -e))
        fd[k] = (fp - fm) / (2 * h)
    analytic = frame.T @ objective_gradient(config, x)
    return float(np.linalg.norm(fd - analytic) / max(np.linalg.norm(analytic), 1.0))


def hessian_fd_error(config: WeightedConfiguration, x: np.ndarray, h: float = 1e-5) -> float:
    """Relative error of the tangent Hessian block against second differences."""
    frame = null_space(x[None, :])
    n = frame.shape[1]

    def f(u):
        return _oracle_objective(config.points, config.weights, _chart_point(x, frame, u))

    fd = np.empty((n, n))
    eye = np.eye(n) * h
    for a in range(n):
        for b in range(a, n):
            val = (f(eye[a] + eye[b]) - f(eye[a] - eye[b]) - f(-eye[a] + eye[b]) + f(-eye[a] - eye[b])) / (4 * h * h)
            fd[a, b] = fd[b, a] = val
    analytic = frame.T @ objective_hessian(config, x) @ frame
    return float(np.linalg.norm(fd - analytic) / max(np.linalg.norm(analytic), 1.0))


def grid_search_mean(points, weights, extent: float = 0.6, step: float = 1e-3, final_step: float = 1e-7) -> np.ndarray:
    """Minimise the weighted squared distance on S^2 by exhaustive zooming grids.

    The grid lives in the gnomonic chart ``normalize(c + u e1 + v e2)`` around
    the normalized ambient average ``c``. The first grid spans ``+-extent``
    with spacing ``step``; each following grid spans two cells around the
    incumbent with a ten times finer spacing, down to ``final_step``.
    """
    points = np.asarray(points, dtype=float)
    weights = np.asarray(weights, dtype=float)
    c = weights @ points
    c = c / np.linalg.norm(c)
    e1, e2 = null_space(c[None, :]).T

    def evaluate(us, vs):
        uu, vv = np.meshgrid(us, vs, indexing="ij")
        p = c + uu[..., None] * e1 + vv[..., None] * e2
        p /= np.linalg.norm(p, axis=-1, keepdims=True)
        val = np.zeros(uu.shape)
        for w, q in zip(weights, points):
            val += w * _acos_dist(p, q) ** 2
        k = np.unravel_index(np.argmin(val), val.shape)
        return uu[k], vv[k], val[k]

    grid = np.arange(-extent, extent + step / 2, step)
    best = (0.0, 0.0, math.inf)
    for lo in range(0, grid.size, 200):
        # row blocks keep memory bounded
        cand = evaluate(grid[lo:lo + 200], grid)
        if cand[2] < best[2]:
            best = cand
    best_u, best_v = best[0], best[1]
    h = step
    while h > final_step * 1.0001:
        fine = np.linspace(-2 * h, 2 * h, 41)
        best_u, best_v, _ = evaluate(best_u + fine, best_v + fine)
        h /= 10.0
    return _normalize(c + best_u * e1 + best_v * e2)


def _normalize(p):
    return p / np.linalg.norm(p)


def random_polygons(rng, count: int, size: int, delta_below: float, lo: float = 0.3, dim: int = 3) -> np.ndarray:
    """Closed polygons whose largest consecutive distance lies in ``[lo, 1) * delta_below``.

    Vertices are placed around a random centre in angular order and the
    whole polygon is scaled (in the exponential chart) to the target ``delta``.
    """
    out = np.empty((count, size, dim))
    for p in range(count):
        centre = random_points(rng, 1, dim)[0]
        frame = null_space(centre[None, :])
        ang = np.sort(rng.uniform(0, 2 * np.pi, size))
        rad = rng.uniform(0.3, 1.0, size)
        coords = np.zeros((size, frame.shape[1]))
        coords[:, 0] = rad * np.cos(ang)
        coords[:, 1] = rad * np.sin(ang)
        if frame.shape[1] > 2:
            coords[:, 2:] = 0.2 * rng.normal(size=(size, frame.shape[1] - 2))
        tangent = coords @ frame.T
        target = delta_below * rng.uniform(lo, 1.0)

        def delta(scale):
            x = exp_map(np.broadcast_to(centre, tangent.shape), scale * tangent)
            return _acos_dist(x, np.roll(x, -1, axis=0)).max(), x

        a, b = 0.0, 1.0
        while delta(b)[0] < target:
            b *= 2.0
        for _ in range(60):
            mid = 0.5 * (a + b)
            if delta(mid)[0] < target:
                a = mid
            else:
                b = mid
        d, x = delta(a)
        if not d < delta_below:
            raise AssertionError("polygon generation overshot the requested bound")
        out[p] = x
    return out


def random_stencil(rng, size: int, r: float, dim: int = 3) -> np.ndarray:
    """Random walk of ``size`` points with consecutive distances in ``[0.3 r, r]``."""
    pts = [random_points(rng, 1, dim)[0]]
    for _ in range(size - 1):
        pts.append(exp_map(pts[-1], random_tangent(rng, pts[-1], r * rng.uniform(0.3, 1.0))))
    return np.array(pts)


def _check(name, tolerance, value, passed=None, **extra):
    ok = value <= tolerance if passed is None else passed
    entry = {"name": name, "tolerance": tolerance, "value": value, "margin": tolerance - value, "passed": bool(ok)}
    entry.update(extra)
    return entry


def check_derivatives(rng, trials: int = 100, h: float = 1e-5) -> list[dict]:
    g_err, h_err = 0.0, 0.0
    for k in range(trials):
        cfg = random_configuration(rng, int(rng.integers(2, 6)), 0.6, negative=bool(k % 2))
        x = exp_map(cfg.points[0], random_tangent(rng, cfg.points[0], rng.uniform(0.05, 0.5)))
        g_err = max(g_err, gradient_fd_error(cfg, x, h))
        h_err = max(h_err, hessian_fd_error(cfg, x, h))
    return [
        _check("gradient vs finite differences", 1e-5, g_err, trials=trials),
        _check("hessian vs finite differences", 1e-5, h_err, trials=trials),
    ]


def check_roundtrips(rng, samples: int = 1000) -> list[dict]:
    worst_el, worst_le = 0.0, 0.0
    for _ in range(samples):
        x, y = random_points(rng, 2)
        if x @ y < -0.99:
            y = -y
        worst_el = max(worst_el, float(np.linalg.norm(exp_map(x, log_map(x, y)) - y)))
        w = random_tangent(rng, x, rng.uniform(0.0, 3.0))
        worst_le = max(worst_le, float(np.linalg.norm(log_map(x, exp_map(x, w)) - w)))
    return [
        _check("exp(log(y)) = y", 1e-9, worst_el, samples=samples),
        _check("log(exp(w)) = w", 1e-9, worst_le, samples=samples),
    ]


def check_grid_means(rng, instances: int = 20) -> list[dict]:
    worst = 0.0
    for _ in range(instances):
        cfg = random_configuration(rng, int(rng.integers(2, 5)), 0.5)
        mean = karcher_mean(cfg, SolverSettings())
        oracle = grid_search_mean(cfg.points, cfg.weights)
        worst = max(worst, float(_chord_dist(mean, oracle)))
    return [_check("karcher mean vs grid search", 2e-6, worst, instances=instances)]


EMPIRICAL_SPECS = ("lane-riesenfeld-cubic", "four-point", "neg-13-21")


def check_empirical_domination(rng, polygons: int = 1000, levels: int = 4) -> list[dict]:
    """Measured contraction and displacement never exceed the certified constants."""
    out = []
    for name in EMPIRICAL_SPECS:
        cert = cert_mod.certify_spec(cert_mod.builtin_spec(name))
        mask = builtin_mask(cert_mod.builtin_spec(name)["scheme"])
        sizes = rng.integers(5, 11, polygons)
        worst_ratio, worst_disp, violations, min_dx = 0.0, 0.0, 0, np.inf
        for size in np.unique(sizes):
            x = random_polygons(rng, int(np.sum(sizes == size)), int(size), cert.r0)
            for _ in range(levels):
                y = subdivide_periodic_batch(mask, x)
                dx = _chord_dist(x, np.roll(x, -1, axis=1)).max(axis=1)
                dy = _chord_dist(y, np.roll(y, -1, axis=1)).max(axis=1)
                disp = _chord_dist(y[:, 0::2], x).max(axis=1)
                ratio = dy / dx
                violations += int(np.sum(ratio > cert.mu) + np.sum(disp > cert.displacement_coeff * dx + 1e-12))
                worst_ratio = max(worst_ratio, float(ratio.max()))
                worst_disp = max(worst_disp, float((disp / dx).max()))
                min_dx = min(min_dx, float(dx.min()))
                x = y
        out.append(_check(f"{name}: contraction <= mu", cert.mu, worst_ratio, polygons=polygons, levels=levels))
        # Rounding floor of the distance evaluation, relative to the smallest delta seen.
        out.append(
            _check(
                f"{name}: displacement <= C delta",
                cert.displacement_coeff,
                worst_disp,
                passed=worst_disp <= cert.displacement_coeff + 1e-12 / min_dx,
                polygons=polygons,
            )
        )
        out.append(_check(f"{name}: violations", 0, violations))
    return out


def check_trace_domination(rng, stencils: int = 100, samples: int = 6) -> list[dict]:
    """Speeds of numerically traced minimiser curves stay below the certified bound."""
    out = []
    for name in EMPIRICAL_SPECS:
        spec = cert_mod.builtin_spec(name)
        r0 = float(spec["r0"])
        for label in ("even", "odd"):
            path = cert_mod.CoefficientPath.from_json(spec["paths"][label])
            if not np.any(path.slope):
                continue
            c0 = float(spec[f"C0_{label}"])
            violations, worst = 0, 0.0
            for _ in range(stencils):
                pts = random_stencil(rng, len(path), r0 * rng.uniform(0.2, 1.0))
                r = float(_chord_dist(pts[:-1], pts[1:]).max())
                for s in cert_mod.trace_gamma(pts, path, samples):
                    bound = cert_mod.speed_bound(path, r, c0, s.t)
                    measured = max(s.fd_speed, s.analytic_speed)
                    worst = max(worst, measured / bound)
                    violations += int(measured > bound * (1 + 1e-9) + 1e-12)
            out.append(_check(f"{name} {label}: speed / bound", 1.0, worst, stencils=stencils))
            out.append(_check(f"{name} {label}: speed bound violations", 0, violations))
    return out


def run_suite(seed: int = 0, quick: bool = False) -> dict:
    """Run every oracle check with one seeded generator and collect a report."""
    rng = np.random.default_rng(seed)
    checks = []
    checks += check_derivatives(rng, 20 if quick else 100)
    checks += check_roundtrips(rng, 200 if quick else 1000)
    checks += check_grid_means(rng, 4 if quick else 20)
    checks += check_trace_domination(rng, 10 if quick else 100)
    checks += check_empirical_domination(rng, 100 if quick else 1000)
    return {
        "schema_version": SCHEMA_VERSION,
        "seed": seed,
        "quick": quick,
        "passed": all(c["passed"] for c in checks),
        "checks": checks,
    }
