"""
Spherical geometry on the unit sphere S^n embedded in R^{n+1}.

Points are plain numpy arrays of unit norm; tangent vectors at ``x`` are
arrays orthogonal to ``x``. All maps broadcast over leading axes, so a batch
of points has shape ``(..., n+1)``.

The Hessians returned here are full ambient ``(n+1) x (n+1)`` matrices of the
squared distance composed with the exponential chart. Use ``tangent_basis``
and ``tangent_block`` to reduce them to the intrinsic ``n x n`` block.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AntipodalPoints, ContractViolation, DomainError

UNIT_TOL = 1e-9
ANTIPODAL_TOL = 1e-9
_PSI_SERIES_CUTOFF = 1e-4


def as_unit_point(coords, renormalize: bool = False) -> np.ndarray:
    """Validate ``coords`` as a point of S^n (n >= 2).

    With ``renormalize=True`` any nonzero vector is projected to the sphere;
    otherwise a norm deviating from 1 by more than ``UNIT_TOL`` is rejected.
    """
    x = np.asarray(coords, dtype=float)
    if x.ndim != 1 or x.shape[0] < 3:
        raise ContractViolation(f"expected a vector of length >= 3, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ContractViolation("point has non-finite coordinates")
    norm = np.linalg.norm(x)
    if renormalize:
        if norm == 0.0:
            raise ContractViolation("cannot normalize the zero vector")
        return x / norm
    if abs(norm - 1.0) > UNIT_TOL:
        raise ContractViolation(f"point is not unit length (norm={norm!r})")
    return x


def as_tangent(base: np.ndarray, vec) -> np.ndarray:
    """Validate ``vec`` as a tangent vector at ``base``."""
    w = np.asarray(vec, dtype=float)
    if w.shape != base.shape:
        raise ContractViolation(f"tangent vector shape {w.shape} != base shape {base.shape}")
    if abs(float(w @ base)) > UNIT_TOL * max(1.0, float(np.linalg.norm(w))):
        raise ContractViolation("vector is not orthogonal to its base point")
    return w


def _inner(x, y):
    return np.sum(np.asarray(x) * np.asarray(y), axis=-1)


def _check_inner(c):
    if np.any(np.abs(c) > 1.0 + UNIT_TOL):
        raise ContractViolation(f"inner product {np.max(np.abs(c))!r} outside [-1, 1]; points not unit")


def geodesic_distance(x, y):
    """Great-circle distance in radians, in ``[0, pi]``.

    Equals ``arccos(<x, y>)`` but is evaluated as ``2 atan2(|x-y|, |x+y|)``
    which keeps full relative accuracy for nearby points.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    _check_inner(_inner(x, y))
    d = 2.0 * np.arctan2(np.linalg.norm(x - y, axis=-1), np.linalg.norm(x + y, axis=-1))
    return float(d) if np.ndim(d) == 0 else d


def exp_map(base, w):
    """Exponential map ``cos|w| x + sin|w|/|w| w``; ``exp_x(0) = x``."""
    x = np.asarray(base, dtype=float)
    w = np.asarray(w, dtype=float)
    nrm = np.linalg.norm(w, axis=-1, keepdims=True)
    # sin(s)/s with its analytic value 1 at s = 0
    sinc = np.sinc(nrm / np.pi)
    y = np.cos(nrm) * x + sinc * w
    return y / np.linalg.norm(y, axis=-1, keepdims=True)


def log_map(x, y):
    """Inverse exponential map at ``x``; raises ``AntipodalPoints`` near ``-x``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    c = _inner(x, y)
    _check_inner(c)
    if np.any(c <= -1.0 + ANTIPODAL_TOL):
        raise AntipodalPoints("log map undefined for antipodal points")
    v = y - c[..., None] * x
    # project out residual normal component left by rounding
    v = v - _inner(v, x)[..., None] * x
    vn = np.linalg.norm(v, axis=-1, keepdims=True)
    d = 2.0 * np.arctan2(np.linalg.norm(x - y, axis=-1), np.linalg.norm(x + y, axis=-1))[..., None]
    scale = np.where(vn > 0.0, d / np.where(vn > 0.0, vn, 1.0), 1.0)
    return scale * v


def _psi(s):
    """s/tan(s) on [0, pi) without domain checks; 1 at s = 0."""
    s = np.asarray(s, dtype=float)
    small = np.abs(s) < _PSI_SERIES_CUTOFF
    safe = np.where(small, 1.0, s)
    out = np.where(small, 1.0 - s * s / 3.0 - s**4 / 45.0, safe / np.tan(safe))
    return float(out) if out.ndim == 0 else out


def psi(s):
    """``s / tan(s)`` for ``0 <= s < pi/2``.

    The value at 0 is the analytic limit 1. Outside the range a
    ``DomainError`` is raised; this is the range in which the function is
    positive and decreasing, which the certificate bounds rely on.
    """
    arr = np.asarray(s, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr >= math.pi / 2):
        bad = arr[~(np.isfinite(arr) & (arr >= 0.0) & (arr < math.pi / 2))]
        raise DomainError(f"psi evaluated outside [0, pi/2) at s = {bad.flat[0]:.6g} ({bad.size} values)")
    return _psi(arr)


def grad_sq_dist(x, y):
    """Riemannian gradient of ``dist(., y)^2`` at ``x``: ``-2 log_x(y)``."""
    return -2.0 * log_map(x, y)


def hessian_sq_dist(x, y) -> np.ndarray:
    """Ambient Hessian ``2 (v v^T + psi(rho) (I - x x^T - v v^T))`` with ``y = exp_x(rho v)``.

    At ``x == y`` this reduces to ``2 (I - x x^T)``.
    """
    x = np.asarray(x, dtype=float)
    w = log_map(x, y)
    rho = float(np.linalg.norm(w))
    eye = np.eye(x.shape[0])
    proj = eye - np.outer(x, x)
    if rho == 0.0:
        return 2.0 * proj
    v = w / rho
    vv = np.outer(v, v)
    return 2.0 * (vv + _psi(rho) * (proj - vv))


def tangent_basis(x) -> np.ndarray:
    """Orthonormal basis of the tangent space at ``x`` as ``(n+1, n)`` columns.

    Built from the Householder reflection exchanging ``x`` and the last
    canonical basis vector, so in these coordinates ``x`` is the north pole.
    """
    x = np.asarray(x, dtype=float)
    d = x.shape[0]
    e = np.zeros(d)
    e[-1] = 1.0
    u = x - e
    uu = float(u @ u)
    if uu < 1e-30:
        return np.eye(d)[:, :-1]
    refl = np.eye(d) - 2.0 * np.outer(u, u) / uu
    return refl[:, :-1]


def tangent_block(hessian: np.ndarray, x) -> np.ndarray:
    """Restrict an ambient Hessian at ``x`` to its ``n x n`` tangent block."""
    basis = tangent_basis(x)
    return basis.T @ hessian @ basis


@dataclass(frozen=True)
class WeightedConfiguration:
    """Points ``x_j`` with real weights ``alpha_j`` summing to one."""

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        w = np.atleast_1d(np.asarray(self.weights, dtype=float))
        if pts.shape[0] != w.shape[0]:
            raise ContractViolation(f"{pts.shape[0]} points but {w.shape[0]} weights")
        if abs(w.sum() - 1.0) > 1e-12:
            raise ContractViolation(f"weights sum to {w.sum()!r}, expected 1")
        norms = np.linalg.norm(pts, axis=1)
        if np.any(np.abs(norms - 1.0) > UNIT_TOL):
            raise ContractViolation("configuration contains non-unit points")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    @property
    def dimension(self) -> int:
        return self.points.shape[1]

    @property
    def alpha_minus(self) -> float:
        """Total mass of the negative weights."""
        return float(-self.weights[self.weights < 0].sum())

    def active(self) -> "WeightedConfiguration":
        """Drop points whose weight is exactly zero."""
        keep = self.weights != 0.0
        return WeightedConfiguration(self.points[keep], self.weights[keep])


def objective_value(config: WeightedConfiguration, x) -> float:
    """``sum_j alpha_j dist(x_j, x)^2``."""
    active = config.active()
    c = _inner(active.points, np.asarray(x, dtype=float))
    if np.any(c <= -1.0 + ANTIPODAL_TOL):
        raise AntipodalPoints("objective evaluated at a point antipodal to a weighted data point")
    d = geodesic_distance(active.points, np.broadcast_to(x, active.points.shape))
    return float(active.weights @ np.square(d))


def objective_gradient(config: WeightedConfiguration, x) -> np.ndarray:
    """``-2 sum_j alpha_j log_x(x_j)``."""
    active = config.active()
    logs = log_map(np.broadcast_to(x, active.points.shape), active.points)
    return -2.0 * (active.weights @ logs)


def objective_hessian(config: WeightedConfiguration, x) -> np.ndarray:
    """Weighted sum of the ambient squared-distance Hessians at ``x``."""
    active = config.active()
    x = np.asarray(x, dtype=float)
    out = np.zeros((x.shape[0], x.shape[0]))
    for wj, xj in zip(active.weights, active.points):
        out += wj * hessian_sq_dist(x, xj)
    return out
