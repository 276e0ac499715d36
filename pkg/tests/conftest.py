import math

import numpy as np
import pytest

from geosubdiv.schemes import Boundary, PointSequence


def regular_polygon(delta: float, n: int = 6, dim: int = 3, rotation=None) -> np.ndarray:
    """Closed regular n-gon on a small circle whose consecutive distance is exactly ``delta``."""
    s = math.sin(delta / 2) / math.sin(math.pi / n)
    if s > 1:
        raise ValueError(f"no regular {n}-gon with side {delta}")
    rho = math.asin(s)
    ang = np.arange(n) * 2 * math.pi / n
    pts = np.zeros((n, dim))
    pts[:, 0] = math.sin(rho) * np.cos(ang)
    pts[:, 1] = math.sin(rho) * np.sin(ang)
    pts[:, -1] = math.cos(rho)
    if rotation is not None:
        pts = pts @ rotation.T
    return pts


def closed(points) -> PointSequence:
    return PointSequence(np.asarray(points, dtype=float), 0, Boundary.PERIODIC)


def equator(angles, dim: int = 3) -> np.ndarray:
    a = np.asarray(angles, dtype=float)
    pts = np.zeros((a.size, dim))
    pts[:, 0], pts[:, 1] = np.cos(a), np.sin(a)
    return pts


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
