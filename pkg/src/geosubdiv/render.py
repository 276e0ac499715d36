"""Orthographic SVG rendering of curves on S^2."""

from __future__ import annotations

import numpy as np

from .errors import DimensionUnsupported
from .frechet import geodesic_average
from .schemes import PointSequence

DEFAULT_VIEW = (1.0, 1.0, 1.0)
ARC_SAMPLES = 32


def view_frame(view) -> tuple[np.ndarray, np.ndarray]:
    """Screen axes (right, up) orthogonal to the view direction."""
    d = np.asarray(view, dtype=float)
    d = d / np.linalg.norm(d)
    up = np.array([0.0, 0.0, 1.0])
    if abs(d @ up) > 0.999:
        up = np.array([0.0, 1.0, 0.0])
    right = np.cross(up, d)
    right /= np.linalg.norm(right)
    return right, np.cross(d, right)


def geodesic_polyline(seq: PointSequence, samples: int = ARC_SAMPLES) -> np.ndarray:
    """Each edge replaced by ``samples`` points along its great arc."""
    pts = seq.points
    n = len(pts)
    edges = n if seq.periodic else n - 1
    out = []
    for k in range(edges):
        a, b = pts[k], pts[(k + 1) % n]
        out.extend(geodesic_average(a, b, s) for s in np.arange(samples) / samples)
    if not seq.periodic:
        out.append(pts[-1])
    return np.array(out)


def _path_data(xy: np.ndarray, closed: bool) -> str:
    cmds = [f"M {xy[0, 0]:.3f} {xy[0, 1]:.3f}"]
    cmds += [f"L {x:.3f} {y:.3f}" for x, y in xy[1:]]
    if closed:
        cmds.append("Z")
    return " ".join(cmds)


def render_svg(
    polygon: PointSequence,
    refined: PointSequence | None = None,
    view=DEFAULT_VIEW,
    size: int = 512,
) -> str:
    """SVG with the sphere outline, the input polygon drawn with geodesic edges,
    and optionally the refined curve."""
    if polygon.points.shape[1] != 3:
        raise DimensionUnsupported("rendering is only available for points on S^2")
    right, up = view_frame(view)
    half = size / 2.0
    scale = 0.45 * size

    def project(p):
        return np.column_stack([half + scale * (p @ right), half - scale * (p @ up)])

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        f'<circle cx="{half:.3f}" cy="{half:.3f}" r="{scale:.3f}" fill="none" stroke="#888888" stroke-width="1"/>',
        f'<path id="polygon" d="{_path_data(project(geodesic_polyline(polygon)), polygon.periodic)}" '
        'fill="none" stroke="#1f4e9e" stroke-width="1.5"/>',
    ]
    if refined is not None:
        parts.append(
            f'<path id="refined" d="{_path_data(project(refined.points), refined.periodic)}" '
            'fill="none" stroke="#c0392b" stroke-width="1"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
