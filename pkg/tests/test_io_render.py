import json
import re

import numpy as np
import pytest
from conftest import closed, equator, regular_polygon

from geosubdiv.errors import ContractViolation, DimensionUnsupported
from geosubdiv.pointio import dump_csv, dump_json, load_points, normalize_rows, parse_csv, save_points
from geosubdiv.render import geodesic_polyline, render_svg, view_frame
from geosubdiv.schemes import Boundary, PointSequence, builtin_mask, iterate


def test_unit_norm_policy():
    pts, flag = normalize_rows(np.array([[0.0, 0.0, 1.0 + 1e-12]]))
    assert not flag
    pts, flag = normalize_rows(np.array([[0.0, 0.0, 1.0 + 1e-7]]))
    assert flag and np.linalg.norm(pts[0]) == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(ContractViolation):
        normalize_rows(np.array([[0.0, 0.0, 1.01]]))
    with pytest.raises(ContractViolation):
        normalize_rows(np.array([[0.0, np.nan, 1.0]]))


def test_csv_comments_and_errors():
    pts = parse_csv("# header\n1,0,0\n\n0,1,0\n")
    assert pts.shape == (2, 3)
    with pytest.raises(ContractViolation):
        parse_csv("1,0,0\n0,1\n")
    with pytest.raises(ContractViolation):
        parse_csv("1,0,x\n")
    with pytest.raises(ContractViolation):
        parse_csv("# nothing\n")


@pytest.mark.parametrize("suffix", [".json", ".csv"])
def test_roundtrip_files(tmp_path, suffix):
    seq = closed(regular_polygon(0.3, 7))
    path = tmp_path / f"poly{suffix}"
    save_points(seq, path)
    again, renorm = load_points(path)
    assert not renorm
    assert np.array_equal(again.points, seq.points)
    assert again.periodic


def test_json_boundary_and_dimension(tmp_path):
    seq = PointSequence(equator([0, 0.1, 0.2]), 0, Boundary.TRUNCATE)
    obj = json.loads(dump_json(seq))
    assert obj["periodic"] is False and obj["dimension"] == 3
    path = tmp_path / "p.json"
    path.write_text(json.dumps({"dimension": 4, "points": seq.points.tolist()}))
    with pytest.raises(ContractViolation):
        load_points(path)
    assert "truncate" in dump_csv(seq)


def test_view_frame_orthonormal():
    right, up = view_frame((1, 1, 1))
    d = np.ones(3) / np.sqrt(3)
    assert np.allclose([right @ d, up @ d, right @ up], 0, atol=1e-15)
    right, up = view_frame((0, 0, 1))
    assert np.allclose(np.cross(right, up), [0, 0, 1])


def test_geodesic_polyline_sampling():
    seq = closed(regular_polygon(0.3, 5))
    assert geodesic_polyline(seq).shape == (5 * 32, 3)
    open_seq = PointSequence(seq.points, 0, Boundary.TRUNCATE)
    assert geodesic_polyline(open_seq).shape == (4 * 32 + 1, 3)


def test_svg_structure_and_determinism():
    seq = closed(regular_polygon(0.2, 6))
    refined = iterate(builtin_mask("lane-riesenfeld-cubic"), seq, 5)[-1][0]
    svg = render_svg(seq, refined)
    assert svg == render_svg(seq, refined)
    assert svg.count("<circle") == 1
    assert len(re.findall(r"<path ", svg)) == 2
    assert re.search(r'id="refined" d="[^"]*Z"', svg)


def test_svg_polygon_only_and_open_path():
    seq = PointSequence(equator([0, 0.2, 0.4]), 0, Boundary.TRUNCATE)
    svg = render_svg(seq)
    assert len(re.findall(r"<path ", svg)) == 1
    assert not re.search(r'd="[^"]*Z"', svg)


def test_svg_rejects_higher_dimension():
    with pytest.raises(DimensionUnsupported):
        render_svg(closed(regular_polygon(0.2, 6, dim=4)))
