import json
import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from quincuncial import (DomainError, GeoCoord, GeoPath, MapPath, SvgStyle, densify_path,
                         get_projection, graticule, load_geojson, project_path, render_svg)
from quincuncial.types import angular_distance

SVG_NS = "{http://www.w3.org/2000/svg}"


def parallel(lat_deg, step=0.5):
    lons = np.arange(0.0, 360.0, step)
    return GeoPath(tuple(GeoCoord.from_degrees(lat_deg, lo) for lo in lons), closed=True)


def meridian(lon_deg, lo=-90.0, hi=90.0, step=0.5):
    lats = np.linspace(lo, hi, int(round((hi - lo) / step)) + 1)
    return GeoPath(tuple(GeoCoord.from_degrees(la, lon_deg) for la in lats))


def max_step(mp):
    return max(np.max(np.hypot(*np.diff(np.asarray(s), axis=0).T)) for s in mp.segments)


def on_boundary(pt):
    return abs(max(abs(pt[0]), abs(pt[1])) - 1.0) <= 1e-12


# --- graticule --------------------------------------------------------------

@pytest.mark.parametrize("spacing, count", [(10, 17 + 36), (30, 5 + 12), (45, 3 + 8)])
def test_graticule_counts(spacing, count):
    assert len(graticule(spacing)) == count


@pytest.mark.parametrize("args", [(7,), (0,), (-10,), (10, 0.0), (10, 20.0)])
def test_graticule_rejects(args):
    with pytest.raises(ValueError):
        graticule(*args)


def test_graticule_structure():
    paths = graticule(30, 0.5)
    parallels = [p for p in paths if p.closed]
    meridians = [p for p in paths if not p.closed]
    assert len(parallels) == 5 and len(meridians) == 12
    phi, lam = meridians[0].arrays()
    assert phi[0] == pytest.approx(-math.pi / 2) and phi[-1] == pytest.approx(math.pi / 2)
    for p in paths:
        phi, lam = p.arrays()
        assert np.max(angular_distance(phi[:-1], lam[:-1], phi[1:], lam[1:])) <= math.radians(0.5) + 1e-12


# --- densify -------------------------------------------------------------------

def test_densify_path_follows_great_circle():
    a = GeoCoord.from_degrees(10, 20)
    b = GeoCoord.from_degrees(-30, 80)
    d = densify_path(GeoPath((a, b)), 0.5)
    phi, lam = d.arrays()
    assert (phi[0], lam[0]) == pytest.approx((a.phi, a.lam))
    assert (phi[-1], lam[-1]) == pytest.approx((b.phi, b.lam))
    assert np.max(angular_distance(phi[:-1], lam[:-1], phi[1:], lam[1:])) <= math.radians(0.5)
    va = np.array([math.cos(a.phi) * math.cos(a.lam), math.cos(a.phi) * math.sin(a.lam), math.sin(a.phi)])
    vb = np.array([math.cos(b.phi) * math.cos(b.lam), math.cos(b.phi) * math.sin(b.lam), math.sin(b.phi)])
    normal = np.cross(va, vb)
    pts = np.stack([np.cos(phi) * np.cos(lam), np.cos(phi) * np.sin(lam), np.sin(phi)], axis=1)
    assert np.max(np.abs(pts @ normal)) <= 1e-12


def test_densify_closed_path_includes_closing_edge():
    ring = GeoPath(tuple(GeoCoord.from_degrees(*c) for c in [(0, 0), (0, 10), (10, 10)]), True)
    d = densify_path(ring, 0.5)
    assert d.closed
    phi, lam = d.arrays()
    last_gap = angular_distance(phi[-1], lam[-1], phi[0], lam[0])
    assert last_gap <= math.radians(0.5) + 1e-12


# --- projection of paths ------------------------------------------------------

def test_equator_is_one_closed_diamond():
    mp = project_path(parallel(0))
    assert len(mp) == 1
    seg = np.asarray(mp.segments[0])
    assert np.allclose(seg[0], seg[-1])
    assert np.max(np.abs(np.abs(seg[:, 0]) + np.abs(seg[:, 1]) - 1)) <= 1e-12


def test_northern_parallel_is_one_closed_curve():
    mp = project_path(parallel(40))
    assert len(mp) == 1
    seg = np.asarray(mp.segments[0])
    assert np.allclose(seg[0], seg[-1])


@pytest.mark.parametrize("lat", [-10, -40, -80])
def test_southern_parallel_splits_in_four(lat):
    mp = project_path(parallel(lat))
    assert len(mp) == 4
    for seg in mp.segments:
        assert on_boundary(seg[0]) and on_boundary(seg[-1])


def test_meridian_inside_octant_is_one_line():
    mp = project_path(meridian(30))
    assert len(mp) == 1
    seg = mp.segments[0]
    assert abs(seg[0][0]) == pytest.approx(1) and abs(seg[0][1]) == pytest.approx(1)
    assert seg[-1] == pytest.approx((0.0, 0.0), abs=1e-12)


def test_antimeridian_south_half_runs_along_bottom_edge_both_ways():
    mp = project_path(meridian(180, -90, 0))
    assert len(mp) == 2
    ends = sorted((tuple(np.round(s[0], 12)), tuple(np.round(s[-1], 12))) for s in mp.segments)
    starts = {e[0] for e in ends} | {e[1] for e in ends}
    assert (0.0, -1.0) in starts
    assert (-1.0, -1.0) in starts and (1.0, -1.0) in starts


def test_projected_graticule_stays_in_square_and_is_smooth():
    for p in graticule(10, 0.5):
        mp = project_path(p)
        for seg in mp.segments:
            assert np.all(np.abs(np.asarray(seg)) <= 1 + 1e-12)
        assert max_step(mp) < 0.1


def test_path_crossing_interruption_is_split():
    # a southern arc crossing the 90E meridian
    path = densify_path(GeoPath((GeoCoord.from_degrees(-30, 80), GeoCoord.from_degrees(-30, 100))))
    mp = project_path(path)
    assert len(mp) == 2
    assert on_boundary(mp.segments[0][-1]) and on_boundary(mp.segments[1][0])


def test_northern_crossing_is_not_split():
    path = densify_path(GeoPath((GeoCoord.from_degrees(30, 80), GeoCoord.from_degrees(30, 100))))
    assert len(project_path(path)) == 1


def test_sparse_path_rejected():
    with pytest.raises(DomainError):
        project_path(GeoPath((GeoCoord(0, 0), GeoCoord(0, 1))))


def test_collignon_paths():
    mp = project_path(parallel(-40), projection=get_projection("collignon"))
    assert len(mp) == 4


# --- SVG ---------------------------------------------------------------------

def render_graticule(**kw):
    return render_svg([project_path(p) for p in graticule(10, 0.5)], **kw)


def test_svg_is_valid_xml_with_one_path_per_line():
    root = ET.fromstring(render_graticule())
    assert root.tag == f"{SVG_NS}svg" and root.get("version") == "1.1"
    assert len(root.findall(f".//{SVG_NS}path")) == 53


def test_svg_coordinates_inside_viewport():
    svg = render_graticule(size=400)
    root = ET.fromstring(svg)
    for el in root.iter(f"{SVG_NS}path"):
        nums = [float(v) for tok in el.get("d").replace("M", " ").replace("L", " ").split()
                for v in tok.split(",")]
        assert min(nums) >= 0 and max(nums) <= 400


def test_svg_byte_stable():
    assert render_graticule() == render_graticule()


def test_svg_style_applied():
    svg = render_graticule(style=SvgStyle(stroke="#ff0000", stroke_width=2.0))
    assert 'stroke="#ff0000"' in svg and 'stroke-width="2"' in svg


def test_empty_paths_skipped():
    root = ET.fromstring(render_svg([MapPath(), MapPath([[(0, 0), (0.5, 0.5)]])]))
    assert len(root.findall(f".//{SVG_NS}path")) == 1


# --- GeoJSON -------------------------------------------------------------------

def write_json(tmp_path, obj):
    path = tmp_path / "land.geojson"
    path.write_text(json.dumps(obj))
    return path


def test_load_polygon_and_render_land(tmp_path):
    ring = [[0, 0], [20, 0], [20, 20], [0, 20], [0, 0]]
    doc = {"type": "FeatureCollection", "features": [
        {"type": "Feature", "properties": {}, "geometry": {"type": "Polygon", "coordinates": [ring]}},
        {"type": "Feature", "properties": {}, "geometry": {
            "type": "MultiLineString", "coordinates": [[[100, -10], [120, -10]]]}},
    ]}
    paths = load_geojson(write_json(tmp_path, doc))
    assert len(paths) == 2
    assert paths[0].closed and not paths[1].closed
    # closing vertex dropped, then densified
    phi, lam = paths[0].arrays()
    assert (phi[0], lam[0]) != (phi[-1], lam[-1])
    land = [project_path(p) for p in paths]
    root = ET.fromstring(render_svg([], land=land))
    group = root.find(f"{SVG_NS}g[@id='land']")
    assert group is not None and len(group.findall(f"{SVG_NS}path")) == 2


@pytest.mark.parametrize("doc", [
    {"type": "Point", "coordinates": [0, 0]},
    {"type": "Polygon"},
    {"type": "LineString", "coordinates": [[0]]},
])
def test_load_geojson_rejects(tmp_path, doc):
    with pytest.raises(ValueError):
        load_geojson(write_json(tmp_path, doc))


def test_load_geojson_rejects_bad_latitude(tmp_path):
    with pytest.raises(DomainError):
        load_geojson(write_json(tmp_path, {"type": "LineString", "coordinates": [[0, 95], [1, 0]]}))
