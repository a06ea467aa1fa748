import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial import ConvexHull

from usvsim.coverage import (
    GeoPolygon,
    LocalPolygon,
    SweepPlan,
    geo_to_local,
    geopolygon_from_geojson,
    geopolygon_to_geojson,
    local_to_geo,
    plan_lawnmower,
    plan_to_geojson,
    plan_to_mission,
    polygon_area,
    project_to_local,
)
from usvsim.errors import EmptyPlan, UnsupportedPolygon

SQUARE = LocalPolygon.normalized([(0, 0), (100, 0), (100, 100), (0, 100)])
EAST_WEST = math.pi / 2


def test_projection_reference_is_origin():
    local = project_to_local(GeoPolygon(((24.45, 54.33), (24.46, 54.33), (24.46, 54.34))))
    assert local.vertices[0] == (0.0, 0.0)


def test_projection_north_offset():
    east, north = geo_to_local(24.001, 54.0, (24.0, 54.0))
    assert north == pytest.approx(111.19, abs=0.01)
    assert east == 0.0


@given(st.floats(-0.9, 0.9), st.floats(-0.9, 0.9))
def test_projection_round_trip(dlat, dlon):
    ref = (24.45, 54.33)
    lat, lon = local_to_geo(*geo_to_local(ref[0] + dlat, ref[1] + dlon, ref), ref)
    assert lat == pytest.approx(ref[0] + dlat, abs=1e-9)
    assert lon == pytest.approx(ref[1] + dlon, abs=1e-9)


def test_projection_domain():
    with pytest.raises(ValueError):
        project_to_local(GeoPolygon(((0.0, 0.0), (1.5, 0.0), (1.5, 1.0))))


def test_area_examples():
    assert polygon_area(SQUARE) == pytest.approx(10000.0)
    assert polygon_area(LocalPolygon.normalized([(0, 0), (30, 0), (0, 40)])) == pytest.approx(600.0)
    assert polygon_area(LocalPolygon.normalized([(0, 0), (0, 40), (30, 0)])) == pytest.approx(600.0)
    with pytest.raises(ValueError):
        LocalPolygon.normalized([(0, 0), (1, 1), (2, 2)])


def test_fixture_area(fixture_local):
    assert polygon_area(fixture_local) == pytest.approx(31000.0, abs=500.0)


def test_square_plan():
    plan = plan_lawnmower(SQUARE, 10.0, EAST_WEST)
    assert len(plan.sweeps) == 10
    for a, b in plan.sweeps:
        assert math.dist(a, b) == pytest.approx(100.0)
    norths = sorted(a[1] for a, _ in plan.sweeps)
    assert norths[0] == pytest.approx(5.0) and norths[-1] == pytest.approx(95.0)
    assert np.allclose(np.diff(norths), 10.0)
    assert plan.path_length == pytest.approx(1090.0)
    assert plan.metadata == {"area": pytest.approx(10000.0), "path_length": pytest.approx(1090.0),
                             "sweep_count": 10}


def test_narrow_strip_single_sweep():
    strip = LocalPolygon.normalized([(0, 0), (100, 0), (100, 8), (0, 8)])
    plan = plan_lawnmower(strip, 10.0, EAST_WEST)
    assert len(plan.sweeps) == 1
    (a, b), = plan.sweeps
    assert a[1] == pytest.approx(4.0) and b[1] == pytest.approx(4.0)
    assert plan.path_length == pytest.approx(100.0)


def test_default_heading_follows_longest_edge():
    rect = LocalPolygon.normalized([(0, 0), (200, 0), (200, 50), (0, 50)])
    plan = plan_lawnmower(rect, 10.0)
    assert abs(math.sin(plan.sweep_heading)) == pytest.approx(1.0)
    assert len(plan.sweeps) == 5


def test_fixture_plan_length(fixture_plan):
    assert 3100.0 <= fixture_plan.path_length <= 3500.0


def test_mission_duration(fixture_plan):
    m = plan_to_mission(fixture_plan, 0.61)
    assert m.metadata["predicted_duration_h"] == pytest.approx(1.5, rel=0.10)
    fast = plan_to_mission(fixture_plan, 1.22)
    assert fast.metadata["predicted_duration_h"] == pytest.approx(m.metadata["predicted_duration_h"] / 2)
    assert plan_to_mission(SweepPlan([(0.0, 0.0), (3300.0, 0.0)], 10.0, 0.0), 0.61).metadata[
        "predicted_duration_h"] == pytest.approx(1.50, abs=0.005)


def test_mission_waypoints(fixture_plan):
    m = plan_to_mission(fixture_plan, 0.61)
    assert len(m.waypoints) == len(fixture_plan.waypoints)
    assert m.home == m.waypoints[-1]
    assert all(w.speed == 0.61 for w in m.waypoints)
    assert (m.waypoints[0].east, m.waypoints[0].north) == fixture_plan.waypoints[0]


def test_empty_plan():
    with pytest.raises(EmptyPlan):
        plan_to_mission(SweepPlan([], 10.0, 0.0), 1.0)
    with pytest.raises(ValueError):
        plan_to_mission(SweepPlan([(0, 0), (1, 1)], 10.0, 0.0), 0.0)


def test_non_monotone_rejected():
    u_shape = LocalPolygon.normalized([(0, 0), (30, 0), (30, 30), (20, 30), (20, 10), (10, 10), (10, 30), (0, 30)])
    with pytest.raises(UnsupportedPolygon):
        plan_lawnmower(u_shape, 5.0, EAST_WEST)
    # the same shape swept north-south is monotone
    plan_lawnmower(u_shape, 5.0, 0.0)


def _seg_dist(p, a, b):
    p, a, b = map(np.asarray, (p, a, b))
    ab = b - a
    denom = ab @ ab
    t = 0.0 if denom == 0 else np.clip((p - a) @ ab / denom, 0.0, 1.0)
    return float(np.linalg.norm(p - (a + t * ab)))


def _inside(p, verts):
    n = len(verts)
    for i in range(n):
        (x1, y1), (x2, y2) = verts[i], verts[(i + 1) % n]
        if (x2 - x1) * (p[1] - y1) - (y2 - y1) * (p[0] - x1) < 0:
            return False
    return True


convex_polygons = st.lists(st.tuples(st.floats(0, 2 * math.pi), st.floats(20, 150)),
                           min_size=3, max_size=9)


def _hull(points):
    pts = np.array([(r * math.cos(a), r * math.sin(a)) for a, r in points])
    hull = ConvexHull(pts)
    return LocalPolygon.normalized([tuple(pts[i]) for i in hull.vertices])


@settings(max_examples=40, deadline=None)
@given(convex_polygons, st.floats(3.0, 25.0), st.floats(-math.pi, math.pi), st.integers(0, 2**31))
def test_coverage_guarantee(points, spacing, heading, seed):
    try:
        poly = _hull(points)
    except Exception:
        return  # degenerate hull
    if polygon_area(poly) < 1.0:
        return
    plan = plan_lawnmower(poly, spacing, heading)
    rng = np.random.default_rng(seed)
    verts = poly.vertices
    lo, hi = np.min(verts, axis=0), np.max(verts, axis=0)
    checked = 0
    samples = list(verts) + [tuple(x) for x in rng.uniform(lo, hi, size=(300, 2))]
    for p in samples:
        if not _inside(p, verts) and p not in verts:
            continue
        d = min(_seg_dist(p, a, b) for a, b in plan.sweeps)
        assert d <= spacing / 2 + 1e-6
        checked += 1
    assert checked >= len(verts)
    area = polygon_area(poly)
    assert plan.path_length >= area / spacing - spacing * poly.perimeter
    assert plan.path_length == pytest.approx(sum(math.dist(a, b) for a, b in zip(plan.waypoints,
                                                                              plan.waypoints[1:])))


def _rotate(pts, theta):
    c, s = math.cos(theta), math.sin(theta)
    # clockwise by theta, so bearings grow by theta
    return [(e * c + n * s, -e * s + n * c) for e, n in pts]


@settings(max_examples=30, deadline=None)
@given(convex_polygons, st.floats(-math.pi, math.pi), st.floats(-math.pi, math.pi),
       st.floats(-1e4, 1e4), st.floats(-1e4, 1e4))
def test_plan_equivariance(points, heading, theta, de, dn):
    try:
        poly = _hull(points)
    except Exception:
        return
    if polygon_area(poly) < 1.0:
        return
    base = plan_lawnmower(poly, 10.0, heading)

    moved = plan_lawnmower(LocalPolygon([(e + de, n + dn) for e, n in poly.vertices]), 10.0, heading)
    assert np.allclose(moved.waypoints, [(e + de, n + dn) for e, n in base.waypoints], atol=1e-9 * (1 + abs(de) + abs(dn)))

    turned = plan_lawnmower(LocalPolygon(tuple(_rotate(poly.vertices, theta))), 10.0, heading + theta)
    assert np.allclose(turned.waypoints, _rotate(base.waypoints, theta), atol=1e-9)

    cw = plan_lawnmower(LocalPolygon.normalized(list(reversed(poly.vertices))), 10.0, heading)
    assert cw.waypoints == base.waypoints


def test_fixture_plan_bounds(fixture_plan, fixture_local):
    area = polygon_area(fixture_local)
    assert fixture_plan.path_length <= 1.5 * area / 10.0
    assert fixture_plan.path_length >= area / 10.0 - 10.0 * fixture_local.perimeter


def test_geojson_round_trip(fixture_geo, fixture_plan):
    again = geopolygon_from_geojson(geopolygon_to_geojson(fixture_geo))
    assert again == fixture_geo
    feature = plan_to_geojson(fixture_plan, fixture_geo.reference, {"predicted_duration_h": 1.5})
    coords = feature["geometry"]["coordinates"]
    assert len(coords) == len(fixture_plan.waypoints)
    lon, lat = coords[0]
    e, n = geo_to_local(lat, lon, fixture_geo.reference)
    assert (e, n) == pytest.approx(fixture_plan.waypoints[0], abs=1e-3)
    assert feature["properties"]["sweep_count"] == fixture_plan.metadata["sweep_count"]
    with pytest.raises(ValueError):
        geopolygon_from_geojson({"type": "Point", "coordinates": [0, 0]})
