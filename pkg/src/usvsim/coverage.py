"""Boustrophedon (lawnmower) coverage planning over small geo-referenced areas.

Local coordinates are (east, north) metres on an equirectangular tangent
plane at the polygon's first vertex. Sweep headings follow the marine
convention: radians clockwise from north.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .errors import EmptyPlan, UnsupportedPolygon
from .guidance import MissionPlan, Waypoint

EARTH_RADIUS = 6_371_000.0  # m


@dataclass(frozen=True)
class GeoPolygon:
    vertices: tuple[tuple[float, float], ...]  # (lat deg, lon deg)

    def __post_init__(self):
        if len(self.vertices) < 3:
            raise ValueError("polygon needs at least 3 vertices")

    @property
    def reference(self) -> tuple[float, float]:
        return self.vertices[0]


@dataclass(frozen=True)
class LocalPolygon:
    vertices: tuple[tuple[float, float], ...]  # (east m, north m), counterclockwise

    def __post_init__(self):
        if len(self.vertices) < 3:
            raise ValueError("polygon needs at least 3 vertices")

    @classmethod
    def normalized(cls, vertices) -> "LocalPolygon":
        """Drop a repeated closing vertex and orient counterclockwise,
        keeping the first vertex first."""
        pts = [(float(e), float(n)) for e, n in vertices]
        if len(pts) > 1 and pts[0] == pts[-1]:
            pts.pop()
        if _signed_area(pts) < 0:
            pts = pts[:1] + pts[1:][::-1]
        if _signed_area(pts) <= 0:
            raise ValueError("polygon has zero area")
        return cls(tuple(pts))

    @property
    def perimeter(self) -> float:
        pts = self.vertices
        return sum(math.dist(pts[i], pts[(i + 1) % len(pts)]) for i in range(len(pts)))


def _signed_area(pts) -> float:
    s = 0.0
    for i in range(len(pts)):
        x1, y1 = pts[i]
        x2, y2 = pts[(i + 1) % len(pts)]
        s += x1 * y2 - x2 * y1
    return 0.5 * s


def polygon_area(poly: LocalPolygon) -> float:
    """Shoelace area, m^2 (positive for counterclockwise input)."""
    return _signed_area(poly.vertices)


def geo_to_local(lat: float, lon: float, reference: tuple[float, float]) -> tuple[float, float]:
    lat0, lon0 = reference
    east = EARTH_RADIUS * math.cos(math.radians(lat0)) * math.radians(lon - lon0)
    north = EARTH_RADIUS * math.radians(lat - lat0)
    return east, north


def local_to_geo(east: float, north: float, reference: tuple[float, float]) -> tuple[float, float]:
    lat0, lon0 = reference
    lat = lat0 + math.degrees(north / EARTH_RADIUS)
    lon = lon0 + math.degrees(east / (EARTH_RADIUS * math.cos(math.radians(lat0))))
    return lat, lon


def project_to_local(poly: GeoPolygon) -> LocalPolygon:
    ref = poly.reference
    for lat, lon in poly.vertices:
        if abs(lat - ref[0]) > 1.0 or abs(lon - ref[1]) > 1.0:
            raise ValueError("vertices must lie within 1 degree of the reference")
    return LocalPolygon.normalized([geo_to_local(lat, lon, ref) for lat, lon in poly.vertices])


@dataclass
class SweepPlan:
    waypoints: list[tuple[float, float]]  # (east, north)
    spacing: float
    sweep_heading: float
    metadata: dict = field(default_factory=dict)

    @property
    def path_length(self) -> float:
        return sum(math.dist(a, b) for a, b in zip(self.waypoints, self.waypoints[1:]))

    @property
    def sweeps(self) -> list[tuple[tuple[float, float], tuple[float, float]]]:
        return [(self.waypoints[i], self.waypoints[i + 1]) for i in range(0, len(self.waypoints) - 1, 2)]


def longest_edge_heading(poly: LocalPolygon) -> float:
    pts = poly.vertices
    best = max(range(len(pts)), key=lambda i: math.dist(pts[i], pts[(i + 1) % len(pts)]))
    (e1, n1), (e2, n2) = pts[best], pts[(best + 1) % len(pts)]
    return math.atan2(e2 - e1, n2 - n1)


def _frame(heading: float):
    along = (math.sin(heading), math.cos(heading))  # (east, north)
    normal = (math.cos(heading), -math.sin(heading))
    return along, normal


def _clip(pts, normal, value, keep_above: bool):
    """Sutherland-Hodgman clip against the half-plane p.normal >= value (or <=)."""
    sign = 1.0 if keep_above else -1.0

    def side(p):
        return sign * (p[0] * normal[0] + p[1] * normal[1] - value)

    out = []
    for i in range(len(pts)):
        a, b = pts[i], pts[(i + 1) % len(pts)]
        sa, sb = side(a), side(b)
        if sa >= 0:
            out.append(a)
        if (sa >= 0) != (sb >= 0):
            t = sa / (sa - sb)
            out.append((a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])))
    return out


def _check_monotone(offsets) -> None:
    """Every sweep line must cut the boundary in at most one interval."""
    vals = [o for i, o in enumerate(offsets) if o != offsets[i - 1]]
    if len(vals) < 3:
        return
    signs = [1 if vals[(i + 1) % len(vals)] > vals[i] else -1 for i in range(len(vals))]
    changes = sum(1 for i in range(len(signs)) if signs[i] != signs[i - 1])
    if changes > 2:
        raise UnsupportedPolygon("polygon is not monotone for this sweep direction")


def plan_lawnmower(poly: LocalPolygon, spacing: float, sweep_heading: float | None = None) -> SweepPlan:
    """Parallel sweeps ``spacing`` apart, joined end to end in alternating order.

    There are ceil(width / spacing) sweeps, centred across the polygon so
    that the outer sweeps sit at most spacing/2 (exactly spacing/2 when the
    width is a multiple of the spacing) inside the extremal support lines.
    Each sweep spans the polygon's extent within its own band of width
    ``spacing``, so every interior point is within spacing/2 of a sweep.
    """
    if spacing <= 0:
        raise ValueError("spacing must be positive")
    if sweep_heading is None:
        sweep_heading = longest_edge_heading(poly)
    along, normal = _frame(sweep_heading)
    pts = list(poly.vertices)
    offsets = [p[0] * normal[0] + p[1] * normal[1] for p in pts]
    _check_monotone(offsets)
    o_min, o_max = min(offsets), max(offsets)
    width = o_max - o_min
    count = max(1, math.ceil(width / spacing - 1e-9))
    first = o_min + 0.5 * (width - (count - 1) * spacing)

    waypoints = []
    for k in range(count):
        o = first + k * spacing
        lo, hi = max(o_min, o - 0.5 * spacing), min(o_max, o + 0.5 * spacing)
        band = _clip(_clip(pts, normal, lo, True), normal, hi, False)
        if not band:
            continue
        a = [p[0] * along[0] + p[1] * along[1] for p in band]
        a0, a1 = (min(a), max(a)) if k % 2 == 0 else (max(a), min(a))
        for s in (a0, a1):
            waypoints.append((o * normal[0] + s * along[0], o * normal[1] + s * along[1]))
    plan = SweepPlan(waypoints, spacing, sweep_heading)
    plan.metadata = {
        "area": polygon_area(poly),
        "path_length": plan.path_length,
        "sweep_count": len(waypoints) // 2,
    }
    return plan


def plan_to_mission(plan: SweepPlan, speed: float, reference: tuple[float, float] | None = None,
                    capture_radius: float | None = None, max_speed: float | None = None) -> MissionPlan:
    """Attach speeds to the sweep waypoints; home is the final waypoint.

    The default capture radius is 12 m (twice the hull length) shrunk to
    45% of the shortest leg so consecutive waypoints stay separable.
    """
    if speed <= 0:
        raise ValueError("speed must be positive")
    if not plan.waypoints:
        raise EmptyPlan("sweep plan has no waypoints")
    if capture_radius is None:
        legs = [math.dist(a, b) for a, b in zip(plan.waypoints, plan.waypoints[1:])]
        capture_radius = min([12.0] + [0.45 * leg for leg in legs])
    wps = tuple(Waypoint(n, e, speed, capture_radius) for e, n in plan.waypoints)
    meta = dict(plan.metadata)
    meta["speed"] = speed
    meta["predicted_duration_h"] = plan.path_length / speed / 3600.0
    if reference is not None:
        meta["reference"] = list(reference)
    if max_speed is not None:
        meta["max_speed"] = max_speed
    return MissionPlan(wps, wps[-1], False, meta)


# GeoJSON uses [lon, lat] coordinate order.

def geopolygon_from_geojson(obj) -> GeoPolygon:
    if isinstance(obj, str):
        obj = json.loads(obj)
    if obj.get("type") == "FeatureCollection":
        obj = obj["features"][0]
    geom = obj.get("geometry", obj)
    if geom.get("type") != "Polygon":
        raise ValueError("expected a GeoJSON Polygon")
    ring = geom["coordinates"][0]
    if ring[0] == ring[-1]:
        ring = ring[:-1]
    return GeoPolygon(tuple((lat, lon) for lon, lat in ring))


def geopolygon_to_geojson(poly: GeoPolygon, properties: dict | None = None) -> dict:
    ring = [[lon, lat] for lat, lon in poly.vertices]
    ring.append(ring[0])
    return {"type": "Feature", "properties": properties or {},
            "geometry": {"type": "Polygon", "coordinates": [ring]}}


def plan_to_geojson(plan: SweepPlan, reference: tuple[float, float], extra: dict | None = None) -> dict:
    coords = []
    for e, n in plan.waypoints:
        lat, lon = local_to_geo(e, n, reference)
        coords.append([round(lon, 9), round(lat, 9)])
    props = {"area_m2": plan.metadata.get("area"), "path_length_m": plan.path_length,
             "sweep_count": plan.metadata.get("sweep_count"), "spacing_m": plan.spacing,
             "sweep_heading_rad": plan.sweep_heading}
    props.update(extra or {})
    return {"type": "Feature", "properties": props,
            "geometry": {"type": "LineString", "coordinates": coords}}
