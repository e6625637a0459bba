"""Graticules, interruption-aware path projection, and SVG output."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .constants import ProjectionConstants
from .projection import octant_index
from .registry import Projection
from .types import HALF_PI, TWO_PI, DomainError, GeoCoord, MapPoint, angular_distance

MAX_GAP_DEG = 0.5
JOIN_TOL = 1e-9
JUMP_FACTOR = 8.0


@dataclass(frozen=True)
class GeoPath:
    vertices: tuple
    closed: bool = False

    def __post_init__(self):
        verts = tuple(v if isinstance(v, GeoCoord) else GeoCoord(*v) for v in self.vertices)
        if len(verts) < 2:
            raise ValueError("a path needs at least two vertices")
        object.__setattr__(self, "vertices", verts)

    def arrays(self):
        phi = np.array([v.phi for v in self.vertices])
        lam = np.array([v.lam for v in self.vertices])
        return phi, lam


@dataclass
class MapPath:
    segments: list = field(default_factory=list)

    def __len__(self):
        return len(self.segments)


def _steps(start, stop, max_step):
    n = max(1, int(math.ceil((stop - start) / max_step - 1e-9)))
    return np.linspace(start, stop, n + 1)


def graticule(spacing: float = 10.0, densify: float = MAX_GAP_DEG) -> list[GeoPath]:
    """Parallels (poles excluded) and meridians every ``spacing`` degrees,
    with vertices no more than ``densify`` degrees apart."""
    if not spacing > 0 or abs(90.0 / spacing - round(90.0 / spacing)) > 1e-9:
        raise ValueError(f"spacing {spacing!r} must divide 90")
    if not 0 < densify <= spacing:
        raise ValueError("densify must be in (0, spacing]")
    n_half = int(round(90.0 / spacing))
    paths = []
    lons = _steps(0.0, 360.0, densify)[:-1]
    for i in range(-n_half + 1, n_half):
        lat = math.radians(i * spacing)
        paths.append(GeoPath(tuple(GeoCoord(lat, math.radians(lo)) for lo in lons), closed=True))
    lats = _steps(-90.0, 90.0, densify)
    for j in range(4 * n_half):
        lon = math.radians(j * spacing)
        paths.append(GeoPath(tuple(GeoCoord(math.radians(la), lon) for la in lats)))
    return paths


def densify_path(path: GeoPath, max_deg: float = MAX_GAP_DEG) -> GeoPath:
    """Insert great-circle points so no two vertices are more than ``max_deg`` apart."""
    phi, lam = path.arrays()
    if path.closed:
        phi = np.append(phi, phi[0])
        lam = np.append(lam, lam[0])
    vec = _unit(phi, lam)
    out = [vec[0]]
    limit = math.radians(max_deg)
    for a, b in zip(vec[:-1], vec[1:]):
        ang = math.atan2(np.linalg.norm(np.cross(a, b)), float(np.dot(a, b)))
        n = max(1, int(math.ceil(ang / limit - 1e-9)))
        for t in range(1, n + 1):
            out.append(_slerp(a, b, ang, t / n))
    if path.closed:
        out.pop()
    pts = np.array(out)
    lat = np.arctan2(pts[:, 2], np.hypot(pts[:, 0], pts[:, 1]))
    lon = np.arctan2(pts[:, 1], pts[:, 0])
    return GeoPath(tuple(GeoCoord(a, b) for a, b in zip(lat.tolist(), lon.tolist())), path.closed)


def _unit(phi, lam):
    phi = np.asarray(phi, dtype=float)
    lam = np.asarray(lam, dtype=float)
    c = np.cos(phi)
    return np.stack([c * np.cos(lam), c * np.sin(lam), np.sin(phi)], axis=-1)


def _slerp(a, b, ang, t):
    if ang < 1e-15:
        return a
    return (math.sin((1 - t) * ang) * a + math.sin(t * ang) * b) / math.sin(ang)


def _on_meridian(lam):
    off = np.mod(lam, HALF_PI)
    return (off < 1e-12) | (HALF_PI - off < 1e-12)


def _octant_span(lam):
    """Octants whose closed longitude range contains ``lam``."""
    q = int(octant_index(lam))
    if _on_meridian(lam):
        m = int(round(float(np.mod(lam, TWO_PI)) / HALF_PI)) % 4
        return {m, (m - 1) % 4}
    return {q}


def _crossing(a_phi, a_lam, b_phi, b_lam, meridian):
    """Point where the great-circle segment a-b meets the given meridian."""
    va, vb = _unit(a_phi, a_lam), _unit(b_phi, b_lam)
    normal = np.array([-math.sin(meridian), math.cos(meridian), 0.0])
    da, db = float(va @ normal), float(vb @ normal)
    t = da / (da - db)
    p = va + t * (vb - va)
    return math.atan2(p[2], math.hypot(p[0], p[1])), meridian


def _split_segment(a, b):
    """Cut a segment at every quadrant meridian it crosses.

    Returns a list of (phi0, lam0, phi1, lam1, octants) pieces, each lying
    inside the closed octants listed.
    """
    (pa, la), (pb, lb) = a, b
    dl = math.remainder(lb - la, TWO_PI)
    pieces = []
    cur_p, cur_l = pa, la
    # meridians strictly inside the longitude sweep from la to la + dl
    if abs(dl) > 0:
        lo, hi = (la, la + dl) if dl > 0 else (la + dl, la)
        m = math.floor(lo / HALF_PI) + 1
        cuts = []
        while m * HALF_PI < hi:
            if m * HALF_PI > lo:
                cuts.append(m * HALF_PI)
            m += 1
        if dl < 0:
            cuts.reverse()
        for cut in cuts:
            if abs(cut - cur_l) < 1e-12 or abs(cut - (la + dl)) < 1e-12:
                continue
            cp, cl = _crossing(pa, la, pb, lb, cut)
            pieces.append((cur_p, cur_l, cp, cl))
            cur_p, cur_l = cp, cl
    pieces.append((cur_p, cur_l, pb, la + dl))
    out = []
    for p0, l0, p1, l1 in pieces:
        mid = 0.5 * (l0 + l1)
        span = _octant_span(l0) & _octant_span(l1)
        if not span:
            span = {int(octant_index(mid))}
        out.append((p0, l0, p1, l1, span))
    return out


def project_path(path: GeoPath, k: ProjectionConstants | None = None,
                 projection: Projection | None = None) -> MapPath:
    """Project a densified path, breaking it wherever it crosses an interruption.

    Interruptions are the quadrant meridians south of the equator.  A
    stretch running along one of them is drawn on both sides of the cut.
    Consecutive projected points further apart than JUMP_FACTOR times the
    median step are also split, as a safety net.
    """
    proj = projection or Projection("new", k)
    phi, lam = path.arrays()
    if path.closed:
        phi = np.append(phi, phi[0])
        lam = np.append(lam, lam[0])
    gaps = angular_distance(phi[:-1], lam[:-1], phi[1:], lam[1:])
    if np.any(gaps > math.radians(MAX_GAP_DEG) + 1e-9):
        raise DomainError(
            f"path vertices up to {math.degrees(gaps.max()):.3f} deg apart; "
            f"densify to <= {MAX_GAP_DEG} deg first (see densify_path)")

    pieces = []
    for i in range(len(phi) - 1):
        pieces.extend(_split_segment((phi[i], lam[i]), (phi[i + 1], lam[i + 1])))

    # every piece is drawn once per octant it may belong to; south of the
    # equator a piece lying on a quadrant meridian belongs to both sides
    jobs = []
    for p0, l0, p1, l1, span in pieces:
        south = min(p0, p1) < 0.0
        jobs.append([(p0, l0, p1, l1, q) for q in (sorted(span) if south else [min(span)])])
    flat = [j for group in jobs for j in group]
    a = np.array(flat, dtype=float)
    qs = a[:, 4].astype(np.intp)
    xs, ys = proj.forward(np.concatenate([a[:, 0], a[:, 2]]),
                          np.concatenate([a[:, 1], a[:, 3]]), q=np.concatenate([qs, qs]))
    m = len(flat)
    starts = list(zip(xs[:m].tolist(), ys[:m].tolist()))
    ends = list(zip(xs[m:].tolist(), ys[m:].tolist()))

    polylines: list[list] = []
    open_tracks: list = []
    i = 0
    for group in jobs:
        next_tracks = []
        for _ in group:
            s, e = starts[i], ends[i]
            i += 1
            slot = next((n for n, tr in enumerate(open_tracks)
                         if tr is not None and math.dist(tr[-1], s) <= JOIN_TOL), None)
            if slot is None:
                host = [s]
                polylines.append(host)
            else:
                host = open_tracks[slot]
                open_tracks[slot] = None
            if len(host) == 1 or math.dist(host[-1], e) > 0.0:
                host.append(e)
            next_tracks.append(host)
        open_tracks = next_tracks

    segments = []
    for line in polylines:
        segments.extend(_split_jumps(line))
    if path.closed:
        segments = _merge_closed(segments)
    return MapPath([np.array(s) for s in segments if len(s) >= 2])


def _split_jumps(line):
    pts = np.asarray(line)
    if len(pts) < 3:
        return [line]
    steps = np.hypot(*np.diff(pts, axis=0).T)
    med = float(np.median(steps))
    if med <= 0.0:
        return [line]
    cut = np.flatnonzero(steps > JUMP_FACTOR * med)
    if cut.size == 0:
        return [line]
    out, start = [], 0
    for c in cut:
        out.append(line[start:c + 1])
        start = c + 1
    out.append(line[start:])
    return [s for s in out if len(s) >= 2]


def _merge_closed(segments):
    # a closed path that started mid-polyline: rejoin its tail and head
    if len(segments) >= 2 and math.dist(segments[-1][-1], segments[0][0]) <= JOIN_TOL:
        segments = [segments[-1] + segments[0][1:]] + segments[1:-1]
    return segments


# --- GeoJSON ---------------------------------------------------------------

def load_geojson(path, max_deg: float = MAX_GAP_DEG) -> list[GeoPath]:
    """Rings and lines of a GeoJSON file as densified GeoPaths (degrees in, radians out)."""
    with open(Path(path)) as fh:
        doc = json.load(fh)
    try:
        lines = list(_iter_lines(doc))
    except (KeyError, TypeError, AttributeError) as exc:
        raise ValueError(f"malformed GeoJSON in {path}: {exc!r}") from None
    out = []
    for coords, closed in lines:
        verts = []
        for pos in coords:
            if len(pos) < 2:
                raise ValueError(f"GeoJSON position {pos!r} needs longitude and latitude")
            verts.append(GeoCoord(math.radians(pos[1]), math.radians(pos[0])))
        if closed and len(verts) > 2 and verts[0] == verts[-1]:
            verts = verts[:-1]
        if len(verts) >= 2:
            out.append(densify_path(GeoPath(tuple(verts), closed), max_deg))
    return out


def _iter_lines(obj):
    kind = obj.get("type")
    if kind == "FeatureCollection":
        for feat in obj.get("features", []):
            yield from _iter_lines(feat)
    elif kind == "Feature":
        if obj.get("geometry"):
            yield from _iter_lines(obj["geometry"])
    elif kind == "GeometryCollection":
        for geom in obj.get("geometries", []):
            yield from _iter_lines(geom)
    elif kind == "Polygon":
        for ring in obj["coordinates"]:
            yield ring, True
    elif kind == "MultiPolygon":
        for poly in obj["coordinates"]:
            for ring in poly:
                yield ring, True
    elif kind == "LineString":
        yield obj["coordinates"], False
    elif kind == "MultiLineString":
        for line in obj["coordinates"]:
            yield line, False
    else:
        raise ValueError(f"unsupported GeoJSON type {kind!r}")


# --- SVG -------------------------------------------------------------------

@dataclass(frozen=True)
class SvgStyle:
    stroke: str = "#808080"
    stroke_width: float = 0.75
    land_stroke: str = "#000000"
    land_fill: str = "none"
    land_stroke_width: float = 0.5
    frame_stroke: str = "#000000"
    background: str = "#ffffff"


def _fmt(v: float) -> str:
    s = f"{v:.3f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def _path_data(mp: MapPath, size: float) -> str:
    parts = []
    for seg in mp.segments:
        pts = (np.asarray(seg) + 1.0) * (0.5 * size)
        cmds = [f"M{_fmt(pts[0, 0])},{_fmt(pts[0, 1])}"]
        cmds.extend(f"L{_fmt(x)},{_fmt(y)}" for x, y in pts[1:])
        parts.append("".join(cmds))
    return " ".join(parts)


def render_svg(paths: list[MapPath], style: SvgStyle | None = None, size: int = 800,
               land: list[MapPath] | None = None) -> str:
    """Standalone SVG 1.1 document with [-1, 1]^2 filling a size x size viewport.

    One <path> element per MapPath; the land layer, if any, is drawn under
    the graticule.
    """
    style = style or SvgStyle()
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" '
        f'height="{size}" viewBox="0 0 {size} {size}">',
        f'<rect x="0" y="0" width="{size}" height="{size}" fill="{style.background}" stroke="none"/>',
    ]
    if land:
        lines.append(f'<g id="land" fill="{style.land_fill}" stroke="{style.land_stroke}" '
                     f'stroke-width="{_fmt(style.land_stroke_width)}" stroke-linejoin="round">')
        lines.extend(f'<path d="{_path_data(mp, size)}"/>' for mp in land if mp.segments)
        lines.append("</g>")
    lines.append(f'<g id="graticule" fill="none" stroke="{style.stroke}" '
                 f'stroke-width="{_fmt(style.stroke_width)}" stroke-linejoin="round">')
    lines.extend(f'<path d="{_path_data(mp, size)}"/>' for mp in paths if mp.segments)
    lines.append("</g>")
    lines.append(f'<rect id="frame" x="0" y="0" width="{size}" height="{size}" fill="none" '
                 f'stroke="{style.frame_stroke}" stroke-width="1"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def map_points_in_square(mp: MapPath, slack: float = 1e-12) -> bool:
    return all(np.all(np.abs(np.asarray(s)) <= 1.0 + slack) for s in mp.segments)


__all__ = [
    "GeoPath", "MapPath", "MapPoint", "SvgStyle", "graticule", "densify_path",
    "project_path", "render_svg", "load_geojson",
]
