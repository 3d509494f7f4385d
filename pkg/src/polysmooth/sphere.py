"""Spherical geometry: arcs, polygons, areas, winding, hemispheres, kernels."""

from dataclasses import dataclass
from itertools import combinations
import math
from typing import Optional, Tuple

import numpy as np

from . import planar
from .errors import DegenerateAngle, GeometryError, NotHemispherical, NotSimple, PointOnBoundary

ARC_TOL = 1e-12
LP_MARGIN = 1e-10
EXHAUSTIVE_LIMIT = 40
TWO_PI = 2.0 * np.pi


def normalize(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def angle_between(a: np.ndarray, b: np.ndarray) -> float:
    c = _cross(a, b)
    return math.atan2(math.sqrt(_dot(c, c)), float(a @ b))


@dataclass(frozen=True)
class GreatArc:
    """Shorter great-circle arc between two non-antipodal unit vectors."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        if np.linalg.norm(np.cross(self.a, self.b)) < ARC_TOL:
            raise GeometryError("arc endpoints are equal or antipodal")

    def sample(self, count: int) -> np.ndarray:
        theta = angle_between(self.a, self.b)
        t = np.linspace(0.0, 1.0, count)[:, None]
        s = np.sin(theta)
        return (np.sin((1 - t) * theta) * self.a + np.sin(t * theta) * self.b) / s


class SphericalPolygon:
    """Closed cycle of unit vectors joined by shorter great-circle arcs."""

    def __init__(self, vertices):
        v = normalize(np.array(vertices, dtype=float).reshape(-1, 3))
        if len(v) < 2:
            raise GeometryError("spherical polygon needs at least 2 vertices")
        nxt = np.roll(v, -1, axis=0)
        if np.any(np.linalg.norm(np.cross(v, nxt), axis=1) < ARC_TOL):
            raise GeometryError("consecutive vertices are equal or antipodal")
        v.setflags(write=False)
        self.vertices = v

    def __len__(self) -> int:
        return len(self.vertices)

    def reversed(self) -> "SphericalPolygon":
        return SphericalPolygon(self.vertices[::-1])

    def arcs(self):
        n = len(self.vertices)
        return [(self.vertices[i], self.vertices[(i + 1) % n]) for i in range(n)]

    def sample(self, per_arc: int = 32) -> np.ndarray:
        pts = [GreatArc(a, b).sample(per_arc)[:-1] for a, b in self.arcs()]
        return np.vstack(pts)


# angles and area -------------------------------------------------------------

def ccw_angles(poly: SphericalPolygon) -> np.ndarray:
    """Angle at each vertex swept counter-clockwise from the outgoing arc to
    the incoming arc, i.e. the interior angle when the interior lies to the
    left.  Values are in [0, 2pi)."""
    p = poly.vertices
    nxt = np.roll(p, -1, axis=0)
    prv = np.roll(p, 1, axis=0)
    t_next = nxt - np.einsum("ij,ij->i", nxt, p)[:, None] * p
    t_prev = prv - np.einsum("ij,ij->i", prv, p)[:, None] * p
    sin = np.einsum("ij,ij->i", np.cross(t_next, t_prev), p)
    cos = np.einsum("ij,ij->i", t_next, t_prev)
    return np.mod(np.arctan2(sin, cos), TWO_PI)


def interior_angles(poly: SphericalPolygon, orientation_sign: int) -> np.ndarray:
    """Interior angles for a polygon whose interior is on the left (+1) or
    on the right (-1) of the traversal."""
    a = ccw_angles(poly)
    return a if orientation_sign > 0 else TWO_PI - a


def signed_area(poly: SphericalPolygon, orientation_sign: int, check_simple: bool = True) -> float:
    """Algebraic area of a simple spherical polygon.

    The enclosed region has area ``sum(interior angles) - (n - 2) pi``; the
    sign is ``orientation_sign``.
    """
    if len(poly) < 3:
        raise GeometryError("area needs at least 3 vertices")
    if check_simple and not is_simple(poly).simple:
        raise NotSimple("polygon self-intersects")
    ang = interior_angles(poly, orientation_sign)
    if np.any(ang < 1e-12) or np.any(ang > TWO_PI - 1e-12):
        raise DegenerateAngle("vertex angle is numerically 0 or 2pi")
    s = 1.0 if orientation_sign > 0 else -1.0
    return s * (float(ang.sum()) - (len(poly) - 2) * np.pi)


def triangle_signed_area(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Signed area of spherical triangles (Van Oosterom-Strackee)."""
    num = np.einsum("...i,...i->...", a, np.cross(b, c))
    den = 1.0 + np.einsum("...i,...i->...", a, b) + np.einsum("...i,...i->...", b, c) \
        + np.einsum("...i,...i->...", c, a)
    return 2.0 * np.arctan2(num, den)


def fan_area(poly: SphericalPolygon, apex: np.ndarray) -> float:
    """Sum of signed triangle areas of the fan from ``apex``."""
    p = poly.vertices
    return float(triangle_signed_area(apex[None, :], p, np.roll(p, -1, axis=0)).sum())


# simplicity -------------------------------------------------------------------

@dataclass(frozen=True)
class ArcHit:
    crossing: bool
    degenerate: bool
    point: Optional[np.ndarray]


def _cross(a, b):
    # scalar form; np.cross dominates runtime on single 3-vectors
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0])


def _dot(a, b) -> float:
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def _on_arc_margin(a, b, p) -> float:
    """Positive iff p lies strictly inside the shorter arc ab (sine units)."""
    n = _cross(a, b)
    ln = math.sqrt(_dot(n, n))
    return min(_dot(_cross(a, p), n), _dot(_cross(p, b), n)) / ln


def arc_intersection(a, b, c, d, tol: float = ARC_TOL) -> ArcHit:
    """Intersection of the shorter arcs ab and cd.

    Candidates are the two points of the great-circle intersection; a hit
    counts only if it is inside both arcs by more than ``tol``.  Near misses
    within ``tol`` are reported as degenerate non-crossings.
    """
    a, b, c, d = (tuple(map(float, q)) for q in (a, b, c, d))
    n1, n2 = _cross(a, b), _cross(c, d)
    line = _cross(n1, n2)
    ln = math.sqrt(_dot(line, line))
    if ln < tol * math.sqrt(_dot(n1, n1) * _dot(n2, n2)):
        # same great circle: overlap iff an endpoint lies inside the other arc
        inside = any(_on_arc_margin(a, b, q) > tol for q in (c, d)) or \
            any(_on_arc_margin(c, d, q) > tol for q in (a, b))
        return ArcHit(bool(inside), True, None)
    best = None
    for s in (1.0, -1.0):
        p = (s * line[0] / ln, s * line[1] / ln, s * line[2] / ln)
        m = min(_on_arc_margin(a, b, p), _on_arc_margin(c, d, p))
        if best is None or m > best[0]:
            best = (m, p)
    m, p = best
    if m > tol:
        return ArcHit(True, False, np.array(p))
    return ArcHit(False, m > -tol, None)


@dataclass(frozen=True)
class SimplicityResult:
    simple: bool
    crossing: Optional[Tuple[int, int]]
    degenerate: bool


_SIMPLE_CACHE: dict = {}


def is_simple(poly: SphericalPolygon, tol: float = ARC_TOL) -> SimplicityResult:
    """Pairwise arc test: non-adjacent arcs must not meet and adjacent arcs
    may only share their common endpoint."""
    key = (np.ascontiguousarray(poly.vertices).tobytes(), tol)
    hit = _SIMPLE_CACHE.get(key)
    if hit is None:
        if len(_SIMPLE_CACHE) > 4096:
            _SIMPLE_CACHE.clear()
        hit = _SIMPLE_CACHE[key] = _is_simple(poly, tol)
    return hit


def _is_simple(poly: SphericalPolygon, tol: float) -> SimplicityResult:
    n = len(poly)
    p = poly.vertices
    degenerate = False
    first = None
    for i in range(n):
        a, b = p[i], p[(i + 1) % n]
        for j in range(i + 1, n):
            c, d = p[j], p[(j + 1) % n]
            adjacent = j == i + 1 or (i == 0 and j == n - 1)
            if adjacent:
                # the two arcs fold back onto each other iff the angle is ~0
                if j == i + 1:
                    prv, cur, nxt = a, b, d
                else:
                    prv, cur, nxt = c, a, b
                t1 = normalize(prv - (prv @ cur) * cur)
                t2 = normalize(nxt - (nxt @ cur) * cur)
                gap = angle_between(t1, t2)
                if gap < tol:
                    first = first or (i, j)
                elif gap < 1e3 * tol:
                    degenerate = True
                continue
            hit = arc_intersection(a, b, c, d, tol)
            degenerate = degenerate or hit.degenerate
            if hit.crossing and first is None:
                first = (i, j)
    return SimplicityResult(first is None, first, degenerate)


# hemisphere ------------------------------------------------------------------

def hemisphere_margin(points) -> Tuple[np.ndarray, float]:
    """Pole maximising ``min_i <pole, p_i>`` over the unit sphere.

    Exhaustive enumeration over active sets of size one, two and three;
    deterministic and exact for the small point sets of vertex stars.
    """
    p = normalize(np.asarray(points, dtype=float).reshape(-1, 3))
    m = len(p)
    if m > EXHAUSTIVE_LIMIT:
        return _hemisphere_margin_active(p)
    cands = [p]
    if m >= 2:
        i, j = np.array(list(combinations(range(m), 2))).T
        s = p[i] + p[j]
        ok = np.linalg.norm(s, axis=1) > 1e-14
        cands.append(normalize(s[ok]))
    if m >= 3:
        i, j, k = np.array(list(combinations(range(m), 3))).T
        c = np.cross(p[j] - p[i], p[k] - p[i])
        ok = np.linalg.norm(c, axis=1) > 1e-14
        c = normalize(c[ok])
        cands.extend([c, -c])
    cand = np.vstack(cands)
    margins = (cand @ p.T).min(axis=1)
    best = int(np.argmax(margins))
    return cand[best], float(margins[best])


def _hemisphere_margin_active(p: np.ndarray, max_rounds: int = 200) -> Tuple[np.ndarray, float]:
    # the optimum is fixed by at most three points: solve exactly on a small
    # working set and add the worst point until no point beats the set margin
    work = [int(np.argmin(p @ normalize(p.mean(axis=0) + 1e-300)))] if len(p) else []
    work = sorted(set(work) | {0, len(p) // 2, len(p) - 1})
    best = (np.array([0.0, 0.0, 1.0]), -np.inf)
    for _ in range(max_rounds):
        pole, t = hemisphere_margin(p[work])
        vals = p @ pole
        worst = int(np.argmin(vals))
        if vals[worst] > best[1]:
            best = (pole, float(vals[worst]))
        if vals[worst] >= t - 1e-13 or worst in work:
            return pole, float(vals[worst])
        work.append(worst)
        if len(work) > EXHAUSTIVE_LIMIT:
            break
    return best


def hemisphere_pole(points) -> Optional[np.ndarray]:
    """Pole of an open hemisphere containing all points, or None."""
    pole, t = hemisphere_margin(points)
    return pole if t > LP_MARGIN else None


# charts ------------------------------------------------------------------------

def tangent_basis(pole: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Right-handed basis (e1, e2) of the tangent plane at ``pole``."""
    axis = np.eye(3)[int(np.argmin(np.abs(pole)))]
    e1 = normalize(_cross(pole, axis))
    e2 = np.array(_cross(pole, e1))
    return e1, e2


def gnomonic(points, pole: np.ndarray) -> np.ndarray:
    """Central projection onto the tangent plane at ``pole`` (2D coords)."""
    p = np.asarray(points, dtype=float)
    e1, e2 = tangent_basis(pole)
    h = p @ pole
    return np.stack([(p @ e1) / h, (p @ e2) / h], axis=-1)


def gnomonic_inverse(xy, pole: np.ndarray) -> np.ndarray:
    xy = np.asarray(xy, dtype=float)
    e1, e2 = tangent_basis(pole)
    p = pole + xy[..., :1] * e1 + xy[..., 1:2] * e2
    return normalize(p)


# orientation and winding ---------------------------------------------------------

def orientation(poly: SphericalPolygon) -> int:
    """+1 if the polygon winds counter-clockwise around its enclosed region.

    Hemispherical polygons are decided in the gnomonic chart; otherwise the
    smaller of the two complementary regions is taken as the enclosed one.
    """
    pole = hemisphere_pole(poly.vertices)
    if pole is not None:
        return 1 if planar.signed_area(gnomonic(poly.vertices, pole)) > 0 else -1
    left = float(ccw_angles(poly).sum()) - (len(poly) - 2) * np.pi
    return 1 if left < TWO_PI else -1


def azimuth_winding(poly: SphericalPolygon, xi: np.ndarray) -> int:
    """Total azimuth swept around the axis ``xi`` divided by 2pi."""
    xi = normalize(xi)
    p = poly.vertices
    e1, e2 = tangent_basis(xi)
    az = np.arctan2(p @ e2, p @ e1)
    d = np.diff(np.append(az, az[0]))
    d = (d + np.pi) % TWO_PI - np.pi
    return int(np.rint(d.sum() / TWO_PI))


def _check_off_boundary(poly: SphericalPolygon, xi: np.ndarray, tol: float) -> None:
    a = poly.vertices
    b = np.roll(a, -1, axis=0)
    nrm = normalize(np.cross(a, b))
    for q in (xi, -xi):
        if np.any(np.linalg.norm(q - a, axis=1) < tol):
            raise PointOnBoundary("point coincides with a polygon vertex")
        near = np.nonzero(np.abs(nrm @ q) < tol)[0]
        for i in near:
            if _on_arc_margin(a[i], b[i], q) > -tol:
                raise PointOnBoundary("point lies on the polygon boundary")


def contains(poly: SphericalPolygon, xi: np.ndarray) -> bool:
    """Whether xi lies in the region to the left of the traversal."""
    left = float(ccw_angles(poly).sum()) - (len(poly) - 2) * np.pi
    # the fan from an apex measures the region not containing the antipode
    # of that apex, so fanning from -xi reports the region holding xi
    fan = fan_area(poly, -normalize(xi))
    return abs(fan - (left - 2 * TWO_PI)) < abs(fan - left)


def winding_number(poly: SphericalPolygon, xi, tol: float = 1e-12) -> int:
    """Winding number of the polygon around ``xi``.

    For polygons inside an open hemisphere the count is the azimuth sweep in
    the chart centred at ``xi``, taken as zero outside that hemisphere.
    Other polygons must be simple; they wind ``orientation`` times around
    points of their enclosed region and zero times elsewhere.
    """
    xi = normalize(xi)
    _check_off_boundary(poly, xi, tol)
    pole = hemisphere_pole(poly.vertices)
    if pole is not None:
        if xi @ pole <= 0:
            return 0
        return azimuth_winding(poly, xi)
    if not is_simple(poly).simple:
        raise NotSimple("winding of non-hemispherical polygons requires simplicity")
    s = orientation(poly)
    inside_left = contains(poly, xi)
    inside = inside_left if s > 0 else not inside_left
    return s if inside else 0


# kernels ----------------------------------------------------------------------------

@dataclass(frozen=True)
class SphericalKernel:
    """Kernel of a hemispherical polygon, stored in the gnomonic chart."""

    pole: np.ndarray
    chart_polygon: np.ndarray
    chart_kernel: np.ndarray
    vertices: np.ndarray

    @property
    def empty(self) -> bool:
        return len(self.chart_kernel) == 0

    @property
    def area(self) -> float:
        return 0.0 if self.empty else planar.signed_area(self.chart_kernel)

    def contains(self, p: np.ndarray, strict: bool = True) -> bool:
        if self.empty or p @ self.pole <= 0:
            return False
        q = gnomonic(p, self.pole)
        if not planar.point_in_polygon(q, self.chart_kernel):
            return False
        if strict:
            scale = float(np.max(np.abs(self.chart_kernel)))
            return planar.distance_to_boundary(q, self.chart_kernel) > 1e-12 * max(scale, 1.0)
        return True


def star_shape_kernel(poly: SphericalPolygon, pole: Optional[np.ndarray] = None,
                      check_simple: bool = True) -> SphericalKernel:
    """Kernel of a simple polygon lying in an open hemisphere.

    Great arcs are straight in the gnomonic chart, so the kernel is the
    planar kernel of the projected polygon, mapped back to the sphere.
    """
    if check_simple and not is_simple(poly).simple:
        raise NotSimple("kernel requires a simple polygon")
    if pole is None:
        pole = hemisphere_pole(poly.vertices)
        if pole is None:
            raise NotHemispherical("polygon is not contained in an open hemisphere")
    chart = gnomonic(poly.vertices, pole)
    ccw = chart if planar.signed_area(chart) > 0 else chart[::-1]
    ker = planar.kernel(ccw)
    verts = gnomonic_inverse(ker, pole) if len(ker) else np.zeros((0, 3))
    return SphericalKernel(pole, chart, ker, verts)
