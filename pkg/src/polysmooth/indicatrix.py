"""Plane sections of the infinite vertex star, asymptotic directions and
their admissible cones."""

from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import linprog

from . import planar, sphere
from .curvature import TangentFrame, gaussian_curvature, inflection_flags, vertex_smoothness
from .errors import EmptyKernel, GeometryError, PlaneThroughApex, WrongCurvatureSign
from .mesh import VertexStar, cross3

COLLINEAR_SIN = 1e-9
PROBE_OFFSET_REL = 1e-2


def _rotate(e: np.ndarray, axis: np.ndarray, angle: float) -> np.ndarray:
    return np.cos(angle) * e + np.sin(angle) * np.cross(axis, e)


@dataclass(frozen=True)
class Wedge:
    """Unbounded planar sector spanned counter-clockwise from ``ray_a`` to
    ``ray_b`` about ``normal``; ``part`` is 1 or 2 for the halves of a split
    reflex face and 0 otherwise."""

    face: int
    ray_a: np.ndarray
    ray_b: np.ndarray
    normal: np.ndarray
    part: int = 0


@dataclass(frozen=True)
class InfiniteStar:
    apex: np.ndarray
    wedges: Tuple[Wedge, ...]
    scale: float

    def __len__(self) -> int:
        return len(self.wedges)


def infinite_star(star: VertexStar) -> InfiniteStar:
    """Extend every face of the star to an unbounded wedge at its centre.

    Faces with a reflex angle are cut by the ray bisecting that angle, so
    every wedge is convex.
    """
    wedges: List[Wedge] = []
    for r in star.ring:
        a, b = r.edge_in, r.edge_out
        if r.reflex:
            mid = sphere.normalize(_rotate(a, r.normal, 0.5 * r.angle))
            wedges.append(Wedge(r.face, a, mid, r.normal, 1))
            wedges.append(Wedge(r.face, mid, b, r.normal, 2))
        else:
            wedges.append(Wedge(r.face, a, b, r.normal, 0))
    scale = max(float(np.max(np.linalg.norm(r.points - star.center, axis=1))) for r in star.ring)
    return InfiniteStar(star.center.copy(), tuple(wedges), scale)


# plane sections ---------------------------------------------------------------

class SectionClass(str, Enum):
    EMPTY = "Empty"
    DISCRETE_ELLIPSE = "DiscreteEllipse"
    DISCRETE_HYPERBOLA = "DiscreteHyperbola"
    THREE_COMPONENTS = "ThreeComponents"
    SINGLE_SEGMENT_BRANCH = "SingleSegmentBranch"
    NESTED_CONVEX = "NestedConvex"
    OTHER = "Other"


@dataclass(frozen=True)
class Polyline:
    """Section component.

    ``points`` are the finite vertices (3D, each on a wedge ray).  Open
    components also carry the outgoing directions of their two unbounded
    ends: ``start_dir`` points from ``points[0]`` away from the curve,
    ``end_dir`` from ``points[-1]``.  ``faces`` lists the original face of
    every piece in order, unbounded pieces included.
    """

    points: np.ndarray
    closed: bool
    faces: Tuple[int, ...]
    start_dir: Optional[np.ndarray] = None
    end_dir: Optional[np.ndarray] = None

    @property
    def segment_count(self) -> int:
        return len(self.faces)


@dataclass(frozen=True)
class InflectionEdge:
    polyline: int
    index: int
    face: int


@dataclass(frozen=True)
class SectionResult:
    polylines: Tuple[Polyline, ...]
    classification: SectionClass
    inflection_edges: Tuple[InflectionEdge, ...]
    plane_point: np.ndarray
    plane_normal: np.ndarray

    @property
    def is_hyperbola(self) -> bool:
        return self.classification in (SectionClass.DISCRETE_HYPERBOLA,
                                       SectionClass.SINGLE_SEGMENT_BRANCH)


@dataclass
class _Piece:
    face: int
    part: int
    start: Optional[np.ndarray]  # point on ray_a, or None if it comes from infinity
    end: Optional[np.ndarray]    # point on ray_b, or None if it runs to infinity
    direction: Optional[np.ndarray] = None  # for unbounded pieces, towards infinity


def _wedge_piece(w: Wedge, apex: np.ndarray, normal: np.ndarray, c: float) -> Optional[_Piece]:
    ha, hb = float(w.ray_a @ normal), float(w.ray_b @ normal)
    hit_a, hit_b = ha * c > 0, hb * c > 0
    if not hit_a and not hit_b:
        return None
    pa = apex + (c / ha) * w.ray_a if hit_a else None
    pb = apex + (c / hb) * w.ray_b if hit_b else None
    if hit_a and hit_b:
        return _Piece(w.face, w.part, pa, pb)
    if hit_a:
        # along the section line away from ray_a, towards ray_b's side
        d = sphere.normalize(abs(hb) * w.ray_a + abs(ha) * w.ray_b)
        return _Piece(w.face, w.part, pa, None, d)
    d = sphere.normalize(abs(hb) * w.ray_a + abs(ha) * w.ray_b)
    return _Piece(w.face, w.part, None, pb, d)


def _chains(pieces: List[Optional[_Piece]]) -> List[Tuple[List[_Piece], bool]]:
    """Group consecutive wedge pieces into connected components."""
    k = len(pieces)
    if all(p is not None and p.start is not None and p.end is not None for p in pieces):
        return [(list(pieces), True)]
    out = []
    for i, p in enumerate(pieces):
        if p is None or p.start is not None:
            continue
        # p comes from infinity; follow it until a piece runs to infinity
        chain = [p]
        j = i
        while chain[-1].end is not None:
            j = (j + 1) % k
            q = pieces[j]
            if q is None or q.start is None:
                raise GeometryError("section pieces do not connect")
            chain.append(q)
        out.append((chain, False))
    return out


def _polyline(chain: List[_Piece], closed: bool) -> Polyline:
    """Turn a chain of pieces into a polyline, joining the two halves of a
    split reflex face so that the split stays invisible."""
    n = len(chain)
    if closed:
        pts = [p.start for p in chain]
        # vertex i sits between pieces i-1 and i
        on_split = [chain[i - 1].face == chain[i].face and chain[i - 1].part == 1
                    and chain[i].part == 2 for i in range(n)]
        faces = [chain[i].face for i in range(n) if not on_split[i]]
        keep = [pts[i] for i in range(n) if not on_split[i]]
        return Polyline(np.array(keep), True, tuple(faces))
    pts = [p.end for p in chain[:-1]]
    # finite vertex i sits between pieces i and i+1
    on_split = [chain[i].face == chain[i + 1].face and chain[i].part == 1
                and chain[i + 1].part == 2 for i in range(n - 1)]
    faces = [chain[0].face] + [chain[i + 1].face for i in range(n - 1) if not on_split[i]]
    keep = [pts[i] for i in range(n - 1) if not on_split[i]]
    if not keep:
        # a straight line through a split face keeps one point to anchor it
        keep = [pts[0]]
        faces = [chain[0].face, chain[0].face]
    return Polyline(np.array(keep).reshape(-1, 3), False, tuple(faces),
                    chain[0].direction, chain[-1].direction)


def _to2d(points: np.ndarray, origin: np.ndarray, normal: np.ndarray) -> np.ndarray:
    e1, e2 = sphere.tangent_basis(normal)
    d = points - origin
    return np.stack([d @ e1, d @ e2], axis=-1)


def _dir2d(d: np.ndarray, normal: np.ndarray) -> np.ndarray:
    e1, e2 = sphere.tangent_basis(normal)
    return np.array([d @ e1, d @ e2])


def _turns(pl: Polyline, origin: np.ndarray, normal: np.ndarray, tol: float) -> List[int]:
    """Turn sign at every finite vertex (+1 left, -1 right, 0 straight)."""
    p = _to2d(pl.points, origin, normal)
    n = len(p)
    out = []
    for i in range(n):
        if pl.closed:
            a, b = p[i] - p[i - 1], p[(i + 1) % n] - p[i]
        else:
            a = p[i] - p[i - 1] if i > 0 else -_dir2d(pl.start_dir, normal)
            b = p[i + 1] - p[i] if i < n - 1 else _dir2d(pl.end_dir, normal)
        cr = float(planar.cross2(a, b)) / max(np.linalg.norm(a) * np.linalg.norm(b), 1e-300)
        out.append(0 if abs(cr) < tol else (1 if cr > 0 else -1))
    return out


def _inflection_edges(lines: Sequence[Polyline], origin, normal) -> List[InflectionEdge]:
    out = []
    for li, pl in enumerate(lines):
        t = _turns(pl, origin, normal, 1e-12)
        n = len(t)
        # edge i joins finite vertices i and i+1; open pieces are offset by one
        for i in range(n if pl.closed else n - 1):
            j = (i + 1) % n
            if t[i] * t[j] < 0:
                face = pl.faces[j] if pl.closed else pl.faces[i + 1]
                out.append(InflectionEdge(li, i, face))
    return out


def _separable(a: Polyline, b: Polyline, origin, normal, scale: float) -> bool:
    """Strict separation of the convex hulls of two open branches,
    unbounded ends included as recession directions."""
    pa, pb = _to2d(a.points, origin, normal), _to2d(b.points, origin, normal)
    da = [_dir2d(d, normal) for d in (a.start_dir, a.end_dir)]
    db = [_dir2d(d, normal) for d in (b.start_dir, b.end_dir)]
    # variables w1, w2, t, delta; maximise delta
    rows, rhs = [], []
    for p in pa:  # w.p - t + delta <= 0
        rows.append([p[0], p[1], -1.0, 1.0]); rhs.append(0.0)
    for q in pb:  # -w.q + t + delta <= 0
        rows.append([-q[0], -q[1], 1.0, 1.0]); rhs.append(0.0)
    for d in da:
        rows.append([d[0], d[1], 0.0, 0.0]); rhs.append(0.0)
    for d in db:
        rows.append([-d[0], -d[1], 0.0, 0.0]); rhs.append(0.0)
    res = linprog([0, 0, 0, -1.0], A_ub=np.array(rows), b_ub=np.array(rhs),
                  bounds=[(-1, 1), (-1, 1), (None, None), (None, 1.0)], method="highs")
    return res.status == 0 and -res.fun > 1e-9 * scale


def _is_straight(pl: Polyline, origin, normal) -> bool:
    return all(t == 0 for t in _turns(pl, origin, normal, 1e-9))


def plane_section(V: InfiniteStar, point, normal) -> SectionResult:
    """Intersect the infinite star with a plane and classify the section."""
    point = np.asarray(point, dtype=float)
    normal = sphere.normalize(normal)
    c = float((point - V.apex) @ normal)
    if abs(c) <= 1e-12 * V.scale:
        raise PlaneThroughApex("the plane passes through the apex")
    pieces = [_wedge_piece(w, V.apex, normal, c) for w in V.wedges]
    lines = [_polyline(ch, closed) for ch, closed in _chains(pieces)]
    origin = V.apex + c * normal
    infl = _inflection_edges(lines, origin, normal)
    cls = _classify(lines, infl, origin, normal, abs(c))
    return SectionResult(tuple(lines), cls, tuple(infl), point, normal)


def _classify(lines, infl, origin, normal, scale) -> SectionClass:
    if not lines:
        return SectionClass.EMPTY
    if len(lines) == 1 and lines[0].closed:
        poly = _to2d(lines[0].points, origin, normal)
        if planar.signed_area(poly) < 0:
            poly = poly[::-1]
        return SectionClass.DISCRETE_ELLIPSE if planar.is_convex(poly) else SectionClass.OTHER
    if any(pl.closed for pl in lines):
        return SectionClass.OTHER
    if len(lines) == 3:
        return SectionClass.THREE_COMPONENTS
    if len(lines) != 2 or infl:
        return SectionClass.OTHER
    if not _separable(lines[0], lines[1], origin, normal, scale):
        return SectionClass.NESTED_CONVEX
    if any(_is_straight(pl, origin, normal) for pl in lines):
        return SectionClass.SINGLE_SEGMENT_BRANCH
    return SectionClass.DISCRETE_HYPERBOLA


def probe_offset(star: VertexStar) -> float:
    return PROBE_OFFSET_REL * star.min_edge_length()


def dupin_section(star: VertexStar, normal, side: int, offset: Optional[float] = None,
                  V: Optional[InfiniteStar] = None) -> SectionResult:
    """Section by the plane parallel to the plane through v orthogonal to
    ``normal``, shifted by ``side * offset`` along ``normal``."""
    normal = sphere.normalize(normal)
    if offset is None:
        offset = probe_offset(star)
    V = V or infinite_star(star)
    return plane_section(V, star.center + side * offset * normal, normal)


# asymptotic directions ------------------------------------------------------------

@dataclass(frozen=True)
class AsymptoticDirection:
    direction: np.ndarray
    face: int


@dataclass(frozen=True)
class AsymptoticDirections:
    directions: Tuple[AsymptoticDirection, ...]
    collinear_pairs: Tuple[Tuple[int, int], ...]
    normal: np.ndarray


def _zero_crossings(V: InfiniteStar, normal: np.ndarray) -> List[AsymptoticDirection]:
    out: List[AsymptoticDirection] = []
    tol = 1e-12
    for w in V.wedges:
        ha, hb = float(w.ray_a @ normal), float(w.ray_b @ normal)
        if abs(ha) <= tol:
            out.append(AsymptoticDirection(w.ray_a.copy(), w.face))
            continue
        if abs(hb) > tol and ha * hb < 0:
            d = sphere.normalize(abs(hb) * w.ray_a + abs(ha) * w.ray_b)
            out.append(AsymptoticDirection(d, w.face))
    return out


def _collinear_pairs(dirs: Sequence[AsymptoticDirection]) -> List[Tuple[int, int]]:
    """Opposite directions inside one face: the tangent plane cuts that
    face along a full line through the vertex."""
    out = []
    for i in range(len(dirs)):
        for j in range(i + 1, len(dirs)):
            if dirs[i].face != dirs[j].face:
                continue
            a, b = dirs[i].direction, dirs[j].direction
            if np.linalg.norm(np.cross(a, b)) < COLLINEAR_SIN and a @ b < 0:
                out.append((i, j))
    return out


def asymptotic_directions_vertex(star: VertexStar, frame: Optional[TangentFrame]
                                 ) -> AsymptoticDirections:
    """Rays of the section of the infinite star by the tangent plane."""
    if gaussian_curvature(star) > 0:
        raise WrongCurvatureSign("asymptotic directions need negative curvature")
    if frame is None or frame.kernel.empty:
        raise EmptyKernel("the Gauss image has no star-shaped kernel")
    n = sphere.normalize(frame.n)
    dirs = _zero_crossings(infinite_star(star), n)
    return AsymptoticDirections(tuple(dirs), tuple(_collinear_pairs(dirs)), n)


def asymptotic_directions_at(star: VertexStar, normal) -> AsymptoticDirections:
    """Same as :func:`asymptotic_directions_vertex` for an explicit normal."""
    n = sphere.normalize(normal)
    dirs = _zero_crossings(infinite_star(star), n)
    return AsymptoticDirections(tuple(dirs), tuple(_collinear_pairs(dirs)), n)


# admissible cones ----------------------------------------------------------------

@dataclass(frozen=True)
class AsymptoticCone:
    """Open cone of admissible asymptotic directions inside one face.

    Angles are measured from the incoming edge counter-clockwise about the
    face normal.  ``alpha1`` and ``alpha2`` separate the cone from the ends
    of the range available in the face, ``alpha0`` is its opening angle.
    For a reflex face that does not inflect the cone is a double cone and
    the range is ``alpha - pi``; for a reflex face that does inflect it is
    ``2 pi - alpha`` starting at ``alpha - pi``.
    """

    face: int
    alpha: float
    alpha0: float
    alpha1: float
    alpha2: float
    low: float
    high: float
    double: bool
    boundary: Tuple[np.ndarray, np.ndarray]
    edge_in: np.ndarray
    normal: np.ndarray

    def angle_of(self, d: np.ndarray) -> float:
        return _line_angle(d, self.edge_in, self.normal)

    def contains(self, d: np.ndarray, tol: float = 1e-9) -> bool:
        """Whether the line of ``d`` lies in the closed cone."""
        t = self.angle_of(d)
        return self.low - tol <= t <= self.high + tol


def _line_angle(d: np.ndarray, e_in: np.ndarray, normal: np.ndarray) -> float:
    """Angle of the line through ``d`` from ``e_in``, in [0, pi)."""
    t = float(np.arctan2(cross3(normal, e_in) @ d, e_in @ d))
    t = t % np.pi
    return 0.0 if t >= np.pi - 1e-15 else t


def asymptotic_cones(star: VertexStar, frame: Optional[TangentFrame] = None
                     ) -> List[AsymptoticCone]:
    """Cones swept by the asymptotic direction of each inflection face (and
    the reflex face that does not inflect) as the tangent normal ranges
    over the kernel of the Gauss image."""
    if gaussian_curvature(star) > 0:
        raise WrongCurvatureSign("asymptotic cones need negative curvature")
    if frame is None:
        frame = vertex_smoothness(star).frame
    if frame is None or frame.kernel.empty:
        raise EmptyKernel("the Gauss image has no star-shaped kernel")
    infl = inflection_flags(star)
    ker = frame.kernel.vertices
    cones = []
    for i, r in enumerate(star.ring):
        if not (infl[i] or r.reflex):
            continue
        if r.reflex and infl[i]:
            start, span, double = r.angle - np.pi, 2 * np.pi - r.angle, False
        elif r.reflex:
            start, span, double = 0.0, r.angle - np.pi, True
        else:
            start, span, double = 0.0, r.angle, False
        # the rays k x normal over the convex kernel form a convex cone, so
        # their angles unwrap around the ray at the frame normal; the lines
        # are then shifted by multiples of pi onto the available range
        side = cross3(r.normal, r.edge_in)

        def ray_angle(d):
            return float(np.arctan2(side @ d, r.edge_in @ d))

        dc = cross3(frame.n, r.normal)
        if np.linalg.norm(dc) < 1e-12:
            raise EmptyKernel("tangent normal coincides with a face normal")
        tc = ray_angle(dc)
        thetas = []
        for k in ker:
            d = cross3(k, r.normal)
            if np.linalg.norm(d) < 1e-12:
                continue
            thetas.append(tc + (ray_angle(d) - tc + np.pi) % (2 * np.pi) - np.pi)
        if not thetas:
            raise EmptyKernel("kernel degenerates to the face normal")
        best = None
        for shift in np.pi * np.arange(-3, 4):
            lo = max(min(thetas) + shift, start)
            hi = min(max(thetas) + shift, start + span)
            if best is None or hi - lo > best[1] - best[0]:
                best = (lo, hi)
        lo, hi = float(best[0]), float(best[1])
        bnd = (_rotate(r.edge_in, r.normal, lo), _rotate(r.edge_in, r.normal, hi))
        cones.append(AsymptoticCone(r.face, r.angle, hi - lo, lo - start, start + span - hi,
                                    lo, hi, double, bnd, r.edge_in, r.normal))
    return cones
