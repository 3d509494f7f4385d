"""Per-face theory: curvature-sign patterns around a face, the angle sums
of the vertex Gauss images at the face normal, face shapes, points of
contact, face asymptotic directions and discrete parabolic segments."""

from dataclasses import dataclass, field, replace
from enum import Enum, IntEnum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import planar, sphere
from .curvature import (ZERO_K, gauss_image, gaussian_curvature, inflection_flags,
                        oriented_image_angle)
from .errors import (BoundaryFace, MixedSigns, NoInteriorSegment, NotDecomposable,
                     PolysmoothError, WrongSign)
from .mesh import FacePlane, Mesh, vertex_star

TWO_PI = 2.0 * np.pi
SUM_TOL = 1e-9


class FaceClassLabel(str, Enum):
    CONVEX_POSITIVE = "ConvexPositive"
    PSEUDO_QUAD_NEGATIVE = "PseudoQuadNegative"
    PSEUDO_TRIANGLE_NEGATIVE4 = "PseudoTriangleNegative4"
    PSEUDO_TRIANGLE_NEGATIVE2 = "PseudoTriangleNegative2"
    MIXED_BLOCK_OK = "MixedBlockOK"
    MONKEY_SADDLE = "MonkeySaddle"
    VIOLATING = "Violating"


class CornerType(IntEnum):
    """How a negatively curved vertex sees the face: angle below or above
    pi, combined with the inflection property."""

    CONVEX = 1
    CONVEX_INFLECTION = 2
    REFLEX = 3
    REFLEX_INFLECTION = 4


def corner_type(alpha: float, inflection: bool) -> CornerType:
    if alpha < np.pi:
        return CornerType.CONVEX_INFLECTION if inflection else CornerType.CONVEX
    return CornerType.REFLEX_INFLECTION if inflection else CornerType.REFLEX


# per-face input ----------------------------------------------------------------

@dataclass(frozen=True)
class FaceData:
    """Everything the face analysis needs, detached from the mesh.

    ``polygon`` is the counter-clockwise outline in the face plane;
    ``signs`` are the curvature signs (0 for a vanishing defect) and
    ``inflection[i]`` tells whether the face inflects at vertex ``i``.
    """

    face: int
    vertex_ids: Tuple[int, ...]
    polygon: np.ndarray
    signs: Tuple[int, ...]
    inflection: Tuple[bool, ...]
    simple: Tuple[bool, ...] = ()
    synthetic: Tuple[bool, ...] = ()
    geometric_angles: Optional[Tuple[float, ...]] = None
    plane: Optional[FacePlane] = None

    @property
    def n(self) -> int:
        return len(self.vertex_ids)

    @property
    def angles(self) -> np.ndarray:
        return planar.interior_angles(self.polygon)

    def to3d(self, q: np.ndarray) -> np.ndarray:
        if self.plane is None:
            q = np.asarray(q, dtype=float)
            return np.concatenate([q, np.zeros(q.shape[:-1] + (1,))], axis=-1)
        return self.plane.to3d(q)


@dataclass
class VertexInfo:
    K: float
    faces: Tuple[int, ...]
    inflection: Tuple[bool, ...]
    simple: bool
    image_angles: Optional[np.ndarray]


def vertex_info(mesh: Mesh, v: int) -> VertexInfo:
    star = vertex_star(mesh, v)
    K = gaussian_curvature(star)
    infl = tuple(inflection_flags(star))
    g = gauss_image(star)
    simple = sphere.is_simple(g.polygon).simple
    angles = None
    if abs(K) >= ZERO_K:
        angles = sphere.interior_angles(g.polygon, 1 if K > 0 else -1)
    return VertexInfo(K, tuple(star.faces), infl, simple, angles)


def face_data(mesh: Mesh, f: int, cache: Optional[Dict[int, VertexInfo]] = None) -> FaceData:
    """Collect the face outline and per-vertex data for face ``f``."""
    if mesh.is_boundary_face(f):
        raise BoundaryFace(f"face {f} touches the boundary")
    cache = {} if cache is None else cache
    ids = mesh.faces[f]
    plane = mesh.face_plane(f)
    signs, infl, simple, geo = [], [], [], []
    for v in ids:
        if v not in cache:
            cache[v] = vertex_info(mesh, v)
        info = cache[v]
        i = info.faces.index(f)
        signs.append(0 if abs(info.K) < ZERO_K else (1 if info.K > 0 else -1))
        infl.append(info.inflection[i])
        simple.append(info.simple)
        geo.append(np.nan if info.image_angles is None else float(info.image_angles[i]))
    return FaceData(f, tuple(ids), plane.polygon2d, tuple(signs), tuple(infl), tuple(simple),
                    tuple(False for _ in ids), tuple(geo), plane)


# angle accounting ---------------------------------------------------------------

def vertex_contribution(alpha: float, inflection: bool, sign: int) -> float:
    """Interior angle of g(v) at the face normal, oriented by the curvature
    sign: positive for negative curvature, negative for positive curvature."""
    a = oriented_image_angle(alpha, inflection, sign)
    return a if sign < 0 else -a


def sign_change_edges(signs: Sequence[int]) -> List[int]:
    """Indices i of the boundary edges (i, i+1) whose end signs differ."""
    k = len(signs)
    return [i for i in range(k) if signs[i] != signs[(i + 1) % k]]


@dataclass(frozen=True)
class FaceAsymptoticSegment:
    start: np.ndarray
    end: np.ndarray
    vertex: int
    counts_twice: bool = False


@dataclass(frozen=True)
class FaceReport:
    face: int
    signs: Tuple[int, ...]
    sign_change_edges: int
    oriented_angle_sum_at_normal: float
    c_counts: Tuple[int, int, int, int]
    n_plus: int
    n_minus: int
    label: FaceClassLabel
    reasons: Tuple[str, ...] = ()
    corners: Tuple[int, ...] = ()
    inflection_vertices: Tuple[int, ...] = ()
    geometric_angle_sum: Optional[float] = None
    positive_partial_sum: Optional[float] = None
    negative_partial_sum: Optional[float] = None
    point_of_contact: Optional[np.ndarray] = None
    parabolic_segment: Optional[Tuple[np.ndarray, np.ndarray]] = None
    asymptotic_segments: Tuple[FaceAsymptoticSegment, ...] = ()
    caveats: Tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return self.label != FaceClassLabel.VIOLATING


def _c_counts(data: FaceData) -> Tuple[int, int, int, int]:
    c = [0, 0, 0, 0]
    for a, s, b in zip(data.angles, data.signs, data.inflection):
        if s < 0:
            c[corner_type(a, b) - 1] += 1
    return tuple(c)


def _geometric_sum(data: FaceData, mixed: bool) -> Optional[float]:
    if data.geometric_angles is None:
        return None
    g = np.asarray(data.geometric_angles)
    if np.any(np.isnan(g)):
        return None
    if mixed:
        return float(sum(a if s < 0 else -a for a, s in zip(g, data.signs)))
    return float(g.sum())


def _common(data: FaceData) -> Tuple[List[str], List[int], Tuple[int, ...]]:
    reasons = []
    if any(s == 0 for s in data.signs):
        reasons.append("ZeroCurvatureVertex")
    if data.simple and not all(data.simple):
        reasons.append("NonSimpleGaussImage")
    ang = data.angles
    corners = [i for i in range(data.n) if ang[i] < np.pi]
    infl = tuple(data.vertex_ids[i] for i in range(data.n) if data.inflection[i])
    return reasons, corners, infl


# uniform-sign faces --------------------------------------------------------------------

def point_of_contact_data(data: FaceData) -> Optional[np.ndarray]:
    """Centroid of the face (positive) or of its kernel (negative)."""
    if all(s > 0 for s in data.signs):
        c = planar.centroid(data.polygon)
        return data.to3d(c)
    ker = planar.kernel(data.polygon)
    if len(ker) == 0:
        return None
    return data.to3d(planar.centroid(ker))


def point_of_contact(mesh: Mesh, f: int) -> Optional[np.ndarray]:
    return point_of_contact_data(face_data(mesh, f))


def classify_uniform_data(data: FaceData) -> FaceReport:
    signs = data.signs
    if any(s > 0 for s in signs) and any(s < 0 for s in signs):
        raise MixedSigns(f"face {data.face} has vertices of both curvature signs")
    reasons, corners, infl = _common(data)
    ang = data.angles
    n = data.n
    positive = all(s > 0 for s in signs if s != 0) and any(s > 0 for s in signs)
    corner_ids = tuple(data.vertex_ids[i] for i in corners)
    if positive:
        total = float(np.sum(np.pi - ang))
        if not planar.is_convex(data.polygon):
            reasons.append("NotConvex")
        if infl:
            reasons.append("InflectionAtPositiveVertex")
        if abs(total - TWO_PI) > SUM_TOL:
            reasons.append("AngleSumNot2Pi")
        label = FaceClassLabel.VIOLATING if reasons else FaceClassLabel.CONVEX_POSITIVE
        return FaceReport(data.face, signs, 0, total, (0, 0, 0, 0), n, 0, label, tuple(reasons),
                          corner_ids, infl, _geometric_sum(data, False),
                          point_of_contact=point_of_contact_data(data))

    c = _c_counts(data)
    c1, c2, c3, c4 = c
    total = float(sum(vertex_contribution(a, b, -1) for a, b in zip(ang, data.inflection)))
    # the 2 pi test in exact integer form
    balanced = (c1 - c3 == 4 - n) and (2 * c1 + c2 + c4 == 4)
    label = FaceClassLabel.VIOLATING
    if balanced:
        if c == (0, 4, n - 4, 0):
            label = FaceClassLabel.PSEUDO_QUAD_NEGATIVE
        elif c == (0, 3, n - 4, 1):
            label = FaceClassLabel.PSEUDO_TRIANGLE_NEGATIVE4
        elif c == (1, 2, n - 3, 0):
            label = FaceClassLabel.PSEUDO_TRIANGLE_NEGATIVE2
        else:
            reasons.append("UnexpectedCornerPattern")
    elif abs(total - 2 * TWO_PI) < SUM_TOL:
        label = FaceClassLabel.MONKEY_SADDLE
    else:
        reasons.append("AngleSumNot2Pi")
    A = point_of_contact_data(data)
    if A is None:
        reasons.append("NotStarShaped")
    if label == FaceClassLabel.MONKEY_SADDLE:
        reasons.append("MonkeySaddle")
    if reasons and label != FaceClassLabel.MONKEY_SADDLE:
        label = FaceClassLabel.VIOLATING
    segs: Tuple[FaceAsymptoticSegment, ...] = ()
    if A is not None and label in _NEGATIVE_LABELS:
        segs = tuple(_asymptotic_segments(data, A, label))
    return FaceReport(data.face, signs, 0, total, c, 0, n, label, tuple(reasons), corner_ids,
                      infl, _geometric_sum(data, True), point_of_contact=A,
                      asymptotic_segments=segs)


_NEGATIVE_LABELS = (FaceClassLabel.PSEUDO_QUAD_NEGATIVE, FaceClassLabel.PSEUDO_TRIANGLE_NEGATIVE4,
                    FaceClassLabel.PSEUDO_TRIANGLE_NEGATIVE2)


def classify_face_uniform(mesh: Mesh, f: int,
                          cache: Optional[Dict[int, VertexInfo]] = None) -> FaceReport:
    """Shape class of a face whose vertices share one curvature sign."""
    return classify_uniform_data(face_data(mesh, f, cache))


def _asymptotic_segments(data: FaceData, A: np.ndarray,
                         label: FaceClassLabel) -> List[FaceAsymptoticSegment]:
    pts = data.to3d(data.polygon)
    out = [FaceAsymptoticSegment(A, pts[i], data.vertex_ids[i])
           for i in range(data.n) if data.inflection[i]]
    if label == FaceClassLabel.PSEUDO_TRIANGLE_NEGATIVE2:
        ang = data.angles
        third = [i for i in range(data.n) if ang[i] < np.pi and not data.inflection[i]]
        for i in third:
            out.append(FaceAsymptoticSegment(A, pts[i], data.vertex_ids[i], counts_twice=True))
    return out


def face_asymptotic_directions(mesh: Mesh, f: int,
                               A: Optional[np.ndarray] = None) -> List[FaceAsymptoticSegment]:
    """Segments from the point of contact to the vertices where the face
    inflects.  In the two-inflection triangle case the segment to the third
    corner is added and marked as counting twice."""
    data = face_data(mesh, f)
    if any(s >= 0 for s in data.signs):
        raise WrongSign(f"face {f} is not uniformly negatively curved")
    rep = classify_uniform_data(data)
    if A is None:
        A = rep.point_of_contact
    if A is None:
        return []
    label = rep.label if rep.label in _NEGATIVE_LABELS else FaceClassLabel.VIOLATING
    return _asymptotic_segments(data, np.asarray(A, dtype=float), label)


# mixed faces ---------------------------------------------------------------------------

def classify_mixed_data(data: FaceData) -> FaceReport:
    signs = data.signs
    if not (any(s > 0 for s in signs) and any(s < 0 for s in signs)):
        raise MixedSigns(f"face {data.face} does not change curvature sign")
    reasons, corners, infl = _common(data)
    ang = data.angles
    changes = sign_change_edges(signs)
    if len(changes) != 2:
        reasons.append("TooManySignChanges")
    pos_partial = float(sum(np.pi - a for a, s in zip(ang, signs) if s > 0))
    neg_partial = float(sum(vertex_contribution(a, b, -1)
                            for a, b, s in zip(ang, data.inflection, signs) if s < 0))
    total = neg_partial - pos_partial
    c = _c_counts(data)
    n_plus = sum(1 for s in signs if s > 0)
    n_minus = sum(1 for s in signs if s < 0)
    if abs(total) > SUM_TOL or n_minus - 2 != c[2] - c[0]:
        reasons.append("UnbalancedAngleSum")
    if pos_partial >= TWO_PI - SUM_TOL or neg_partial >= TWO_PI - SUM_TOL:
        reasons.append("PartialSumTooLarge")
    pos = data.polygon[[i for i in range(data.n) if signs[i] > 0]]
    if any(planar.in_convex_hull(data.polygon[i], pos) for i in range(data.n) if signs[i] < 0):
        reasons.append("HullViolation")
    label = FaceClassLabel.VIOLATING if reasons else FaceClassLabel.MIXED_BLOCK_OK
    seg = None
    caveats: List[str] = []
    if len(changes) == 2:
        try:
            seg = parabolic_segment_data(data)
        except NoInteriorSegment:
            caveats.append("NoInteriorSegment")
    return FaceReport(data.face, signs, len(changes), total, c, n_plus, n_minus, label,
                      tuple(reasons), tuple(data.vertex_ids[i] for i in corners), infl,
                      _geometric_sum(data, True), pos_partial, neg_partial,
                      parabolic_segment=seg, caveats=tuple(caveats))


def classify_face_mixed(mesh: Mesh, f: int,
                        cache: Optional[Dict[int, VertexInfo]] = None) -> FaceReport:
    """Checks for a face across which the curvature sign changes."""
    return classify_mixed_data(face_data(mesh, f, cache))


PARABOLIC_PARAMETERS = ((0.5, 0.5), (0.25, 0.25), (0.25, 0.75), (0.75, 0.25), (0.75, 0.75))


def parabolic_segment_data(data: FaceData) -> Tuple[np.ndarray, np.ndarray]:
    """Straight segment inside the face joining its two sign-change edges."""
    changes = sign_change_edges(data.signs)
    if len(changes) != 2:
        raise NoInteriorSegment(f"face {data.face} has {len(changes)} sign-change edges")
    poly = data.polygon
    k = data.n
    (i, j) = changes
    for s, t in PARABOLIC_PARAMETERS:
        a = poly[i] + s * (poly[(i + 1) % k] - poly[i])
        b = poly[j] + t * (poly[(j + 1) % k] - poly[j])
        if planar.segment_inside(a, b, poly):
            return data.to3d(a), data.to3d(b)
    raise NoInteriorSegment(f"no interior parabolic segment in face {data.face}")


def parabolic_segment(mesh: Mesh, f: int) -> Optional[Tuple[np.ndarray, np.ndarray]]:
    rep = classify_face_mixed(mesh, f)
    return rep.parabolic_segment


def classify_face(mesh: Mesh, f: int,
                  cache: Optional[Dict[int, VertexInfo]] = None) -> FaceReport:
    """Dispatch to the uniform or mixed analysis."""
    data = face_data(mesh, f, cache)
    s = [x for x in data.signs if x != 0]
    if s and min(s) < 0 < max(s):
        return classify_mixed_data(data)
    if not s:
        return FaceReport(data.face, data.signs, 0, 0.0, (0, 0, 0, 0), 0, 0,
                          FaceClassLabel.VIOLATING, ("ZeroCurvatureVertex",))
    return classify_uniform_data(data)


# building blocks ----------------------------------------------------------------------

@dataclass(frozen=True)
class BuildingBlock:
    """One part of a split mixed face.  Split points carry ``synthetic``
    and count as positively curved corners."""

    data: FaceData
    pseudo_edges: Tuple[Tuple[int, int], ...]
    inflection_vertices: Tuple[int, ...]

    @property
    def polygon(self) -> np.ndarray:
        return self.data.polygon


def _is_corner(data: FaceData, i: int, ang: np.ndarray) -> bool:
    return data.synthetic[i] or ang[i] < np.pi


def block_shape(data: FaceData) -> Tuple[bool, Tuple[Tuple[int, int], ...], str]:
    """Test the building-block shape.  A block has at most one non-trivial
    pseudo-edge; either it inflects nowhere and has a single negative
    corner, or it inflects exactly at its two negative corners, which are
    joined by a pseudo-edge.  Returns (ok, non-trivial pseudo-edges,
    reason)."""
    ang = data.angles
    n = data.n
    corners = [i for i in range(n) if _is_corner(data, i, ang)]
    positive = [i for i in range(n) if data.signs[i] > 0 or data.synthetic[i]]
    negative_corners = sorted(i for i in corners if i not in positive)
    nontrivial = []
    for a, b in zip(corners, corners[1:] + corners[:1]):
        if (b - a) % n > 1 or len(corners) == 1:
            nontrivial.append((a, b))
    edges = tuple(nontrivial)
    infl = sorted(i for i in range(n) if data.inflection[i] and not data.synthetic[i])
    if any(ang[i] > np.pi for i in positive if not data.synthetic[i]):
        return False, edges, "ReflexPositiveVertex"
    if len(nontrivial) > 1:
        return False, edges, "SeveralPseudoEdges"
    if not infl:
        if len(negative_corners) != 1:
            return False, edges, "CornerCount"
        return True, edges, ""
    if infl != negative_corners or len(infl) != 2:
        return False, edges, "InflectionPattern"
    a, b = infl
    k = corners.index(a)
    if corners[(k + 1) % len(corners)] != b and corners[k - 1] != b:
        return False, edges, "InflectionPattern"
    if nontrivial and sorted(nontrivial[0]) != infl:
        return False, edges, "InflectionPattern"
    return True, edges, ""


def _split_targets(data: FaceData, v: int) -> List[Tuple[int, float]]:
    """Candidate endpoints (edge index, parameter) on the positive side:
    edges touching a positive vertex, first their positive ends, then
    midpoints."""
    n = data.n
    pos = [i for i in range(n) if data.signs[i] > 0 or data.synthetic[i]]
    out: List[Tuple[int, float]] = []
    for i in pos:
        out.append((i, 0.0))
    for i in range(n):
        j = (i + 1) % n
        if (i in pos or j in pos) and v not in (i, j):
            for t in (0.5, 0.25, 0.75):
                out.append((i, t))
    return out


def _split_at(data: FaceData, v: int) -> Optional[Tuple[FaceData, FaceData]]:
    """Cut the face by a segment from vertex ``v`` to the positive side so
    that both parts have a convex angle at ``v``."""
    n = data.n
    poly = data.polygon
    ang = data.angles
    for e, t in _split_targets(data, v):
        if t == 0.0:
            if e in (v, (v + 1) % n, (v - 1) % n):
                continue
            target = poly[e]
        else:
            target = poly[e] + t * (poly[(e + 1) % n] - poly[e])
        if not planar.segment_inside(poly[v], target, poly):
            continue
        # rebuild both cycles
        ids, pts, sg, fl, syn = (list(data.vertex_ids), list(poly), list(data.signs),
                                 list(data.inflection), list(data.synthetic))
        if t == 0.0:
            w = e
        else:
            w = e + 1
            ids.insert(w, -1)
            pts.insert(w, target)
            sg.insert(w, 1)
            fl.insert(w, False)
            syn.insert(w, True)
        vv = v + 1 if (t != 0.0 and v >= w) else v
        m = len(ids)

        def cycle(a: int, b: int) -> List[int]:
            out = [a]
            while out[-1] != b:
                out.append((out[-1] + 1) % m)
            return out

        first, second = cycle(vv, w), cycle(w, vv)
        parts = []
        for cyc in (first, second):
            parts.append(replace(
                data, vertex_ids=tuple(ids[i] for i in cyc), polygon=np.array([pts[i] for i in cyc]),
                signs=tuple(sg[i] for i in cyc), inflection=tuple(fl[i] for i in cyc),
                simple=tuple(True for _ in cyc), synthetic=tuple(syn[i] for i in cyc),
                geometric_angles=None))
        a1, a2 = planar.interior_angles(parts[0].polygon)[0], planar.interior_angles(parts[1].polygon)[-1]
        if ang[v] > np.pi and (a1 >= np.pi or a2 >= np.pi):
            continue
        # the cut vertex keeps its inflection property in one part only,
        # chosen so that every part inflects an even number of times
        if data.inflection[v]:
            # the parts together count v twice, so exactly one of them is odd
            drop = 0 if sum(parts[0].inflection) % 2 else 1
            p = parts[drop]
            pos = 0 if drop == 0 else len(p.vertex_ids) - 1
            fl2 = list(p.inflection)
            fl2[pos] = False
            parts[drop] = replace(p, inflection=tuple(fl2))
        return parts[0], parts[1]
    return None


def _designated(data: FaceData) -> List[int]:
    """Negative vertices where the face has to be cut: convex corners not
    next to a positive vertex and reflex inflection vertices."""
    n = data.n
    ang = data.angles
    out = []
    for i in range(n):
        if data.signs[i] >= 0 or data.synthetic[i]:
            continue
        nb = (data.signs[i - 1] > 0 or data.synthetic[i - 1]
              or data.signs[(i + 1) % n] > 0 or data.synthetic[(i + 1) % n])
        if ang[i] < np.pi and not nb:
            out.append(i)
        elif ang[i] > np.pi and data.inflection[i]:
            out.append(i)
    return out


def decompose_data(data: FaceData, max_depth: int = 8) -> List[BuildingBlock]:
    """Split a mixed face into building blocks."""
    if not data.synthetic:
        data = replace(data, synthetic=tuple(False for _ in data.vertex_ids))
    c = _c_counts(data)
    n_minus = sum(1 for s in data.signs if s < 0)
    if n_minus - 2 != c[2] - c[0]:
        raise NotDecomposable(f"face {data.face} breaks the corner counting identity")
    return _decompose(data, max_depth)


def _decompose(data: FaceData, depth: int) -> List[BuildingBlock]:
    todo = _designated(data)
    if not todo:
        ok, edges, why = block_shape(data)
        if not ok:
            raise NotDecomposable(f"face {data.face} part is not a building block ({why})")
        infl = tuple(data.vertex_ids[i] for i in range(data.n)
                     if data.inflection[i] and not data.synthetic[i])
        return [BuildingBlock(data, edges, infl)]
    if depth == 0:
        raise NotDecomposable(f"face {data.face} needs too many cuts")
    parts = _split_at(data, todo[0])
    if parts is None:
        raise NotDecomposable(f"no admissible cut at vertex {data.vertex_ids[todo[0]]}")
    out: List[BuildingBlock] = []
    for p in parts:
        out.extend(_decompose(p, depth - 1))
    return out


def decompose_mixed_face(mesh: Mesh, f: int) -> List[BuildingBlock]:
    return decompose_data(face_data(mesh, f))
