"""Per-vertex theory: angle defect, inflection faces, Gauss images, the
corner-angle rule, Banchoff's index, shape classes and tangent frames."""

from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import sphere
from .errors import (AntipodalNormals, ClassificationMismatch, GeometryError,
                     NonGenericDirection, PointOnBoundary, StraightAngle, ZeroCurvature)
from .mesh import VertexStar, cross3

ZERO_K = 1e-10
TWO_PI = 2.0 * np.pi


class VertexClassLabel(str, Enum):
    CONVEX_CORNER = "ConvexCorner"
    PSEUDO_QUADRILATERAL = "PseudoQuadrilateral"
    PSEUDO_TRIANGLE_A = "PseudoTriangle_A"
    PSEUDO_TRIANGLE_B = "PseudoTriangle_B"
    PSEUDO_DIGON = "PseudoDigon"
    SELF_INTERSECTING = "SelfIntersecting"


def gaussian_curvature(star: VertexStar) -> float:
    """Angle defect ``2 pi - sum of corner angles``."""
    return TWO_PI - float(np.sum(star.angles))


def _local_side(face_normal: np.ndarray, edge: np.ndarray, interior: np.ndarray) -> int:
    s = float(interior @ face_normal)
    if abs(s) <= 1e-12 * np.linalg.norm(edge):
        raise GeometryError("neighbouring face is coplanar with the face")
    return 1 if s > 0 else -1


def inflection_flags(star: VertexStar) -> List[bool]:
    """For every ring face: do its two ring neighbours lie on opposite sides
    of its plane?  Each neighbour's side is read off next to the shared edge,
    along the neighbour's inward edge normal, so non-convex neighbours are
    handled locally."""
    k = star.valence
    out = []
    for i, r in enumerate(star.ring):
        prev, nxt = star.ring[(i - 1) % k], star.ring[(i + 1) % k]
        e_prev = r.edge_in
        e_next = r.edge_out
        # prev traverses the shared edge towards v, next traverses it away from v
        s_prev = _local_side(r.normal, e_prev, cross3(e_prev, prev.normal))
        s_next = _local_side(r.normal, e_next, cross3(nxt.normal, e_next))
        out.append(s_prev != s_next)
    return out


def is_inflection_face(star: VertexStar, index: int) -> bool:
    """Inflection test for the ring face at position ``index``."""
    return inflection_flags(star)[index]


def lemma_angle_value(alpha: float, inflection: bool) -> float:
    """Counter-clockwise angle of the Gauss image at a face normal, predicted
    from the face angle and the inflection property."""
    if abs(alpha - np.pi) < 1e-9:
        raise StraightAngle("face angle equals pi")
    if alpha < np.pi:
        return 2 * np.pi - alpha if inflection else np.pi - alpha
    return 2 * np.pi - alpha if inflection else 3 * np.pi - alpha


def lemma_angle(star: VertexStar, index: int) -> float:
    r = star.ring[index]
    return lemma_angle_value(r.angle, is_inflection_face(star, index))


def oriented_image_angle(alpha: float, inflection: bool, k_sign: int) -> float:
    """Interior angle of the Gauss image at the face normal, using the
    orientation that matches the curvature sign."""
    a = lemma_angle_value(alpha, inflection)
    return a if k_sign > 0 else TWO_PI - a


@dataclass(frozen=True)
class GaussImage:
    polygon: sphere.SphericalPolygon
    faces: Tuple[int, ...]

    @property
    def normals(self) -> np.ndarray:
        return self.polygon.vertices


def gauss_image(star: VertexStar) -> GaussImage:
    """Face normals of the star in ring order."""
    n = star.normals
    nxt = np.roll(n, -1, axis=0)
    if np.any(np.einsum("ij,ij->i", n, nxt) < -1 + 1e-12):
        raise AntipodalNormals("consecutive face normals are antipodal")
    return GaussImage(sphere.SphericalPolygon(n), tuple(star.faces))


def image_angles(star: VertexStar, k_sign: Optional[int] = None) -> np.ndarray:
    """Geometric interior angles of g(v), oriented by the curvature sign."""
    if k_sign is None:
        k_sign = 1 if gaussian_curvature(star) > 0 else -1
    return sphere.interior_angles(gauss_image(star).polygon, k_sign)


# Banchoff index ---------------------------------------------------------------

def fan_triangles(star: VertexStar) -> np.ndarray:
    """Triangles of the star that contain the centre, from fan
    triangulations anchored at each face's lowest vertex id.  Returned as
    an (m, 2, 3) array of the two other corners."""
    tris = []
    for r in star.ring:
        ids = list(r.vertex_ids)
        pts = r.points
        a = int(np.argmin(ids))
        k = len(ids)
        for j in range(1, k - 1):
            tri = [a, (a + j) % k, (a + j + 1) % k]
            if 0 in tri:
                tris.append(pts[[t for t in tri if t != 0]])
    return np.array(tris)


def banchoff_index_many(star: VertexStar, xis: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Vectorised index; returns (index, generic mask)."""
    tris = fan_triangles(star)
    xis = np.atleast_2d(xis)
    h0 = xis @ star.center
    ha = np.einsum("nd,md->nm", xis, tris[:, 0, :]) - h0[:, None]
    hb = np.einsum("nd,md->nm", xis, tris[:, 1, :]) - h0[:, None]
    scale = max(float(np.max(np.abs(tris - star.center))), 1e-300)
    tol = 1e-12 * scale
    pts = np.vstack([r.points[1:] for r in star.ring])
    hall = xis @ pts.T - h0[:, None]
    generic = np.all(np.abs(hall) > tol, axis=1)
    middle = (ha * hb) < 0
    idx = 1 - middle.sum(axis=1) // 2
    return idx.astype(int), generic


def banchoff_index(star: VertexStar, xi) -> int:
    """``1 - (number of incident triangles where v is the middle vertex)/2``."""
    xi = sphere.normalize(xi)
    idx, generic = banchoff_index_many(star, xi[None, :])
    if not generic[0]:
        raise NonGenericDirection("a neighbour has the same height as the centre")
    return int(idx[0])


# classification ------------------------------------------------------------------

@dataclass(frozen=True)
class VertexClass:
    label: VertexClassLabel
    K: float
    inflection_faces: Tuple[int, ...]
    reflex_faces: Tuple[int, ...]
    corner_faces: Tuple[int, ...] = ()
    degenerate: bool = False
    crossing: Optional[Tuple[int, int]] = None


def predicted_corners(star: VertexStar, infl: Sequence[bool], k_sign: int) -> List[int]:
    out = []
    for i, r in enumerate(star.ring):
        if oriented_image_angle(r.angle, infl[i], k_sign) < np.pi:
            out.append(i)
    return out


def classify_vertex(star: VertexStar) -> VertexClass:
    """Shape class of the Gauss image.

    The label follows from the curvature sign, the reflex faces and their
    inflection property; the geometric corner set of g(v) is required to
    agree with the predicted one.
    """
    K = gaussian_curvature(star)
    if abs(K) < ZERO_K:
        raise ZeroCurvature(f"vertex {star.vertex} has zero angle defect")
    infl = inflection_flags(star)
    faces = star.faces
    infl_faces = tuple(f for f, b in zip(faces, infl) if b)
    reflex = [i for i, r in enumerate(star.ring) if r.reflex]
    reflex_faces = tuple(faces[i] for i in reflex)
    g = gauss_image(star)
    simp = sphere.is_simple(g.polygon)
    if not simp.simple:
        crossing = None
        if simp.crossing is not None:
            crossing = (faces[simp.crossing[0]], faces[simp.crossing[1]])
        return VertexClass(VertexClassLabel.SELF_INTERSECTING, K, infl_faces, reflex_faces,
                           (), simp.degenerate, crossing)
    k_sign = 1 if K > 0 else -1
    if K > 0:
        if infl_faces or reflex:
            raise ClassificationMismatch("positive curvature with inflection or reflex faces")
        label = VertexClassLabel.CONVEX_CORNER
    elif not reflex:
        if len(infl_faces) != 4:
            raise ClassificationMismatch(
                f"negative curvature without reflex faces has {len(infl_faces)} inflections")
        label = VertexClassLabel.PSEUDO_QUADRILATERAL
    elif len(reflex) == 1:
        if infl[reflex[0]]:
            if len(infl_faces) != 4:
                raise ClassificationMismatch("reflex inflection face needs 4 inflections")
            label = VertexClassLabel.PSEUDO_TRIANGLE_A
        else:
            if len(infl_faces) != 2:
                raise ClassificationMismatch("reflex non-inflection face needs 2 inflections")
            label = VertexClassLabel.PSEUDO_TRIANGLE_B
    else:
        if len(reflex) != 2 or not all(infl[i] for i in reflex) or len(infl_faces) != 4:
            raise ClassificationMismatch("pseudo-digon needs two reflex inflection faces")
        label = VertexClassLabel.PSEUDO_DIGON
    pred = predicted_corners(star, infl, k_sign)
    geo = [i for i, a in enumerate(sphere.interior_angles(g.polygon, k_sign)) if a < np.pi]
    if pred != geo:
        raise ClassificationMismatch(
            f"geometric corners {geo} differ from predicted corners {pred}")
    return VertexClass(label, K, infl_faces, reflex_faces, tuple(faces[i] for i in pred),
                       simp.degenerate)


# tangent frames ---------------------------------------------------------------------

@dataclass(frozen=True)
class TangentFrame:
    """Tangent-plane normal ``n`` (a kernel point of g(v)) and discrete
    normal ``n_prime`` (a hemisphere pole)."""

    center: np.ndarray
    n: np.ndarray
    n_prime: np.ndarray
    n_prime_inside: bool
    kernel: sphere.SphericalKernel

    def plane(self) -> Tuple[np.ndarray, np.ndarray]:
        return self.center, self.n


@dataclass(frozen=True)
class SmoothnessCheck:
    smooth: bool
    frame: Optional[TangentFrame]
    simple: bool
    hemispherical: bool
    star_shaped: bool
    degenerate: bool = False
    failed: Tuple[str, ...] = field(default_factory=tuple)


def canonical_normal(kernel: sphere.SphericalKernel) -> np.ndarray:
    """Normalised mean of the kernel vertices, or a max-margin fallback."""
    n = sphere.normalize(kernel.vertices.mean(axis=0))
    if kernel.contains(n):
        return n
    from .planar import chebyshev_center
    c = chebyshev_center(kernel.chart_kernel)
    if c is None:
        raise GeometryError("kernel has no interior point")
    return sphere.gnomonic_inverse(c, kernel.pole)


def vertex_smoothness(star: VertexStar) -> SmoothnessCheck:
    """Star-shapedness and hemisphere tests for g(v).

    Smooth iff g(v) is simple, lies in an open hemisphere and has a kernel
    with interior.  ``n`` and ``n_prime`` are reported independently.
    """
    g = gauss_image(star)
    simp = sphere.is_simple(g.polygon)
    failed: List[str] = []
    if not simp.simple:
        failed.append("NotSimple")
    pole = sphere.hemisphere_pole(g.normals)
    if pole is None:
        failed.append("NotHemispherical")
    if failed:
        return SmoothnessCheck(False, None, simp.simple, pole is not None, False,
                               simp.degenerate, tuple(failed))
    ker = sphere.star_shape_kernel(g.polygon, pole, check_simple=False)
    if ker.empty:
        return SmoothnessCheck(False, None, True, True, False, simp.degenerate, ("EmptyKernel",))
    n = canonical_normal(ker)
    try:
        inside = sphere.winding_number(g.polygon, pole) != 0
    except PointOnBoundary:
        inside = False
    frame = TangentFrame(star.center.copy(), n, pole, inside, ker)
    return SmoothnessCheck(True, frame, True, True, True, simp.degenerate, ())
