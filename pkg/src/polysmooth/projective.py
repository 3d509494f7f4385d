"""Collineations of meshes, polar duals and the checks that go with them."""

import json
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import sphere
from .curvature import gauss_image, gaussian_curvature, inflection_flags
from .errors import (CenterOnFacePlane, CorrespondenceMismatch, DegenerateImage, EmptyInterior,
                     GeometryError, NoAdmissibleCenter, NoHemisphere, PointAtInfinity,
                     PolysmoothError)
from .mesh import Mesh, vertex_star

DET_TOL = 1e-12
W_TOL = 1e-10
ADMISSIBLE_MARGIN = 1e-6
ARC_SAMPLES = 16


@dataclass(frozen=True)
class ProjectiveMap:
    """A collineation given by a 4x4 matrix acting on homogeneous points."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float).reshape(4, 4)
        if abs(np.linalg.det(m)) <= DET_TOL:
            raise GeometryError("projective matrix is singular")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls) -> "ProjectiveMap":
        return cls(np.eye(4))

    @classmethod
    def from_json(cls, text: str) -> "ProjectiveMap":
        data = json.loads(text)
        if isinstance(data, dict):
            data = data["matrix"]
        return cls(np.array(data, dtype=float).reshape(4, 4))

    def to_json(self) -> str:
        return json.dumps([float(x) for x in self.matrix.ravel()])

    def compose(self, other: "ProjectiveMap") -> "ProjectiveMap":
        """``self`` after ``other``."""
        return ProjectiveMap(self.matrix @ other.matrix)

    def inverse(self) -> "ProjectiveMap":
        return ProjectiveMap(np.linalg.inv(self.matrix))

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.matrix))

    def homogeneous(self, points) -> np.ndarray:
        p = np.atleast_2d(np.asarray(points, dtype=float))
        return np.hstack([p, np.ones((len(p), 1))]) @ self.matrix.T

    def __call__(self, points) -> np.ndarray:
        h = self.homogeneous(points)
        return h[:, :3] / h[:, 3:]

    def differential(self, point, direction) -> np.ndarray:
        """Image of a direction at a finite point (not normalised)."""
        m = self.matrix
        p = np.asarray(point, dtype=float)
        d = np.asarray(direction, dtype=float)
        w = m[3, :3] @ p + m[3, 3]
        image = (m[:3, :3] @ p + m[:3, 3]) / w
        return (m[:3, :3] @ d - image * (m[3, :3] @ d)) / w

    def plane_normal(self, normal, point) -> np.ndarray:
        """Unit normal of the image of the plane through ``point``."""
        n = np.asarray(normal, dtype=float)
        cov = np.concatenate([n, [-float(n @ point)]])
        img = np.linalg.solve(self.matrix.T, cov)
        return sphere.normalize(img[:3])


def as_map(M) -> ProjectiveMap:
    return M if isinstance(M, ProjectiveMap) else ProjectiveMap(M)


def apply_projective(mesh: Mesh, M) -> Mesh:
    """Image mesh under a collineation that keeps every vertex finite.

    The homogeneous weight must keep one sign over the whole mesh, since
    otherwise some edge crosses the plane at infinity.  Faces are reversed
    when the map reverses orientation.
    """
    pm = as_map(M)
    h = pm.homogeneous(mesh.vertices)
    w = h[:, 3]
    tol = W_TOL * max(float(np.max(np.abs(h))), 1e-300)
    if np.any(np.abs(w) <= tol):
        raise PointAtInfinity("a vertex is mapped to the plane at infinity")
    if np.any(w > 0) and np.any(w < 0):
        raise PointAtInfinity("the mesh crosses the plane at infinity")
    pts = h[:, :3] / w[:, None]
    try:
        return mesh.with_vertices(pts, flip=pm.det < 0)
    except GeometryError as e:
        raise DegenerateImage(str(e)) from e


def random_collineation(rng: np.random.Generator, mesh: Mesh, strength: float = 0.3,
                        tries: int = 100) -> ProjectiveMap:
    """Random collineation that keeps the mesh finite with a comfortable
    margin (weights within a factor of four of each other)."""
    c = mesh.vertices.mean(axis=0)
    s = mesh.scale()
    for _ in range(tries):
        a = np.eye(3) + strength * rng.standard_normal((3, 3))
        if abs(np.linalg.det(a)) < 0.1:
            continue
        m = np.eye(4)
        m[:3, :3] = a
        m[:3, 3] = rng.standard_normal(3) * s * strength
        m[3, :3] = rng.standard_normal(3) * strength / s
        # move the mesh centre to the origin first so that the weights are O(1)
        t = np.eye(4)
        t[:3, 3] = -c
        m = m @ t
        w = np.hstack([mesh.vertices, np.ones((mesh.n_vertices, 1))]) @ m[3]
        if np.all(w > 0) and w.max() < 4 * w.min():
            return ProjectiveMap(m)
    raise PolysmoothError("could not draw a finite-keeping collineation")


# admissible centres ---------------------------------------------------------------

def _candidate_normals(mesh: Mesh) -> List[Tuple[int, np.ndarray]]:
    """(vertex, normals) pairs: Gauss image samples for interior vertices,
    incident face normals for boundary vertices."""
    out = []
    for v in range(mesh.n_vertices):
        if mesh.is_interior_vertex(v):
            try:
                g = gauss_image(vertex_star(mesh, v, check_embedding=False))
                out.append((v, g.polygon.sample(ARC_SAMPLES)))
                continue
            except PolysmoothError:
                pass
        fs = mesh.vertex_faces[v]
        if fs:
            out.append((v, mesh.face_normals[list(fs)]))
    return out


def gauss_image_pole(mesh: Mesh) -> np.ndarray:
    normals = np.vstack([n for _, n in _candidate_normals(mesh)])
    pole = sphere.hemisphere_pole(normals)
    if pole is None:
        raise NoHemisphere("the Gauss image is not contained in an open hemisphere")
    return pole


def admissibility_margin(mesh: Mesh, O, candidates=None) -> float:
    """Smallest ``(v - O).m / |v - O|`` over all candidate tangent planes,
    signed so that a positive value means a uniform sign."""
    O = np.asarray(O, dtype=float)
    candidates = _candidate_normals(mesh) if candidates is None else candidates
    lo, hi = np.inf, -np.inf
    for v, normals in candidates:
        d = mesh.vertices[v] - O
        s = normals @ d / np.linalg.norm(d)
        lo, hi = min(lo, float(s.min())), max(hi, float(s.max()))
    return lo if lo > 0 else (-hi if hi < 0 else min(lo, -hi))


def find_admissible_center(mesh: Mesh, max_doublings: int = 60) -> np.ndarray:
    """A point off every tangent plane of the mesh.

    Starts at the face centroid closest to the vertex mean and walks away
    against the hemisphere pole, doubling the distance until all candidate
    planes see the point on the same side with a margin.
    """
    cand = _candidate_normals(mesh)
    normals = np.vstack([n for _, n in cand])
    pole = sphere.hemisphere_pole(normals)
    if pole is None:
        raise NoHemisphere("the Gauss image is not contained in an open hemisphere")
    mean = mesh.vertices.mean(axis=0)
    cents = np.array([mesh.vertices[list(f)].mean(axis=0) for f in mesh.faces])
    start = cents[int(np.argmin(np.linalg.norm(cents - mean, axis=1)))]
    d = mesh.scale()
    for _ in range(max_doublings):
        O = start - d * pole
        if admissibility_margin(mesh, O, cand) > ADMISSIBLE_MARGIN:
            return O
        d *= 2.0
    raise NoAdmissibleCenter("no admissible centre found along the pole ray")


# polarity ----------------------------------------------------------------------------

@dataclass(frozen=True)
class PolarDual:
    """Dual mesh together with the correspondence to the primal mesh.

    ``vertex_face[i]`` is the primal face dual to dual vertex ``i`` and
    ``face_vertex[j]`` the primal vertex dual to dual face ``j``.
    """

    mesh: Mesh
    center: np.ndarray
    vertex_face: Tuple[int, ...]
    face_vertex: Tuple[int, ...]

    def dual_vertex_of(self, face: int) -> int:
        return self.vertex_face.index(face)

    def dual_face_of(self, vertex: int) -> int:
        return self.face_vertex.index(vertex)


def polar_point(normal: np.ndarray, offset: float, O: np.ndarray) -> np.ndarray:
    """Pole of the plane ``<normal, x - O> = offset`` w.r.t. the unit sphere
    about ``O``."""
    return O + normal / offset


def polar_dual(mesh: Mesh, O, validate: bool = True) -> PolarDual:
    """Dual surface under the polarity about ``O``.

    Face planes become vertices, interior vertex stars become faces; the
    ring order of each star is kept, which makes the dual consistently
    oriented.
    """
    O = np.asarray(O, dtype=float)
    interior = mesh.interior_vertices()
    if not interior:
        raise EmptyInterior("mesh has no interior vertex")
    used = sorted({f for v in interior for f in mesh.vertex_faces[v]})
    index = {f: i for i, f in enumerate(used)}
    tol = 1e-12 * mesh.scale()
    pts = []
    for f in used:
        n = mesh.face_normals[f]
        h = float(n @ (mesh.vertices[mesh.faces[f][0]] - O))
        if abs(h) <= tol:
            raise CenterOnFacePlane(f"centre lies on the plane of face {f}")
        pts.append(polar_point(n, h, O))
    faces = []
    for v in interior:
        star = vertex_star(mesh, v, check_embedding=False)
        faces.append(tuple(index[f] for f in star.faces))
    dual = Mesh(np.array(pts), faces, validate=validate)
    return PolarDual(dual, O, tuple(used), tuple(interior))


@dataclass(frozen=True)
class DualityReport:
    sign_matches: Dict[int, bool]
    inflection_matches: List[Tuple[int, int, bool, bool]]
    double_dual_deviation: float
    gauss_projection_deviation: float
    primal_smooth: Optional[bool] = None
    dual_smooth: Optional[bool] = None
    problems: Tuple[str, ...] = ()

    @property
    def inflection_all_match(self) -> bool:
        return all(a == b for _, _, a, b in self.inflection_matches)

    @property
    def signs_all_match(self) -> bool:
        return all(self.sign_matches.values())

    @property
    def ok(self) -> bool:
        return (not self.problems and self.signs_all_match and self.inflection_all_match
                and self.double_dual_deviation < 1e-9 and self.gauss_projection_deviation < 1e-9
                and self.primal_smooth == self.dual_smooth)


def _sign(K: float) -> int:
    return 1 if K > 0 else -1


def check_duality(P: Mesh, dual: PolarDual, with_verdicts: bool = True) -> DualityReport:
    """Compare a mesh with its polar dual.

    Checks curvature signs (face of P with uniform sign against the dual
    vertex), the inflection correspondence between (v, f) and (f*, v*), the
    double dual, and that the dual face normals are the central projection
    of the primal vertices from the centre.
    """
    D = dual.mesh
    O = dual.center
    problems: List[str] = []
    if len(dual.face_vertex) != D.n_faces or len(dual.vertex_face) != D.n_vertices:
        raise CorrespondenceMismatch("correspondence does not match the dual mesh")

    K_primal: Dict[int, float] = {}
    infl_primal: Dict[int, Dict[int, bool]] = {}
    for v in P.interior_vertices():
        star = vertex_star(P, v, check_embedding=False)
        K_primal[v] = gaussian_curvature(star)
        infl_primal[v] = dict(zip(star.faces, inflection_flags(star)))

    signs: Dict[int, bool] = {}
    infl: List[Tuple[int, int, bool, bool]] = []
    for fs in D.interior_vertices():
        f = dual.vertex_face[fs]
        try:
            dstar = vertex_star(D, fs, check_embedding=False)
            Kd = gaussian_curvature(dstar)
            dflags = dict(zip(dstar.faces, inflection_flags(dstar)))
        except PolysmoothError as e:
            problems.append(f"dual vertex {fs}: {type(e).__name__}")
            continue
        ks = {_sign(K_primal[v]) for v in P.faces[f] if v in K_primal}
        if len(ks) == 1 and all(v in K_primal for v in P.faces[f]):
            signs[f] = ks.pop() == _sign(Kd)
        for v in P.faces[f]:
            if v not in infl_primal:
                continue
            vs = dual.dual_face_of(v)
            infl.append((v, f, bool(infl_primal[v][f]), bool(dflags[vs])))

    # central projection of the primal vertices against dual face normals
    gdev = 0.0
    for j, v in enumerate(dual.face_vertex):
        d = sphere.normalize(P.vertices[v] - O)
        n = D.face_normals[j]
        gdev = max(gdev, float(np.linalg.norm(np.cross(d, n))))

    # polarity twice
    ddev = np.inf
    try:
        dd = polar_dual(D, O, validate=False)
        dev = 0.0
        for i, fj in enumerate(dd.vertex_face):
            v = dual.face_vertex[fj]
            dev = max(dev, float(np.linalg.norm(dd.mesh.vertices[i] - P.vertices[v])))
        ddev = dev
    except PolysmoothError as e:
        problems.append(f"double dual: {type(e).__name__}")

    ps = ds = None
    if with_verdicts:
        from .report import analyze
        try:
            ps = analyze(P).smooth
            ds = analyze(D).smooth
        except PolysmoothError as e:
            problems.append(f"verdict: {type(e).__name__}")
    return DualityReport(signs, infl, ddev, gdev, ps, ds, tuple(problems))
