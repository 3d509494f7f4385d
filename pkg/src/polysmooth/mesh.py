"""Polygonal mesh storage, OBJ/OFF I/O, validation and vertex stars."""

import io
import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import BoundaryVertex, GeometryError, NonManifoldStar, ParseError, TopologyError

logger = logging.getLogger(__name__)

EPS_PLANAR_REL = 1e-8
EPS_COPLANAR = 1e-9
EPS_ANGLE = 1e-9


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def newell_normal(pts: np.ndarray) -> np.ndarray:
    """Area-weighted normal of a closed polygon (not normalised)."""
    nxt = np.roll(pts, -1, axis=0)
    return 0.5 * np.cross(pts, nxt).sum(axis=0)


@dataclass(frozen=True)
class FacePlane:
    """Best-fit plane of a face plus its counter-clockwise 2D outline."""

    point: np.ndarray
    normal: np.ndarray
    u: np.ndarray
    w: np.ndarray
    polygon2d: np.ndarray
    residual: float

    def to2d(self, p: np.ndarray) -> np.ndarray:
        d = np.asarray(p) - self.point
        return np.stack([d @ self.u, d @ self.w], axis=-1)

    def to3d(self, q: np.ndarray) -> np.ndarray:
        q = np.asarray(q)
        return self.point + q[..., :1] * self.u + q[..., 1:2] * self.w


def fit_plane(pts: np.ndarray) -> FacePlane:
    pts = np.asarray(pts, dtype=float)
    c = pts.mean(axis=0)
    nw = newell_normal(pts)
    if np.linalg.norm(nw) == 0.0:
        raise GeometryError("degenerate face with zero area")
    _, _, vt = np.linalg.svd(pts - c)
    n = vt[2]
    if n @ nw < 0:
        n = -n
    residual = float(np.max(np.abs((pts - c) @ n)))
    e = pts[1] - pts[0]
    e = e - (e @ n) * n
    u = _unit(e)
    w = np.cross(n, u)
    poly = np.stack([(pts - c) @ u, (pts - c) @ w], axis=1)
    return FacePlane(c, n, u, w, poly, residual)


class Mesh:
    """Oriented polygonal surface with halfedge connectivity.

    Parameters
    ----------
    vertices : array_like, shape (n, 3)
        Vertex positions.
    faces : sequence of sequences of int
        Vertex index cycles, counter-clockwise for the chosen orientation.
    eps_planar_rel : float
        Planarity tolerance relative to the bounding-box diagonal.
    validate : bool
        Run the geometric checks.  Topology is always checked.

    Raises
    ------
    TopologyError
        Non-manifold edges or inconsistent winding.
    GeometryError
        Non-planar faces, coplanar neighbours or straight corner angles.
    """

    def __init__(self, vertices, faces: Sequence[Sequence[int]],
                 eps_planar_rel: float = EPS_PLANAR_REL, validate: bool = True):
        v = np.array(vertices, dtype=float).reshape(-1, 3)
        v.setflags(write=False)
        self.vertices = v
        self.faces: Tuple[Tuple[int, ...], ...] = tuple(tuple(int(i) for i in f) for f in faces)
        self.eps_planar_rel = eps_planar_rel
        self._build_connectivity()
        self.bbox_diagonal = float(np.linalg.norm(v.max(axis=0) - v.min(axis=0))) if len(v) else 0.0
        self._planes: List[Optional[FacePlane]] = [None] * len(self.faces)
        self.face_normals = np.zeros((len(self.faces), 3))
        self.corner_angles: List[np.ndarray] = []
        for f, cyc in enumerate(self.faces):
            pts = v[list(cyc)]
            nw = newell_normal(pts)
            ln = np.linalg.norm(nw)
            if ln == 0.0:
                if validate:
                    raise GeometryError(f"face {f} has zero area")
                self.face_normals[f] = np.nan
                self.corner_angles.append(np.full(len(cyc), np.nan))
                continue
            if validate:
                plane = self.face_plane(f)
                self.face_normals[f] = plane.normal
                ang = _corner_angles(plane.polygon2d)
            else:
                self.face_normals[f] = nw / ln
                ang = _corner_angles_3d(pts, nw / ln)
            self.corner_angles.append(ang)
        self.face_normals.setflags(write=False)
        if validate:
            self._validate_geometry()

    # connectivity -------------------------------------------------------
    def _build_connectivity(self) -> None:
        nv = len(self.vertices)
        origin, face_of, nxt = [], [], []
        index: Dict[Tuple[int, int], int] = {}
        undirected: Dict[Tuple[int, int], int] = {}
        for f, cyc in enumerate(self.faces):
            k = len(cyc)
            if k < 3:
                raise TopologyError(f"face {f} has fewer than 3 vertices")
            if len(set(cyc)) != k:
                raise TopologyError(f"face {f} repeats a vertex")
            base = len(origin)
            for i, a in enumerate(cyc):
                if a < 0 or a >= nv:
                    raise TopologyError(f"face {f} references missing vertex {a}")
                b = cyc[(i + 1) % k]
                key = (min(a, b), max(a, b))
                undirected[key] = undirected.get(key, 0) + 1
                if undirected[key] > 2:
                    raise TopologyError(f"edge {key} is shared by more than two faces")
                if (a, b) in index:
                    raise TopologyError(f"edge {(a, b)} has inconsistent winding")
                index[(a, b)] = base + i
                origin.append(a)
                face_of.append(f)
                nxt.append(base + (i + 1) % k)
        twin = [index.get((origin[nxt[h]], origin[h]), -1) for h in range(len(origin))]
        self.he_origin = np.array(origin, dtype=int)
        self.he_face = np.array(face_of, dtype=int)
        self.he_next = np.array(nxt, dtype=int)
        self.he_twin = np.array(twin, dtype=int)
        self._he_index = index
        boundary = np.zeros(nv, dtype=bool)
        for h in range(len(origin)):
            if twin[h] < 0:
                boundary[origin[h]] = True
                boundary[origin[nxt[h]]] = True
        used = np.zeros(nv, dtype=bool)
        vf: List[List[int]] = [[] for _ in range(nv)]
        for f, cyc in enumerate(self.faces):
            used[list(cyc)] = True
            for a in cyc:
                vf[a].append(f)
        self.vertex_faces = vf
        self.is_boundary_vertex = boundary
        self.is_used_vertex = used
        self.is_boundary_vertex.setflags(write=False)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    def halfedge_face(self, a: int, b: int) -> Optional[int]:
        h = self._he_index.get((a, b))
        return None if h is None else int(self.he_face[h])

    def is_interior_vertex(self, v: int) -> bool:
        return bool(self.is_used_vertex[v] and not self.is_boundary_vertex[v])

    def interior_vertices(self) -> List[int]:
        return [v for v in range(self.n_vertices) if self.is_interior_vertex(v)]

    def is_boundary_face(self, f: int) -> bool:
        return bool(np.any(self.is_boundary_vertex[list(self.faces[f])]))

    def edges(self) -> List[Tuple[int, int]]:
        seen = set()
        out = []
        for cyc in self.faces:
            for i, a in enumerate(cyc):
                b = cyc[(i + 1) % len(cyc)]
                key = (min(a, b), max(a, b))
                if key not in seen:
                    seen.add(key)
                    out.append(key)
        return out

    def scale(self) -> float:
        return max(self.bbox_diagonal, 1e-300)

    # geometry -----------------------------------------------------------
    def face_plane(self, f: int, eps_planar: Optional[float] = None) -> FacePlane:
        """Best-fit plane and 2D outline of face ``f``.

        Raises ``GeometryError`` if the face deviates from its plane by more
        than ``eps_planar`` (default: relative tolerance times bbox diagonal).
        """
        cached = self._planes[f]
        if cached is None:
            cached = fit_plane(self.vertices[list(self.faces[f])])
            self._planes[f] = cached
        tol = self.eps_planar_rel * self.scale() if eps_planar is None else eps_planar
        if cached.residual > tol:
            raise GeometryError(
                f"face {f} is not planar (residual {cached.residual:.3g} > {tol:.3g})")
        return cached

    def _validate_geometry(self) -> None:
        for f, ang in enumerate(self.corner_angles):
            if np.any(np.abs(ang - np.pi) < EPS_ANGLE):
                raise GeometryError(f"face {f} has an interior angle equal to pi")
            if np.any(ang < EPS_ANGLE) or np.any(ang > 2 * np.pi - EPS_ANGLE):
                raise GeometryError(f"face {f} has a degenerate corner")
        for h in range(len(self.he_origin)):
            t = self.he_twin[h]
            if t < 0 or t < h:
                continue
            n1 = self.face_normals[self.he_face[h]]
            n2 = self.face_normals[self.he_face[t]]
            ang = np.arctan2(np.linalg.norm(np.cross(n1, n2)), n1 @ n2)
            if ang < EPS_COPLANAR:
                raise GeometryError(
                    f"faces {self.he_face[h]} and {self.he_face[t]} are coplanar")

    def corner_angle(self, f: int, v: int) -> float:
        i = self.faces[f].index(v)
        return float(self.corner_angles[f][i])

    def with_vertices(self, vertices, flip: bool = False, validate: bool = True) -> "Mesh":
        faces = [tuple(reversed(c)) for c in self.faces] if flip else self.faces
        return Mesh(vertices, faces, eps_planar_rel=self.eps_planar_rel, validate=validate)


def _corner_angles(poly2d: np.ndarray) -> np.ndarray:
    nxt = np.roll(poly2d, -1, axis=0) - poly2d
    prv = np.roll(poly2d, 1, axis=0) - poly2d
    c = nxt[:, 0] * prv[:, 1] - nxt[:, 1] * prv[:, 0]
    return np.mod(np.arctan2(c, np.einsum("ij,ij->i", nxt, prv)), 2 * np.pi)


def _corner_angles_3d(pts: np.ndarray, n: np.ndarray) -> np.ndarray:
    nxt = np.roll(pts, -1, axis=0) - pts
    prv = np.roll(pts, 1, axis=0) - pts
    c = np.cross(nxt, prv) @ n
    return np.mod(np.arctan2(c, np.einsum("ij,ij->i", nxt, prv)), 2 * np.pi)


# vertex stars --------------------------------------------------------------

@dataclass(frozen=True)
class RingFace:
    """One face of a vertex star.

    ``vertex_ids``/``points`` list the face cycle starting at the centre, so
    ``points[1]`` is the far end of the edge shared with the previous ring
    face and ``points[-1]`` the far end of the edge shared with the next one.
    """

    face: int
    angle: float
    normal: np.ndarray
    vertex_ids: Tuple[int, ...]
    points: np.ndarray

    @cached_property
    def edge_in(self) -> np.ndarray:
        return _unit(self.points[1] - self.points[0])

    @cached_property
    def edge_out(self) -> np.ndarray:
        return _unit(self.points[-1] - self.points[0])

    @property
    def reflex(self) -> bool:
        return self.angle > np.pi


@dataclass(frozen=True)
class VertexStar:
    vertex: int
    center: np.ndarray
    ring: Tuple[RingFace, ...]

    @property
    def valence(self) -> int:
        return len(self.ring)

    @property
    def faces(self) -> List[int]:
        return [r.face for r in self.ring]

    @property
    def angles(self) -> np.ndarray:
        return np.array([r.angle for r in self.ring])

    @property
    def normals(self) -> np.ndarray:
        return np.array([r.normal for r in self.ring])

    def ring_index(self, face: int) -> int:
        for i, r in enumerate(self.ring):
            if r.face == face:
                return i
        raise KeyError(face)

    def min_edge_length(self) -> float:
        return min(float(np.linalg.norm(r.points[1] - r.points[0])) for r in self.ring)


def vertex_star(mesh: Mesh, v: int, check_embedding: bool = True) -> VertexStar:
    """Incident faces of an interior vertex in counter-clockwise order."""
    if not mesh.is_interior_vertex(v):
        raise BoundaryVertex(f"vertex {v} lies on the boundary")
    incident = mesh.vertex_faces[v]
    start = min(incident)
    ring = []
    f = start
    for _ in range(len(incident) + 1):
        cyc = mesh.faces[f]
        i = cyc.index(v)
        ids = cyc[i:] + cyc[:i]
        ring.append(RingFace(f, float(mesh.corner_angles[f][i]), mesh.face_normals[f],
                             ids, mesh.vertices[list(ids)]))
        nxt = mesh.halfedge_face(v, ids[-1])
        if nxt is None:
            raise BoundaryVertex(f"vertex {v} lies on the boundary")
        f = nxt
        if f == start:
            break
    else:
        raise NonManifoldStar(f"ring of vertex {v} does not close")
    if len(ring) != len(incident):
        raise NonManifoldStar(f"vertex {v} has a non-manifold neighbourhood")
    star = VertexStar(v, mesh.vertices[v].copy(), tuple(ring))
    if check_embedding:
        bad = star_self_intersections(star)
        if bad:
            raise NonManifoldStar(f"star of vertex {v} is not locally embedded: faces {bad[0]}")
    return star


def cross3(a, b) -> np.ndarray:
    """Cross product of two 3-vectors; far cheaper than np.cross for one pair."""
    return np.array((a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
                     a[0] * b[1] - a[1] * b[0]))


def _angle_in_face(r: RingFace, d: np.ndarray) -> float:
    """Counter-clockwise angle of direction d from the incoming edge of r."""
    e = r.edge_in
    return math.atan2(float(cross3(e, d) @ r.normal), float(e @ d)) % (2 * math.pi)


def star_self_intersections(star: VertexStar, tol: float = 1e-9) -> List[Tuple[int, int]]:
    """Pairs of ring faces whose tangent wedges overlap away from shared edges.

    Only the local (tangent cone) embedding is checked.
    """
    out = []
    k = star.valence
    for i in range(k):
        for j in range(i + 1, k):
            ri, rj = star.ring[i], star.ring[j]
            line = cross3(ri.normal, rj.normal)
            ln = np.linalg.norm(line)
            if ln < 1e-12:
                continue
            line = line / ln
            shared = []
            if j == i + 1 or (i == 0 and j == k - 1):
                shared = [ri.edge_out if j == i + 1 else ri.edge_in]
            for s in (1.0, -1.0):
                d = s * line
                if any(d @ e > 1 - 1e-12 for e in shared):
                    continue
                ti, tj = _angle_in_face(ri, d), _angle_in_face(rj, d)
                if tol < ti < ri.angle - tol and tol < tj < rj.angle - tol:
                    out.append((ri.face, rj.face))
                    break
    return out


def face_polygon(mesh: Mesh, f: int, eps_planar: Optional[float] = None) -> FacePlane:
    """Best-fit plane and counter-clockwise 2D outline of face ``f``."""
    return mesh.face_plane(f, eps_planar)


# I/O ----------------------------------------------------------------------

def _tokens(text: str):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def parse_obj(text: str) -> Tuple[np.ndarray, List[Tuple[int, ...]]]:
    verts: List[List[float]] = []
    faces: List[Tuple[int, ...]] = []
    for lineno, tok in _tokens(text):
        if tok[0] == "v":
            if len(tok) < 4:
                raise ParseError(f"line {lineno}: vertex needs 3 coordinates")
            try:
                verts.append([float(t) for t in tok[1:4]])
            except ValueError:
                raise ParseError(f"line {lineno}: bad vertex coordinate") from None
        elif tok[0] == "f":
            if len(tok) < 4:
                raise ParseError(f"line {lineno}: face needs at least 3 vertices")
            idx = []
            for t in tok[1:]:
                try:
                    i = int(t.split("/")[0])
                except ValueError:
                    raise ParseError(f"line {lineno}: bad face index {t!r}") from None
                i = i - 1 if i > 0 else len(verts) + i
                if i < 0 or i >= len(verts):
                    raise ParseError(f"line {lineno}: face index out of range")
                idx.append(i)
            faces.append(tuple(idx))
    return np.array(verts, dtype=float).reshape(-1, 3), faces


def parse_off(text: str) -> Tuple[np.ndarray, List[Tuple[int, ...]]]:
    toks = list(_tokens(text))
    if not toks or not toks[0][1][0].endswith("OFF"):
        raise ParseError("missing OFF header")
    head = toks[0][1][1:]
    pos = 1
    if not head:
        if len(toks) < 2:
            raise ParseError("missing OFF counts")
        head = toks[1][1]
        pos = 2
    try:
        nv, nf = int(head[0]), int(head[1])
    except (ValueError, IndexError):
        raise ParseError("bad OFF counts") from None
    if len(toks) < pos + nv + nf:
        raise ParseError("OFF file is truncated")
    verts = []
    for lineno, tok in toks[pos:pos + nv]:
        try:
            verts.append([float(t) for t in tok[:3]])
        except ValueError:
            raise ParseError(f"line {lineno}: bad vertex") from None
        if len(tok) < 3:
            raise ParseError(f"line {lineno}: vertex needs 3 coordinates")
    faces = []
    for lineno, tok in toks[pos + nv:pos + nv + nf]:
        try:
            k = int(tok[0])
            idx = tuple(int(t) for t in tok[1:1 + k])
        except ValueError:
            raise ParseError(f"line {lineno}: bad face") from None
        if k < 3 or len(idx) != k:
            raise ParseError(f"line {lineno}: bad face arity")
        if any(i < 0 or i >= nv for i in idx):
            raise ParseError(f"line {lineno}: face index out of range")
        faces.append(idx)
    return np.array(verts, dtype=float).reshape(-1, 3), faces


def load_mesh(data: Union[bytes, str], format: str, **kwargs) -> Mesh:
    """Parse OBJ or OFF text into a validated :class:`Mesh`."""
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    fmt = format.upper()
    if fmt == "OBJ":
        verts, faces = parse_obj(text)
    elif fmt == "OFF":
        verts, faces = parse_off(text)
    else:
        raise ParseError(f"unknown mesh format {format!r}")
    return Mesh(verts, faces, **kwargs)


def guess_format(path: str, data: bytes = b"") -> str:
    lower = path.lower()
    if lower.endswith(".off"):
        return "OFF"
    if lower.endswith(".obj"):
        return "OBJ"
    return "OFF" if data.lstrip().startswith(b"OFF") else "OBJ"


def read_mesh(path: str) -> Mesh:
    with open(path, "rb") as fh:
        data = fh.read()
    return load_mesh(data, guess_format(path, data))


def export_obj(mesh: Mesh, comments: Optional[Sequence[str]] = None) -> bytes:
    buf = io.StringIO()
    for c in comments or ():
        buf.write(f"# {c}\n")
    for x, y, z in mesh.vertices:
        buf.write("v %.17g %.17g %.17g\n" % (x, y, z))
    for cyc in mesh.faces:
        buf.write("f " + " ".join(str(i + 1) for i in cyc) + "\n")
    return buf.getvalue().encode("ascii")


def export_off(mesh: Mesh) -> bytes:
    buf = io.StringIO()
    buf.write("OFF\n%d %d %d\n" % (mesh.n_vertices, mesh.n_faces, len(mesh.edges())))
    for x, y, z in mesh.vertices:
        buf.write("%.17g %.17g %.17g\n" % (x, y, z))
    for cyc in mesh.faces:
        buf.write("%d %s\n" % (len(cyc), " ".join(str(i) for i in cyc)))
    return buf.getvalue().encode("ascii")


def export_mesh(mesh: Mesh, format: str) -> bytes:
    return export_off(mesh) if format.upper() == "OFF" else export_obj(mesh)
