"""Global smoothness verdict and serialisation of all per-vertex and
per-face results."""

import io
import json
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import sphere
from .curvature import ZERO_K, classify_vertex, gauss_image, gaussian_curvature, inflection_flags, \
    vertex_smoothness
from .errors import PolysmoothError, ZeroCurvature
from .faces import FaceClassLabel, VertexInfo, classify_face
from .indicatrix import asymptotic_directions_vertex
from .mesh import Mesh, vertex_star

SCHEMA = 1

# which condition of the smoothness definition a failure code belongs to
FACE_CONDITION = {
    "TooManySignChanges": 3,
    "ZeroCurvatureVertex": 1,
    "NonSimpleGaussImage": 2,
}

Vec = Tuple[float, float, float]


def _vec(a) -> Optional[Vec]:
    if a is None:
        return None
    return tuple(float(x) for x in np.asarray(a, dtype=float).ravel())


@dataclass(frozen=True)
class Violation:
    kind: str
    id: int
    condition: int
    code: str
    detail: str = ""


@dataclass(frozen=True)
class VertexReport:
    vertex: int
    status: str
    K: Optional[float] = None
    label: Optional[str] = None
    inflection_faces: Tuple[int, ...] = ()
    reflex_faces: Tuple[int, ...] = ()
    smooth: Optional[bool] = None
    failed: Tuple[str, ...] = ()
    n: Optional[Vec] = None
    n_prime: Optional[Vec] = None
    n_prime_inside: Optional[bool] = None
    asymptotic_directions: Tuple[Vec, ...] = ()
    degenerate: bool = False


@dataclass(frozen=True)
class FaceRecord:
    face: int
    status: str
    signs: Tuple[int, ...] = ()
    sign_change_edges: Optional[int] = None
    oriented_angle_sum_at_normal: Optional[float] = None
    c_counts: Tuple[int, ...] = ()
    n_plus: Optional[int] = None
    n_minus: Optional[int] = None
    label: Optional[str] = None
    reasons: Tuple[str, ...] = ()
    point_of_contact: Optional[Vec] = None
    parabolic_segment: Optional[Tuple[Vec, Vec]] = None
    asymptotic_segments: Tuple[Tuple[Vec, Vec, int, bool], ...] = ()
    caveats: Tuple[str, ...] = ()


@dataclass(frozen=True)
class SmoothnessReport:
    vertices: Tuple[VertexReport, ...]
    faces: Tuple[FaceRecord, ...]
    smooth: bool
    violations: Tuple[Violation, ...]
    schema: int = SCHEMA

    def vertex(self, v: int) -> VertexReport:
        return self.vertices[v]

    def face(self, f: int) -> FaceRecord:
        return self.faces[f]

    @property
    def conditions(self) -> Dict[int, bool]:
        bad = {x.condition for x in self.violations}
        return {c: c not in bad for c in (1, 2, 3, 4)}


# analysis ---------------------------------------------------------------------------

def analyze_vertex(mesh: Mesh, v: int) -> Tuple[VertexReport, List[Violation], Optional[VertexInfo]]:
    if not mesh.is_interior_vertex(v):
        return VertexReport(v, "skipped"), [], None
    out: List[Violation] = []
    try:
        star = vertex_star(mesh, v)
    except PolysmoothError as e:
        return (VertexReport(v, "error", failed=(type(e).__name__,)),
                [Violation("vertex", v, 2, type(e).__name__, str(e))], None)
    K = gaussian_curvature(star)
    infl = inflection_flags(star)
    faces = star.faces
    g = gauss_image(star)
    simple = sphere.is_simple(g.polygon).simple
    angles = sphere.interior_angles(g.polygon, 1 if K > 0 else -1) if abs(K) >= ZERO_K else None
    info = VertexInfo(K, tuple(faces), tuple(infl), simple, angles)
    infl_faces = tuple(f for f, b in zip(faces, infl) if b)
    reflex = tuple(r.face for r in star.ring if r.reflex)
    if abs(K) < ZERO_K:
        out.append(Violation("vertex", v, 1, "ZeroCurvature", f"K = {K:.3g}"))
        return (VertexReport(v, "ok", K, None, infl_faces, reflex, False, ("ZeroCurvature",)),
                out, info)
    label = None
    degenerate = False
    failed: List[str] = []
    try:
        cls = classify_vertex(star)
        label = cls.label.value
        degenerate = cls.degenerate
    except PolysmoothError as e:
        failed.append(type(e).__name__)
        out.append(Violation("vertex", v, 2, type(e).__name__, str(e)))
    chk = vertex_smoothness(star)
    for code in chk.failed:
        failed.append(code)
        out.append(Violation("vertex", v, 2, code))
    n = n_prime = None
    inside = None
    dirs: Tuple[Vec, ...] = ()
    if chk.frame is not None:
        n, n_prime, inside = _vec(chk.frame.n), _vec(chk.frame.n_prime), chk.frame.n_prime_inside
        if K < 0:
            try:
                ad = asymptotic_directions_vertex(star, chk.frame)
                dirs = tuple(_vec(d.direction) for d in ad.directions)
            except PolysmoothError as e:
                failed.append(type(e).__name__)
    rep = VertexReport(v, "ok", float(K), label, infl_faces, reflex, not out, tuple(failed),
                       n, n_prime, inside, dirs, degenerate)
    return rep, out, info


def analyze_face(mesh: Mesh, f: int, cache: Dict[int, VertexInfo]) -> Tuple[FaceRecord, List[Violation]]:
    if mesh.is_boundary_face(f) or any(not mesh.is_interior_vertex(v) for v in mesh.faces[f]):
        return FaceRecord(f, "skipped"), []
    if any(v not in cache for v in mesh.faces[f]):
        # a vertex star could not be built; the vertex already reports it
        return FaceRecord(f, "error", reasons=("VertexError",)), []
    try:
        r = classify_face(mesh, f, cache)
    except PolysmoothError as e:
        return (FaceRecord(f, "error", reasons=(type(e).__name__,)),
                [Violation("face", f, 4, type(e).__name__, str(e))])
    out = []
    for code in r.reasons:
        cond = FACE_CONDITION.get(code, 4)
        if cond in (1, 2):
            continue  # reported at the vertex
        out.append(Violation("face", f, cond, code,
                             f"angle sum {r.oriented_angle_sum_at_normal:.17g}"))
    segs = tuple((_vec(s.start), _vec(s.end), int(s.vertex), bool(s.counts_twice))
                 for s in r.asymptotic_segments)
    para = None
    if r.parabolic_segment is not None:
        para = (_vec(r.parabolic_segment[0]), _vec(r.parabolic_segment[1]))
    rec = FaceRecord(f, "ok", tuple(int(s) for s in r.signs), r.sign_change_edges,
                     float(r.oriented_angle_sum_at_normal), tuple(r.c_counts), r.n_plus, r.n_minus,
                     r.label.value, tuple(r.reasons), _vec(r.point_of_contact), para, segs,
                     tuple(r.caveats))
    return rec, out


def analyze(mesh: Mesh) -> SmoothnessReport:
    """Check all four smoothness conditions on interior vertices and on
    faces away from the boundary.  Failures are collected as violations."""
    vertices, violations = [], []
    cache: Dict[int, VertexInfo] = {}
    for v in range(mesh.n_vertices):
        rep, viol, info = analyze_vertex(mesh, v)
        vertices.append(rep)
        violations.extend(viol)
        if info is not None:
            cache[v] = info
    faces = []
    for f in range(mesh.n_faces):
        rec, viol = analyze_face(mesh, f, cache)
        faces.append(rec)
        violations.extend(viol)
    order = {"vertex": 0, "face": 1}
    violations.sort(key=lambda x: (order[x.kind], x.id, x.condition, x.code))
    return SmoothnessReport(tuple(vertices), tuple(faces), not violations, tuple(violations))


# JSON -------------------------------------------------------------------------------------

def report_to_dict(report: SmoothnessReport) -> Dict[str, Any]:
    return {
        "schema": report.schema,
        "smooth": report.smooth,
        "conditions": {str(k): v for k, v in report.conditions.items()},
        "violations": [asdict(x) for x in report.violations],
        "vertices": [asdict(x) for x in report.vertices],
        "faces": [asdict(x) for x in report.faces],
    }


def export_report(report: SmoothnessReport, format: str = "JSON") -> bytes:
    if format.upper() != "JSON":
        raise ValueError(f"unsupported report format {format!r}")
    # floats are written with repr, the shortest string that round-trips
    return json.dumps(report_to_dict(report), indent=1, sort_keys=True).encode("utf-8")


def _tup(x):
    if isinstance(x, list):
        return tuple(_tup(y) for y in x)
    return x


def report_from_dict(data: Dict[str, Any]) -> SmoothnessReport:
    def build(cls, d):
        return cls(**{k: _tup(v) for k, v in d.items()})

    return SmoothnessReport(
        tuple(build(VertexReport, d) for d in data["vertices"]),
        tuple(build(FaceRecord, d) for d in data["faces"]),
        bool(data["smooth"]),
        tuple(build(Violation, d) for d in data["violations"]),
        int(data["schema"]),
    )


def parse_report(data: bytes) -> SmoothnessReport:
    return report_from_dict(json.loads(data))


# coloured OBJ -------------------------------------------------------------------------------

FACE_COLORS = {
    "positive": (0.85, 0.25, 0.2),
    "negative": (0.2, 0.35, 0.85),
    "mixed": (0.6, 0.3, 0.7),
    "skipped": (0.7, 0.7, 0.7),
    "violating": (1.0, 0.8, 0.0),
}


def face_category(rec: FaceRecord) -> str:
    if rec.status != "ok":
        return "skipped"
    if rec.label == FaceClassLabel.VIOLATING.value:
        return "violating"
    if rec.n_plus and rec.n_minus:
        return "mixed"
    return "positive" if rec.n_plus else "negative"


def export_colored_mesh(mesh: Mesh, report: SmoothnessReport) -> bytes:
    """OBJ with one comment per face giving its colour, curvature sign and
    class."""
    buf = io.StringIO()
    buf.write(f"# polysmooth colored mesh, smooth={str(report.smooth).lower()}\n")
    for x, y, z in mesh.vertices:
        buf.write("v %.17g %.17g %.17g\n" % (x, y, z))
    for f, cyc in enumerate(mesh.faces):
        rec = report.faces[f]
        cat = face_category(rec)
        r, g, b = FACE_COLORS[cat]
        buf.write(f"# face {f} color {r:.3f} {g:.3f} {b:.3f} sign {cat} class {rec.label or rec.status}\n")
        buf.write("f " + " ".join(str(i + 1) for i in cyc) + "\n")
    return buf.getvalue().encode("ascii")


# Gauss image SVG ----------------------------------------------------------------------------

def _view_pole(normals: np.ndarray) -> np.ndarray:
    pole = sphere.hemisphere_pole(normals)
    if pole is None:
        m = normals.mean(axis=0)
        pole = sphere.normalize(m) if np.linalg.norm(m) > 1e-12 else np.array([0.0, 0.0, 1.0])
    return pole


def export_gauss_svg(mesh: Mesh, vertex_ids: Sequence[int], per_arc: int = 32,
                     size: int = 240) -> bytes:
    """One panel per vertex: the Gauss image seen orthographically from a
    pole of the hemisphere containing it.  Corners of g(v) get dots and
    the winding direction is written under the panel."""
    panels = []
    for k, v in enumerate(vertex_ids):
        star = vertex_star(mesh, v)
        g = gauss_image(star)
        pole = _view_pole(g.normals)
        e1, e2 = sphere.tangent_basis(pole)
        pts = g.polygon.sample(per_arc)
        xy = np.stack([pts @ e1, pts @ e2], axis=1)
        corners = g.normals
        cxy = np.stack([corners @ e1, corners @ e2], axis=1)
        r = max(float(np.max(np.abs(xy))), 1e-9)
        s = 0.42 * size / r
        ox, oy = k * size + size / 2, size / 2
        path = " ".join(f"{'M' if i == 0 else 'L'}{ox + s * x:.4f},{oy - s * y:.4f}"
                        for i, (x, y) in enumerate(xy)) + " Z"
        K = gaussian_curvature(star)
        try:
            kind = [i for i, a in enumerate(sphere.interior_angles(g.polygon, 1 if K > 0 else -1))
                    if a < np.pi]
        except PolysmoothError:
            kind = []
        turn = sphere.orientation(g.polygon) if sphere.is_simple(g.polygon).simple else 0
        marker = {1: "CCW", -1: "CW"}.get(turn, "?")
        parts = [f'<g id="vertex-{v}">',
                 f'<path d="{path}" fill="none" stroke="black" stroke-width="1"/>']
        for i, (x, y) in enumerate(cxy):
            fill = "red" if i in kind else "white"
            parts.append(f'<circle cx="{ox + s * x:.4f}" cy="{oy - s * y:.4f}" r="3" '
                         f'fill="{fill}" stroke="black"/>')
        parts.append(f'<text x="{ox:.1f}" y="{size - 8}" text-anchor="middle" font-size="12">'
                     f'v{v} K={K:.4f} {marker}</text>')
        parts.append("</g>")
        panels.append("\n".join(parts))
    width = size * max(1, len(vertex_ids))
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{size}" '
            f'viewBox="0 0 {width} {size}">')
    return (head + "\n" + "\n".join(panels) + "\n</svg>\n").encode("utf-8")
