"""Operations shared by the HTTP API and the command line.

Every function takes plain inputs (mesh text, ids, numbers) and returns a
response model, so both front ends stay free of geometry code.
"""

import json
from dataclasses import asdict
from typing import Any, Dict, Mapping, Optional, Sequence

import numpy as np

from . import report as rp
from .curvature import gauss_image, gaussian_curvature
from .errors import BadParameters, PolysmoothError
from .faces import VertexInfo
from .fixtures import FixtureSpec, generate as generate_fixture
from .mesh import Mesh, export_obj, load_mesh, vertex_star
from .projective import ProjectiveMap, apply_projective, check_duality, find_admissible_center, \
    polar_dual
from .schemas import (AnalyzeResponse, ClassifyResponse, DualityOut, DualResponse, GaussImageOut,
                      GaussImageResponse, MeshOut)
from .sphere import is_simple


def parse_mesh(data, format: str = "obj") -> Mesh:
    return load_mesh(data, format)


def mesh_out(mesh: Mesh, comments: Sequence[str] = ()) -> MeshOut:
    return MeshOut(obj=export_obj(mesh, comments).decode("ascii"),
                   n_vertices=mesh.n_vertices, n_faces=mesh.n_faces)


def analyze(mesh: Mesh, colored_obj: bool = False) -> AnalyzeResponse:
    rep = rp.analyze(mesh)
    return AnalyzeResponse(
        smooth=rep.smooth,
        conditions={str(k): v for k, v in rep.conditions.items()},
        n_violations=len(rep.violations),
        report=rp.report_to_dict(rep),
        colored_obj=rp.export_colored_mesh(mesh, rep).decode("ascii") if colored_obj else None,
    )


def _vertex_cache(mesh: Mesh, vertices) -> Dict[int, VertexInfo]:
    cache = {}
    for v in vertices:
        _, _, info = rp.analyze_vertex(mesh, v)
        if info is not None:
            cache[v] = info
    return cache


def classify(mesh: Mesh, vertex: Optional[int] = None, face: Optional[int] = None) -> ClassifyResponse:
    """Analysis of a single vertex or face, with the violations it raises."""
    if (vertex is None) == (face is None):
        raise BadParameters("give exactly one of vertex or face")
    if vertex is not None:
        if not 0 <= vertex < mesh.n_vertices:
            raise BadParameters(f"vertex {vertex} out of range")
        rec, viol, _ = rp.analyze_vertex(mesh, vertex)
        kind, ident = "vertex", vertex
    else:
        if not 0 <= face < mesh.n_faces:
            raise BadParameters(f"face {face} out of range")
        rec, viol = rp.analyze_face(mesh, face, _vertex_cache(mesh, mesh.faces[face]))
        kind, ident = "face", face
    return ClassifyResponse(kind=kind, id=ident, ok=not viol and rec.status != "error",
                            record=asdict(rec), violations=[asdict(x) for x in viol])


def gauss_images(mesh: Mesh, vertices: Sequence[int], per_arc: int = 32) -> GaussImageResponse:
    images = []
    for v in vertices:
        if not 0 <= v < mesh.n_vertices:
            raise BadParameters(f"vertex {v} out of range")
        star = vertex_star(mesh, v)
        g = gauss_image(star)
        images.append(GaussImageOut(vertex=v, normals=[tuple(map(float, n)) for n in g.normals],
                                    simple=is_simple(g.polygon).simple,
                                    K=float(gaussian_curvature(star))))
    svg = rp.export_gauss_svg(mesh, list(vertices), per_arc=per_arc).decode("utf-8")
    return GaussImageResponse(images=images, svg=svg)


def dual(mesh: Mesh, center: Optional[Sequence[float]] = None, check: bool = True) -> DualResponse:
    O = find_admissible_center(mesh) if center is None else np.asarray(center, dtype=float)
    pd = polar_dual(mesh, O)
    out = None
    if check:
        r = check_duality(mesh, pd)
        out = DualityOut(ok=r.ok, signs_all_match=r.signs_all_match,
                         inflection_all_match=r.inflection_all_match,
                         double_dual_deviation=r.double_dual_deviation,
                         gauss_projection_deviation=r.gauss_projection_deviation,
                         primal_smooth=r.primal_smooth, dual_smooth=r.dual_smooth,
                         problems=list(r.problems))
    comment = "polar dual about %.17g %.17g %.17g" % tuple(O)
    return DualResponse(center=tuple(map(float, O)), obj=export_obj(pd.mesh, [comment]).decode("ascii"),
                        vertex_face=list(pd.vertex_face), face_vertex=list(pd.face_vertex),
                        duality=out)


def parse_matrix(data: Any) -> ProjectiveMap:
    """Matrix from a JSON string, a flat list of 16 numbers, a 4x4 nested
    list or a ``{"matrix": ...}`` object."""
    if isinstance(data, (str, bytes)):
        try:
            data = json.loads(data)
        except ValueError as e:
            raise BadParameters(f"matrix is not valid JSON: {e}") from None
    if isinstance(data, Mapping):
        data = data.get("matrix")
    try:
        m = np.array(data, dtype=float)
    except (TypeError, ValueError):
        raise BadParameters("matrix must contain 16 numbers") from None
    if m.size != 16:
        raise BadParameters("matrix must contain 16 numbers")
    return ProjectiveMap(m.reshape(4, 4))


def transform(mesh: Mesh, matrix: Any) -> MeshOut:
    pm = parse_matrix(matrix)
    return mesh_out(apply_projective(mesh, pm))


def generate(fixture: str, params: Optional[Dict[str, Any]] = None) -> MeshOut:
    mesh = generate_fixture(FixtureSpec(fixture, dict(params or {})))
    items = ", ".join(f"{k}={v}" for k, v in sorted((params or {}).items()))
    return mesh_out(mesh, [f"fixture {fixture}({items})"])


def error_payload(exc: PolysmoothError) -> Dict[str, str]:
    return {"error": type(exc).__name__, "detail": str(exc)}
