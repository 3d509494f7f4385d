import json

import numpy as np
import pytest

from polysmooth import fixtures as fx
from polysmooth.errors import CenterOnFacePlane, GeometryError, PointAtInfinity
from polysmooth.mesh import Mesh
from polysmooth.projective import (PolarDual, ProjectiveMap, admissibility_margin, apply_projective, check_duality,
                                   find_admissible_center, polar_dual, random_collineation)
from polysmooth.report import analyze

from oracles import polar_plane_residual, unit


def verdict_key(rep):
    return (rep.smooth, tuple((v.status, v.label, tuple(sorted(v.inflection_faces))) for v in rep.vertices))


def test_identity_and_scaling():
    m = fx.hex_saddle()
    assert np.array_equal(apply_projective(m, ProjectiveMap.identity()).vertices, m.vertices)
    m2 = apply_projective(m, np.diag([2.0, 2.0, 2.0, 1.0]))
    assert np.allclose(m2.vertices, 2 * m.vertices)
    # a homogeneous rescaling of the matrix is the same map
    m3 = apply_projective(m, 5.0 * np.eye(4))
    assert np.allclose(m3.vertices, m.vertices)


def test_compose_inverse_and_json():
    rng = np.random.default_rng(0)
    M = random_collineation(rng, fx.saddle_star())
    assert np.allclose(M.compose(M.inverse()).matrix, np.eye(4), atol=1e-12)
    back = ProjectiveMap.from_json(M.to_json())
    assert np.array_equal(back.matrix, M.matrix)
    assert np.array_equal(ProjectiveMap.from_json(json.dumps({"matrix": M.matrix.tolist()})).matrix, M.matrix)


def test_singular_matrix_rejected():
    with pytest.raises(GeometryError):
        ProjectiveMap(np.zeros((4, 4)))


def test_point_at_infinity():
    m = fx.saddle_star()
    M = np.eye(4)
    M[0, 3] = 1.0
    M[3] = [1.0, 0, 0, 0]  # w = x vanishes at the centre vertex
    with pytest.raises(PointAtInfinity):
        apply_projective(m, M)
    M[3] = [1.0, 0, 0, 0.1]  # w changes sign across the star
    with pytest.raises(PointAtInfinity):
        apply_projective(m, M)


def test_differential_matches_finite_differences():
    rng = np.random.default_rng(1)
    m = fx.saddle_star()
    M = random_collineation(rng, m)
    p = m.vertices[0]
    for d in rng.normal(size=(5, 3)):
        h = 1e-6
        fd = (M(p + h * d)[0] - M(p - h * d)[0]) / (2 * h)
        assert np.allclose(M.differential(p, d), fd, rtol=1e-6, atol=1e-8)


def test_plane_normal_matches_image_points():
    rng = np.random.default_rng(2)
    m = fx.saddle_star()
    M = random_collineation(rng, m)
    p, n = np.array([0.1, -0.2, 0.05]), unit([0.3, 0.2, 1.0])
    t1 = unit(np.cross(n, [1, 0, 0]))
    t2 = np.cross(n, t1)
    q = M(np.array([p, p + 0.3 * t1, p + 0.3 * t2]))
    ref = unit(np.cross(q[1] - q[0], q[2] - q[0]))
    got = M.plane_normal(n, p)
    assert min(np.linalg.norm(got - ref), np.linalg.norm(got + ref)) < 1e-10


def test_orientation_reversing_map_keeps_verdicts():
    m = fx.graph_mesh("saddle", "c", 4)
    R = np.diag([-1.0, 1.0, 1.0, 1.0])
    m2 = apply_projective(m, R)
    assert np.allclose(m2.face_normals[:, 0], -m.face_normals[:, 0])
    assert verdict_key(analyze(m2)) == verdict_key(analyze(m))


@pytest.mark.parametrize("name", ["saddle_star", "pseudo_triangle_a_star", "pseudo_triangle_b_star",
                                  "cube_corner", "monkey_star", "nonstar_pseudo_quad_star"])
def test_verdicts_invariant_under_random_collineations(name):
    m = fx.FIXTURES[name]()
    k0 = verdict_key(analyze(m))
    rng = np.random.default_rng(7)
    for _ in range(8):
        assert verdict_key(analyze(apply_projective(m, random_collineation(rng, m)))) == k0


# polarity ------------------------------------------------------------------------------

@pytest.fixture(scope="module")
def cap_dual():
    m = fx.convex_cap(4)
    O = find_admissible_center(m)
    return m, polar_dual(m, O)


def test_admissible_center(cap_dual):
    m, d = cap_dual
    assert admissibility_margin(m, d.center) > 0


def test_dual_vertices_lie_on_polar_planes(cap_dual):
    m, d = cap_dual
    for j, v in enumerate(d.face_vertex):
        pts = d.mesh.vertices[list(d.mesh.faces[j])]
        assert polar_plane_residual(pts, m.vertices[v], d.center) < 1e-9


def test_dual_correspondence(cap_dual):
    m, d = cap_dual
    assert d.mesh.n_faces == len(m.interior_vertices())
    for i, f in enumerate(d.vertex_face):
        assert d.dual_vertex_of(f) == i
    for j, v in enumerate(d.face_vertex):
        assert d.dual_face_of(v) == j


@pytest.mark.parametrize("mesh", [fx.convex_cap(4), fx.graph_mesh("saddle", "c", 4),
                                  fx.hex_graph_mesh("saddle", 4)], ids=["cap", "graph", "hex"])
def test_duality_checks(mesh):
    d = polar_dual(mesh, find_admissible_center(mesh))
    rep = check_duality(mesh, d)
    assert rep.ok, rep.problems
    assert rep.sign_matches and rep.inflection_matches
    assert rep.double_dual_deviation < 1e-9


def test_corrupted_dual_is_caught(cap_dual):
    m, d = cap_dual
    pts = d.mesh.vertices.copy()
    i = d.mesh.interior_vertices()[0]
    pts[i] += 1e-3 * d.mesh.scale() * unit([0.3, -0.5, 0.8])
    bad = PolarDual(Mesh(pts, d.mesh.faces, validate=False), d.center, d.vertex_face, d.face_vertex)
    rep = check_duality(m, bad, with_verdicts=False)
    assert not rep.ok
    assert rep.double_dual_deviation > 1e-6


def test_center_on_face_plane_rejected():
    m = fx.cube()
    with pytest.raises(CenterOnFacePlane):
        polar_dual(m, m.vertices[m.faces[0][0]])


def test_polar_dual_is_an_involution_on_points():
    m = fx.hex_graph_mesh("saddle", 4)
    O = find_admissible_center(m)
    d = polar_dual(m, O)
    dd = polar_dual(d.mesh, O, validate=False)
    # the double dual recovers every primal vertex whose star is dualised twice
    for i, f in enumerate(dd.vertex_face):
        v = d.face_vertex[f]
        assert np.linalg.norm(dd.mesh.vertices[i] - m.vertices[v]) < 1e-9 * m.scale()
