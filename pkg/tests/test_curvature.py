import math

import numpy as np
import pytest

from polysmooth import fixtures as fx
from polysmooth import sphere
from polysmooth.curvature import (VertexClassLabel, banchoff_index, banchoff_index_many, classify_vertex,
                                  gauss_image, gaussian_curvature, image_angles, inflection_flags,
                                  lemma_angle, lemma_angle_value, oriented_image_angle, vertex_smoothness)
from polysmooth.errors import NonGenericDirection, StraightAngle, ZeroCurvature
from polysmooth.mesh import Mesh, vertex_star

from oracles import (banchoff_count, fan_area, planar_angle, random_simple_stars, spherical_ccw_angle,
                     triangle_inflections, triangle_normals, triangle_star_defect, unit)

STARS = ["cube_corner", "tetra_apex", "saddle_star", "hex_saddle", "monkey_star", "pseudo_digon_star",
         "pseudo_triangle_a_star", "pseudo_triangle_b_star", "antipodal_star", "nonstar_pseudo_quad_star"]


def centre_star(name):
    return vertex_star(fx.FIXTURES[name](), 0)


@pytest.fixture(scope="module")
def corpus():
    return [(vertex_star(m, 0), ring) for m, ring in random_simple_stars(200, 11)]


# angle defect ------------------------------------------------------------------------

def test_cube_corner_defect():
    assert abs(gaussian_curvature(centre_star("cube_corner")) - math.pi / 2) < 1e-15


def _corner_angle(pts):
    # law of cosines, flipped to the reflex side when the corner turns against
    # the face orientation given by its Newell normal
    a = planar_angle(pts[0], pts[1], pts[-1])
    newell = sum(np.cross(pts[i], pts[(i + 1) % len(pts)]) for i in range(len(pts)))
    if np.cross(pts[1] - pts[0], pts[-1] - pts[0]) @ newell < 0:
        a = 2 * math.pi - a
    return a


@pytest.mark.parametrize("name", STARS)
def test_defect_matches_law_of_cosines(name):
    s = centre_star(name)
    ref = 2 * math.pi - sum(_corner_angle(r.points) for r in s.ring)
    assert abs(gaussian_curvature(s) - ref) < 1e-12


def test_cube_vertices_all_quarter_turn():
    m = fx.cube()
    for v in range(8):
        assert abs(gaussian_curvature(vertex_star(m, v)) - math.pi / 2) < 1e-14


def test_area_of_gauss_image_equals_defect(corpus):
    for s, ring in corpus:
        K = gaussian_curvature(s)
        assert abs(K - triangle_star_defect(np.zeros(3), ring)) < 1e-12
        A = sphere.signed_area(gauss_image(s).polygon, 1 if K > 0 else -1)
        assert abs(A - K) < 1e-11
        # fan of L'Huilier triangles, determined up to a full sphere
        nrm = triangle_normals(np.zeros(3), ring)
        apex = unit(nrm.sum(0)) if np.linalg.norm(nrm.sum(0)) > 1e-6 else unit(nrm[0] + nrm[1])
        d = (fan_area(nrm, apex) - K + 2 * math.pi) % (4 * math.pi) - 2 * math.pi
        assert abs(d) < 1e-9


# inflection and image angles --------------------------------------------------------------

def test_inflection_flags_match_determinant_oracle(corpus):
    for s, ring in corpus:
        assert inflection_flags(s) == triangle_inflections(np.zeros(3), ring)


@pytest.mark.parametrize("alpha,infl,expected", [
    (1.0, False, math.pi - 1.0),
    (1.0, True, 2 * math.pi - 1.0),
    (4.0, True, 2 * math.pi - 4.0),
    (4.0, False, 3 * math.pi - 4.0),
])
def test_lemma_angle_cases(alpha, infl, expected):
    assert abs(lemma_angle_value(alpha, infl) - expected) < 1e-15
    assert abs(oriented_image_angle(alpha, infl, -1) - (2 * math.pi - expected)) < 1e-15


def test_straight_face_angle_rejected():
    with pytest.raises(StraightAngle):
        lemma_angle_value(math.pi, False)


def test_image_angles_match_prediction_and_oracle(corpus):
    for s, ring in corpus:
        K = gaussian_curvature(s)
        sg = 1 if K > 0 else -1
        geo = image_angles(s)
        nrm = triangle_normals(np.zeros(3), ring)
        k = len(ring)
        infl = inflection_flags(s)
        for i, r in enumerate(s.ring):
            assert abs(oriented_image_angle(r.angle, infl[i], sg) - geo[i]) < 1e-10
            ref = spherical_ccw_angle(nrm[i - 1], nrm[i], nrm[(i + 1) % k])
            ref = ref if sg > 0 else 2 * math.pi - ref
            assert abs(ref - geo[i]) < 1e-9
        al = s.angles
        rhs = np.sum(math.pi - al) if K > 0 else np.sum(math.pi + al) - 4 * math.pi
        assert abs(geo.sum() - rhs) < 1e-10


def test_lemma_angle_on_reflex_face():
    s = centre_star("pseudo_triangle_b_star")
    i = next(i for i, r in enumerate(s.ring) if r.reflex)
    assert not inflection_flags(s)[i]
    assert abs(lemma_angle(s, i) - (3 * math.pi - s.ring[i].angle)) < 1e-15
    assert abs(image_angles(s)[i] - (2 * math.pi - lemma_angle(s, i))) < 1e-10


# Banchoff index ------------------------------------------------------------------------------

def test_banchoff_examples():
    assert banchoff_index(centre_star("cube_corner"), [0.01, 0.02, 1]) == 1
    assert banchoff_index(centre_star("saddle_star"), [0.01, 0.02, 1]) == -1
    with pytest.raises(NonGenericDirection):
        banchoff_index(centre_star("cube_corner"), [0, 1, 0])


def _link_sign_changes_index(star, xi):
    # 1 - (sign changes of the height around the link) / 2
    link = np.vstack([r.points[1:-1] for r in star.ring])
    h = np.sign((link - star.center) @ xi)
    return 1 - int(np.sum(h != np.roll(h, -1))) // 2


@pytest.mark.parametrize("name", ["cube_corner", "saddle_star", "hex_saddle", "monkey_star",
                                  "pseudo_triangle_b_star", "pseudo_triangle_a_star"])
def test_banchoff_matches_oracles(name):
    s = centre_star(name)
    rng = np.random.default_rng(5)
    xis = sphere.normalize(rng.normal(size=(500, 3)))
    idx, generic = banchoff_index_many(s, xis)
    triangles = all(len(r.points) == 3 for r in s.ring)
    for xi, i, g in zip(xis, idx, generic):
        if g:
            assert i == _link_sign_changes_index(s, xi)
            if triangles:
                assert i == banchoff_count(s.center, [(r.points[1], r.points[-1]) for r in s.ring], xi)


@pytest.mark.parametrize("name", ["cube_corner", "saddle_star", "monkey_star"])
def test_banchoff_mean_is_defect(name):
    s = centre_star(name)
    xis = sphere.normalize(np.random.default_rng(1).normal(size=(200000, 3)))
    idx, generic = banchoff_index_many(s, xis)
    idx = idx[generic]
    se = idx.std() / math.sqrt(len(idx))
    assert abs(2 * math.pi * idx.mean() - gaussian_curvature(s)) < 2 * math.pi * 4 * se


# classification -------------------------------------------------------------------------------

@pytest.mark.parametrize("name,label,n_infl,n_reflex", [
    ("cube_corner", VertexClassLabel.CONVEX_CORNER, 0, 0),
    ("tetra_apex", VertexClassLabel.CONVEX_CORNER, 0, 0),
    ("saddle_star", VertexClassLabel.PSEUDO_QUADRILATERAL, 4, 0),
    ("hex_saddle", VertexClassLabel.PSEUDO_QUADRILATERAL, 4, 0),
    ("pseudo_triangle_a_star", VertexClassLabel.PSEUDO_TRIANGLE_A, 4, 1),
    ("pseudo_triangle_b_star", VertexClassLabel.PSEUDO_TRIANGLE_B, 2, 1),
    ("pseudo_digon_star", VertexClassLabel.PSEUDO_DIGON, 4, 2),
    ("nonstar_pseudo_quad_star", VertexClassLabel.PSEUDO_QUADRILATERAL, 4, 0),
])
def test_classification(name, label, n_infl, n_reflex):
    c = classify_vertex(centre_star(name))
    assert c.label == label
    assert len(c.inflection_faces) == n_infl
    assert len(c.reflex_faces) == n_reflex
    expected_corners = {VertexClassLabel.CONVEX_CORNER: None, VertexClassLabel.PSEUDO_QUADRILATERAL: 4,
                        VertexClassLabel.PSEUDO_TRIANGLE_A: 3, VertexClassLabel.PSEUDO_TRIANGLE_B: 3,
                        VertexClassLabel.PSEUDO_DIGON: 2}[label]
    if expected_corners is not None:
        assert len(c.corner_faces) == expected_corners


def test_reflex_inflection_face_is_not_a_corner():
    c = classify_vertex(centre_star("pseudo_triangle_a_star"))
    assert c.reflex_faces[0] not in c.corner_faces
    c = classify_vertex(centre_star("pseudo_triangle_b_star"))
    assert c.reflex_faces[0] in c.corner_faces


def test_classification_of_random_negative_stars(corpus):
    counts = {}
    for s, _ in corpus:
        if gaussian_curvature(s) < 0:
            c = classify_vertex(s)
            counts[c.label] = counts.get(c.label, 0) + 1
    assert VertexClassLabel.PSEUDO_QUADRILATERAL in counts
    assert VertexClassLabel.CONVEX_CORNER not in counts


def test_zero_curvature_rejected():
    # flat square star folded along the x axis keeps its corner angles
    ring = [[1, 0, 0], [0, 1, 0.5], [-1, 0, 0], [0, -1, 0]]
    faces = [(0, i + 1, (i + 1) % 4 + 1) for i in range(4)]
    m = Mesh([[0, 0, 0]] + ring, faces, validate=False)
    m = Mesh(np.vstack([m.vertices, [[0, 0, -3]]]),
             faces + [(5, (i + 1) % 4 + 1, i + 1) for i in range(4)], validate=False)
    with pytest.raises(ZeroCurvature):
        classify_vertex(vertex_star(m, 0))


# smoothness ------------------------------------------------------------------------------------

@pytest.mark.parametrize("name,failed", [
    ("cube_corner", ()), ("tetra_apex", ()), ("saddle_star", ()), ("hex_saddle", ()),
    ("pseudo_triangle_a_star", ()), ("pseudo_triangle_b_star", ()),
    ("pseudo_digon_star", ("NotHemispherical",)), ("antipodal_star", ("NotHemispherical",)),
    ("nonstar_pseudo_quad_star", ("EmptyKernel",)),
])
def test_vertex_smoothness(name, failed):
    s = centre_star(name)
    chk = vertex_smoothness(s)
    assert chk.failed == failed
    assert chk.smooth == (not failed)
    if chk.smooth:
        f = chk.frame
        g = gauss_image(s).polygon
        assert f.kernel.contains(f.n)
        assert np.all(g.vertices @ f.n_prime > 0)
        assert abs(np.linalg.norm(f.n) - 1) < 1e-14


def test_saddle_tangent_normal_is_vertical():
    f = vertex_smoothness(centre_star("saddle_star")).frame
    assert np.allclose(f.n, [0, 0, 1], atol=1e-12)
