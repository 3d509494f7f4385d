import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from polysmooth import sphere
from polysmooth.errors import GeometryError, NotHemispherical, NotSimple, PointOnBoundary
from polysmooth.sphere import (EXHAUSTIVE_LIMIT, SphericalPolygon, arc_intersection, ccw_angles,
                               hemisphere_margin, hemisphere_pole, is_simple, signed_area,
                               star_shape_kernel, winding_number)

from oracles import fan_area, open_hemisphere_exists, spherical_ccw_angle, unit

EX, EY, EZ = np.eye(3)


def octant():
    return SphericalPolygon([EX, EY, EZ])


def test_octant_area_and_angles():
    p = octant()
    assert np.allclose(ccw_angles(p), math.pi / 2)
    assert abs(signed_area(p, 1) - math.pi / 2) < 1e-14
    assert abs(signed_area(p.reversed(), -1) + math.pi / 2) < 1e-14


def test_polygon_rejects_antipodal_neighbours():
    with pytest.raises(GeometryError):
        SphericalPolygon([EX, -EX, EZ])


def test_arc_sample_endpoints_and_unit_length():
    pts = sphere.GreatArc(EX, EY).sample(5)
    assert np.allclose(pts[0], EX) and np.allclose(pts[-1], EY)
    assert np.allclose(np.linalg.norm(pts, axis=1), 1.0)


def test_arc_intersection_crossing_and_miss():
    a, b = unit([1, -1, 0.2]), unit([1, 1, 0.2])
    c, d = unit([1, 0, -1]), unit([1, 0, 1])
    hit = arc_intersection(a, b, c, d)
    assert hit.crossing and not hit.degenerate
    assert abs(hit.point @ np.cross(a, b)) < 1e-12
    miss = arc_intersection(a, b, unit([-1, 0, -1]), unit([-1, 0, 1]))
    assert not miss.crossing


def test_arc_intersection_overlap_on_same_circle():
    hit = arc_intersection(EX, EY, unit([1, 2, 0]), unit([-1, 1, 0]))
    assert hit.crossing and hit.degenerate


def test_bowtie_is_not_simple():
    p = SphericalPolygon([unit([1, 0.3, 1]), unit([-1, -0.3, 1]), unit([1, -0.3, 1]), unit([-1, 0.3, 1])])
    res = is_simple(p)
    assert not res.simple
    with pytest.raises(NotSimple):
        signed_area(p, 1)


def test_winding_numbers():
    p = SphericalPolygon([unit([1, 0, 1]), unit([0, 1, 1]), unit([-1, 0, 1]), unit([0, -1, 1])])
    assert winding_number(p, EZ) == 1
    assert winding_number(p.reversed(), EZ) == -1
    assert winding_number(p, -EZ) == 0
    assert winding_number(p, unit([1, 0, -0.2])) == 0
    with pytest.raises(PointOnBoundary):
        winding_number(p, unit([1, 0, 1]))


def test_winding_for_polygon_beyond_hemisphere():
    # zigzag around the z axis dipping below the equator; the northern
    # region is the smaller one
    t = np.linspace(0, 2 * np.pi, 9)[:-1]
    pts = np.stack([np.cos(t), np.sin(t), 0.2 + 0.5 * (-1) ** np.arange(8)], axis=1)
    p = SphericalPolygon(pts)
    assert hemisphere_pole(p.vertices) is None
    assert winding_number(p, EZ) == 1
    assert winding_number(p, -EZ) == 0
    assert winding_number(p.reversed(), EZ) == -1


def test_hemisphere_pole_simple_cases():
    assert np.allclose(hemisphere_pole([EX, EY, EZ]), unit([1, 1, 1]))
    assert hemisphere_pole([EX, -EX, EY]) is None
    assert hemisphere_pole([EX, EY, -EX - EY, EZ, -EZ]) is None


def test_kernel_of_convex_polygon_is_the_polygon():
    p = SphericalPolygon([unit([1, 0, 2]), unit([0, 1, 2]), unit([-1, 0, 2]), unit([0, -1, 2])])
    ker = star_shape_kernel(p)
    assert not ker.empty
    assert ker.contains(EZ)
    assert abs(ker.area - abs(sphere.planar.signed_area(ker.chart_polygon))) < 1e-12


def test_kernel_requires_hemisphere():
    p = SphericalPolygon([EX, EY, -EX, -EY + 0.01 * EZ, EZ])
    with pytest.raises((NotHemispherical, NotSimple)):
        star_shape_kernel(p)


def test_gnomonic_roundtrip():
    pole = unit([0.2, -0.4, 1])
    pts = sphere.normalize(np.array([[0.1, 0.2, 1], [0.3, -0.1, 0.8], [-0.5, 0.4, 1.2]]))
    back = sphere.gnomonic_inverse(sphere.gnomonic(pts, pole), pole)
    assert np.allclose(back, pts)


# independent routes --------------------------------------------------------------

unit_vec = st.tuples(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1)).filter(
    lambda v: 0.1 < np.linalg.norm(v))


@given(st.lists(unit_vec, min_size=3, max_size=8))
def test_hemisphere_existence_matches_lp(vs):
    pts = sphere.normalize(np.array(vs))
    pole, margin = hemisphere_margin(pts)
    assume(abs(margin) > 1e-6)
    assert (margin > 0) == open_hemisphere_exists(pts)
    assert np.all(pts @ pole >= margin - 1e-12)


def test_active_set_matches_exhaustive():
    rng = np.random.default_rng(3)
    for trial in range(30):
        m = int(rng.integers(EXHAUSTIVE_LIMIT + 1, 70))
        spread = rng.uniform(0.2, 2.0)
        pts = sphere.normalize(rng.normal(size=(m, 3)) * spread + np.array([0, 0, 1.0]))
        pole_a, t_a = hemisphere_margin(pts)
        t_b = _brute_margin(pts)
        assert abs(t_a - t_b) < 1e-12
        assert abs((pts @ pole_a).min() - t_a) < 1e-12


def _brute_margin(p):
    # every candidate pole fixed by one, two or three points
    from itertools import combinations
    i, j = np.array(list(combinations(range(len(p)), 2))).T
    s = p[i] + p[j]
    i, j, k = np.array(list(combinations(range(len(p)), 3))).T
    c = np.cross(p[j] - p[i], p[k] - p[i])
    cands = np.vstack([p, s, c, -c])
    n = np.linalg.norm(cands, axis=1)
    cands = cands[n > 1e-14] / n[n > 1e-14, None]
    return max(float((chunk @ p.T).min(axis=1).max()) for chunk in np.array_split(cands, 20))


def _random_cap_polygon(data, n):
    # star-shaped about the pole by construction: sorted angles with gaps
    # below pi, radii free
    ang = sorted(data.draw(st.lists(st.floats(0, 2 * math.pi), min_size=n, max_size=n, unique=True)))
    gaps = [b - a for a, b in zip(ang, ang[1:])] + [ang[0] + 2 * math.pi - ang[-1]]
    assume(all(0.05 < g < math.pi - 0.05 for g in gaps))
    rad = data.draw(st.lists(st.floats(0.1, 1.2), min_size=n, max_size=n))
    return np.array([[r * math.cos(t), r * math.sin(t), 1.0] for r, t in zip(rad, ang)])


@given(st.data(), st.integers(3, 9))
def test_area_matches_lhuilier_fan(data, n):
    pts = sphere.normalize(_random_cap_polygon(data, n))
    p = SphericalPolygon(pts)
    assume(is_simple(p).simple)
    assume(np.all(ccw_angles(p) > 1e-6) and np.all(ccw_angles(p) < 2 * math.pi - 1e-6))
    area = signed_area(p, 1)
    assert abs(area - fan_area(pts, EZ)) < 1e-9
    assert abs(signed_area(p.reversed(), -1) + area) < 1e-12


@given(st.data(), st.integers(3, 9))
def test_ccw_angles_match_law_of_cosines(data, n):
    pts = sphere.normalize(_random_cap_polygon(data, n))
    p = SphericalPolygon(pts)
    got = ccw_angles(p)
    for i in range(n):
        ref = spherical_ccw_angle(pts[i - 1], pts[i], pts[(i + 1) % n])
        d = abs(got[i] - ref)
        assert min(d, 2 * math.pi - d) < 1e-7


@given(st.data(), st.integers(3, 9))
def test_winding_of_star_polygon_about_its_centre(data, n):
    pts = sphere.normalize(_random_cap_polygon(data, n))
    p = SphericalPolygon(pts)
    assert winding_number(p, EZ) == 1
    assert winding_number(p.reversed(), EZ) == -1
    assert winding_number(p, -EZ) == 0
