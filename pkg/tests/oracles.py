"""Independent reference computations used to cross-check the package.

Nothing here calls into the code under test except to build inputs.
"""

import math

import numpy as np
from scipy.optimize import linprog

from polysmooth import sphere
from polysmooth.curvature import gauss_image
from polysmooth.errors import PolysmoothError
from polysmooth.fixtures import star_mesh


def unit(v):
    v = np.asarray(v, dtype=float)
    return v / math.sqrt(float(v @ v))


def planar_angle(c, a, b) -> float:
    """Angle at c in the triangle (c, a, b) by the law of cosines."""
    u, w = np.asarray(a, float) - c, np.asarray(b, float) - c
    return math.acos(max(-1.0, min(1.0, float(u @ w) / math.sqrt(float(u @ u) * float(w @ w)))))


def triangle_star_defect(center, ring) -> float:
    k = len(ring)
    return 2 * math.pi - sum(planar_angle(center, ring[i], ring[(i + 1) % k]) for i in range(k))


def triangle_normals(center, ring):
    k = len(ring)
    return np.array([unit(np.cross(ring[i] - center, ring[(i + 1) % k] - center)) for i in range(k)])


def triangle_inflections(center, ring):
    """Face i = (c, r_i, r_i+1).  Its neighbours' far corners are r_i-1 and
    r_i+2; the face inflects iff they lie on opposite sides of its plane."""
    k = len(ring)
    out = []
    for i in range(k):
        a, b = ring[i] - center, ring[(i + 1) % k] - center
        s1 = np.linalg.det(np.array([a, b, ring[(i - 1) % k] - center]))
        s2 = np.linalg.det(np.array([a, b, ring[(i + 2) % k] - center]))
        out.append(bool(s1 * s2 < 0))
    return out


def arc_length(a, b) -> float:
    return math.atan2(float(np.linalg.norm(np.cross(a, b))), float(a @ b))


def spherical_ccw_angle(prev, p, nxt) -> float:
    """Angle at p swept counter-clockwise from the arc towards nxt to the arc
    towards prev, via the spherical law of cosines."""
    a, b, c = arc_length(prev, nxt), arc_length(p, prev), arc_length(p, nxt)
    cos_a = (math.cos(a) - math.cos(b) * math.cos(c)) / (math.sin(b) * math.sin(c))
    A = math.acos(max(-1.0, min(1.0, cos_a)))
    return A if np.linalg.det(np.array([p, nxt, prev])) > 0 else 2 * math.pi - A


def lhuilier_signed(a, b, c) -> float:
    """Signed area of the spherical triangle abc by L'Huilier's formula."""
    x, y, z = arc_length(b, c), arc_length(c, a), arc_length(a, b)
    s = 0.5 * (x + y + z)
    t = math.tan(s / 2) * math.tan((s - x) / 2) * math.tan((s - y) / 2) * math.tan((s - z) / 2)
    e = 4 * math.atan(math.sqrt(max(t, 0.0)))
    return e if np.linalg.det(np.array([a, b, c])) >= 0 else -e


def fan_area(points, apex) -> float:
    k = len(points)
    return sum(lhuilier_signed(apex, points[i], points[(i + 1) % k]) for i in range(k))


def open_hemisphere_exists(points) -> bool:
    """LP feasibility: some x with <p_i, x> >= 1 for all i."""
    p = np.asarray(points, dtype=float)
    res = linprog(np.zeros(3), A_ub=-p, b_ub=-np.ones(len(p)), bounds=[(None, None)] * 3,
                  method="highs")
    return res.status == 0


def banchoff_count(center, tris, xi) -> int:
    """1 - (triangles whose centre corner is strictly between the others)/2."""
    h0 = float(xi @ center)
    mid = 0
    for a, b in tris:
        ha, hb = float(xi @ a) - h0, float(xi @ b) - h0
        if ha * hb < 0:
            mid += 1
    return 1 - mid // 2


def polar_plane_residual(dual_points, primal_point, center) -> float:
    """Max |<x - O, v - O> - 1| over the dual vertices x of the face dual to v."""
    d = np.asarray(primal_point) - center
    return max(abs(float((x - center) @ d) - 1.0) for x in dual_points)


def random_ring(rng, k):
    gaps = rng.uniform(0.35, 1.0, size=k)
    theta = np.cumsum(gaps / gaps.sum() * 2 * math.pi) + rng.uniform(0, 2 * math.pi)
    r = rng.uniform(0.5, 1.5, size=k)
    mode = rng.integers(3)
    if mode == 0:
        z = rng.uniform(-0.4, 0.9, size=k) - 0.6  # mostly convex
    elif mode == 1:
        z = rng.uniform(-1.0, 1.0, size=k)
    else:
        z = np.cos(2 * theta + rng.uniform(0, math.pi)) * rng.uniform(0.2, 1.2) + rng.normal(0, 0.15, k)
    return np.stack([r * np.cos(theta), r * np.sin(theta), z], axis=1)


def random_simple_stars(count, seed, min_abs_k=1e-3, max_tries=100000):
    """Triangulated stars (valence 3 to 9) whose Gauss images are simple.

    Yields (mesh, ring) with the centre at the origin.
    """
    from polysmooth.mesh import vertex_star
    from polysmooth.sphere import is_simple

    rng = np.random.default_rng(seed)
    out = []
    for _ in range(max_tries):
        if len(out) == count:
            break
        k = int(rng.integers(3, 10))
        ring = random_ring(rng, k)
        try:
            mesh = star_mesh([0.0, 0.0, 0.0], ring)
            star = vertex_star(mesh, 0)
            g = gauss_image(star)
        except PolysmoothError:
            continue
        if abs(triangle_star_defect(np.zeros(3), ring)) < min_abs_k:
            continue
        if not is_simple(g.polygon).simple:
            continue
        out.append((mesh, ring))
    if len(out) < count:
        raise RuntimeError("could not sample enough stars")
    return out


def in_face_sector(r, d, tol=1e-9):
    # ccw angle from the outgoing edge to d about the face's Newell normal,
    # compared with the corner angle from the same route
    pts = r.points
    newell = unit(sum(np.cross(pts[i], pts[(i + 1) % len(pts)]) for i in range(len(pts))))
    if abs(d @ newell) > tol * np.linalg.norm(d):
        return False
    e_next, e_prev = pts[1] - pts[0], pts[-1] - pts[0]

    def ccw(a, b):
        return math.atan2(np.cross(a, b) @ newell, a @ b) % (2 * math.pi)

    return ccw(e_next, d) <= ccw(e_next, e_prev) + tol or ccw(e_next, d) >= 2 * math.pi - tol


def positive_side_samples(star, count, seed, centre=None, spread=0.8):
    # normals wound by the Gauss image whose antipodes are not
    g = gauss_image(star).polygon
    if centre is None:
        centre = sphere.hemisphere_pole(g.vertices)
    rng = np.random.default_rng(seed)
    out = []
    for x in sphere.normalize(centre + spread * rng.normal(size=(count, 3))):
        try:
            if sphere.winding_number(g, x) != 0 and sphere.winding_number(g, -x) == 0:
                out.append(x)
        except Exception:
            continue
    return out
