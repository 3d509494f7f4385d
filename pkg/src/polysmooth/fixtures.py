"""Deterministic generators for the analytic test surfaces."""

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Sequence, Tuple

import numpy as np

from .errors import BadParameters, PolysmoothError
from .mesh import Mesh


@dataclass(frozen=True)
class Surface:
    """Height function with its gradient, for graph meshes."""

    name: str
    f: Callable[[np.ndarray, np.ndarray], np.ndarray]
    grad: Callable[[np.ndarray, np.ndarray], Tuple[np.ndarray, np.ndarray]]


SURFACES: Dict[str, Surface] = {
    "saddle": Surface("saddle", lambda x, y: x * x - y * y, lambda x, y: (2 * x, -2 * y)),
    "paraboloid": Surface("paraboloid", lambda x, y: x * x + y * y, lambda x, y: (2 * x, 2 * y)),
    "cap": Surface("cap", lambda x, y: -(x * x + y * y), lambda x, y: (-2 * x, -2 * y)),
    "monkey": Surface("monkey", lambda x, y: x ** 3 - 3 * x * y * y,
                      lambda x, y: (3 * x * x - 3 * y * y, -6 * x * y)),
}


@dataclass(frozen=True)
class FixtureSpec:
    name: str
    params: Dict[str, object] = field(default_factory=dict)


def _surface(fn) -> Surface:
    if isinstance(fn, Surface):
        return fn
    try:
        return SURFACES[str(fn)]
    except KeyError:
        raise BadParameters(f"unknown surface {fn!r}; choose from {sorted(SURFACES)}") from None


def star_mesh(center: Sequence[float], ring: Sequence[Sequence[float]],
              extra: Dict[int, Sequence[float]] = None) -> Mesh:
    """Mesh of a single vertex star.

    ``ring`` lists the neighbours counter-clockwise.  Face ``i`` joins the
    centre with ``ring[i]`` and ``ring[i+1]``; if ``extra`` holds a point for
    ``i`` the face becomes the quad (centre, ring[i], extra[i], ring[i+1]).
    """
    extra = extra or {}
    k = len(ring)
    verts = [list(center)] + [list(p) for p in ring]
    faces = []
    for i in range(k):
        a, b = 1 + i, 1 + (i + 1) % k
        if i in extra:
            verts.append(list(extra[i]))
            faces.append((0, a, len(verts) - 1, b))
        else:
            faces.append((0, a, b))
    return Mesh(verts, faces)


def cube() -> Mesh:
    v = [[x, y, z] for z in (0, 1) for y in (0, 1) for x in (0, 1)]
    f = [(0, 2, 3, 1), (4, 5, 7, 6), (0, 1, 5, 4), (2, 6, 7, 3), (0, 4, 6, 2), (1, 3, 7, 5)]
    return Mesh(v, f)


def cube_corner() -> Mesh:
    """Corner of the cube [-1,0]^3 at the origin; outward normals e_x, e_y, e_z."""
    v = [[0, 0, 0], [-1, 0, 0], [-1, -1, 0], [0, -1, 0], [0, -1, -1], [0, 0, -1], [-1, 0, -1]]
    f = [(0, 1, 2, 3), (0, 3, 4, 5), (0, 5, 6, 1)]
    return Mesh(v, f)


def tetra_apex() -> Mesh:
    """Apex of a regular tetrahedron with its three lateral faces."""
    base = [[np.cos(t), np.sin(t), 0.0] for t in (0, 2 * np.pi / 3, 4 * np.pi / 3)]
    apex = [0.0, 0.0, np.sqrt(2.0)]
    return star_mesh(apex, base)


def saddle_star(h: float = 1.0) -> Mesh:
    if h <= 0:
        raise BadParameters("h must be positive")
    ring = [[1, 0, h], [0, 1, -h], [-1, 0, h], [0, -1, -h]]
    return star_mesh([0, 0, 0], ring)


def hex_saddle(offset_deg: float = 10.0) -> Mesh:
    """Six-valent star on z = x^2 - y^2 with neighbours on the unit circle."""
    t = np.deg2rad(offset_deg) + np.arange(6) * np.pi / 3
    x, y = np.cos(t), np.sin(t)
    return star_mesh([0, 0, 0], np.stack([x, y, x * x - y * y], axis=1))


def monkey_star(inner: float = 0.5, outer: float = 1.5) -> Mesh:
    """Triangle face surrounded by a monkey-saddle ring on z = Re((x+iy)^3).

    The central triangle has its corners at angles 60, 180 and 300 degrees,
    where the cubic takes equal values, so it is horizontal; the outer ring
    samples the cubic at six directions.
    """
    if not 0 < inner < outer:
        raise BadParameters("need 0 < inner < outer")
    f = SURFACES["monkey"].f

    def lift(r, deg):
        x, y = r * np.cos(np.deg2rad(deg)), r * np.sin(np.deg2rad(deg))
        return [x, y, float(f(x, y))]

    verts = [lift(inner, 60 + 120 * j) for j in range(3)]
    verts += [lift(outer, 60 * k) for k in range(6)]
    a = [0, 1, 2]
    b = [3 + k for k in range(6)]
    faces = [(0, 1, 2)]
    for j in range(3):
        b1, b2, b3 = b[(2 * j + 1) % 6], b[(2 * j + 2) % 6], b[(2 * j + 3) % 6]
        faces.append((a[j], b1, b2))
        faces.append((a[j], b2, a[(j + 1) % 3]))
        faces.append((a[(j + 1) % 3], b2, b3))
    return Mesh(verts, faces)


def link_star(edges: Sequence[Sequence[float]], long_faces: Sequence[int] = (),
              dart: float = 0.6) -> Mesh:
    """Star at the origin whose faces follow the closed chain of edge
    directions ``edges``.

    Face ``i`` spans the short angle between ``edges[i]`` and
    ``edges[i+1]``, or the long (reflex) one if ``i`` is in ``long_faces``;
    a reflex face is a planar dart whose fourth point sits opposite the
    short-angle bisector.
    """
    e = np.asarray(edges, dtype=float)
    k = len(e)
    extra = {}
    for i in long_faces:
        a, b = e[i] / np.linalg.norm(e[i]), e[(i + 1) % k] / np.linalg.norm(e[(i + 1) % k])
        mid = a + b
        extra[int(i)] = -dart * mid / np.linalg.norm(mid)
    return star_mesh([0.0, 0.0, 0.0], e, extra)


def pseudo_digon_star(delta: float = 0.3, tilt: float = 0.6) -> Mesh:
    """Star with two reflex faces, each slightly longer than a half turn.

    The long faces lie in the equatorial plane and in a plane tilted by
    ``tilt`` about the x axis, on opposite sides of x = 0; two short faces
    join their ends.
    """
    if not (0 < delta < 1 and 0 < tilt < 1.2):
        raise BadParameters("need 0 < delta < 1 and 0 < tilt < 1.2")
    h = 0.5 * (np.pi + delta)
    p1 = np.array([np.cos(h), np.sin(h), 0.0])
    p2 = np.array([np.cos(h), -np.sin(h), 0.0])
    w = np.array([0.0, np.cos(tilt), np.sin(tilt)])
    ex = np.array([1.0, 0.0, 0.0])
    q1 = -ex * np.cos(h) + w * np.sin(h)
    q2 = -ex * np.cos(h) - w * np.sin(h)
    return link_star([p2, p1, q1, q2], long_faces=(0, 2))


# Stars found by a seeded random search over edge chains, then frozen.

def pseudo_triangle_a_star() -> Mesh:
    """Five faces, the reflex one inflects; smooth."""
    edges = [[0.34, 0.94, -0.34], [-0.98, -0.2, -0.27], [-0.79, -0.61, 0.14],
             [-0.43, -0.9, 0.59], [-0.4, -0.92, 0.33]]
    return link_star(edges, long_faces=(4,))


def pseudo_triangle_b_star() -> Mesh:
    """Six faces, one reflex face that does not inflect; smooth."""
    edges = [[0.6, 0.8, 0.32], [0.11, 0.99, -0.52], [-0.11, -0.99, 0.53],
             [0.66, -0.75, 0.65], [0.91, -0.41, -0.41], [1.0, -0.09, -0.91]]
    return link_star(edges, long_faces=(1,))


def antipodal_star() -> Mesh:
    """Five faces; the Gauss image encloses pairs of antipodal points."""
    edges = [[-0.58, 0.82, -0.57], [0.19, -0.98, -0.16], [0.55, -0.84, 0.06],
             [0.63, -0.78, -0.17], [0.83, -0.55, -0.03]]
    return link_star(edges, long_faces=(1,))


def nonstar_pseudo_quad_star() -> Mesh:
    """Seven convex faces; the Gauss image is a pseudo-quadrilateral in an
    open hemisphere with an empty kernel."""
    edges = [[0.89, 0.46, -0.69], [0.82, 0.57, -0.71], [-0.17, 0.99, -0.09],
             [-0.92, 0.39, 0.82], [-0.8, -0.6, -0.78], [-0.46, -0.89, -0.7],
             [0.89, -0.45, -0.58]]
    return link_star(edges)


TILINGS = {
    # lattice generators; edge directions are e1, e2 and e2 - e1
    "a": (np.array([1.0, 1.0]) / np.sqrt(2), np.array([-1.0, 1.0]) / np.sqrt(2)),
    "b": (np.array([np.cos(np.pi / 6), np.sin(np.pi / 6)]),
          np.array([-np.cos(np.pi / 6), np.sin(np.pi / 6)])),
    "c": (np.array([1.0, 0.0]), np.array([0.5, np.sqrt(3) / 2])),
}


def lattice(tiling: str, n: int, spacing: float) -> Tuple[np.ndarray, List[Tuple[int, int, int]]]:
    if tiling not in TILINGS:
        raise BadParameters(f"tiling must be one of {sorted(TILINGS)}")
    if n < 2:
        raise BadParameters("n must be at least 2")
    e1, e2 = TILINGS[tiling]
    idx = np.arange(-n, n + 1)
    pts = np.array([spacing * (i * e1 + j * e2) for j in idx for i in idx])
    m = len(idx)
    tris = []
    for j in range(m - 1):
        for i in range(m - 1):
            a, b, c, d = j * m + i, j * m + i + 1, (j + 1) * m + i, (j + 1) * m + i + 1
            tris.append((a, b, c))
            tris.append((b, d, c))
    return pts, tris


def graph_mesh(fn="saddle", tiling: str = "c", n: int = 8, spacing: float = None,
               validate: bool = True) -> Mesh:
    """Triangulated lattice lifted to the graph of a surface."""
    s = _surface(fn)
    spacing = 1.0 / n if spacing is None else spacing
    pts, tris = lattice(tiling, n, spacing)
    z = s.f(pts[:, 0], pts[:, 1])
    return Mesh(np.column_stack([pts, z]), tris, validate=validate)


def hex_graph_mesh(fn="saddle", n: int = 6, spacing: float = None) -> Mesh:
    """Valence-3 hexagonal mesh from tangent planes of a graph surface.

    Each face lies in the tangent plane at a point of the equilateral
    triangular lattice; each vertex is the common point of the three
    tangent planes of a lattice triangle.  Faces are planar by construction.
    """
    s = _surface(fn)
    spacing = 1.0 / n if spacing is None else spacing
    pts, tris = lattice("c", n, spacing)
    gx, gy = s.grad(pts[:, 0], pts[:, 1])
    z = s.f(pts[:, 0], pts[:, 1])
    # plane:  -gx x - gy y + z = z0 - gx x0 - gy y0
    normals = np.column_stack([-gx, -gy, np.ones(len(pts))])
    rhs = z - gx * pts[:, 0] - gy * pts[:, 1]
    verts = []
    for t in tris:
        verts.append(np.linalg.solve(normals[list(t)], rhs[list(t)]))
    # faces around each lattice point with a complete ring of triangles
    around: Dict[int, List[int]] = {}
    for ti, t in enumerate(tris):
        for p in t:
            around.setdefault(p, []).append(ti)
    faces = []
    for p in sorted(around):
        ring = around[p]
        if len(ring) != 6:
            continue
        cents = np.array([pts[list(tris[t])].mean(axis=0) for t in ring])
        ang = np.arctan2(cents[:, 1] - pts[p, 1], cents[:, 0] - pts[p, 0])
        faces.append(tuple(ring[i] for i in np.argsort(ang)))
    used = sorted({t for fc in faces for t in fc})
    remap = {t: i for i, t in enumerate(used)}
    return Mesh(np.array(verts)[used], [tuple(remap[t] for t in fc) for fc in faces])


def torus(R: float = 2.0, r: float = 1.0, nu: int = 12, nv: int = 12,
          phase: float = 0.25) -> Mesh:
    """Triangulated torus.

    Odd tube rings are rotated by half a step so that no two triangles of a
    (planar) trapezoid are coplanar.  ``phase`` shifts the tube samples by a
    fraction of a step so that no ring sits on a parabolic circle.
    """
    if not (R > r > 0) or nu < 3 or nv < 4 or nv % 2:
        raise BadParameters("need R > r > 0, nu >= 3 and an even nv >= 4")
    verts = []
    for j in range(nv):
        v = 2 * np.pi * (j + phase) / nv
        for i in range(nu):
            u = 2 * np.pi * (i + 0.5 * (j % 2)) / nu
            rho = R + r * np.cos(v)
            verts.append([rho * np.cos(u), rho * np.sin(u), r * np.sin(v)])
    faces = []
    for j in range(nv):
        for i in range(nu):
            a = j * nu + i
            b = j * nu + (i + 1) % nu
            c = ((j + 1) % nv) * nu + i
            d = ((j + 1) % nv) * nu + (i + 1) % nu
            if j % 2 == 0:
                faces.append((a, b, c))
                faces.append((b, d, c))
            else:
                faces.append((a, b, d))
                faces.append((a, d, c))
    return Mesh(verts, faces)


def convex_cap(n: int = 4) -> Mesh:
    """Triangulated cap on z = -(x^2 + y^2)."""
    return graph_mesh("cap", "c", n)


FIXTURES: Dict[str, Callable[..., Mesh]] = {
    "cube": cube,
    "cube_corner": cube_corner,
    "tetra_apex": tetra_apex,
    "saddle_star": saddle_star,
    "hex_saddle": hex_saddle,
    "monkey_star": monkey_star,
    "graph_mesh": graph_mesh,
    "hex_graph_mesh": hex_graph_mesh,
    "torus": torus,
    "convex_cap": convex_cap,
    "pseudo_digon_star": pseudo_digon_star,
    "pseudo_triangle_a_star": pseudo_triangle_a_star,
    "pseudo_triangle_b_star": pseudo_triangle_b_star,
    "antipodal_star": antipodal_star,
    "nonstar_pseudo_quad_star": nonstar_pseudo_quad_star,
}


def generate(spec: FixtureSpec) -> Mesh:
    """Build the fixture named by ``spec`` with its parameters."""
    try:
        fn = FIXTURES[spec.name]
    except KeyError:
        raise BadParameters(f"unknown fixture {spec.name!r}") from None
    try:
        return fn(**spec.params)
    except TypeError as exc:
        raise BadParameters(str(exc)) from None
    except PolysmoothError:
        raise
