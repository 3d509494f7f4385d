"""Small 2D polygon helpers shared by the spherical and face modules."""

from typing import Optional

import numpy as np
from scipy.optimize import linprog


def cross2(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def signed_area(poly: np.ndarray) -> float:
    """Shoelace area, positive for counter-clockwise cycles."""
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def centroid(poly: np.ndarray) -> np.ndarray:
    """Area centroid of a simple polygon (vertex mean if the area vanishes)."""
    x, y = poly[:, 0], poly[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    c = x * yn - xn * y
    a = 0.5 * c.sum()
    if abs(a) < 1e-300:
        return poly.mean(axis=0)
    return np.array([((x + xn) * c).sum(), ((y + yn) * c).sum()]) / (6.0 * a)


def interior_angles(poly: np.ndarray) -> np.ndarray:
    """Interior angles in (0, 2pi) of a counter-clockwise polygon."""
    nxt = np.roll(poly, -1, axis=0) - poly
    prv = np.roll(poly, 1, axis=0) - poly
    ang = np.arctan2(cross2(nxt, prv), np.einsum("ij,ij->i", nxt, prv))
    return np.mod(ang, 2.0 * np.pi)


def clip_halfplane(poly: np.ndarray, a: np.ndarray, d: np.ndarray) -> np.ndarray:
    """Keep the part of convex ``poly`` left of the directed line a + t*d."""
    if len(poly) == 0:
        return poly
    s = cross2(d, poly - a)
    out = []
    k = len(poly)
    for i in range(k):
        j = (i + 1) % k
        p, q = poly[i], poly[j]
        sp, sq = s[i], s[j]
        if sp >= 0:
            out.append(p)
        if (sp >= 0) != (sq >= 0):
            t = sp / (sp - sq)
            out.append(p + t * (q - p))
    if len(out) < 3:
        return np.zeros((0, 2))
    return np.array(out)


def kernel(poly: np.ndarray) -> np.ndarray:
    """Kernel of a simple counter-clockwise polygon as a convex polygon.

    Computed by clipping a bounding box against the left half-plane of
    every edge.  Returns an empty ``(0, 2)`` array when the kernel is empty
    or has no area.
    """
    lo, hi = poly.min(axis=0), poly.max(axis=0)
    pad = 1.0 + float(np.max(hi - lo))
    box = np.array(
        [[lo[0] - pad, lo[1] - pad], [hi[0] + pad, lo[1] - pad],
         [hi[0] + pad, hi[1] + pad], [lo[0] - pad, hi[1] + pad]]
    )
    k = len(poly)
    for i in range(k):
        a = poly[i]
        d = poly[(i + 1) % k] - a
        box = clip_halfplane(box, a, d)
        if len(box) == 0:
            break
    if len(box) == 0:
        return box
    scale = float(np.max(hi - lo)) ** 2
    if signed_area(box) <= 1e-14 * max(scale, 1e-300):
        return np.zeros((0, 2))
    return box


def point_in_polygon(p: np.ndarray, poly: np.ndarray) -> bool:
    """Crossing-number test; points on the boundary count as outside-ish."""
    x, y = float(p[0]), float(p[1])
    inside = False
    k = len(poly)
    for i in range(k):
        x1, y1 = poly[i]
        x2, y2 = poly[(i + 1) % k]
        if (y1 > y) != (y2 > y):
            xc = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if xc > x:
                inside = not inside
    return inside


def distance_to_boundary(p: np.ndarray, poly: np.ndarray) -> float:
    a = poly
    b = np.roll(poly, -1, axis=0)
    ab = b - a
    ll = np.einsum("ij,ij->i", ab, ab)
    t = np.clip(np.einsum("ij,ij->i", p - a, ab) / np.where(ll > 0, ll, 1.0), 0.0, 1.0)
    closest = a + t[:, None] * ab
    return float(np.min(np.linalg.norm(closest - p, axis=1)))


def segments_cross(p1, p2, q1, q2, tol: float = 0.0) -> bool:
    """Proper crossing of two closed segments (touching within tol ignored)."""
    d1 = cross2(p2 - p1, q1 - p1)
    d2 = cross2(p2 - p1, q2 - p1)
    d3 = cross2(q2 - q1, p1 - q1)
    d4 = cross2(q2 - q1, p2 - q1)
    return (d1 * d2 < -tol) and (d3 * d4 < -tol)


def segment_inside(a: np.ndarray, b: np.ndarray, poly: np.ndarray, samples: int = 33) -> bool:
    """True if the open segment ab lies in the interior of ``poly``."""
    diam = float(np.max(poly.max(axis=0) - poly.min(axis=0)))
    tol = 1e-12 * diam
    k = len(poly)
    for i in range(k):
        if segments_cross(a, b, poly[i], poly[(i + 1) % k], tol * diam):
            return False
    for t in np.linspace(0.0, 1.0, samples)[1:-1]:
        p = a + t * (b - a)
        if not point_in_polygon(p, poly) or distance_to_boundary(p, poly) <= tol:
            return False
    return True


def is_convex(poly: np.ndarray) -> bool:
    return bool(np.all(interior_angles(poly) < np.pi))


def in_convex_hull(p: np.ndarray, pts: np.ndarray, tol: float = 1e-12) -> bool:
    """Whether p is a convex combination of pts (closed hull, LP test)."""
    pts = np.asarray(pts, dtype=float)
    m = len(pts)
    if m == 0:
        return False
    a_eq = np.vstack([pts.T, np.ones((1, m))])
    b_eq = np.array([p[0], p[1], 1.0])
    # minimise the residual slack so that near-boundary points are decided by tol
    a_full = np.hstack([a_eq, np.eye(3), -np.eye(3)])
    c = np.concatenate([np.zeros(m), np.ones(6)])
    res = linprog(c, A_eq=a_full, b_eq=b_eq, bounds=[(0, None)] * (m + 6), method="highs")
    if res.status != 0:
        return False
    scale = max(1.0, float(np.max(np.abs(pts))))
    return bool(res.fun <= tol * scale)


def chebyshev_center(poly: np.ndarray) -> Optional[np.ndarray]:
    """Center of the largest disk inside the kernel of a CCW polygon."""
    k = len(poly)
    a_ub, b_ub = [], []
    for i in range(k):
        p, q = poly[i], poly[(i + 1) % k]
        d = q - p
        ln = np.linalg.norm(d)
        if ln == 0.0:
            continue
        nrm = np.array([-d[1], d[0]]) / ln  # inward normal
        # nrm.(x - p) >= r  ->  -nrm.x + r <= -nrm.p
        a_ub.append([-nrm[0], -nrm[1], 1.0])
        b_ub.append(-float(nrm @ p))
    res = linprog([0.0, 0.0, -1.0], A_ub=np.array(a_ub), b_ub=np.array(b_ub),
                  bounds=[(None, None), (None, None), (0, None)], method="highs")
    if res.status != 0 or res.x[2] <= 0:
        return None
    return np.array(res.x[:2])
