"""Chordal geometry on the unit sphere.

Boundary points of hyperbolic 3-space live on S^2 subset R^3 via inverse
stereographic projection of C u {inf}; all distances below are chordal
(Euclidean in R^3). `None` is the point at infinity throughout.
"""

from __future__ import annotations

import math

import numpy as np

INF = None  # sentinel for the boundary point at infinity


def to_sphere(z) -> np.ndarray:
    """Inverse stereographic projection C u {inf} -> S^2; inf -> north pole."""
    if z is INF:
        return np.array([0.0, 0.0, 1.0])
    x, y = z.real, z.imag
    n = x * x + y * y
    return np.array([2 * x, 2 * y, n - 1.0]) / (n + 1.0)


def from_sphere(p) -> complex:
    """Stereographic chart S^2 -> C u {inf} (returns INF at the north pole)."""
    if p[2] >= 1.0 - 1e-15:
        return INF
    return complex(p[0], p[1]) / (1.0 - p[2])


def chordal(z, w) -> float:
    """Chordal distance between extended complex numbers (range [0, 2])."""
    if z is INF and w is INF:
        return 0.0
    if z is INF:
        z, w = w, z
    if w is INF:
        return 2.0 / math.sqrt(1.0 + abs(z) ** 2)
    return 2.0 * abs(z - w) / math.sqrt((1.0 + abs(z) ** 2) * (1.0 + abs(w) ** 2))


def unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def frame_at(p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic orthonormal tangent frame at a unit vector."""
    ref = np.array([0.0, 0.0, 1.0])
    if abs(np.dot(p, ref)) > 0.9:
        ref = np.array([1.0, 0.0, 0.0])
    e1 = unit(np.cross(p, ref))
    e2 = np.cross(p, e1)
    return e1, e2


def chordal_circle(center: np.ndarray, radius: float, n: int) -> np.ndarray:
    """Closed sample loop (n+1 points, first == last) at chordal distance `radius` from `center`."""
    if not 0 < radius < 2:
        raise ValueError("chordal radius must lie in (0, 2)")
    theta = 2.0 * math.asin(radius / 2.0)
    e1, e2 = frame_at(center)
    phi = np.linspace(0.0, 2.0 * math.pi, n + 1)
    pts = (
        math.cos(theta) * center[None, :]
        + math.sin(theta) * (np.cos(phi)[:, None] * e1[None, :] + np.sin(phi)[:, None] * e2[None, :])
    )
    pts[-1] = pts[0]
    return pts


def slerp(a: np.ndarray, b: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Great-circle interpolation between unit vectors a, b at parameters t in [0,1]."""
    dot = float(np.clip(np.dot(a, b), -1.0, 1.0))
    ang = math.acos(dot)
    if ang < 1e-14:
        return a[None, :] + np.outer(t, b - a)
    s = math.sin(ang)
    t = np.asarray(t, dtype=float)
    return (np.sin((1.0 - t) * ang)[:, None] * a[None, :] + np.sin(t * ang)[:, None] * b[None, :]) / s


def resample_polyline(points: np.ndarray, max_gap: float) -> np.ndarray:
    """Subdivide segments along great circles until every chordal gap <= max_gap."""
    out = [points[0]]
    for i in range(len(points) - 1):
        a, b = points[i], points[i + 1]
        gap = np.linalg.norm(b - a)
        if gap > max_gap:
            k = int(math.ceil(gap / max_gap))
            ts = np.arange(1, k + 1) / k
            seg = slerp(unit(a), unit(b), ts)
            out.extend(seg)
        else:
            out.append(b)
    return np.asarray(out)


def refine_near(points: np.ndarray, centers: np.ndarray, radius: float, max_gap: float) -> np.ndarray:
    """Resample only the segments that pass within `radius` of any center.

    Keeps arcs adaptively sampled: dense where detours happen, sparse elsewhere.
    """
    if len(centers) == 0:
        return points
    from scipy.spatial import cKDTree

    tree = cKDTree(centers)
    d = tree.query(points)[0]
    out = [points[0]]
    for i in range(len(points) - 1):
        a, b = points[i], points[i + 1]
        gap = np.linalg.norm(b - a)
        near = min(d[i], d[i + 1]) <= radius + gap
        if near and gap > max_gap:
            k = int(math.ceil(gap / max_gap))
            ts = np.arange(1, k + 1) / k
            out.extend(slerp(unit(a), unit(b), ts))
        else:
            out.append(b)
    return np.asarray(out)


def polyline_gaps(points: np.ndarray) -> np.ndarray:
    return np.linalg.norm(np.diff(points, axis=0), axis=1)


def rotation_to_north(p: np.ndarray) -> np.ndarray:
    """Rotation matrix taking unit vector p to (0,0,1)."""
    north = np.array([0.0, 0.0, 1.0])
    c = float(np.clip(np.dot(p, north), -1.0, 1.0))
    if c > 1.0 - 1e-14:
        return np.eye(3)
    if c < -1.0 + 1e-14:
        return np.diag([1.0, -1.0, -1.0])
    axis = unit(np.cross(p, north))
    s = math.sqrt(1.0 - c * c)
    K = np.array([[0, -axis[2], axis[1]], [axis[2], 0, -axis[0]], [-axis[1], axis[0], 0]])
    return np.eye(3) + s * K + (1.0 - c) * (K @ K)


def winding_angle(loop: np.ndarray, p: np.ndarray) -> float:
    """Total signed angle swept by a closed loop about p, via stereographic
    projection from the antipode of p. The loop must avoid p and its antipode."""
    R = rotation_to_north(p)
    q = loop @ R.T
    denom = 1.0 + q[:, 2]
    if np.any(denom < 1e-9):
        raise ValueError("loop passes through the antipode of the winding center")
    w = (q[:, 0] + 1j * q[:, 1]) / denom
    if np.any(np.abs(w) < 1e-12):
        raise ValueError("loop passes through the winding center")
    return float(np.sum(np.angle(w[1:] / w[:-1])))


def winding_number(loop: np.ndarray, p: np.ndarray, tol: float = 1e-6) -> int:
    total = winding_angle(loop, p)
    n = round(total / (2.0 * math.pi))
    if abs(total - 2.0 * math.pi * n) >= tol:
        raise ValueError(f"angle sum {total} is not within {tol} of a multiple of 2*pi")
    return int(n)


def fibonacci_sphere(n: int) -> np.ndarray:
    """Deterministic quasi-uniform grid of n points on S^2."""
    i = np.arange(n, dtype=float)
    phi = math.pi * (3.0 - math.sqrt(5.0)) * i
    z = 1.0 - 2.0 * (i + 0.5) / n
    r = np.sqrt(1.0 - z * z)
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)


def segment_segment_distance(p1, p2, q1, q2) -> float:
    """Minimum Euclidean distance between 3D segments [p1,p2] and [q1,q2]."""
    u = p2 - p1
    v = q2 - q1
    w = p1 - q1
    a, b, c = np.dot(u, u), np.dot(u, v), np.dot(v, v)
    d, e = np.dot(u, w), np.dot(v, w)
    denom = a * c - b * b
    if denom > 1e-16:
        s = (b * e - c * d) / denom
        t = (a * e - b * d) / denom
    else:
        s, t = 0.0, e / c if c > 1e-16 else 0.0
    s = min(1.0, max(0.0, s))
    t = min(1.0, max(0.0, t))
    # clamped solution may be off the true minimum; refine each against the other
    best = np.linalg.norm((p1 + s * u) - (q1 + t * v))
    for ss in (0.0, 1.0):
        pt = p1 + ss * u
        tt = np.clip(np.dot(pt - q1, v) / c if c > 1e-16 else 0.0, 0.0, 1.0)
        best = min(best, np.linalg.norm(pt - (q1 + tt * v)))
    for tt in (0.0, 1.0):
        qt = q1 + tt * v
        ss = np.clip(np.dot(qt - p1, u) / a if a > 1e-16 else 0.0, 0.0, 1.0)
        best = min(best, np.linalg.norm(qt - (p1 + ss * u)))
    return float(best)


def polyline_min_distance(A: np.ndarray, B: np.ndarray, cutoff: float = math.inf) -> tuple[float, int, int]:
    """Minimum distance between two sampled polylines, with the realizing segment pair.

    Prunes with a KD-tree on B's vertices; exact for the sampled geometry.
    """
    from scipy.spatial import cKDTree

    gaps_a = polyline_gaps(A)
    gaps_b = polyline_gaps(B)
    pad = (gaps_a.max(initial=0.0) + gaps_b.max(initial=0.0)) / 2.0 + 1e-12
    tree = cKDTree(B)
    d0, j0 = tree.query(A)
    best = math.inf
    bi = bj = 0
    order = np.argsort(d0)
    for i in order:
        if d0[i] - pad >= min(best, cutoff):
            break
        js = tree.query_ball_point(A[i], min(best, cutoff) + pad)
        for j in js:
            for si in (max(i - 1, 0), min(i, len(A) - 2)):
                for sj in (max(j - 1, 0), min(j, len(B) - 2)):
                    dd = segment_segment_distance(A[si], A[si + 1], B[sj], B[sj + 1])
                    if dd < best:
                        best, bi, bj = dd, si, sj
    if best is math.inf:
        best = float(d0.min())
        bi, bj = int(np.argmin(d0)), int(j0[np.argmin(d0)])
    return float(best), bi, bj
