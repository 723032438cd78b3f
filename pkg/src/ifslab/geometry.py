"""Metric substrate: operator norms, convex hulls and Hausdorff distances.

Exact rational inputs (``fractions.Fraction``) are carried through wherever
the result is rational: 1D intervals, 2D hull construction and orientation
tests. Anything involving a square root falls back to float64.
"""

from dataclasses import dataclass
from fractions import Fraction
import math

import numpy as np
from scipy.spatial import cKDTree

from .config import ORTHO_TOL
from .errors import DimensionError, DomainError, UnsupportedError


def is_exact(x):
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


def as_matrix(M):
    M = np.asarray(M)
    if M.ndim != 2:
        raise DimensionError(f"expected a 2D matrix, got shape {M.shape}")
    return M


def operator_norm(M):
    """Largest singular value of a square matrix (spectral norm)."""
    M = as_matrix(M)
    if M.shape[0] != M.shape[1]:
        raise DimensionError(f"operator_norm needs a square matrix, got {M.shape}")
    A = M.astype(float)
    if not np.all(np.isfinite(A)):
        raise DomainError("matrix has non-finite entries")
    if A.shape == (1, 1):
        return abs(float(A[0, 0]))
    if A.shape == (2, 2):
        return float(opnorm_2x2(A[None])[0])
    return float(np.linalg.norm(A, 2))


def opnorm_2x2(D):
    """Spectral norms of a stack of 2x2 matrices, shape ``(K, 2, 2)``.

    ``sigma_max = (|(a + d, c - b)| + |(a - d, b + c)|) / 2``; unlike the
    eigenvalue formula this has no cancellation when the singular values
    are close.
    """
    a, b, c, d = D[:, 0, 0], D[:, 0, 1], D[:, 1, 0], D[:, 1, 1]
    return (np.hypot(a + d, c - b) + np.hypot(a - d, b + c)) / 2


def check_orthogonal(M, tol=ORTHO_TOL):
    """Return ``M`` as an array after checking ``M^T M = I`` within ``tol``."""
    M = as_matrix(M)
    if M.shape[0] != M.shape[1]:
        raise DimensionError(f"orthogonal matrix must be square, got {M.shape}")
    A = M.astype(float)
    err = np.max(np.abs(A.T @ A - np.eye(A.shape[0])))
    if err > tol:
        raise DomainError(f"matrix is not orthogonal (max |M^T M - I| = {err:.3g})")
    return M


def block_diag(A, B):
    """Block-diagonal matrix ``[[A, 0], [0, B]]``; keeps exact entries exact."""
    A = as_matrix(A)
    B = as_matrix(B)
    k, m = A.shape[0], B.shape[0]
    exact = A.dtype == object or B.dtype == object
    out = np.zeros((k + m, k + m), dtype=object if exact else float)
    if exact:
        out[:, :] = 0
    out[:k, :k] = A
    out[k:, k:] = B
    return out


def rotation(theta):
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


# ---------------------------------------------------------------- point clouds


@dataclass(frozen=True)
class PointCloud:
    """Finite point set, optionally standing in for an ideal compact set.

    ``resolution`` bounds the Hausdorff distance to the set it approximates
    (0 for exact finite sets).
    """

    points: np.ndarray
    resolution: float = 0.0

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise DomainError("point cloud must be a nonempty (n, m) array")
        if not np.all(np.isfinite(pts)):
            raise DomainError("point cloud has non-finite coordinates")
        object.__setattr__(self, "points", pts)

    @property
    def dim(self):
        return self.points.shape[1]

    def __len__(self):
        return self.points.shape[0]


def _as_cloud(A):
    return A if isinstance(A, PointCloud) else PointCloud(np.asarray(A, dtype=float))


def _directed_hausdorff(X, Y):
    if X.shape[0] * Y.shape[0] <= 2_000_000:
        diff = X[:, None, :] - Y[None, :, :]
        return float(np.sqrt(np.max(np.min(np.sum(diff * diff, axis=2), axis=1))))
    dist, _ = cKDTree(Y).query(X, k=1)
    return float(np.max(dist))


def hausdorff_distance(A, B):
    """Hausdorff distance between two finite point sets (max of sup-inf's)."""
    A, B = _as_cloud(A), _as_cloud(B)
    if A.dim != B.dim:
        raise DimensionError(f"ambient dimensions differ: {A.dim} vs {B.dim}")
    return max(_directed_hausdorff(A.points, B.points),
               _directed_hausdorff(B.points, A.points))


# ------------------------------------------------------------------ polytopes


@dataclass(frozen=True)
class Polytope:
    """Convex polytope in R^1 or R^2 given by its vertices.

    In R^1 the vertices are ``((a,), (b,))`` with ``a <= b``; in R^2 they
    are listed counterclockwise (1 or 2 vertices for degenerate hulls).
    """

    vertices: tuple

    def __post_init__(self):
        verts = tuple(tuple(v) for v in self.vertices)
        if not verts:
            raise DomainError("polytope needs at least one vertex")
        m = len(verts[0])
        if any(len(v) != m for v in verts):
            raise DimensionError("vertices have inconsistent dimensions")
        if m == 1:
            lo = min(v[0] for v in verts)
            hi = max(v[0] for v in verts)
            verts = ((lo,), (hi,))
        object.__setattr__(self, "vertices", verts)

    @property
    def dim(self):
        return len(self.vertices[0])

    def array(self):
        return np.array(self.vertices, dtype=float)

    def diameter(self):
        V = self.vertices
        if self.dim == 1:
            return V[1][0] - V[0][0]
        X = self.array()
        diff = X[:, None, :] - X[None, :, :]
        return float(np.sqrt(np.max(np.sum(diff * diff, axis=2))))

    def max_norm(self):
        if self.dim == 1:
            return max(abs(self.vertices[0][0]), abs(self.vertices[1][0]))
        return float(np.max(np.linalg.norm(self.array(), axis=1)))

    def bounds(self):
        """Per-coordinate (min, max) pairs."""
        return [(min(v[i] for v in self.vertices), max(v[i] for v in self.vertices))
                for i in range(self.dim)]


def interval(a, b):
    return Polytope(((a,), (b,)))


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _hull_2d(points):
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts
    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def convex_hull(P):
    """Convex hull of a point set in R^1 or R^2 as a :class:`Polytope`.

    Accepts a :class:`PointCloud` or any sequence of coordinate tuples
    (exact ``Fraction`` coordinates stay exact).
    """
    if isinstance(P, PointCloud):
        pts = [tuple(float(c) for c in row) for row in P.points]
    else:
        pts = [tuple(p) if np.ndim(p) else (p,) for p in P]
    if not pts:
        raise DomainError("cannot take the hull of an empty set")
    m = len(pts[0])
    if m == 1:
        return interval(min(p[0] for p in pts), max(p[0] for p in pts))
    if m != 2:
        raise UnsupportedError("exact convex hulls are only available for m <= 2")
    return Polytope(tuple(_hull_2d(pts)))


def polytope_map(P, scale_matrix, shift):
    """Image of ``P`` under ``x -> scale_matrix @ x + shift`` (2D kept ccw)."""
    A = np.asarray(scale_matrix, dtype=object)
    verts = []
    for v in P.vertices:
        verts.append(tuple(sum(A[i, j] * v[j] for j in range(len(v))) + shift[i]
                           for i in range(len(v))))
    if P.dim == 2 and len(verts) >= 3 and _cross(verts[0], verts[1], verts[2]) < 0:
        verts.reverse()
    return Polytope(tuple(verts))


def _point_segment_distance(p, a, b):
    ax, ay = float(a[0]), float(a[1])
    dx, dy = float(b[0]) - ax, float(b[1]) - ay
    px, py = float(p[0]) - ax, float(p[1]) - ay
    L = dx * dx + dy * dy
    t = 0.0 if L == 0 else min(1.0, max(0.0, (px * dx + py * dy) / L))
    return math.hypot(px - t * dx, py - t * dy)


def point_polytope_distance(p, P):
    """Euclidean distance from point ``p`` to the convex set ``P``."""
    V = P.vertices
    if P.dim == 1:
        x = p[0]
        lo, hi = V[0][0], V[1][0]
        return lo - x if x < lo else (x - hi if x > hi else 0 * x)
    if len(V) == 1:
        return math.hypot(float(p[0]) - float(V[0][0]), float(p[1]) - float(V[0][1]))
    if len(V) >= 3 and all(_cross(V[i], V[(i + 1) % len(V)], p) >= 0 for i in range(len(V))):
        return 0.0
    n = len(V) if len(V) >= 3 else 1
    return min(_point_segment_distance(p, V[i], V[(i + 1) % len(V)]) for i in range(n))


def polytope_hausdorff(P, Q):
    """Exact Hausdorff distance between two convex polytopes in R^1 or R^2.

    The distance to a convex set is a convex function, so both sup-inf terms
    are attained at vertices.
    """
    if P.dim != Q.dim:
        raise DimensionError(f"ambient dimensions differ: {P.dim} vs {Q.dim}")
    if P.dim == 1:
        (a,), (b,) = P.vertices
        (c,), (d,) = Q.vertices
        return max(abs(a - c), abs(b - d))
    if P.dim != 2:
        raise UnsupportedError("polytope_hausdorff supports m <= 2")
    return max(max(point_polytope_distance(v, Q) for v in P.vertices),
               max(point_polytope_distance(v, P) for v in Q.vertices))


def _separated_by_axes(P, Q, gap):
    """SAT: True if some edge normal of P or Q separates them by more than ``gap``."""
    for A in (P.vertices, Q.vertices):
        n = len(A)
        for i in range(n if n >= 3 else 1):
            a, b = A[i], A[(i + 1) % n]
            axes = [(b[1] - a[1], a[0] - b[0])]
            if n == 2:
                axes.append((b[0] - a[0], b[1] - a[1]))
            for ax in axes:
                if ax == (0, 0):
                    continue
                pp = [ax[0] * v[0] + ax[1] * v[1] for v in P.vertices]
                qq = [ax[0] * v[0] + ax[1] * v[1] for v in Q.vertices]
                scale = 1 if gap == 0 else math.hypot(float(ax[0]), float(ax[1]))
                if min(qq) - max(pp) > gap * scale or min(pp) - max(qq) > gap * scale:
                    return True
    return False


def polytopes_disjoint(P, Q, gap=0):
    """True if the closed polytopes are separated by a positive gap.

    ``gap=0`` demands strict positivity (exact arithmetic); in float mode
    pass the absolute tolerance.
    """
    if P.dim != Q.dim:
        raise DimensionError(f"ambient dimensions differ: {P.dim} vs {Q.dim}")
    if P.dim == 1:
        (a,), (b,) = P.vertices
        (c,), (d,) = Q.vertices
        return max(a, c) - min(b, d) > gap
    if len(P.vertices) == 1 and len(Q.vertices) == 1:
        return math.dist(map(float, P.vertices[0]), map(float, Q.vertices[0])) > gap
    if len(P.vertices) == 1 or len(Q.vertices) == 1:
        pt, poly = (P, Q) if len(P.vertices) == 1 else (Q, P)
        return point_polytope_distance(pt.vertices[0], poly) > gap
    return _separated_by_axes(P, Q, gap)


# ------------------------------------------------------- batched float kernels


def interval_hausdorff_batch(lo1, hi1, lo2, hi2):
    return np.maximum(np.abs(lo1 - lo2), np.abs(hi1 - hi2))


def _points_to_polygons(P, Q):
    """Distances from every vertex of P[b] to polygon Q[b]; shapes (B, k, 2)."""
    B, k, _ = Q.shape
    E0 = Q
    E1 = np.roll(Q, -1, axis=1)
    d = E1 - E0                                    # (B, k, 2)
    rel = P[:, :, None, :] - E0[:, None, :, :]     # (B, kp, k, 2)
    L = np.sum(d * d, axis=2)                      # (B, k)
    with np.errstate(invalid="ignore", divide="ignore"):
        t = np.sum(rel * d[:, None, :, :], axis=3) / L[:, None, :]
    t = np.where(L[:, None, :] > 0, np.clip(t, 0.0, 1.0), 0.0)
    proj = rel - t[..., None] * d[:, None, :, :]
    seg = np.sqrt(np.sum(proj * proj, axis=3))     # (B, kp, k)
    cross = d[:, None, :, 0] * rel[..., 1] - d[:, None, :, 1] * rel[..., 0]
    if k >= 3:
        inside = np.all(cross >= 0, axis=2) | np.all(cross <= 0, axis=2)
    else:
        inside = np.zeros(seg.shape[:2], dtype=bool)
    return np.where(inside, 0.0, np.min(seg, axis=2))


def polygon_hausdorff_batch(P, Q):
    """Hausdorff distances between polygon pairs P[b], Q[b] (float arrays)."""
    return np.maximum(np.max(_points_to_polygons(P, Q), axis=1),
                      np.max(_points_to_polygons(Q, P), axis=1))
