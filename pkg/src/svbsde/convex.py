"""Nonempty compact convex polytopes in R^d.

Bodies are stored as canonical vertex lists (V-representation). In one and
two dimensions every operation is exact up to floating point; for ``d >= 3``
the geometric difference falls back to a fixed direction grid and is an
outer approximation.

Canonical form
--------------
* ``d == 1``: ``[[lo], [hi]]`` or ``[[x]]`` when the interval is a point.
* ``d == 2``: extreme points in strict counterclockwise order, starting at
  the lexicographically smallest ``(x, y)`` vertex, no three collinear
  within ``tol``.
* ``d >= 3``: extreme points sorted lexicographically.
"""
from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

CANON_TOL = 1e-10
EXIST_REL_TOL = 1e-9
_CLIP_REL_TOL = 1e-12


class DimensionError(ValueError):
    """Raised when bodies of different dimension are combined."""


class ConvexBody:
    """A nonempty compact convex polytope given by its extreme points.

    Instances are immutable. Use :meth:`hull` (or the ``point`` /
    ``interval`` / ``box`` helpers) to build one from arbitrary points; the
    constructor itself canonicalizes too.
    """

    __slots__ = ("_v", "tol")

    def __init__(self, points, tol: float = CANON_TOL):
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1) if pts.size != 0 else pts.reshape(0, 1)
        if pts.ndim != 2 or pts.shape[0] == 0 or pts.shape[1] == 0:
            raise ValueError("a convex body needs at least one point with positive dimension")
        if not np.all(np.isfinite(pts)):
            raise ValueError("vertices must be finite")
        self._v = _canonical(pts, tol) + 0.0
        self._v.setflags(write=False)
        self.tol = tol

    @classmethod
    def _raw(cls, vertices: np.ndarray, tol: float = CANON_TOL) -> "ConvexBody":
        # caller guarantees canonical form
        obj = object.__new__(cls)
        vertices = np.ascontiguousarray(vertices, dtype=float) + 0.0  # no -0.0
        vertices.setflags(write=False)
        obj._v = vertices
        obj.tol = tol
        return obj

    # constructors -----------------------------------------------------
    @classmethod
    def hull(cls, points, tol: float = CANON_TOL) -> "ConvexBody":
        return cls(points, tol)

    @classmethod
    def point(cls, x) -> "ConvexBody":
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return cls._raw(x.reshape(1, -1))

    @classmethod
    def zero(cls, dim: int) -> "ConvexBody":
        return cls._raw(np.zeros((1, dim)))

    @classmethod
    def interval(cls, lo: float, hi: float) -> "ConvexBody":
        if hi < lo:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        return cls([[lo], [hi]])

    @classmethod
    def box(cls, center, half_widths) -> "ConvexBody":
        """Axis-aligned box in R^2 (or interval in R^1)."""
        c = np.atleast_1d(np.asarray(center, dtype=float))
        h = np.broadcast_to(np.asarray(half_widths, dtype=float), c.shape)
        if c.size == 1:
            return cls.interval(c[0] - h[0], c[0] + h[0])
        corners = np.array(np.meshgrid(*[[-1.0, 1.0]] * c.size)).reshape(c.size, -1).T
        return cls(c + corners * h)

    # basic accessors --------------------------------------------------
    @property
    def vertices(self) -> np.ndarray:
        return self._v

    @property
    def dim(self) -> int:
        return self._v.shape[1]

    @property
    def n_vertices(self) -> int:
        return self._v.shape[0]

    def is_singleton(self) -> bool:
        return self._v.shape[0] == 1

    def centroid(self) -> np.ndarray:
        return self._v.mean(axis=0)

    def affine_dim(self) -> int:
        if self._v.shape[0] == 1:
            return 0
        centered = self._v - self._v[0]
        return int(np.linalg.matrix_rank(centered, tol=self.tol * max(1.0, body_norm(self))))

    def interval_bounds(self) -> tuple[float, float]:
        if self.dim != 1:
            raise DimensionError("interval_bounds needs a 1-dimensional body")
        return float(self._v[0, 0]), float(self._v[-1, 0])

    # arithmetic sugar -------------------------------------------------
    def __add__(self, other):
        if isinstance(other, ConvexBody):
            return minkowski_sum(self, other)
        return translate(self, other)

    __radd__ = __add__

    def __rmul__(self, alpha):
        return scale(alpha, self)

    def __neg__(self):
        return scale(-1.0, self)

    def __eq__(self, other):
        if not isinstance(other, ConvexBody):
            return NotImplemented
        if self.dim != other.dim:
            return False
        return hausdorff_distance(self, other) <= max(self.tol, other.tol)

    __hash__ = None

    def __repr__(self):
        if self.dim == 1:
            lo, hi = self.interval_bounds()
            return f"ConvexBody([{lo:.6g}, {hi:.6g}])"
        return f"ConvexBody(dim={self.dim}, vertices={np.round(self._v, 6).tolist()})"

    # serialization ----------------------------------------------------
    def to_dict(self) -> dict:
        return {"dim": self.dim, "vertices": self._v.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "ConvexBody":
        verts = np.asarray(data["vertices"], dtype=float)
        dim = int(data.get("dim", verts.shape[-1]))
        verts = verts.reshape(-1, dim)
        return cls(verts)


# ----------------------------------------------------------------------
# canonicalization


def _nxt(a: np.ndarray) -> np.ndarray:
    # cyclic shift a[i] -> a[i + 1]; much cheaper than np.roll on tiny arrays
    return np.concatenate((a[1:], a[:1]))


def _prv(a: np.ndarray) -> np.ndarray:
    return np.concatenate((a[-1:], a[:-1]))


def _canonical(pts: np.ndarray, tol: float) -> np.ndarray:
    d = pts.shape[1]
    if d == 1:
        lo, hi = pts[:, 0].min(), pts[:, 0].max()
        if hi - lo <= tol:
            return np.array([[lo]])
        return np.array([[lo], [hi]])
    if d == 2:
        return _hull2d(pts, tol)
    return _hull_nd(pts, tol)


def _hull2d(pts: np.ndarray, tol: float) -> np.ndarray:
    """Andrew's monotone chain with a distance tolerance for collinearity."""
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    p = pts[order]
    keep = [p[0]]
    for q in p[1:]:
        if abs(q[0] - keep[-1][0]) > tol or abs(q[1] - keep[-1][1]) > tol:
            keep.append(q)
    if len(keep) == 1:
        return np.array([keep[0]])
    pl = [(float(a), float(b)) for a, b in keep]

    def chain(seq):
        out = []
        for q in seq:
            while len(out) >= 2:
                ox, oy = out[-2]
                ax, ay = out[-1]
                cr = (ax - ox) * (q[1] - oy) - (ay - oy) * (q[0] - ox)
                span = math.hypot(q[0] - ox, q[1] - oy)
                # drop out[-1] unless it is strictly left of the segment out[-2] -> q
                if cr <= tol * span:
                    out.pop()
                else:
                    break
            out.append(q)
        return out

    lower = chain(pl)
    upper = chain(reversed(pl))
    ring = lower[:-1] + upper[:-1]
    if len(ring) < 2:
        ring = [pl[0], pl[-1]]
    return np.array(ring)


def _hull_nd(pts: np.ndarray, tol: float) -> np.ndarray:
    from scipy.spatial import ConvexHull, QhullError

    order = np.lexsort(pts.T[::-1])
    p = pts[order]
    diff = np.abs(np.diff(p, axis=0)).max(axis=1) > tol
    p = p[np.concatenate(([True], diff))]
    if p.shape[0] <= p.shape[1]:
        return p
    try:
        hull = ConvexHull(p)
        return p[np.sort(hull.vertices)]
    except QhullError:
        # lower-dimensional point cloud; keep all points (still a valid V-rep)
        return p


def _clean_ccw(v: np.ndarray, tol: float) -> np.ndarray:
    """Canonicalize an already counterclockwise cyclic vertex list (d == 2)."""
    if v.shape[0] > 1:
        nxt = _nxt(v)
        keep = np.abs(nxt - v).max(axis=1) > tol
        if not keep.any():
            return v[:1].copy()
        v = v[keep]
    while v.shape[0] > 2:
        prev = _prv(v)
        nxt = _nxt(v)
        e1 = v - prev
        e2 = nxt - v
        cr = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
        dot = (e1 * e2).sum(axis=1)
        span = np.hypot(*(nxt - prev).T)
        straight = (np.abs(cr) <= tol * np.maximum(span, tol)) & (dot > 0)
        if not straight.any():
            break
        # remove one at a time from each run so a gently curving chain is not flattened
        idx = np.flatnonzero(straight)
        drop = idx[np.concatenate(([True], np.diff(idx) > 1))]
        v = np.delete(v, drop, axis=0)
    if v.shape[0] == 2 and np.abs(v[0] - v[1]).max() <= tol:
        v = v[:1]
    start = np.lexsort((v[:, 1], v[:, 0]))[0]
    return np.concatenate((v[start:], v[:start])) if start else v


# ----------------------------------------------------------------------
# directions


def direction(v) -> np.ndarray:
    """Return ``v / |v|`` as a unit direction vector."""
    v = np.atleast_1d(np.asarray(v, dtype=float))
    n = np.linalg.norm(v)
    if n == 0.0 or not np.isfinite(n):
        raise ValueError("a direction must be a finite nonzero vector")
    return v / n


def direction_grid(dim: int, n: int = 720) -> np.ndarray:
    """Fixed grid of unit directions: ``n`` equiangular ones for d=2."""
    if dim == 1:
        return np.array([[1.0], [-1.0]])
    if dim == 2:
        th = 2.0 * np.pi * np.arange(n) / n
        return np.column_stack((np.cos(th), np.sin(th)))
    if dim == 3:
        # Fibonacci sphere
        k = np.arange(n) + 0.5
        phi = np.arccos(1.0 - 2.0 * k / n)
        th = np.pi * (1.0 + 5.0**0.5) * k
        return np.column_stack((np.cos(th) * np.sin(phi), np.sin(th) * np.sin(phi), np.cos(phi)))
    rng = np.random.default_rng(12345)
    g = rng.standard_normal((n, dim))
    g = np.vstack((g, np.eye(dim), -np.eye(dim)))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def facet_normals(a: ConvexBody) -> np.ndarray:
    """Outward unit normals that cut ``a`` out exactly as a halfspace intersection.

    For full-dimensional polygons these are the edge normals. Segments get
    the two normals of the supporting line plus the two endpoint directions;
    a point gets the four axis directions. Only defined for ``d <= 2``.
    """
    v = a.vertices
    if a.dim == 1:
        return np.array([[1.0], [-1.0]])
    if a.dim != 2:
        raise DimensionError("facet normals are only enumerated for d <= 2")
    if v.shape[0] == 1:
        return np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
    if v.shape[0] == 2:
        u = direction(v[1] - v[0])
        perp = np.array([u[1], -u[0]])
        return np.array([perp, -perp, u, -u])
    e = _nxt(v) - v
    n = np.column_stack((e[:, 1], -e[:, 0]))
    return n / np.linalg.norm(n, axis=1, keepdims=True)


# ----------------------------------------------------------------------
# core operations


def _check_dims(a: ConvexBody, b: ConvexBody) -> None:
    if a.dim != b.dim:
        raise DimensionError(f"dimension mismatch: {a.dim} vs {b.dim}")


def support(a: ConvexBody, w) -> float | np.ndarray:
    """Support function ``max_{x in a} <w, x>``.

    ``w`` may be a single vector or an ``(n, d)`` stack of directions, in
    which case an array of ``n`` values is returned.
    """
    w = np.asarray(w, dtype=float)
    if w.ndim <= 1:
        w = np.atleast_1d(w)
        if w.shape[0] != a.dim:
            raise DimensionError("direction has wrong dimension")
        return float(np.max(a.vertices @ w))
    return np.max(w @ a.vertices.T, axis=1)


def translate(a: ConvexBody, x) -> ConvexBody:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != (a.dim,):
        raise DimensionError("translation vector has wrong dimension")
    v = a.vertices + x
    if a.dim == 2 and v.shape[0] > 1:
        return ConvexBody._raw(_clean_ccw(v, a.tol), a.tol)
    if a.dim == 1:
        return ConvexBody._raw(v, a.tol)
    return ConvexBody(v, a.tol)


def scale(alpha: float, a: ConvexBody) -> ConvexBody:
    """Scalar multiple ``alpha * a``; negative ``alpha`` reflects through 0."""
    alpha = float(alpha)
    v = alpha * a.vertices
    if a.dim == 1:
        return ConvexBody._raw(_canonical(v, a.tol), a.tol)
    if a.dim == 2:
        # a planar homothety with alpha < 0 is a rotation by pi: orientation is kept
        return ConvexBody._raw(_clean_ccw(v, a.tol), a.tol)
    return ConvexBody(v, a.tol)


def _edge_angles(v: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Edges, their angles in ``(-pi/2, 3pi/2]`` and the tail of the smallest-angle edge.

    The tail is the vertex the merge must start from. It coincides with the
    lexicographic minimum except when rounding tilts a vertical edge, so it
    is located from the angles instead of assumed to be ``v[0]``.
    """
    if v.shape[0] == 1:
        return np.zeros((0, 2)), np.zeros(0), v[0]
    e = _nxt(v) - v
    th = np.arctan2(e[:, 1], e[:, 0])
    th = np.where(th <= -np.pi / 2, th + 2 * np.pi, th)
    return e, th, v[int(np.argmin(th))]


def minkowski_sum(a: ConvexBody, b: ConvexBody) -> ConvexBody:
    """``a + b = {x + y : x in a, y in b}``."""
    _check_dims(a, b)
    tol = max(a.tol, b.tol)
    if a.dim == 1:
        va, vb = a.vertices[:, 0], b.vertices[:, 0]
        return ConvexBody._raw(_canonical(np.array([[va[0] + vb[0]], [va[-1] + vb[-1]]]), tol), tol)
    if a.dim == 2:
        ea, ta, sa = _edge_angles(a.vertices)
        eb, tb, sb = _edge_angles(b.vertices)
        start = sa + sb
        if ea.shape[0] + eb.shape[0] == 0:
            return ConvexBody._raw(start.reshape(1, 2), tol)
        edges = np.vstack((ea, eb))
        order = np.argsort(np.concatenate((ta, tb)), kind="stable")
        pts = start + np.vstack((np.zeros((1, 2)), np.cumsum(edges[order], axis=0)[:-1]))
        return ConvexBody._raw(_clean_ccw(pts, tol), tol)
    sums = (a.vertices[:, None, :] + b.vertices[None, :, :]).reshape(-1, a.dim)
    return ConvexBody(sums, tol)


def body_norm(a: ConvexBody) -> float:
    """``||a|| = h(a, {0}) = max_{x in a} |x|``."""
    return float(np.max(np.linalg.norm(a.vertices, axis=1)))


def weighted_minkowski_average(bodies: Sequence[ConvexBody], weights) -> ConvexBody:
    """``sum_i w_i * bodies[i]`` for a probability vector ``w``."""
    w = np.asarray(weights, dtype=float)
    if len(bodies) == 0 or w.shape != (len(bodies),):
        raise ValueError("need one weight per body")
    if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
        raise ValueError("weights must be a probability vector")
    dim = bodies[0].dim
    if any(b.dim != dim for b in bodies):
        raise DimensionError("bodies have different dimensions")
    out = scale(w[0], bodies[0])
    for wi, b in zip(w[1:], bodies[1:]):
        out = minkowski_sum(out, scale(wi, b))
    return out


def midpoint_average(a: ConvexBody, b: ConvexBody) -> ConvexBody:
    """``(a + b) / 2``: the one-step conditional expectation on a binary tree."""
    return scale(0.5, minkowski_sum(a, b))


# ----------------------------------------------------------------------
# distances


def _dist_points_polygon(p: np.ndarray, v: np.ndarray, tol: float) -> np.ndarray:
    """Exact Euclidean distance from each row of ``p`` to ``conv(v)`` (planar)."""
    if v.shape[0] == 1:
        return np.linalg.norm(p - v[0], axis=1)
    start = v
    e = _nxt(v) - v
    if v.shape[0] == 2:
        start, e = v[:1], e[:1]
    rel = p[:, None, :] - start[None, :, :]
    ee = (e * e).sum(axis=1)
    t = np.clip((rel * e[None]).sum(axis=2) / ee[None], 0.0, 1.0)
    diff = rel - t[..., None] * e[None]
    d = np.sqrt((diff * diff).sum(axis=2)).min(axis=1)
    if v.shape[0] >= 3:
        cr = e[None, :, 0] * rel[..., 1] - e[None, :, 1] * rel[..., 0]
        inside = np.all(cr >= -tol * np.sqrt(ee)[None], axis=1)
        d = np.where(inside, 0.0, d)
    return d


def min_norm_point(points: np.ndarray, tol: float = 1e-14, max_iter: int = 500) -> np.ndarray:
    """Closest point of ``conv(points)`` to the origin (Wolfe's algorithm).

    Finite active-set method in the Gilbert family; terminates when the
    stationarity gap ``|x|^2 - min_j <x, p_j>`` is below ``tol * scale``.
    """
    p = np.asarray(points, dtype=float)
    scale2 = max(1.0, float(np.max((p * p).sum(axis=1))))
    i0 = int(np.argmin((p * p).sum(axis=1)))
    S = [i0]
    lam = np.array([1.0])
    x = p[i0].copy()
    for _ in range(max_iter):
        j = int(np.argmin(p @ x))
        if x @ x - p[j] @ x <= tol * scale2 or j in S:
            return x
        S.append(j)
        lam = np.append(lam, 0.0)
        for _ in range(max_iter):
            q = p[S]
            n = len(S)
            kkt = np.zeros((n + 1, n + 1))
            kkt[:n, :n] = q @ q.T
            kkt[:n, n] = 1.0
            kkt[n, :n] = 1.0
            rhs = np.zeros(n + 1)
            rhs[n] = 1.0
            mu = np.linalg.lstsq(kkt, rhs, rcond=None)[0][:n]
            if np.all(mu > 1e-15):
                lam = mu
                break
            neg = mu <= 1e-15
            ratios = lam[neg] / np.maximum(lam[neg] - mu[neg], 1e-300)
            theta = float(np.min(ratios)) if ratios.size else 0.0
            lam = lam + theta * (mu - lam)
            keep = lam > 1e-15
            if not keep.any():
                keep[np.argmax(lam)] = True
            S = [s for s, k in zip(S, keep) if k]
            lam = lam[keep] / lam[keep].sum()
        x = lam @ p[S]
    return x


def point_distance(x, a: ConvexBody) -> float:
    """Distance from the point ``x`` to the body ``a``."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if a.dim == 1:
        lo, hi = a.vertices[0, 0], a.vertices[-1, 0]
        return float(max(lo - x[0], x[0] - hi, 0.0))
    if a.dim == 2:
        return float(_dist_points_polygon(x.reshape(1, 2), a.vertices, a.tol)[0])
    return float(np.linalg.norm(min_norm_point(a.vertices - x)))


def directed_hausdorff(a: ConvexBody, b: ConvexBody) -> float:
    """Excess ``sup_{x in a} d(x, b)``; zero iff ``a`` is contained in ``b``.

    ``d(., b)`` is convex, so the supremum is attained at a vertex of ``a``.
    """
    _check_dims(a, b)
    if a.dim == 1:
        (alo, ahi), (blo, bhi) = a.interval_bounds(), b.interval_bounds()
        return max(blo - alo, ahi - bhi, 0.0)
    if a.dim == 2:
        return float(_dist_points_polygon(a.vertices, b.vertices, max(a.tol, b.tol)).max())
    return max(float(np.linalg.norm(min_norm_point(b.vertices - x))) for x in a.vertices)


def hausdorff_distance(a: ConvexBody, b: ConvexBody) -> float:
    """Hausdorff distance ``max(excess(a, b), excess(b, a))``."""
    _check_dims(a, b)
    if a.dim == 1:
        (alo, ahi), (blo, bhi) = a.interval_bounds(), b.interval_bounds()
        return max(abs(alo - blo), abs(ahi - bhi))
    return max(directed_hausdorff(a, b), directed_hausdorff(b, a))


def contains(outer: ConvexBody, inner: ConvexBody, slack: float = 0.0) -> bool:
    return directed_hausdorff(inner, outer) <= slack


# ----------------------------------------------------------------------
# differences


def clip_halfplanes(poly: np.ndarray, normals: np.ndarray, offsets: np.ndarray, tol: float):
    """Clip a convex planar polygon by ``<n_i, x> <= c_i``; ``None`` if empty.

    ``poly`` is a cyclic vertex list (possibly a segment or a point). The
    result is not canonicalized.
    """
    v = poly
    # clipping only shrinks v, so constraints it already meets can be skipped
    active = np.any(v @ normals.T - offsets > tol, axis=0)
    for n, c in zip(normals[active], offsets[active]):
        s = v @ n - c
        inside = s <= tol
        if inside.all():
            continue
        if not inside.any():
            return None
        s_next = _nxt(s)
        v_next = _nxt(v)
        cross = inside != _nxt(inside)
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(cross, s / (s - s_next), 0.0)
        inter = v + t[:, None] * (v_next - v)
        cand = np.stack((v, inter), axis=1)
        mask = np.stack((inside, cross), axis=1)
        v = cand[mask]
        if v.shape[0] == 0:
            return None
    return v


def geometric_difference(a: ConvexBody, b: ConvexBody) -> ConvexBody | None:
    """Erosion ``a -. b = {x : x + b subset of a}``; ``None`` when empty.

    Computed from the facet constraints ``<n_i, x> <= h_a(n_i) - h_b(n_i)``.
    """
    _check_dims(a, b)
    tol = max(a.tol, b.tol)
    if a.dim == 1:
        (alo, ahi), (blo, bhi) = a.interval_bounds(), b.interval_bounds()
        lo, hi = alo - blo, ahi - bhi
        if hi < lo - tol:
            return None
        if hi < lo:
            lo = hi = 0.5 * (lo + hi)
        return ConvexBody._raw(_canonical(np.array([[lo], [hi]]), tol), tol)
    if a.dim == 2:
        normals = facet_normals(a)
        offsets = support(a, normals) - support(b, normals)
        return _erode_planar(a, b, normals, offsets)
    return erosion_on_directions(a, b, direction_grid(a.dim, 2000))


def _erode_planar(a: ConvexBody, b: ConvexBody, normals: np.ndarray, offsets: np.ndarray):
    tol = max(a.tol, b.tol)
    clip_tol = _CLIP_REL_TOL * max(1.0, body_norm(a), body_norm(b))
    # every point of the erosion lies in a - b0 for any b0 in b
    start = a.vertices - b.vertices[0]
    v = clip_halfplanes(start, normals, offsets, clip_tol)
    if v is None:
        return None
    return ConvexBody(v, tol)


def erosion_on_directions(a: ConvexBody, b: ConvexBody, directions: np.ndarray) -> ConvexBody | None:
    """Erosion restricted to a direction set: ``{x : <w, x> <= h_a(w) - h_b(w), w in D}``.

    Equals the exact erosion when ``D`` contains the facet normals of ``a``;
    otherwise it is an outer approximation.
    """
    _check_dims(a, b)
    offsets = support(a, directions) - support(b, directions)
    if a.dim <= 2:
        if a.dim == 1:
            return geometric_difference(a, b)
        return _erode_planar(a, b, directions, offsets)
    return _erode_nd(a, b, directions, offsets)


def _erode_nd(a, b, directions, offsets):
    from scipy.optimize import linprog
    from scipy.spatial import HalfspaceIntersection, QhullError

    d = a.dim
    # Chebyshev centre gives an interior point for qhull
    norms = np.linalg.norm(directions, axis=1)
    res = linprog(
        np.r_[np.zeros(d), -1.0],
        A_ub=np.column_stack((directions, norms)),
        b_ub=offsets,
        bounds=[(None, None)] * d + [(0, None)],
        method="highs",
    )
    if res.status != 0:
        return None
    centre, radius = res.x[:d], res.x[d]
    if radius <= 1e-9:
        return ConvexBody.point(centre)
    try:
        hs = HalfspaceIntersection(np.column_stack((directions, -offsets)), centre)
    except QhullError:
        return ConvexBody.point(centre)
    return ConvexBody(hs.intersections, max(a.tol, b.tol))


def existence_threshold(a: ConvexBody) -> float:
    return EXIST_REL_TOL * max(1.0, body_norm(a))


def hukuhara_difference(a: ConvexBody, b: ConvexBody) -> ConvexBody | None:
    """Hukuhara difference: the unique ``c`` with ``a = b + c``, or ``None``.

    ``c`` is the erosion ``a -. b``; it is accepted only if ``c + b``
    reconstructs ``a`` within ``1e-9 * max(1, ||a||)``.
    """
    e = geometric_difference(a, b)
    if e is None:
        return None
    if hausdorff_distance(minkowski_sum(e, b), a) > existence_threshold(a):
        return None
    return e


def is_translate(a: ConvexBody, b: ConvexBody, tol: float | None = None) -> bool:
    """True if ``a = x + b`` for some vector ``x``."""
    _check_dims(a, b)
    tol = existence_threshold(a) if tol is None else tol
    shift = a.vertices[0] - b.vertices[0]
    return hausdorff_distance(a, translate(b, shift)) <= tol


def hull_of(points: Iterable, dim: int | None = None) -> ConvexBody:
    pts = np.asarray(list(points), dtype=float)
    if dim is not None:
        pts = pts.reshape(-1, dim)
    return ConvexBody(pts)
