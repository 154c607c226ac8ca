"""Independent reference computations used to validate the main code paths.

Nothing here calls the Minkowski-sum, erosion or Hausdorff routines of
:mod:`svbsde.convex`; hulls are the only shared primitive.
"""
from __future__ import annotations

import itertools
import math

import numpy as np

from .convex import ConvexBody, direction_grid, facet_normals
from .setrv import EnumerationCapExceeded, SetProcess, SetRV
from .tree import FiltrationTree

ORACLE_CAP = 10**6


# ----------------------------------------------------------------------
# scalar endpoint recursion for interval BSDEs


def interval_endpoints(
    steps: int,
    horizon: float,
    beta: float,
    g: tuple[float, float],
    lower: np.ndarray,
    upper: np.ndarray,
) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Endpoints of the fixed point of ``Y_k = dt (beta Y_k + G) + E[Y_{k+1}|F_k]``.

    For intervals and ``beta >= 0`` the lower endpoint solves
    ``l_k = dt (beta l_k + g1) + (l^up_{k+1} + l^down_{k+1}) / 2``, i.e.
    ``l_k = (dt g1 + mean(children)) / (1 - beta dt)``; likewise for ``u``.
    Returns per-level arrays ``lo[k], hi[k]`` of length ``2**k``.
    """
    dt = horizon / steps
    if beta < 0:
        raise ValueError("the endpoint recursion needs beta >= 0 (a negative beta swaps endpoints)")
    if beta * dt >= 1:
        raise ValueError("the implicit endpoint recursion needs beta * dt < 1")
    lo = [None] * (steps + 1)
    hi = [None] * (steps + 1)
    lo[steps] = np.asarray(lower, dtype=float)
    hi[steps] = np.asarray(upper, dtype=float)
    if lo[steps].shape != (1 << steps,) or hi[steps].shape != (1 << steps,):
        raise ValueError("terminal endpoints need one value per terminal atom")
    if np.any(hi[steps] < lo[steps]):
        raise ValueError("terminal lower endpoint exceeds upper endpoint")
    g1, g2 = g
    for k in range(steps - 1, -1, -1):
        lo[k] = (dt * g1 + 0.5 * (lo[k + 1][0::2] + lo[k + 1][1::2])) / (1.0 - beta * dt)
        hi[k] = (dt * g2 + 0.5 * (hi[k + 1][0::2] + hi[k + 1][1::2])) / (1.0 - beta * dt)
    return lo, hi


def walk_values(steps: int, horizon: float) -> np.ndarray:
    """Terminal walk ``B_T`` per atom, from the path bits (no tree object)."""
    sd = math.sqrt(horizon / steps)
    idx = np.arange(1 << steps)
    downs = np.array([bin(i).count("1") for i in idx])
    return (steps - 2 * downs) * sd


# ----------------------------------------------------------------------
# selection enumeration


def _check_cap(count: int, cap: int) -> None:
    if count > cap:
        raise EnumerationCapExceeded(f"brute-force enumeration needs {count} cases, cap is {cap}")


def enumeration_size_ito(psi: SetProcess, level: int) -> int:
    """Number of per-node vertex selections an Ito enumeration would visit."""
    total = 1
    for k in range(level):
        for b in psi[k].bodies:
            total *= b.n_vertices
            if total > 10**18:
                return total
    return total


def ito_by_enumeration(tree: FiltrationTree, psi: SetProcess, level: int, cap: int = ORACLE_CAP) -> SetRV:
    """Per-atom hull of ``int z dB`` over all vertex selections ``z`` of ``Psi``.

    Enumerates every assignment of a vertex of ``Psi(node)`` to every node
    on levels ``< level``, integrates path by path and takes per-atom hulls.
    """
    if level > tree.steps:
        raise ValueError("level beyond the tree")
    if level > 24:
        raise EnumerationCapExceeded(f"a depth-{level} enumeration is far beyond the cap {cap}")
    _check_cap(enumeration_size_ito(psi, level), cap)
    nodes = [(k, i) for k in range(level) for i in range(1 << k)]
    verts = [psi[k][i].vertices for k, i in nodes]
    pos = {n: j for j, n in enumerate(nodes)}
    sd = tree.sqrt_dt
    d = psi.dim
    atoms = 1 << level
    paths = []
    for a in range(atoms):
        steps = []
        for j in range(level):
            node = a >> (level - j)
            bit = (a >> (level - j - 1)) & 1
            steps.append((pos[(j, node)], sd if bit == 0 else -sd))
        paths.append(steps)
    values = [[] for _ in range(atoms)]
    if level == 0:
        return SetRV(0, (ConvexBody.zero(d),))
    for choice in itertools.product(*[range(v.shape[0]) for v in verts]):
        for a, steps in enumerate(paths):
            s = np.zeros(d)
            for p, inc in steps:
                s = s + inc * verts[p][choice[p]]
            values[a].append(s)
    return SetRV(level, tuple(ConvexBody(np.array(v)) for v in values))


def aumann_by_enumeration(x: SetRV, cap: int = ORACLE_CAP) -> ConvexBody:
    """Hull of ``E[f]`` over all vertex selections ``f`` of ``x``."""
    counts = [b.n_vertices for b in x.bodies]
    _check_cap(math.prod(counts), cap)
    verts = [b.vertices for b in x.bodies]
    means = [np.mean(np.array(c), axis=0) for c in itertools.product(*verts)]
    return ConvexBody(np.array(means))


# ----------------------------------------------------------------------
# direction-grid geometry


def oracle_directions(a: ConvexBody, b: ConvexBody, n: int = 720) -> np.ndarray:
    """Uniform grid plus the facet normals of both bodies."""
    if a.dim == 1:
        return np.array([[1.0], [-1.0]])
    return np.vstack((direction_grid(2, n), facet_normals(a), facet_normals(b)))


def _support_values(v: np.ndarray, w: np.ndarray) -> np.ndarray:
    return (w @ v.T).max(axis=1)


def grid_erosion(a: ConvexBody, b: ConvexBody, directions: np.ndarray) -> np.ndarray | None:
    """Vertices of ``{x : <w, x> <= h_a(w) - h_b(w), w in directions}``.

    Cutting-plane loop: start from ``a - b_0`` and repeatedly cut with the
    most violated constraint. Returns ``None`` when the set is empty.
    """
    off = _support_values(a.vertices, directions) - _support_values(b.vertices, directions)
    scale = max(1.0, float(np.abs(a.vertices).max()), float(np.abs(b.vertices).max()))
    tol = 1e-12 * scale
    if a.dim == 1:
        lo, hi = -off[1], off[0]
        if hi < lo - tol:
            return None
        return np.array([[lo], [max(lo, hi)]])
    poly = a.vertices - b.vertices[0]
    for _ in range(4 * len(directions)):
        viol = poly @ directions.T - off  # (verts, dirs)
        worst = viol.max(axis=0)
        j = int(np.argmax(worst))
        if worst[j] <= tol:
            return poly
        s = viol[:, j]
        inside = s <= tol
        if not inside.any():
            return None
        out = []
        m = len(poly)
        for i in range(m):
            p, q = poly[i], poly[(i + 1) % m]
            sp, sq = s[i], s[(i + 1) % m]
            if sp <= tol:
                out.append(p)
            if (sp <= tol) != (sq <= tol):
                out.append(p + (sp / (sp - sq)) * (q - p))
        poly = np.array(out)
    return poly


def support_hausdorff(pv: np.ndarray, qv: np.ndarray, directions: np.ndarray) -> float:
    """``max_w |h_P(w) - h_Q(w)|`` over the direction set."""
    return float(np.abs(_support_values(pv, directions) - _support_values(qv, directions)).max())


def existence_by_grid(a: ConvexBody, b: ConvexBody, n: int = 720) -> tuple[bool, float]:
    """Hukuhara existence verdict from the direction-grid erosion.

    Returns ``(exists, gap)`` with ``gap = max_w |h_E(w) + h_b(w) - h_a(w)|``;
    ``exists`` iff ``gap <= 1e-9 max(1, ||a||)``.
    """
    dirs = oracle_directions(a, b, n)
    e = grid_erosion(a, b, dirs)
    if e is None:
        return False, float("inf")
    sum_support = _support_values(e, dirs) + _support_values(b.vertices, dirs)
    gap = float(np.abs(sum_support - _support_values(a.vertices, dirs)).max())
    eps = 1e-9 * max(1.0, float(np.linalg.norm(a.vertices, axis=1).max()))
    return gap <= eps, gap


def hausdorff_by_grid(a: ConvexBody, b: ConvexBody, n: int = 720) -> float:
    return support_hausdorff(a.vertices, b.vertices, oracle_directions(a, b, n))
