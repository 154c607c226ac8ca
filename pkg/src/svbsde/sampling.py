"""Seeded random bodies, variables and processes for the property suites."""
from __future__ import annotations

import numpy as np

from .convex import ConvexBody
from .integrals import ProcessFamily
from .setrv import SetProcess, SetRV
from .tree import VectorProcess


def random_interval(rng: np.random.Generator, point_prob: float = 0.05) -> ConvexBody:
    lo = rng.uniform(-3, 3)
    width = 0.0 if rng.random() < point_prob else rng.uniform(0.0, 3.0)
    return ConvexBody.interval(lo, lo + width)


def random_polygon(rng: np.random.Generator, degenerate_prob: float = 0.05) -> ConvexBody:
    u = rng.random()
    if u < degenerate_prob / 2:
        n = 1
    elif u < degenerate_prob:
        n = 2
    else:
        n = int(rng.integers(3, 9))
    centre = rng.uniform(-2, 2, size=2)
    return ConvexBody(centre + rng.uniform(0.2, 2.0) * rng.normal(size=(n, 2)))


def random_body(rng: np.random.Generator, dim: int | None = None) -> ConvexBody:
    """Interval or polygon; ``dim=None`` picks either with probability 1/2."""
    if dim is None:
        dim = 1 if rng.random() < 0.5 else 2
    return random_interval(rng) if dim == 1 else random_polygon(rng)


def random_dim(rng: np.random.Generator) -> int:
    return 1 if rng.random() < 0.5 else 2


def random_set_rv(rng: np.random.Generator, level: int, dim: int) -> SetRV:
    return SetRV(level, tuple(random_body(rng, dim) for _ in range(1 << level)))


def random_set_process(rng: np.random.Generator, n_levels: int, dim: int) -> SetProcess:
    return SetProcess(tuple(random_set_rv(rng, k, dim) for k in range(n_levels)))


def random_vector_process(rng: np.random.Generator, n_levels: int, dim: int, start: int = 0) -> VectorProcess:
    return VectorProcess(tuple(rng.normal(size=(1 << k, dim)) for k in range(start, n_levels)), start, dim)


def random_family(rng: np.random.Generator, n_levels: int, dim: int, max_members: int = 5) -> ProcessFamily:
    m = int(rng.integers(1, max_members + 1))
    return ProcessFamily(tuple(random_vector_process(rng, n_levels, dim) for _ in range(m)))


def rotate(body: ConvexBody, angle: float) -> ConvexBody:
    if body.dim != 2:
        raise ValueError("rotation needs a planar body")
    c, s = np.cos(angle), np.sin(angle)
    return ConvexBody(body.vertices @ np.array([[c, s], [-s, c]]))
