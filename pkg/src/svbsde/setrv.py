"""Set-valued random variables and processes on a binary tree."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .convex import (
    ConvexBody,
    body_norm,
    hausdorff_distance,
    hukuhara_difference,
    midpoint_average,
    minkowski_sum,
    scale,
    weighted_minkowski_average,
)
from .tree import FiltrationTree, VectorRV

ENUMERATION_CAP = 10**6


class NotExists(ArithmeticError):
    """A Hukuhara difference required by an operation does not exist."""


class EnumerationCapExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class SetRV:
    """``F_{t_k}``-measurable random convex body: one body per level-``k`` node."""

    level: int
    bodies: tuple

    def __post_init__(self):
        bodies = tuple(self.bodies)
        if len(bodies) != 1 << self.level:
            raise ValueError(f"level {self.level} needs {1 << self.level} bodies, got {len(bodies)}")
        dims = {b.dim for b in bodies}
        if len(dims) != 1:
            raise ValueError("bodies of a SetRV must share one dimension")
        object.__setattr__(self, "bodies", bodies)

    @property
    def dim(self) -> int:
        return self.bodies[0].dim

    def __len__(self):
        return len(self.bodies)

    def __getitem__(self, i) -> ConvexBody:
        return self.bodies[i]

    def map(self, fn: Callable[[int, ConvexBody], ConvexBody]) -> "SetRV":
        return SetRV(self.level, tuple(fn(i, b) for i, b in enumerate(self.bodies)))

    def __add__(self, other: "SetRV") -> "SetRV":
        _same_level(self, other)
        return SetRV(self.level, tuple(minkowski_sum(a, b) for a, b in zip(self.bodies, other.bodies)))

    def scaled(self, alpha: float) -> "SetRV":
        return SetRV(self.level, tuple(scale(alpha, b) for b in self.bodies))

    def lift(self, level: int) -> "SetRV":
        """View as a variable on a finer level (copy to descendants)."""
        if level < self.level:
            raise ValueError("can only lift to a finer level")
        rep = 1 << (level - self.level)
        return SetRV(level, tuple(b for b in self.bodies for _ in range(rep)))

    def norms(self) -> np.ndarray:
        return np.array([body_norm(b) for b in self.bodies])

    def to_dict(self) -> dict:
        return {FiltrationTree.path(self.level, i): b.to_dict() for i, b in enumerate(self.bodies)}

    @classmethod
    def from_dict(cls, data: dict) -> "SetRV":
        if not data:
            raise ValueError("empty SetRV map")
        items = {FiltrationTree.node_of(p): ConvexBody.from_dict(b) for p, b in data.items()}
        levels = {k for k, _ in items}
        if len(levels) != 1:
            raise ValueError("all paths of a SetRV must have the same length")
        (level,) = levels
        missing = [FiltrationTree.path(level, i) for i in range(1 << level) if (level, i) not in items]
        if missing:
            raise ValueError(f"SetRV is missing nodes {missing[:4]}")
        return cls(level, tuple(items[(level, i)] for i in range(1 << level)))


def _same_level(a: SetRV, b: SetRV) -> None:
    if a.level != b.level:
        raise ValueError(f"level mismatch: {a.level} vs {b.level}")


def constant_set_rv(level: int, body: ConvexBody) -> SetRV:
    return SetRV(level, (body,) * (1 << level))


@dataclass(frozen=True)
class SetProcess:
    """Adapted set-valued process: ``slices[j]`` is a SetRV on level ``j``."""

    slices: tuple

    def __post_init__(self):
        slices = tuple(self.slices)
        for j, s in enumerate(slices):
            if s.level != j:
                raise ValueError(f"slice {j} sits on level {s.level}")
        object.__setattr__(self, "slices", slices)

    @property
    def n_levels(self) -> int:
        return len(self.slices)

    @property
    def dim(self) -> int:
        return self.slices[0].dim

    def __getitem__(self, k) -> SetRV:
        return self.slices[k]

    def __len__(self):
        return len(self.slices)

    def __add__(self, other: "SetProcess") -> "SetProcess":
        return SetProcess(tuple(a + b for a, b in zip(self.slices, other.slices)))

    def max_norm(self) -> float:
        return max(float(s.norms().max()) for s in self.slices)

    def to_dict(self) -> dict:
        out = {}
        for s in self.slices:
            out.update(s.to_dict())
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "SetProcess":
        by_level: dict[int, dict] = {}
        for p, b in data.items():
            by_level.setdefault(len(p), {})[p] = b
        levels = sorted(by_level)
        if levels != list(range(len(levels))):
            raise ValueError("process levels must run 0..L without gaps")
        return cls(tuple(SetRV.from_dict(by_level[k]) for k in levels))


def constant_process(n_levels: int, body: ConvexBody) -> SetProcess:
    return SetProcess(tuple(constant_set_rv(k, body) for k in range(n_levels)))


def process_from_fn(n_levels: int, fn: Callable[[int, int], ConvexBody]) -> SetProcess:
    return SetProcess(tuple(SetRV(k, tuple(fn(k, i) for i in range(1 << k))) for k in range(n_levels)))


# ----------------------------------------------------------------------
# expectations


def conditional_expectation_set(x: SetRV, to_level: int) -> SetRV:
    """``E[x | F_{t_j}]``: per level-``j`` atom, the average of descendant bodies.

    Computed one level at a time (tower property); each step is an
    equal-weight Minkowski average of the two children.
    """
    if not 0 <= to_level <= x.level:
        raise ValueError(f"cannot condition a level-{x.level} variable on level {to_level}")
    bodies = x.bodies
    for _ in range(x.level - to_level):
        bodies = tuple(midpoint_average(bodies[2 * i], bodies[2 * i + 1]) for i in range(len(bodies) // 2))
    return SetRV(to_level, bodies)


def conditional_expectation_direct(x: SetRV, to_level: int) -> SetRV:
    """Same as :func:`conditional_expectation_set` via one weighted average per atom."""
    if not 0 <= to_level <= x.level:
        raise ValueError(f"cannot condition a level-{x.level} variable on level {to_level}")
    block = 1 << (x.level - to_level)
    w = np.full(block, 1.0 / block)
    return SetRV(
        to_level,
        tuple(weighted_minkowski_average(x.bodies[a * block : (a + 1) * block], w) for a in range(1 << to_level)),
    )


def aumann_expectation(x: SetRV) -> ConvexBody:
    return conditional_expectation_set(x, 0).bodies[0]


def condexp_slices(x: SetRV) -> tuple:
    """``(E[x|F_0], ..., E[x|F_k])`` sharing work across levels."""
    out = [x]
    cur = x
    while cur.level > 0:
        cur = conditional_expectation_set(cur, cur.level - 1)
        out.append(cur)
    return tuple(out[::-1])


# ----------------------------------------------------------------------
# per-atom arithmetic and metrics


def hukuhara_set_rv(x1: SetRV, x2: SetRV) -> SetRV:
    """Per-atom Hukuhara difference; raises :class:`NotExists` if any atom fails."""
    _same_level(x1, x2)
    out = []
    for i, (a, b) in enumerate(zip(x1.bodies, x2.bodies)):
        c = hukuhara_difference(a, b)
        if c is None:
            raise NotExists(f"Hukuhara difference does not exist at node {FiltrationTree.path(x1.level, i)!r}")
        out.append(c)
    return SetRV(x1.level, tuple(out))


def hausdorff_per_atom(x1: SetRV, x2: SetRV) -> np.ndarray:
    _same_level(x1, x2)
    return np.array([hausdorff_distance(a, b) for a, b in zip(x1.bodies, x2.bodies)])


def distance_H2(x1: SetRV, x2: SetRV) -> float:
    """``(E h^2(x1, x2))^{1/2}``."""
    h = hausdorff_per_atom(x1, x2)
    return float(np.sqrt(np.mean(h * h)))


def cond_mean(values: np.ndarray, level: int, to_level: int) -> np.ndarray:
    """Block means of a per-atom scalar array (scalar conditional expectation)."""
    return np.asarray(values, dtype=float).reshape(1 << to_level, 1 << (level - to_level)).mean(axis=1)


# ----------------------------------------------------------------------
# selections and decomposable hulls


def dec_hull_atoms(points: Sequence[VectorRV], convexify: bool = True) -> SetRV:
    """Per-atom hull of the values taken by a finite family of random vectors.

    On a finite space the closed decomposable hull of ``{f_1, .., f_n}`` is
    ``{f : f(w) in {f_1(w), .., f_n(w)} for every atom w}``; with
    ``convexify`` each atom's value set is replaced by its convex hull.
    Without it every atom set must be a single point, since a finite set
    with two or more points is not a convex body.
    """
    if not points:
        raise ValueError("empty family")
    level = points[0].level
    if any(p.level != level for p in points):
        raise ValueError("family members live on different levels")
    stack = np.stack([p.values for p in points], axis=1)  # (atoms, members, d)
    bodies = [ConvexBody(atom) for atom in stack]
    if not convexify and any(not b.is_singleton() for b in bodies):
        raise ValueError("atom value set has several points; pass convexify=True")
    return SetRV(level, tuple(bodies))


def selection_count(x: SetRV) -> int:
    return math.prod(b.n_vertices for b in x.bodies)


def vertex_selections(x: SetRV, cap: int = ENUMERATION_CAP) -> list[VectorRV]:
    """All selections choosing one vertex of the body at every atom."""
    n = selection_count(x)
    if n > cap:
        raise EnumerationCapExceeded(f"{n} vertex selections exceed the cap {cap}")
    verts = [b.vertices for b in x.bodies]
    return [VectorRV(x.level, np.array(choice)) for choice in itertools.product(*verts)]


def sample_vertex_selections(x: SetRV, n: int, rng: np.random.Generator) -> list[VectorRV]:
    """``n`` uniform vertex selections, drawn one at a time so that prefixes nest."""
    counts = np.array([b.n_vertices for b in x.bodies])
    out = []
    for _ in range(n):
        idx = rng.integers(0, counts)
        out.append(VectorRV(x.level, np.array([b.vertices[i] for b, i in zip(x.bodies, idx)])))
    return out
