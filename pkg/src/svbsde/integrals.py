"""Discrete set-valued integrals on a binary tree.

* ``aumann_time_integral``: path-wise Minkowski Riemann sum of ``dt * Phi``.
* ``set_ito_integral``: path-wise Minkowski sum of ``dB * Psi``.
* ``generalized_ito_integral``: per-atom hull of ``int z dB`` over a family.
* ``extended_integral``: per-atom hull of ``x + int z dB`` over pairs.

All of them are evaluated forward from the start level, one Minkowski step
per edge, so the cost is linear in the number of nodes.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .convex import ConvexBody, minkowski_sum, scale
from .setrv import SetProcess, SetRV
from .tree import FiltrationTree, VectorRV, discrete_ito_integral


@dataclass(frozen=True)
class ProcessFamily:
    """Finite family of integrands, read as the convex hull of its members."""

    members: tuple
    convex: bool = True

    def __post_init__(self):
        members = tuple(self.members)
        if not members:
            raise ValueError("a process family needs at least one member")
        spans = {(m.start, m.stop, m.dim) for m in members}
        if len(spans) != 1:
            raise ValueError("family members must share level range and dimension")
        object.__setattr__(self, "members", members)

    @property
    def start(self) -> int:
        return self.members[0].start

    @property
    def stop(self) -> int:
        return self.members[0].stop

    def restrict(self, start: int) -> "ProcessFamily":
        return ProcessFamily(tuple(m.restrict(start) for m in self.members), self.convex)


@dataclass(frozen=True)
class RepresenterSet:
    """Finite set of pairs ``(x, z)``: ``x`` an F_t-measurable vector, ``z`` on ``[t, T)``.

    Pairs built from martingale selectors start at ``t = 0`` where ``x`` is
    a single vector; after a time shift ``x`` becomes a level-``t`` variable.
    """

    xs: tuple
    zs: tuple
    convex: bool = True

    def __post_init__(self):
        xs, zs = tuple(self.xs), tuple(self.zs)
        if not xs or len(xs) != len(zs):
            raise ValueError("a representer set needs matching, nonempty x and z lists")
        for x, z in zip(xs, zs):
            if x.level != z.start:
                raise ValueError("x must live on the level where z starts")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "zs", zs)

    @property
    def start(self) -> int:
        return self.xs[0].level

    def __len__(self):
        return len(self.xs)

    def pi_xi(self) -> list[VectorRV]:
        return list(self.xs)

    def pi_z(self) -> ProcessFamily:
        return ProcessFamily(self.zs, self.convex)

    def members(self):
        return list(zip(self.xs, self.zs))


# ----------------------------------------------------------------------
# path-wise Minkowski integrals


def _forward_sum(tree: FiltrationTree, proc: SetProcess, start: int, level: int, weight) -> SetRV:
    if not 0 <= start <= level <= tree.steps:
        raise ValueError(f"bad integration window [{start}, {level}] on a depth-{tree.steps} tree")
    if level > proc.n_levels:
        raise ValueError(f"integrand only has levels 0..{proc.n_levels - 1}")
    d = proc.dim
    acc = tuple(ConvexBody.zero(d) for _ in range(1 << start))
    for j in range(start, level):
        w = weight(j)  # per child of level j
        src = proc[j].bodies
        acc = tuple(
            minkowski_sum(acc[i >> 1], scale(w[i], src[i >> 1])) for i in range(1 << (j + 1))
        )
    return SetRV(level, acc)


def aumann_time_integral(tree: FiltrationTree, phi: SetProcess, start: int, level: int) -> SetRV:
    """``int_{t_start}^{t_level} Phi ds`` per level-``level`` atom.

    Left-endpoint Minkowski sum ``sum_{start <= j < level} dt * Phi(node_j)``.
    """
    return _forward_sum(tree, phi, start, level, lambda j: np.full(1 << (j + 1), tree.dt))


def set_ito_integral(tree: FiltrationTree, psi: SetProcess, level: int, start: int = 0) -> SetRV:
    """``int_{t_start}^{t_level} Psi dB`` per level-``level`` atom.

    Minkowski sum along the path of ``dB_{j+1} * Psi(node_j)``; negative
    increments reflect the body through the origin.
    """
    return _forward_sum(tree, psi, start, level, lambda j: tree.increments(j + 1))


def hull_per_atom(values: np.ndarray, level: int) -> SetRV:
    """``values`` has shape ``(members, atoms, d)``; returns the per-atom hull."""
    return SetRV(level, tuple(ConvexBody(values[:, a, :]) for a in range(values.shape[1])))


def generalized_ito_integral(tree: FiltrationTree, family: ProcessFamily, level: int, start: int | None = None) -> SetRV:
    """``int_{t_start}^{t_level} Z o dB``: per atom, hull of the member integrals."""
    start = family.start if start is None else start
    vals = np.stack([discrete_ito_integral(tree, z, level, start).values for z in family.members])
    return hull_per_atom(vals, level)


def extended_integral(tree: FiltrationTree, reps: RepresenterSet, level: int) -> SetRV:
    """``int_{0-}^{t_level} R o dB``: per atom, hull of ``x + int z dB`` over pairs."""
    vals = []
    for x, z in reps.members():
        inc = discrete_ito_integral(tree, z, level, z.start).values
        rep = 1 << (level - x.level)
        vals.append(np.repeat(x.values, rep, axis=0) + inc)
    return hull_per_atom(np.stack(vals), level)
