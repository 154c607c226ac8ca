"""Set-valued martingales on a binary tree and their integral representation.

Martingale selectors are generated from terminal vertex selections ``f`` of
``M_N`` as ``y_k = E[f | F_k]``. Each selector is written as
``y = x + int z dB``; the pairs ``(x, z)`` form the representer set, whose
extended integral rebuilds ``M`` atom by atom.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .convex import ConvexBody, directed_hausdorff, hausdorff_distance, minkowski_sum
from .integrals import RepresenterSet, extended_integral, generalized_ito_integral, hull_per_atom
from .setrv import (
    ENUMERATION_CAP,
    EnumerationCapExceeded,
    SetRV,
    condexp_slices,
    conditional_expectation_set,
    hausdorff_per_atom,
    sample_vertex_selections,
    selection_count,
    vertex_selections,
)
from .tree import (
    FiltrationTree,
    VectorProcess,
    VectorRV,
    discrete_ito_integral,
    martingale_from_terminal,
    martingale_representer,
)

MARTINGALE_SET_TOL = 1e-9


@dataclass(frozen=True)
class SetMartingale:
    """Slices ``M_0 .. M_N``; ``slices[k]`` is a SetRV on level ``k``."""

    slices: tuple

    def __post_init__(self):
        slices = tuple(self.slices)
        for k, s in enumerate(slices):
            if s.level != k:
                raise ValueError(f"slice {k} sits on level {s.level}")
        object.__setattr__(self, "slices", slices)

    @property
    def depth(self) -> int:
        return len(self.slices) - 1

    def __getitem__(self, k) -> SetRV:
        return self.slices[k]

    @classmethod
    def from_terminal(cls, terminal: SetRV) -> "SetMartingale":
        return cls(condexp_slices(terminal))

    def to_dict(self) -> dict:
        out = {}
        for s in self.slices:
            out.update(s.to_dict())
        return out


@dataclass
class MartingaleCheck:
    residuals: list
    tol: float = MARTINGALE_SET_TOL

    @property
    def worst(self) -> float:
        return max(self.residuals, default=0.0)

    @property
    def passed(self) -> bool:
        return self.worst <= self.tol


def is_set_martingale(slices: Sequence[SetRV], tol: float = MARTINGALE_SET_TOL) -> MartingaleCheck:
    """Per-level residual ``max_atoms h(E[M_{k+1}|F_k], M_k)``."""
    res = []
    for a, b in zip(slices[:-1], slices[1:]):
        res.append(float(hausdorff_per_atom(conditional_expectation_set(b, a.level), a).max()))
    return MartingaleCheck(res, tol)


@dataclass(frozen=True)
class MartingaleSelector:
    """A vector martingale ``y_0 .. y_N``; ``slices[k]`` has one row per level-k node."""

    slices: tuple

    @classmethod
    def from_terminal(cls, f: VectorRV) -> "MartingaleSelector":
        return cls(tuple(martingale_from_terminal(f)))

    def at(self, k: int) -> VectorRV:
        return VectorRV(k, self.slices[k])


def membership_slack(m: SetMartingale, sel: MartingaleSelector) -> float:
    """Largest distance from ``y_k`` to ``M_k`` over all nodes."""
    worst = 0.0
    for k, s in enumerate(m.slices):
        for b, y in zip(s.bodies, sel.slices[k]):
            worst = max(worst, directed_hausdorff(ConvexBody.point(y), b))
    return worst


def martingale_selectors(
    m: SetMartingale,
    cap: int = ENUMERATION_CAP,
    samples: int | None = None,
    seed: int | None = None,
) -> list[MartingaleSelector]:
    """Selectors ``E[f | F_k]`` for terminal vertex selections ``f``.

    Enumerates every vertex selection of ``M_N`` when ``samples`` is None
    (raising if that exceeds ``cap``); otherwise draws ``samples`` seeded
    uniform selections. Sampled lists nest: the first ``n`` draws do not
    depend on how many more are requested.
    """
    terminal = m.slices[-1]
    if samples is None:
        n = selection_count(terminal)
        if n > cap:
            raise EnumerationCapExceeded(f"{n} terminal vertex selections exceed the cap {cap}; enable sampling")
        fs = vertex_selections(terminal, cap)
    else:
        if seed is None:
            raise ValueError("sampling needs an explicit seed")
        fs = sample_vertex_selections(terminal, samples, np.random.default_rng(seed))
    return [MartingaleSelector.from_terminal(f) for f in fs]


def build_representers(tree: FiltrationTree, selectors: Sequence[MartingaleSelector], start: int = 0) -> RepresenterSet:
    """``R^M_t``: the pairs ``(xi, z)`` with ``J^t(xi, z)`` equal to each selector."""
    xs, zs = [], []
    for sel in selectors:
        x, z = martingale_representer(tree, sel.slices[start:], start)
        xs.append(x)
        zs.append(z)
    return RepresenterSet(tuple(xs), tuple(zs))


def reconstruct_integral(tree: FiltrationTree, reps: RepresenterSet, level: int) -> SetRV:
    return extended_integral(tree, reps, level)


def reconstruction_gap(tree: FiltrationTree, m: SetMartingale, reps: RepresenterSet) -> list[float]:
    """Per level, ``max_atoms h(int_{0-}^t R o dB, M_t)``."""
    return [
        float(hausdorff_per_atom(reconstruct_integral(tree, reps, k), m[k]).max()) for k in range(m.depth + 1)
    ]


# ----------------------------------------------------------------------
# time shifts


def shift_pair(tree: FiltrationTree, x: VectorRV, z: VectorProcess, t: int) -> tuple[VectorRV, VectorProcess]:
    """``F^t(x, z) = (x + int_0^t z dB, z restricted to [t, T))``."""
    inc = discrete_ito_integral(tree, z, t, z.start).values
    xt = np.repeat(x.values, 1 << (t - x.level), axis=0) + inc
    return VectorRV(t, xt), z.restrict(t)


def shift_representers(tree: FiltrationTree, reps: RepresenterSet, t: int) -> RepresenterSet:
    pairs = [shift_pair(tree, x, z, t) for x, z in reps.members()]
    return RepresenterSet(tuple(p[0] for p in pairs), tuple(p[1] for p in pairs), reps.convex)


def j_map(tree: FiltrationTree, xi: VectorRV, z: VectorProcess) -> list[np.ndarray]:
    """``J^t(xi, z)``: ``E[xi|F_u]`` before ``t``, ``xi + int_t^u z dB`` from ``t`` on."""
    t = xi.level
    out = martingale_from_terminal(xi)
    for u in range(t + 1, tree.steps + 1):
        inc = discrete_ito_integral(tree, z, u, t).values
        out.append(np.repeat(xi.values, 1 << (u - t), axis=0) + inc)
    return out


# ----------------------------------------------------------------------
# reports


def _finite_set_distance(a: Sequence[np.ndarray], b: Sequence[np.ndarray]) -> float:
    """Hausdorff distance (sup norm) between two finite sets of arrays."""
    if len(a) == 0 or len(b) == 0:
        return 0.0 if len(a) == len(b) else float("inf")
    fa = np.stack([np.ravel(x) for x in a])
    fb = np.stack([np.ravel(x) for x in b])
    if fa.shape[1] == 0:
        return 0.0
    d = np.abs(fa[:, None, :] - fb[None, :, :]).max(axis=2)
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def _flat_z(z: VectorProcess, start: int) -> np.ndarray:
    return np.concatenate([z.at(k).ravel() for k in range(start, z.stop)]) if start < z.stop else np.zeros(0)


def _pair_key(x: VectorRV, z: VectorProcess) -> np.ndarray:
    return np.concatenate((x.values.ravel(), _flat_z(z, z.start)))


@dataclass
class Report:
    checks: dict = field(default_factory=dict)
    tol: float = MARTINGALE_SET_TOL

    def add(self, name: str, value: float) -> None:
        self.checks[name] = max(self.checks.get(name, 0.0), float(value))

    @property
    def worst(self) -> float:
        return max(self.checks.values(), default=0.0)

    @property
    def passed(self) -> bool:
        return self.worst <= self.tol

    def to_dict(self) -> dict:
        return {"passed": self.passed, "tol": self.tol, "checks": dict(sorted(self.checks.items()))}


def time_consistency_suite(
    tree: FiltrationTree, m: SetMartingale, selectors: Sequence[MartingaleSelector], tol: float = MARTINGALE_SET_TOL
) -> Report:
    """Time-consistency relations between ``R^M_t`` for all ``t1 < t2``.

    ``R^M_t`` is rebuilt from the selectors at every ``t`` independently of
    ``R^M_0``; the checks compare the two routes:

    * ``tcmain``: ``F^t[R_0] = R_t`` as sets of pairs,
    * ``i``: ``J^t[R_t]`` reproduces the selector set,
    * ``ii``: ``hull pi_xi[R_0] = M_0``,
    * ``iii``: per atom ``hull pi_xi[R_t1] = hull J^{t2}_{t1}[R_t2] = M_t1``,
    * ``iv``: per atom ``hull pi_xi[R_t1] = hull E[pi_xi[R_t2] | F_t1]``,
    * ``v``: ``Z_t1, Z_t2, Z_0`` restricted to ``[t2, T)`` coincide as sets.
    """
    N = tree.steps
    rep = Report(tol=tol)
    ys = [np.concatenate([s.ravel() for s in sel.slices]) for sel in selectors]
    R = {t: build_representers(tree, selectors, t) for t in range(N + 1)}
    for t in range(N + 1):
        shifted = shift_representers(tree, R[0], t)
        rep.add(
            "tcmain",
            _finite_set_distance(
                [_pair_key(x, z) for x, z in shifted.members()], [_pair_key(x, z) for x, z in R[t].members()]
            ),
        )
        rebuilt = [np.concatenate([s.ravel() for s in j_map(tree, x, z)]) for x, z in R[t].members()]
        rep.add("i", _finite_set_distance(rebuilt, ys))
    x0 = ConvexBody(np.stack([x.values[0] for x in R[0].xs]))
    rep.add("ii", hausdorff_distance(x0, m[0][0]))
    for t1 in range(N + 1):
        xi1 = hull_per_atom(np.stack([x.values for x in R[t1].xs]), t1)
        rep.add("iii", float(hausdorff_per_atom(xi1, m[t1]).max()))
        for t2 in range(t1 + 1, N + 1):
            down = np.stack([j_map(tree, x, z)[t1] for x, z in R[t2].members()])
            rep.add("iii", float(hausdorff_per_atom(hull_per_atom(down, t1), xi1).max()))
            cond = np.stack([x.values.reshape(1 << t1, -1, x.values.shape[1]).mean(axis=1) for x in R[t2].xs])
            rep.add("iv", float(hausdorff_per_atom(hull_per_atom(cond, t1), xi1).max()))
            z1 = [_flat_z(z, t2) for z in R[t1].zs]
            z2 = [_flat_z(z, t2) for z in R[t2].zs]
            z0 = [_flat_z(z, t2) for z in R[0].zs]
            rep.add("v", max(_finite_set_distance(z1, z2), _finite_set_distance(z2, z0)))
    return rep


@dataclass
class InclusionReport:
    excess: float
    gaps: np.ndarray
    slack: float

    @property
    def holds(self) -> bool:
        return self.excess <= self.slack

    @property
    def strict(self) -> bool:
        return bool(np.any(self.gaps > self.slack))

    def to_dict(self) -> dict:
        return {"holds": self.holds, "strict": self.strict, "excess": self.excess, "max_gap": float(self.gaps.max())}


def inclusion_check(
    tree: FiltrationTree, reps: RepresenterSet, m0: ConvexBody, level: int, slack: float = MARTINGALE_SET_TOL
) -> InclusionReport:
    """``int_{0-}^t R o dB  subset of  M_0 + int_0^t pi_z[R] o dB`` per atom."""
    left = extended_integral(tree, reps, level)
    right = generalized_ito_integral(tree, reps.pi_z(), level)
    excess, gaps = 0.0, []
    for a, b in zip(left.bodies, right.bodies):
        rb = minkowski_sum(m0, b)
        excess = max(excess, directed_hausdorff(a, rb))
        gaps.append(hausdorff_distance(a, rb))
    return InclusionReport(excess, np.array(gaps), slack)
