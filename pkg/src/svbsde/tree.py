"""Binary scenario trees driven by a symmetric +-sqrt(dt) random walk.

Nodes at level ``k`` are indexed ``0 .. 2**k - 1``. Reading the index in
binary (``k`` bits, most significant first) gives the path, with bit 0 an up
move ``U`` and bit 1 a down move ``D``. The children of node ``i`` are
``2i`` (up) and ``2i + 1`` (down), so the level-``k`` descendants of a
level-``j`` node form a contiguous block of ``2**(k-j)`` indices. All
conditional expectations below are block means.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

MARTINGALE_TOL = 1e-12


@dataclass(frozen=True)
class FiltrationTree:
    steps: int
    horizon: float = 1.0
    up_probability: float = 0.5

    def __post_init__(self):
        if not isinstance(self.steps, (int, np.integer)) or self.steps < 1:
            raise ValueError(f"steps must be a positive integer, got {self.steps!r}")
        if not (self.horizon > 0 and np.isfinite(self.horizon)):
            raise ValueError(f"horizon must be positive, got {self.horizon!r}")
        if self.up_probability != 0.5:
            raise ValueError("only the symmetric walk (up_probability = 0.5) is supported")

    @property
    def dt(self) -> float:
        return self.horizon / self.steps

    @property
    def sqrt_dt(self) -> float:
        return float(np.sqrt(self.dt))

    def times(self) -> np.ndarray:
        return np.arange(self.steps + 1) * self.dt

    def n_nodes(self, level: int) -> int:
        self._check_level(level)
        return 1 << level

    def _check_level(self, level: int) -> None:
        if not 0 <= level <= self.steps:
            raise ValueError(f"level {level} outside 0..{self.steps}")

    def increments(self, level: int) -> np.ndarray:
        """Walk increment on the edge arriving at each level-``level`` node."""
        if not 1 <= level <= self.steps:
            raise ValueError(f"increments exist on levels 1..{self.steps}, got {level}")
        signs = 1.0 - 2.0 * (np.arange(1 << level) & 1)
        return signs * self.sqrt_dt

    def walk(self, level: int) -> np.ndarray:
        """``B_{t_k}`` at every level-``k`` node."""
        self._check_level(level)
        b = np.zeros(1)
        for j in range(1, level + 1):
            b = np.repeat(b, 2) + self.increments(j)
        return b

    def probabilities(self, level: int) -> np.ndarray:
        return np.full(self.n_nodes(level), 0.5**level)

    # paths ------------------------------------------------------------
    @staticmethod
    def path(level: int, node: int) -> str:
        if level == 0:
            return ""
        return format(node, f"0{level}b").replace("0", "U").replace("1", "D")

    @staticmethod
    def node_of(path: str) -> tuple[int, int]:
        """``(level, index)`` of a ``"UDU.."`` path string."""
        if any(c not in "UD" for c in path):
            raise ValueError(f"bad path {path!r}: only U and D allowed")
        if not path:
            return 0, 0
        return len(path), int(path.replace("U", "0").replace("D", "1"), 2)

    def paths(self, level: int) -> list[str]:
        return [self.path(level, i) for i in range(self.n_nodes(level))]

    @staticmethod
    def ancestor(level: int, node: int, to_level: int) -> int:
        return node >> (level - to_level)

    def ancestors(self, level: int, to_level: int) -> np.ndarray:
        """Index of the level-``to_level`` ancestor of each level-``level`` node."""
        return np.arange(self.n_nodes(level)) >> (level - to_level)

    def to_dict(self) -> dict:
        return {"steps": int(self.steps), "horizon": float(self.horizon)}

    @classmethod
    def from_dict(cls, data: dict) -> "FiltrationTree":
        for key in ("steps", "horizon"):
            if key not in data:
                raise ValueError(f"tree config is missing field '{key}'")
        return cls(int(data["steps"]), float(data["horizon"]))


def build_tree(steps: int, horizon: float = 1.0) -> FiltrationTree:
    return FiltrationTree(steps, horizon)


# ----------------------------------------------------------------------
# vector-valued random variables and processes


@dataclass(frozen=True)
class VectorRV:
    """An ``F_{t_k}``-measurable random vector: one row per level-``k`` node."""

    level: int
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim == 1:
            v = v[:, None]
        if v.shape[0] != 1 << self.level:
            raise ValueError(f"level {self.level} needs {1 << self.level} rows, got {v.shape[0]}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    def to_dict(self) -> dict:
        return {FiltrationTree.path(self.level, i): row.tolist() for i, row in enumerate(self.values)}

    @classmethod
    def from_dict(cls, data: dict) -> "VectorRV":
        return cls(*_from_path_map(data))


@dataclass(frozen=True)
class VectorProcess:
    """Vector process on levels ``start .. start + len(values) - 1``.

    Used for predictable integrands: ``values[j]`` is the value on the
    level-``(start + j)`` nodes and multiplies the increment arriving at
    level ``start + j + 1``.
    """

    values: tuple
    start: int = 0
    width: int | None = None  # dimension; only needed when ``values`` is empty

    def __post_init__(self):
        vals = []
        for j, v in enumerate(self.values):
            a = np.asarray(v, dtype=float)
            if a.ndim == 1:
                a = a[:, None]
            if a.shape[0] != 1 << (self.start + j):
                raise ValueError(f"slice at level {self.start + j} has {a.shape[0]} rows")
            a.setflags(write=False)
            vals.append(a)
        object.__setattr__(self, "values", tuple(vals))
        if vals:
            object.__setattr__(self, "width", vals[0].shape[1])
        elif self.width is None:
            raise ValueError("an empty process needs an explicit width")

    @property
    def stop(self) -> int:
        """One past the last level carried."""
        return self.start + len(self.values)

    @property
    def dim(self) -> int:
        return self.width

    def at(self, level: int) -> np.ndarray:
        if not self.start <= level < self.stop:
            raise ValueError(f"process carries levels {self.start}..{self.stop - 1}, asked {level}")
        return self.values[level - self.start]

    def restrict(self, start: int) -> "VectorProcess":
        """``z^{t,T}``: drop the levels before ``start``."""
        if not self.start <= start <= self.stop:
            raise ValueError("restriction level out of range")
        return VectorProcess(self.values[start - self.start :], start, self.width)

    def max_abs_diff(self, other: "VectorProcess") -> float:
        if (self.start, self.stop) != (other.start, other.stop):
            return float("inf")
        return max((float(np.abs(a - b).max()) for a, b in zip(self.values, other.values)), default=0.0)

    def to_dict(self) -> dict:
        out = {}
        for j, v in enumerate(self.values):
            for i, row in enumerate(v):
                out[FiltrationTree.path(self.start + j, i)] = row.tolist()
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "VectorProcess":
        by_level: dict[int, dict[int, list]] = {}
        for path, vec in data.items():
            k, i = FiltrationTree.node_of(path)
            by_level.setdefault(k, {})[i] = vec
        levels = sorted(by_level)
        if levels != list(range(levels[0], levels[-1] + 1)):
            raise ValueError("process levels must be contiguous")
        slices = []
        for k in levels:
            rows = by_level[k]
            if sorted(rows) != list(range(1 << k)):
                raise ValueError(f"process is not total on level {k}")
            slices.append(np.array([rows[i] for i in range(1 << k)], dtype=float))
        return cls(tuple(slices), levels[0])


def _from_path_map(data: dict) -> tuple[int, np.ndarray]:
    if not data:
        raise ValueError("empty path map")
    items = [(FiltrationTree.node_of(p), v) for p, v in data.items()]
    levels = {k for (k, _), _ in items}
    if len(levels) != 1:
        raise ValueError("all paths of a random variable must have the same length")
    (level,) = levels
    rows = {i: v for (_, i), v in items}
    if sorted(rows) != list(range(1 << level)):
        raise ValueError(f"path map is not total on level {level}")
    return level, np.array([rows[i] for i in range(1 << level)], dtype=float)


def constant_rv(level: int, value) -> VectorRV:
    value = np.atleast_1d(np.asarray(value, dtype=float))
    return VectorRV(level, np.tile(value, (1 << level, 1)))


def cond_exp_vector(x: VectorRV, to_level: int) -> VectorRV:
    """``E[x | F_{t_j}]`` as block means over descendants."""
    if not 0 <= to_level <= x.level:
        raise ValueError(f"cannot condition a level-{x.level} variable on level {to_level}")
    v = x.values.reshape(1 << to_level, 1 << (x.level - to_level), x.dim).mean(axis=1)
    return VectorRV(to_level, v)


def discrete_ito_integral(tree: FiltrationTree, z: VectorProcess, level: int, start: int | None = None) -> VectorRV:
    """``sum_{start <= j < level} z_j dB_{j+1}`` at every level-``level`` node."""
    start = z.start if start is None else start
    if not (z.start <= start <= level <= tree.steps) or level > z.stop:
        raise ValueError(f"integrand on levels {z.start}..{z.stop - 1} cannot be integrated over [{start}, {level})")
    acc = np.zeros((1 << start, z.dim))
    for j in range(start, level):
        acc = np.repeat(acc, 2, axis=0) + np.repeat(z.at(j), 2, axis=0) * tree.increments(j + 1)[:, None]
    return VectorRV(level, acc)


def martingale_residual(slices: Sequence[np.ndarray]) -> float:
    """Largest ``|E[y_{k+1} | F_k] - y_k|`` over levels and nodes."""
    res = 0.0
    for a, b in zip(slices[:-1], slices[1:]):
        res = max(res, float(np.abs(0.5 * (b[0::2] + b[1::2]) - a).max()))
    return res


def martingale_representer(tree: FiltrationTree, slices: Sequence[np.ndarray], start: int = 0):
    """Write a vector martingale as ``y_u = y_start + int_start^u z dB``.

    Parameters
    ----------
    slices
        ``slices[j]`` holds the martingale on level ``start + j``; the last
        slice must be level ``tree.steps``.
    start
        First level carried by ``slices``.

    Returns
    -------
    (x, z)
        ``x`` is the level-``start`` slice (a ``VectorRV``) and ``z`` the
        integrand on levels ``start .. N-1``.
    """
    ys = [np.asarray(s, dtype=float).reshape(1 << (start + j), -1) for j, s in enumerate(slices)]
    if start + len(ys) - 1 != tree.steps:
        raise ValueError("martingale slices must run up to the terminal level")
    scale = max(1.0, max(float(np.abs(y).max()) for y in ys))
    res = martingale_residual(ys)
    if res > MARTINGALE_TOL * scale:
        raise ValueError(f"input is not a martingale (residual {res:.3e})")
    h = 2.0 * tree.sqrt_dt
    z = tuple((ys[j + 1][0::2] - ys[j + 1][1::2]) / h for j in range(len(ys) - 1))
    return VectorRV(start, ys[0]), VectorProcess(z, start, ys[0].shape[1])


def martingale_from_terminal(x: VectorRV) -> list[np.ndarray]:
    """``[E[x|F_0], ..., E[x|F_k]]`` computed by repeated halving."""
    out = [x.values]
    v = x.values
    while v.shape[0] > 1:
        v = 0.5 * (v[0::2] + v[1::2])
        out.append(v)
    return out[::-1]
