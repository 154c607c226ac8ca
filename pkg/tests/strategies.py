"""Hypothesis strategies for bodies, set-valued variables and processes."""
import numpy as np
from hypothesis import strategies as st

from svbsde.convex import ConvexBody
from svbsde.setrv import SetProcess, SetRV

coord = st.floats(-5, 5, allow_nan=False, allow_infinity=False).map(lambda x: round(x, 6))


def points(dim, min_size=1, max_size=7):
    return st.lists(st.tuples(*[coord] * dim), min_size=min_size, max_size=max_size).map(
        lambda p: np.array(p, dtype=float)
    )


def bodies(dim=None):
    if dim is None:
        return st.sampled_from([1, 2]).flatmap(bodies)
    return points(dim).map(ConvexBody)


def body_pairs(n=2):
    return st.sampled_from([1, 2]).flatmap(lambda d: st.tuples(*[bodies(d)] * n))


def set_rvs(level, dim):
    return st.lists(bodies(dim), min_size=1 << level, max_size=1 << level).map(lambda b: SetRV(level, tuple(b)))


def set_processes(n_levels, dim):
    return st.tuples(*[set_rvs(k, dim) for k in range(n_levels)]).map(SetProcess)
