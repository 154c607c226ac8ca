import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strategies import set_processes
from svbsde.convex import ConvexBody, directed_hausdorff
from svbsde.integrals import (
    ProcessFamily,
    RepresenterSet,
    aumann_time_integral,
    extended_integral,
    generalized_ito_integral,
    set_ito_integral,
)
from svbsde.oracles import ito_by_enumeration
from svbsde.setrv import SetProcess, SetRV, constant_process, hausdorff_per_atom, hukuhara_set_rv
from svbsde.tree import FiltrationTree, VectorProcess, VectorRV, discrete_ito_integral

I = ConvexBody.interval


def const_z(tree, c, start=0):
    c = np.atleast_1d(np.asarray(c, dtype=float))
    return VectorProcess(tuple(np.tile(c, (1 << k, 1)) for k in range(start, tree.steps)), start, c.size)


# --- Aumann time integral -------------------------------------------------


def test_time_integral_of_zero():
    tree = FiltrationTree(3)
    out = aumann_time_integral(tree, constant_process(3, ConvexBody.zero(2)), 0, 3)
    assert all(b == ConvexBody.zero(2) for b in out.bodies)


def test_time_integral_constant_body_is_homothety():
    tree = FiltrationTree(4, 2.0)
    g = ConvexBody([[0, 0], [1, 0], [0, 2]])
    out = aumann_time_integral(tree, constant_process(4, g), 1, 4)
    tau = 3 * tree.dt
    assert all(b == ConvexBody(tau * g.vertices) for b in out.bodies)


def test_time_integral_two_step_window():
    tree = FiltrationTree(2, 1.0)
    phi = SetProcess((SetRV(0, (I(0, 1),)), SetRV(1, (I(1, 3), I(1, 3)))))
    out = aumann_time_integral(tree, phi, 0, 2)
    assert all(b == I(0.5, 2) for b in out.bodies)


# --- set Ito integral -----------------------------------------------------


def test_ito_of_zero():
    tree = FiltrationTree(3)
    out = set_ito_integral(tree, constant_process(3, ConvexBody.zero(1)), 3)
    assert all(b == ConvexBody.zero(1) for b in out.bodies)


def test_ito_singleton_reduces_to_vector_integral():
    tree = FiltrationTree(4, 0.5)
    c = np.array([1.5, -0.5])
    out = set_ito_integral(tree, constant_process(4, ConvexBody.point(c)), 4)
    for b, w in zip(out.bodies, tree.walk(4)):
        assert b == ConvexBody.point(w * c)


def test_ito_interval_integrand_two_steps():
    tree = FiltrationTree(2, 1.0)
    psi = constant_process(2, I(1, 2))
    s = 1 / math.sqrt(2)
    # per path: dB1 * [1, 2] + dB2 * [1, 2]; a negative increment flips the interval
    expected = [I(2 * s, 4 * s), I(-s, s), I(-s, s), I(-4 * s, -2 * s)]
    out = set_ito_integral(tree, psi, 2)
    assert all(a == b for a, b in zip(out.bodies, expected))
    brute = ito_by_enumeration(tree, psi, 2)
    assert hausdorff_per_atom(out, brute).max() <= 1e-12


@given(st.integers(1, 3), st.integers(0, 2**31 - 1))
@settings(max_examples=25)
def test_ito_matches_enumeration(steps, seed):
    rng = np.random.default_rng(seed)
    tree = FiltrationTree(steps, float(rng.uniform(0.5, 2)))
    psi = SetProcess(
        tuple(
            SetRV(k, tuple(I(a, a + w) for a, w in zip(rng.normal(size=1 << k), rng.uniform(0, 2, 1 << k))))
            for k in range(steps)
        )
    )
    for level in range(steps + 1):
        out = set_ito_integral(tree, psi, level)
        assert hausdorff_per_atom(out, ito_by_enumeration(tree, psi, level)).max() <= 1e-10


@given(st.integers(1, 3).flatmap(lambda n: st.tuples(set_processes(n, 2), set_processes(n, 2))))
@settings(max_examples=25)
def test_ito_additive(pair):
    p1, p2 = pair
    tree = FiltrationTree(p1.n_levels)
    lhs = set_ito_integral(tree, p1 + p2, tree.steps)
    rhs = set_ito_integral(tree, p1, tree.steps) + set_ito_integral(tree, p2, tree.steps)
    assert hausdorff_per_atom(lhs, rhs).max() <= 1e-9


@given(st.integers(1, 3).flatmap(lambda n: st.tuples(set_processes(n, 2), set_processes(n, 2))))
@settings(max_examples=25)
def test_ito_hukuhara_pass_through(pair):
    p2, y = pair
    p1 = p2 + y
    tree = FiltrationTree(p1.n_levels)
    diff = SetProcess(tuple(hukuhara_set_rv(a, b) for a, b in zip(p1.slices, p2.slices)))
    lhs = set_ito_integral(tree, diff, tree.steps)
    rhs = hukuhara_set_rv(set_ito_integral(tree, p1, tree.steps), set_ito_integral(tree, p2, tree.steps))
    assert hausdorff_per_atom(lhs, rhs).max() <= 1e-8


@given(st.integers(2, 4).flatmap(lambda n: st.tuples(set_processes(n, 2), st.integers(0, n))))
@settings(max_examples=25)
def test_ito_time_split(args):
    psi, j = args
    tree = FiltrationTree(psi.n_levels)
    N = tree.steps
    whole = set_ito_integral(tree, psi, N)
    split = set_ito_integral(tree, psi, j).lift(N) + set_ito_integral(tree, psi, N, start=j)
    assert hausdorff_per_atom(whole, split).max() <= 1e-9


# --- generalized integral --------------------------------------------------


def test_generalized_zero_family():
    tree = FiltrationTree(2)
    out = generalized_ito_integral(tree, ProcessFamily((const_z(tree, [0.0]),)), 2)
    assert all(b == ConvexBody.zero(1) for b in out.bodies)


def test_generalized_singleton_family():
    tree = FiltrationTree(3)
    rng = np.random.default_rng(0)
    z = VectorProcess(tuple(rng.normal(size=(1 << k, 2)) for k in range(3)))
    out = generalized_ito_integral(tree, ProcessFamily((z,)), 3)
    vals = discrete_ito_integral(tree, z, 3).values
    assert all(b == ConvexBody.point(v) for b, v in zip(out.bodies, vals))


def test_generalized_two_members_give_segments():
    tree = FiltrationTree(2)
    rng = np.random.default_rng(1)
    z1, z2 = (VectorProcess(tuple(rng.normal(size=(1 << k, 2)) for k in range(2))) for _ in range(2))
    out = generalized_ito_integral(tree, ProcessFamily((z1, z2)), 2)
    v1, v2 = discrete_ito_integral(tree, z1, 2).values, discrete_ito_integral(tree, z2, 2).values
    for b, p, q in zip(out.bodies, v1, v2):
        assert b == ConvexBody(np.stack([p, q]))


@given(st.integers(1, 4), st.integers(0, 2**31 - 1))
@settings(max_examples=25)
def test_generalized_subadditive_in_time(steps, seed):
    rng = np.random.default_rng(seed)
    tree = FiltrationTree(steps)
    fam = ProcessFamily(tuple(VectorProcess(tuple(rng.normal(size=(1 << k, 2)) for k in range(steps))) for _ in range(3)))
    j = int(rng.integers(0, steps + 1))
    whole = generalized_ito_integral(tree, fam, steps)
    split = generalized_ito_integral(tree, fam, j).lift(steps) + generalized_ito_integral(tree, fam.restrict(j), steps)
    assert max(directed_hausdorff(a, b) for a, b in zip(whole.bodies, split.bodies)) <= 1e-9


# --- extended integral -----------------------------------------------------


def test_extended_single_pair_without_noise():
    tree = FiltrationTree(3)
    x = VectorRV(0, np.array([[2.0, -1.0]]))
    out = extended_integral(tree, RepresenterSet((x,), (const_z(tree, [0.0, 0.0]),)), 3)
    assert all(b == ConvexBody.point([2.0, -1.0]) for b in out.bodies)


def test_extended_with_zero_initial_values_is_generalized():
    tree = FiltrationTree(3)
    rng = np.random.default_rng(2)
    zs = tuple(VectorProcess(tuple(rng.normal(size=(1 << k, 1)) for k in range(3))) for _ in range(4))
    xs = tuple(VectorRV(0, np.zeros((1, 1))) for _ in zs)
    a = extended_integral(tree, RepresenterSet(xs, zs), 3)
    b = generalized_ito_integral(tree, ProcessFamily(zs), 3)
    assert hausdorff_per_atom(a, b).max() == 0


def test_extended_two_pairs_give_segments():
    tree = FiltrationTree(2)
    rng = np.random.default_rng(3)
    xs = tuple(VectorRV(0, rng.normal(size=(1, 2))) for _ in range(2))
    zs = tuple(VectorProcess(tuple(rng.normal(size=(1 << k, 2)) for k in range(2))) for _ in range(2))
    out = extended_integral(tree, RepresenterSet(xs, zs), 2)
    ends = [x.values[0] + discrete_ito_integral(tree, z, 2).values for x, z in zip(xs, zs)]
    for a, b in enumerate(out.bodies):
        assert b == ConvexBody(np.stack([ends[0][a], ends[1][a]]))


def test_representer_set_level_mismatch():
    tree = FiltrationTree(2)
    with pytest.raises(ValueError):
        RepresenterSet((VectorRV(1, np.zeros((2, 1))),), (const_z(tree, [0.0]),))
