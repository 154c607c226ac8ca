import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from svbsde.bsde import (
    AffineDriver,
    BSDEProblem,
    ConstantDriver,
    ConvergenceWarning,
    build_martingale_term,
    condexp_residual,
    contraction_diagnostics,
    d_h,
    picard_step,
    picard_step_additive,
    picard_step_pathwise,
    solve_condexp_form,
    solve_integral_form,
    terminal_mean_start,
    uniqueness_probe,
    zero_start,
)
from svbsde.convex import ConvexBody, minkowski_sum
from svbsde.oracles import interval_endpoints
from svbsde.setrv import SetProcess, SetRV, conditional_expectation_set, constant_set_rv, hausdorff_per_atom

I = ConvexBody.interval


def interval_problem(steps, beta, g=(0.0, 1.0), horizon=1.0):
    from svbsde.tree import FiltrationTree

    tree = FiltrationTree(steps, horizon)
    bt = tree.walk(steps)
    lo, hi = bt - 1.0, bt + 1.0 + bt * bt
    xi = SetRV(steps, tuple(I(a, b) for a, b in zip(lo, hi)))
    return BSDEProblem(tree, xi, AffineDriver(beta, I(*g))), lo, hi


def planar_problem(steps, seed, beta=0.5):
    from svbsde.tree import FiltrationTree

    rng = np.random.default_rng(seed)
    tree = FiltrationTree(steps, 1.0)
    xi = SetRV(steps, tuple(ConvexBody(rng.normal(size=(3, 2))) for _ in range(1 << steps)))
    g = {tree.path(k, i): ConvexBody(rng.normal(size=(2, 2))) for k in range(steps) for i in range(1 << k)}
    return BSDEProblem(tree, xi, AffineDriver(beta, g))


def max_gap(p, q):
    return max(float(hausdorff_per_atom(a, b).max()) for a, b in zip(p.slices, q.slices))


def endpoints(y):
    return [np.array([b.interval_bounds() for b in s.bodies]) for s in y.slices]


# --- one Picard step --------------------------------------------------------


def test_picard_step_zero_driver_gives_conditional_expectations():
    prob, _, _ = interval_problem(3, 0.0, g=(0.0, 0.0))
    y = picard_step(zero_start(prob), prob)
    for k in range(4):
        assert hausdorff_per_atom(y[k], conditional_expectation_set(prob.terminal, k)).max() <= 1e-14


def test_picard_step_constant_driver_is_linear_in_time():
    from svbsde.tree import FiltrationTree

    tree = FiltrationTree(4, 2.0)
    g = ConvexBody([[0, 0], [1, 0], [0, 1]])
    xi = SetRV(4, tuple(ConvexBody.box([b, 0], [1, 0.5]) for b in tree.walk(4)))
    prob = BSDEProblem(tree, xi, ConstantDriver(g))
    y = picard_step(zero_start(prob), prob)
    for k, t in enumerate(tree.times()):
        expected = conditional_expectation_set(xi, k).map(lambda i, b: minkowski_sum(b, ConvexBody((2.0 - t) * g.vertices)))
        assert hausdorff_per_atom(y[k], expected).max() <= 1e-12


@given(st.floats(0, 2), st.integers(1, 5), st.integers(0, 2**31 - 1))
@settings(max_examples=30)
def test_picard_step_endpoint_recursion(beta, steps, seed):
    # with beta >= 0 the endpoints of one step follow the scalar recursion
    rng = np.random.default_rng(seed)
    prob, _, _ = interval_problem(steps, beta, g=(-0.5, 0.7))
    prev = SetProcess(
        tuple(SetRV(k, tuple(I(a, a + w) for a, w in zip(rng.normal(size=1 << k), rng.uniform(0, 1, 1 << k)))) for k in range(steps + 1))
    )
    y = endpoints(picard_step(prev, prob))
    p = endpoints(prev)
    dt = prob.tree.dt
    lo, hi = np.array([b.interval_bounds() for b in prob.terminal.bodies]).T
    for k in range(steps - 1, -1, -1):
        lo = dt * (beta * p[k][:, 0] - 0.5) + 0.5 * (lo[0::2] + lo[1::2])
        hi = dt * (beta * p[k][:, 1] + 0.7) + 0.5 * (hi[0::2] + hi[1::2])
        np.testing.assert_allclose(y[k][:, 0], lo, atol=1e-12)
        np.testing.assert_allclose(y[k][:, 1], hi, atol=1e-12)


@given(st.integers(1, 3), st.integers(0, 2**31 - 1))
@settings(max_examples=15)
def test_picard_step_three_routes(steps, seed):
    prob = planar_problem(steps, seed, beta=-0.7)
    rng = np.random.default_rng(seed + 1)
    y = SetProcess(tuple(SetRV(k, tuple(ConvexBody(rng.normal(size=(3, 2))) for _ in range(1 << k))) for k in range(steps + 1)))
    a = picard_step(y, prob)
    assert max_gap(a, picard_step_pathwise(y, prob)) <= 1e-10
    assert max_gap(a, picard_step_additive(y, prob)) <= 1e-10


# --- full solve --------------------------------------------------------------


def test_zero_problem_has_zero_solution():
    from svbsde.tree import FiltrationTree

    tree = FiltrationTree(3)
    prob = BSDEProblem(tree, constant_set_rv(3, ConvexBody.zero(2)), ConstantDriver(ConvexBody.zero(2)))
    sol = solve_condexp_form(prob)
    assert sol.converged
    assert all(b == ConvexBody.zero(2) for s in sol.Y.slices for b in s.bodies)
    assert sol.diagnostics.d_h == [0.0]


def test_deterministic_terminal_zero_driver():
    from svbsde.tree import FiltrationTree

    tree = FiltrationTree(4)
    body = ConvexBody([[0, 0], [2, 1], [1, 3]])
    prob = BSDEProblem(tree, constant_set_rv(4, body), ConstantDriver(ConvexBody.zero(2)))
    sol = solve_condexp_form(prob)
    assert all(b == body for s in sol.Y.slices for b in s.bodies)


@pytest.mark.parametrize("beta", [0.0, 0.5, 1.0])
@pytest.mark.parametrize("steps", [2, 4, 8])
def test_solver_matches_scalar_oracle(beta, steps):
    prob, lo, hi = interval_problem(steps, beta)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConvergenceWarning)
        sol = solve_condexp_form(prob, tol=1e-14, max_iter=200)
    olo, ohi = interval_endpoints(steps, 1.0, beta, (0.0, 1.0), lo, hi)
    for k, e in enumerate(endpoints(sol.Y)):
        np.testing.assert_allclose(e[:, 0], olo[k], atol=1e-10)
        np.testing.assert_allclose(e[:, 1], ohi[k], atol=1e-10)


def test_solution_satisfies_conditional_form():
    prob = planar_problem(3, 11)
    sol = solve_condexp_form(prob, tol=1e-13, max_iter=100)
    assert sol.converged and condexp_residual(prob, sol.Y) <= 1e-9


def test_non_convergence_warns():
    prob, _, _ = interval_problem(4, 1.0)
    with pytest.warns(ConvergenceWarning):
        sol = solve_condexp_form(prob, tol=1e-14, max_iter=3)
    assert not sol.converged


def test_coarse_tree_with_large_lipschitz_warns():
    prob, _, _ = interval_problem(1, 1.5)
    with pytest.warns(ConvergenceWarning) as caught:
        solve_condexp_form(prob, max_iter=2)
    assert any("contraction" in str(w.message) for w in caught)


# --- contraction diagnostics ---------------------------------------------


def test_constant_c_and_bound():
    prob, lo, hi = interval_problem(4, 1.0)
    exi = np.mean(np.maximum(np.abs(lo), np.abs(hi)) ** 2)
    # |f(t, {0})| = |G| = 1 at every node
    assert prob.constant_c() == pytest.approx(2 * (exi + 1.0 * 1.0), rel=1e-14)
    assert prob.bound(3) == pytest.approx(prob.constant_c() * 1.0 / 2, rel=1e-14)


def test_constant_driver_converges_at_second_iterate():
    from svbsde.tree import FiltrationTree

    tree = FiltrationTree(4)
    xi = SetRV(4, tuple(I(b, b + 1) for b in tree.walk(4)))
    sol = solve_condexp_form(BSDEProblem(tree, xi, ConstantDriver(I(0, 2))))
    assert sol.diagnostics.iterations == 2 and sol.diagnostics.d_h[1] == 0.0
    assert np.all(sol.diagnostics.sup_sq() <= sol.diagnostics.bounds())


def test_contraction_bound_holds_for_unit_beta():
    prob, _, _ = interval_problem(8, 1.0)
    sol = solve_condexp_form(prob, tol=1e-10, max_iter=25)
    rep = contraction_diagnostics(sol.diagnostics)
    assert sol.converged
    assert rep.bound_ok and rep.step_slack >= -1e-12
    assert rep.ratios_eventually_below


def test_diagnostics_table_columns():
    prob, _, _ = interval_problem(4, 0.5)
    rows = solve_condexp_form(prob).diagnostics.table()
    assert list(rows[0]) == ["iteration", "d_H", "bound_a_n", "ratio"]
    assert math.isnan(rows[0]["ratio"])


# --- martingale and integral forms -----------------------------------------


def test_martingale_term_zero_driver():
    prob, _, _ = interval_problem(3, 0.0, g=(0.0, 0.0))
    sol = solve_condexp_form(prob)
    m, rep = build_martingale_term(prob, sol.Y)
    for k in range(4):
        assert hausdorff_per_atom(m[k], conditional_expectation_set(prob.terminal, k)).max() <= 1e-12
    assert rep.m0_gap <= 1e-12


def test_martingale_term_deterministic_problem():
    from svbsde.tree import FiltrationTree

    tree = FiltrationTree(3, 1.5)
    xi, g = ConvexBody([[0, 0], [1, 1], [2, 0]]), ConvexBody([[0, 0], [0, 1]])
    prob = BSDEProblem(tree, constant_set_rv(3, xi), ConstantDriver(g))
    m, _ = build_martingale_term(prob, solve_condexp_form(prob).Y)
    target = minkowski_sum(xi, ConvexBody(1.5 * g.vertices))
    assert all(hausdorff_per_atom(s, constant_set_rv(s.level, target)).max() <= 1e-12 for s in m.slices)


def test_martingale_term_interval_problem():
    prob, _, _ = interval_problem(5, 0.5)
    _, rep = build_martingale_term(prob, solve_condexp_form(prob, tol=1e-13, max_iter=100).Y)
    assert rep.mart_residual <= 1e-9 and rep.hukuhara_gap <= 1e-9


def test_singleton_problem_has_one_representer():
    from svbsde.tree import FiltrationTree

    tree = FiltrationTree(3)
    xi = SetRV(3, tuple(ConvexBody.point([b, -b]) for b in tree.walk(3)))
    prob = BSDEProblem(tree, xi, AffineDriver(0.3, ConvexBody.point([0.1, 0.2])))
    sol = solve_integral_form(prob)
    assert len(sol.R) == 1
    assert sol.reports["integral_form"]["identity_residual"] <= 1e-9


@pytest.mark.parametrize("beta", [0.0, 1.0, -0.5])
def test_integral_form_full_enumeration(beta):
    prob, _, _ = interval_problem(2, beta)
    sol = solve_integral_form(prob, tol=1e-13, max_iter=100)
    ir = sol.reports["integral_form"]
    assert ir["enumerated"]
    assert ir["identity_residual"] <= 1e-9 and ir["y0_gap"] <= 1e-9
    assert max(ir["sampling_gap"]) <= 1e-9


def test_integral_form_sampling_gap_shrinks():
    prob, _, _ = interval_problem(6, 0.5)
    base = solve_condexp_form(prob, tol=1e-12, max_iter=100)
    gaps = []
    for n in (4, 32, 256):
        sol = solve_integral_form(prob, base, samples=n, seed=0)
        gaps.append(sol.reports["integral_form"]["sampling_gap"])
    for a, b in zip(gaps[:-1], gaps[1:]):
        assert all(y <= x + 1e-12 for x, y in zip(a, b))
    assert sum(gaps[-1]) < sum(gaps[0])


# --- uniqueness ------------------------------------------------------------


def test_uniqueness_same_solution():
    prob, _, _ = interval_problem(3, 0.5)
    y = solve_condexp_form(prob).Y
    assert uniqueness_probe(prob, y, y).max_gap == 0


def test_uniqueness_from_two_starts():
    prob = planar_problem(3, 2)
    a = solve_condexp_form(prob, tol=1e-13, max_iter=100)
    b = solve_condexp_form(prob, tol=1e-13, max_iter=100, start=terminal_mean_start(prob))
    assert uniqueness_probe(prob, a.Y, b.Y).passed


def test_uniqueness_detects_perturbation():
    prob, _, _ = interval_problem(3, 0.5)
    y = solve_condexp_form(prob).Y
    bumped = SetProcess(y.slices[:1] + (y[1].map(lambda i, b: minkowski_sum(b, I(0, 0.2))),) + y.slices[2:])
    rep = uniqueness_probe(prob, y, bumped)
    assert not rep.passed and rep.max_gap == pytest.approx(0.2)
    assert d_h(prob.tree, y, bumped) == pytest.approx(math.sqrt(prob.tree.dt) * 0.2)
