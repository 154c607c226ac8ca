"""Picard solver for set-valued BSDEs with a driver free of ``Z``.

The conditional-expectation form is discretized as

    Y_k = E[ xi + sum_{j >= k} dt f(j, Y_j) | F_k ],

with a left-endpoint Minkowski sum that uses the node's own ``Y``. One
Picard step with the previous iterate frozen inside ``f`` is the backward
recursion ``Y_k = dt f(k, Yprev_k) + E[Y_{k+1} | F_k]``, ``Y_N = xi``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Mapping

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
from .integrals import RepresenterSet, aumann_time_integral
from .martingale import (
    SetMartingale,
    build_representers,
    martingale_selectors,
    reconstruct_integral,
)
from .setrv import (
    ENUMERATION_CAP,
    SetProcess,
    SetRV,
    conditional_expectation_set,
    constant_process,
    constant_set_rv,
    hausdorff_per_atom,
)
from .tree import FiltrationTree

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 50


class ConvergenceWarning(RuntimeWarning):
    pass


# ----------------------------------------------------------------------
# drivers


class Driver:
    """Coefficient ``f(t_k, node, A)``; subclasses set ``lipschitz``."""

    lipschitz: float = 0.0

    def eval(self, k: int, node: int, body: ConvexBody) -> ConvexBody:
        raise NotImplementedError

    def zero_value(self, k: int, node: int, dim: int) -> ConvexBody:
        return self.eval(k, node, ConvexBody.zero(dim))

    def to_dict(self) -> dict:
        raise NotImplementedError


class ConstantDriver(Driver):
    """``f = G`` regardless of ``Y``."""

    lipschitz = 0.0

    def __init__(self, g: ConvexBody):
        self.g = g

    def eval(self, k, node, body):
        return self.g

    def to_dict(self):
        return {"kind": "constant", "G": self.g.to_dict()}


class AffineDriver(Driver):
    """``f(t, w, A) = beta * A + G(t, w)``; Lipschitz with ``K = |beta|``.

    ``g`` is a body, a mapping from ``"UD.."`` node paths to bodies, or a
    callable ``(k, node) -> body``.
    """

    def __init__(self, beta: float, g):
        self.beta = float(beta)
        self.lipschitz = abs(self.beta)
        if isinstance(g, ConvexBody):
            self._g = lambda k, node: g
        elif isinstance(g, Mapping):
            table = {FiltrationTree.node_of(p): b for p, b in g.items()}
            self._table = table

            def lookup(k, node):
                try:
                    return table[(k, node)]
                except KeyError:
                    raise KeyError(f"driver map has no entry for node {FiltrationTree.path(k, node)!r}") from None

            self._g = lookup
        elif callable(g):
            self._g = g
        else:
            raise TypeError("G must be a ConvexBody, a path-keyed mapping or a callable")
        self._g_spec = g

    def g(self, k: int, node: int) -> ConvexBody:
        return self._g(k, node)

    def eval(self, k, node, body):
        return minkowski_sum(scale(self.beta, body), self._g(k, node))

    def to_dict(self):
        g = self._g_spec
        if isinstance(g, ConvexBody):
            gd = g.to_dict()
        elif isinstance(g, Mapping):
            gd = {p: b.to_dict() for p, b in sorted(g.items())}
        else:
            raise ValueError("callable drivers are not serializable")
        return {"kind": "affine", "beta": self.beta, "G": gd}


@dataclass(frozen=True)
class BSDEProblem:
    tree: FiltrationTree
    terminal: SetRV
    driver: Driver

    def __post_init__(self):
        if self.terminal.level != self.tree.steps:
            raise ValueError("terminal value must live on the last level of the tree")

    @property
    def dim(self) -> int:
        return self.terminal.dim

    def constant_c(self) -> float:
        """``2 [E|xi|^2 + T sum_k dt E|f(t_k, {0})|^2]``."""
        tree = self.tree
        exi = float(np.mean(self.terminal.norms() ** 2))
        acc = 0.0
        for k in range(tree.steps):
            f0 = [body_norm(self.driver.zero_value(k, i, self.dim)) ** 2 for i in range(1 << k)]
            acc += tree.dt * float(np.mean(f0))
        return 2.0 * (exi + tree.horizon * acc)

    def bound(self, n: int) -> float:
        """``C (T K^2)^{n-1} T^{n-1} / (n-1)!`` for iterate ``n >= 1``."""
        T, K = self.tree.horizon, self.driver.lipschitz
        return self.constant_c() * (T * K * K) ** (n - 1) * T ** (n - 1) / math.factorial(n - 1)


# ----------------------------------------------------------------------
# Picard scheme


def zero_start(prob: BSDEProblem) -> SetProcess:
    return constant_process(prob.tree.steps + 1, ConvexBody.zero(prob.dim))


def driver_process(prob: BSDEProblem, y: SetProcess) -> SetProcess:
    """``f(t_k, node, Y_k)`` on levels ``0 .. N-1``."""
    return SetProcess(
        tuple(
            SetRV(k, tuple(prob.driver.eval(k, i, b) for i, b in enumerate(y[k].bodies)))
            for k in range(prob.tree.steps)
        )
    )


def picard_step(y_prev: SetProcess, prob: BSDEProblem) -> SetProcess:
    """One Picard step: ``Y_k = dt f(k, Yprev_k) + E[Y_{k+1} | F_k]``."""
    tree, dt = prob.tree, prob.tree.dt
    f = driver_process(prob, y_prev)
    cur = prob.terminal.bodies
    out = [prob.terminal]
    for k in range(tree.steps - 1, -1, -1):
        cur = tuple(
            minkowski_sum(scale(dt, f[k][i]), midpoint_average(cur[2 * i], cur[2 * i + 1])) for i in range(1 << k)
        )
        out.append(SetRV(k, cur))
    return SetProcess(tuple(out[::-1]))


def picard_step_pathwise(y_prev: SetProcess, prob: BSDEProblem) -> SetProcess:
    """Cross-check of :func:`picard_step` straight from the definition.

    Per level-``k`` atom: average over terminal descendants of
    ``xi(w) + sum_{j >= k} dt f(j, node_j(w), Yprev(node_j(w)))``.
    """
    tree = prob.tree
    N = tree.steps
    f = driver_process(prob, y_prev)
    slices = []
    for k in range(N + 1):
        tail = aumann_time_integral(tree, f, k, N)
        total = [minkowski_sum(prob.terminal[w], tail[w]) for w in range(1 << N)]
        block = 1 << (N - k)
        w = np.full(block, 1.0 / block)
        slices.append(
            SetRV(k, tuple(weighted_minkowski_average(total[a * block : (a + 1) * block], w) for a in range(1 << k)))
        )
    return SetProcess(tuple(slices))


def picard_step_additive(y_prev: SetProcess, prob: BSDEProblem) -> SetProcess:
    """Cross-check via ``E[xi|F_k] + sum_{j >= k} E[dt f_j | F_k]``."""
    tree = prob.tree
    N, dt = tree.steps, tree.dt
    f = driver_process(prob, y_prev)
    slices = []
    for k in range(N + 1):
        acc = conditional_expectation_set(prob.terminal, k)
        for j in range(k, N):
            acc = acc + conditional_expectation_set(f[j].scaled(dt), k)
        slices.append(acc)
    return SetProcess(tuple(slices))


def level_sq_distances(y1: SetProcess, y2: SetProcess) -> np.ndarray:
    """``E h^2(Y1_k, Y2_k)`` for every level ``k``."""
    return np.array([float(np.mean(hausdorff_per_atom(a, b) ** 2)) for a, b in zip(y1.slices, y2.slices)])


def d_h(tree: FiltrationTree, y1: SetProcess, y2: SetProcess) -> float:
    """``(sum_{k<N} dt E h^2(Y1_k, Y2_k))^{1/2}``, the discrete ``d_H`` metric."""
    sq = level_sq_distances(y1, y2)[: tree.steps]
    return float(np.sqrt(tree.dt * sq.sum()))


@dataclass
class Diagnostics:
    """Per-iteration record of a Picard run.

    ``level_sq[n-1][k]`` is ``E h^2(Y^n_{t_k}, Y^{n-1}_{t_k})``; ``d_h[n-1]``
    the ``d_H`` distance between iterates ``n`` and ``n-1``.
    """

    d_h: list = field(default_factory=list)
    level_sq: list = field(default_factory=list)
    constant_c: float = 0.0
    lipschitz: float = 0.0
    horizon: float = 1.0
    dt: float = 1.0

    @property
    def iterations(self) -> int:
        return len(self.d_h)

    def sup_sq(self) -> np.ndarray:
        """``sup_t E h^2(Y^n_t, Y^{n-1}_t)`` over the grid ``t_0 .. t_N``."""
        return np.array([float(np.max(s)) for s in self.level_sq])

    def bounds(self) -> np.ndarray:
        T, K, C = self.horizon, self.lipschitz, self.constant_c
        return np.array(
            [C * (T * K * K) ** (n - 1) * T ** (n - 1) / math.factorial(n - 1) for n in range(1, self.iterations + 1)]
        )

    def ratios(self) -> np.ndarray:
        """``sqrt(D_{n+1} / D_n)`` with ``D_n = sup_t E h^2``; NaN where ``D_n = 0``."""
        d = self.sup_sq()
        with np.errstate(divide="ignore", invalid="ignore"):
            r = np.sqrt(d[1:] / d[:-1])
        return np.where(d[:-1] > 0, r, np.nan)

    def ratio_bounds(self) -> np.ndarray:
        """``T K / sqrt(n)`` paired with ``ratios()[n-1]``."""
        n = np.arange(1, self.iterations)
        return self.horizon * self.lipschitz / np.sqrt(n)

    def table(self) -> list[dict]:
        ratios = self.ratios()
        bounds = self.bounds()
        rows = []
        for n in range(1, self.iterations + 1):
            rows.append(
                {
                    "iteration": n,
                    "d_H": self.d_h[n - 1],
                    "bound_a_n": math.sqrt(bounds[n - 1]),
                    "ratio": float(ratios[n - 2]) if n >= 2 else float("nan"),
                }
            )
        return rows


@dataclass
class BSDESolution:
    Y: SetProcess
    diagnostics: Diagnostics
    converged: bool
    residual: float = float("nan")
    M: SetMartingale | None = None
    R: RepresenterSet | None = None
    reports: dict = field(default_factory=dict)


def condexp_residual(prob: BSDEProblem, y: SetProcess) -> float:
    """Worst per-atom ``h(Y_k, E[xi + sum_{j>=k} dt f(Y_j) | F_k])``."""
    rhs = picard_step(y, prob)
    return max(float(hausdorff_per_atom(a, b).max()) for a, b in zip(y.slices, rhs.slices))


def solve_condexp_form(
    prob: BSDEProblem,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    start: SetProcess | None = None,
) -> BSDESolution:
    """Picard iteration from ``Y^0 = {0}`` (or ``start``) until ``d_H <= tol``.

    Non-convergence is reported through ``converged=False`` and a
    :class:`ConvergenceWarning`, never silently.
    """
    if prob.driver.lipschitz * prob.tree.dt >= 1.0:
        warnings.warn(
            f"K dt = {prob.driver.lipschitz * prob.tree.dt:.3g} >= 1: the one-step map is not a contraction "
            "and Picard iteration may diverge; refine the tree",
            ConvergenceWarning,
            stacklevel=2,
        )
    y = zero_start(prob) if start is None else start
    diag = Diagnostics(
        constant_c=prob.constant_c(),
        lipschitz=prob.driver.lipschitz,
        horizon=prob.tree.horizon,
        dt=prob.tree.dt,
    )
    converged = False
    for _ in range(max_iter):
        y_new = picard_step(y, prob)
        sq = level_sq_distances(y_new, y)
        diag.level_sq.append(sq)
        diag.d_h.append(float(np.sqrt(prob.tree.dt * sq[: prob.tree.steps].sum())))
        y = y_new
        if diag.d_h[-1] <= tol:
            converged = True
            break
    if not converged:
        warnings.warn(
            f"Picard iteration did not reach d_H <= {tol:g} in {max_iter} iterations "
            f"(last d_H = {diag.d_h[-1]:.3e})",
            ConvergenceWarning,
            stacklevel=2,
        )
    return BSDESolution(Y=y, diagnostics=diag, converged=converged, residual=condexp_residual(prob, y))


# ----------------------------------------------------------------------
# diagnostics


@dataclass
class ContractionReport:
    sup_sq: np.ndarray
    bounds: np.ndarray
    ratios: np.ndarray
    ratio_bounds: np.ndarray
    step_slack: float
    bound_ok: bool
    ratios_eventually_below: bool
    first_ratio_below: int | None

    def to_dict(self) -> dict:
        return {
            "bound_ok": self.bound_ok,
            "ratios_eventually_below": self.ratios_eventually_below,
            "first_ratio_below": self.first_ratio_below,
            "step_slack": self.step_slack,
            "sup_sq": self.sup_sq.tolist(),
            "bounds": self.bounds.tolist(),
        }


def contraction_diagnostics(diag: Diagnostics, tol: float = 1e-9, floor: float = 1e-24) -> ContractionReport:
    """Compare measured iterate distances with the factorial bound.

    ``floor`` excludes ratios between squared distances at rounding level,
    where the sequence stops carrying information.
    """
    if diag.iterations < 3:
        raise ValueError("contraction diagnostics need at least 3 iterations")
    sup_sq = diag.sup_sq()
    bounds = diag.bounds()
    bound_ok = bool(np.all(sup_sq <= bounds + tol))

    # one-step estimate: E h^2(Y^n_k, Y^{n-1}_k) <= T K^2 sum_{j>=k} dt E h^2(Y^{n-1}_j, Y^{n-2}_j)
    T, K, dt = diag.horizon, diag.lipschitz, diag.dt
    slack = np.inf
    for prev, cur in zip(diag.level_sq[:-1], diag.level_sq[1:]):
        p = prev[:-1]
        tails = T * K * K * dt * np.cumsum(p[::-1])[::-1]
        slack = min(slack, float(np.min(tails - cur[:-1])))

    ratios = diag.ratios()
    rb = diag.ratio_bounds()
    informative = (sup_sq[1:] > floor) & np.isfinite(ratios)
    below = ratios < rb
    first = None
    idx = np.flatnonzero(informative)
    if idx.size:
        # smallest n0 such that every informative ratio from n0 on is below its bound
        ok_from = idx[-1] + 1
        for i in idx[::-1]:
            if below[i]:
                ok_from = i
            else:
                break
        if ok_from <= idx[-1]:
            first = int(ok_from) + 1
    return ContractionReport(sup_sq, bounds, ratios, rb, slack, bound_ok, first is not None, first)


# ----------------------------------------------------------------------
# martingale and integral forms


def forward_driver_integral(prob: BSDEProblem, y: SetProcess) -> list[SetRV]:
    """``A_k = int_0^{t_k} f(s, Y_s) ds`` for ``k = 0 .. N``."""
    f = driver_process(prob, y)
    return [aumann_time_integral(prob.tree, f, 0, k) for k in range(prob.tree.steps + 1)]


@dataclass
class MartingaleFormReport:
    mart_residual: float
    m0_gap: float
    hukuhara_gap: float

    def to_dict(self):
        return {"mart_residual": self.mart_residual, "m0_gap": self.m0_gap, "hukuhara_gap": self.hukuhara_gap}


def build_martingale_term(prob: BSDEProblem, y: SetProcess, tol: float = 1e-9):
    """``M_t = E[xi + int_0^T f(s, Y_s) ds | F_t]`` and the identity checks.

    Verifies per terminal atom ``Y_t + M_T = xi + int_t^T f + M_t``, the
    initial condition ``M_0 = Y_0``, and ``Y_t = M_t (-) int_0^t f`` with an
    existence-checked Hukuhara difference. Raises ``ValueError`` when a
    residual exceeds ``tol``.
    """
    tree = prob.tree
    N = tree.steps
    f = driver_process(prob, y)
    a = forward_driver_integral(prob, y)
    m_terminal = prob.terminal + a[N]
    m = SetMartingale.from_terminal(m_terminal)

    worst = 0.0
    for k in range(N + 1):
        tail = aumann_time_integral(tree, f, k, N)
        lhs = y[k].lift(N) + m[N]
        rhs = prob.terminal + tail + m[k].lift(N)
        worst = max(worst, float(hausdorff_per_atom(lhs, rhs).max()))
    m0_gap = hausdorff_distance(m[0][0], y[0][0])

    huk = 0.0
    for k in range(N + 1):
        for i, (mb, ab) in enumerate(zip(m[k].bodies, a[k].bodies)):
            c = hukuhara_difference(mb, ab)
            if c is None:
                raise ValueError(
                    f"M_t (-) int_0^t f does not exist at node {FiltrationTree.path(k, i)!r}; Y is not a solution"
                )
            huk = max(huk, hausdorff_distance(c, y[k][i]))
    report = MartingaleFormReport(worst, m0_gap, huk)
    if max(worst, m0_gap, huk) > tol:
        raise ValueError(f"martingale form check failed: {report.to_dict()}")
    return m, report


@dataclass
class IntegralFormReport:
    identity_residual: float
    y0_gap: float
    sampling_gap: list
    n_selectors: int
    enumerated: bool

    def to_dict(self):
        return {
            "identity_residual": self.identity_residual,
            "y0_gap": self.y0_gap,
            "sampling_gap": self.sampling_gap,
            "n_selectors": self.n_selectors,
            "enumerated": self.enumerated,
        }


def solve_integral_form(
    prob: BSDEProblem,
    solution: BSDESolution | None = None,
    cap: int = ENUMERATION_CAP,
    samples: int | None = None,
    seed: int | None = None,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> BSDESolution:
    """Attach ``M`` and the representer set ``R`` to a conditional-form solution.

    Checks, per terminal atom and every ``t``,
    ``Y_t + int_{0-}^T R o dB = xi + int_t^T f + int_{0-}^t R o dB`` and
    ``Y_0 = hull pi_xi[R]``. Under sampling the integrals are inner
    approximations and the report carries the per-level gap to ``M``.
    """
    if solution is None:
        solution = solve_condexp_form(prob, tol=tol, max_iter=max_iter)
    tree = prob.tree
    N = tree.steps
    y = solution.Y
    m, mreport = build_martingale_term(prob, y)
    selectors = martingale_selectors(m, cap=cap, samples=samples, seed=seed)
    reps = build_representers(tree, selectors)
    recon = [reconstruct_integral(tree, reps, k) for k in range(N + 1)]
    gaps = [float(hausdorff_per_atom(r, m[k]).max()) for k, r in enumerate(recon)]

    f = driver_process(prob, y)
    worst = 0.0
    for k in range(N + 1):
        tail = aumann_time_integral(tree, f, k, N)
        lhs = y[k].lift(N) + recon[N]
        rhs = prob.terminal + tail + recon[k].lift(N)
        worst = max(worst, float(hausdorff_per_atom(lhs, rhs).max()))
    y0 = ConvexBody(np.stack([x.values[0] for x in reps.xs]))
    report = IntegralFormReport(worst, hausdorff_distance(y0, y[0][0]), gaps, len(selectors), samples is None)
    solution.M = m
    solution.R = reps
    solution.reports["martingale_form"] = mreport.to_dict()
    solution.reports["integral_form"] = report.to_dict()
    return solution


@dataclass
class UniquenessReport:
    d_h: float
    max_gap: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_gap <= self.tol

    def to_dict(self):
        return {"d_H": self.d_h, "max_gap": self.max_gap, "tol": self.tol, "passed": self.passed}


def uniqueness_probe(prob: BSDEProblem, y1: SetProcess, y2: SetProcess, tol: float = 1e-9) -> UniquenessReport:
    gap = max(float(hausdorff_per_atom(a, b).max()) for a, b in zip(y1.slices, y2.slices))
    return UniquenessReport(d_h(prob.tree, y1, y2), gap, tol)


def terminal_mean_start(prob: BSDEProblem) -> SetProcess:
    """Alternative Picard start: ``E[xi]`` at every node."""
    mean = conditional_expectation_set(prob.terminal, 0)[0]
    return SetProcess(tuple(constant_set_rv(k, mean) for k in range(prob.tree.steps + 1)))
