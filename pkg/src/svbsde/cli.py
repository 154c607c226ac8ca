"""Command line entry point: ``svbsde solve|check|oracle|repr``.

Exit status is 0 iff everything requested passed, 1 if a check failed and
2 for invalid input or a refused oracle.
"""
from __future__ import annotations

import argparse
import sys
import time
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import io as sio
from .bsde import (
    ConvergenceWarning,
    build_martingale_term,
    condexp_residual,
    contraction_diagnostics,
    solve_condexp_form,
    solve_integral_form,
    terminal_mean_start,
    uniqueness_probe,
)
from .checks import SUITES, CheckConfig, CheckResult, run_suite
from .integrals import set_ito_integral
from .martingale import (
    SetMartingale,
    build_representers,
    martingale_selectors,
    reconstruct_integral,
    time_consistency_suite,
)
from .oracles import ORACLE_CAP, interval_endpoints, ito_by_enumeration, walk_values
from .plot import solution_svg
from .sampling import random_body
from .setrv import EnumerationCapExceeded, SetProcess, SetRV, hausdorff_per_atom, selection_count
from .tree import FiltrationTree

RESIDUAL_TOL = 1e-9
FALLBACK_SAMPLES = 256


@dataclass
class Residuals:
    """Named residuals with their tolerances, in insertion order."""

    rows: list = field(default_factory=list)

    def add(self, name: str, value: float, tol: float | None = RESIDUAL_TOL, note: str = "") -> None:
        passed = None if tol is None else bool(value <= tol)
        self.rows.append({"name": name, "value": float(value), "tol": tol, "passed": passed, "note": note})

    @property
    def passed(self) -> bool:
        return all(r["passed"] is not False for r in self.rows)

    def lines(self) -> list[str]:
        out = []
        for r in self.rows:
            tag = {True: "PASS", False: "FAIL", None: "INFO"}[r["passed"]]
            tol = "" if r["tol"] is None else f"  tol={r['tol']:.1e}"
            note = f"  [{r['note']}]" if r["note"] else ""
            out.append(f"{tag}  {r['name']:<28} {r['value']:.3e}{tol}{note}")
        return out


def _err(msg: str) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return 2


# ----------------------------------------------------------------------
# solve


def run_scenario(cfg: sio.ScenarioConfig, quiet: bool = False) -> tuple[int, Residuals]:
    prob = cfg.build_problem()
    out = Path(cfg.output)
    res = Residuals()

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", ConvergenceWarning)
        sol = solve_condexp_form(prob, tol=cfg.solver.tol, max_iter=cfg.solver.max_iter)
        other = solve_condexp_form(
            prob, tol=cfg.solver.tol, max_iter=cfg.solver.max_iter, start=terminal_mean_start(prob)
        )
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)

    res.add("converged", 0.0 if sol.converged else 1.0, 0.0, f"{sol.diagnostics.iterations} iterations")
    res.add("condexp_residual", condexp_residual(prob, sol.Y))
    try:
        _, mrep = build_martingale_term(prob, sol.Y)
        res.add("martingale_identity", max(mrep.mart_residual, mrep.hukuhara_gap))
        res.add("m0_gap", mrep.m0_gap)
    except ValueError as exc:
        res.add("martingale_identity", float("inf"), note=str(exc))

    samples = cfg.representation.samples
    if samples is None and selection_count(sol.Y[prob.tree.steps]) > cfg.representation.cap:
        samples = FALLBACK_SAMPLES
    try:
        sol = solve_integral_form(prob, sol, cap=cfg.representation.cap, samples=samples, seed=cfg.seed)
        ir = sol.reports["integral_form"]
        if ir["enumerated"]:
            res.add("integral_identity", ir["identity_residual"], note=f"{ir['n_selectors']} selectors")
            res.add("y0_gap", ir["y0_gap"])
        else:
            note = f"sampled {ir['n_selectors']} selectors: inner approximation"
            res.add("integral_identity", ir["identity_residual"], None, note)
            res.add("sampling_gap", max(ir["sampling_gap"]), None, note)
    except (EnumerationCapExceeded, ValueError) as exc:
        res.add("integral_identity", float("nan"), None, f"skipped: {exc}")
    res.add("uniqueness_gap", uniqueness_probe(prob, sol.Y, other.Y).max_gap)
    con = None
    if sol.diagnostics.iterations >= 3:
        con = contraction_diagnostics(sol.diagnostics)
        res.add("contraction_bound_excess", max(float(np.max(con.sup_sq - con.bounds)), 0.0))
        res.add("one_step_estimate_excess", max(-con.step_slack, 0.0) + 0.0)

    check_results: list[CheckResult] = []
    for name in cfg.checks:
        check_results += run_suite(name, CheckConfig(seed=cfg.seed))

    if "json" in cfg.formats:
        sio.write_text(out / "solution.json", sio.dumps(sio.solution_to_dict(cfg, prob, sol)))
        report = {
            "residuals": res.rows,
            "contraction": None if con is None else con.to_dict(),
            "reports": sol.reports,
            "checks": [_stable(r) for r in check_results],
        }
        sio.write_text(out / "residuals.json", sio.dumps(report))
    if "csv" in cfg.formats:
        sio.write_text(out / "diagnostics.csv", sio.diagnostics_csv(sol))
        if prob.dim == 1:
            lo, hi = sio.solution_endpoints(sol)
            sio.write_text(out / "endpoints.csv", sio.endpoints_csv(prob.tree, lo, hi))
    if "svg" in cfg.formats and prob.dim in (1, 2):
        sio.write_text(out / "solution.svg", solution_svg(prob.tree, sol.Y, cfg.name))

    ok = res.passed and all(r.passed for r in check_results)
    if not quiet:
        print(f"{cfg.name}: N={prob.tree.steps} T={prob.tree.horizon:g} d={prob.dim} -> {out}")
        for line in res.lines():
            print(line)
        for r in check_results:
            print(r.line())
        print("OK" if ok else "FAILED")
    return (0 if ok else 1), res


def _stable(r: CheckResult) -> dict:
    d = r.to_dict()
    d.pop("seconds")  # keeps the artifact byte-identical across runs
    return d


def cmd_solve(args) -> int:
    try:
        cfg = sio.load_config(args.config, output=args.output)
    except (sio.ConfigError, OSError) as exc:
        return _err(str(exc))
    code, _ = run_scenario(cfg)
    return code


# ----------------------------------------------------------------------
# check


def cmd_check(args) -> int:
    names = list(SUITES) if args.suites == ["all"] else args.suites
    unknown = [s for s in names if s not in SUITES]
    if unknown:
        return _err(f"unknown suite {unknown[0]!r}; available: {', '.join(SUITES)}")
    cfg = CheckConfig(cases=args.cases, seed=args.seed, tolerance=args.tolerance)
    results = []
    for name in names:
        t0 = time.perf_counter()
        rs = run_suite(name, cfg, args.cases if args.cases_given else None)
        for r in rs:
            print(r.line(), flush=True)
        results += rs
        if args.verbose:
            print(f"  ({name}: {time.perf_counter() - t0:.2f}s)")
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} properties passed")
    if args.json:
        sio.write_text(Path(args.json), sio.dumps([_stable(r) for r in results]))
    return 1 if failed else 0


# ----------------------------------------------------------------------
# oracle


def interval_oracle_from_problem(problem: dict):
    """Endpoints of an affine interval BSDE from the scalar recursion only."""
    tree_spec = sio._require(problem, "tree", "problem")
    steps = sio._require(tree_spec, "steps", "problem.tree")
    horizon = float(tree_spec.get("horizon", 1.0))
    term = sio._require(problem, "terminal", "problem")
    if sio._require(term, "kind", "problem.terminal") != "bt_interval":
        raise sio.ConfigError("interval-endpoints needs a bt_interval terminal")
    bt = walk_values(steps, horizon)
    lower = sio.eval_poly(sio._poly(sio._require(term, "lower", "problem.terminal"), "lower"), bt)
    upper = sio.eval_poly(sio._poly(sio._require(term, "upper", "problem.terminal"), "upper"), bt)
    drv = sio._require(problem, "driver", "problem")
    kind = sio._require(drv, "kind", "problem.driver")
    beta, g = 0.0, (0.0, 0.0)
    if kind in ("constant", "affine"):
        gd = sio._require(drv, "G", "problem.driver")
        if "vertices" not in gd:
            raise sio.ConfigError("interval-endpoints needs a constant G")
        v = np.asarray(gd["vertices"], dtype=float).ravel()
        g = (float(v.min()), float(v.max()))
        if kind == "affine":
            beta = float(sio._require(drv, "beta", "problem.driver"))
    elif kind != "zero":
        raise sio.ConfigError(f"problem.driver.kind {kind!r} is not supported by the oracle")
    return FiltrationTree(steps, horizon), interval_endpoints(steps, horizon, beta, g, lower, upper)


def _random_integrand(rng, steps: int, dim: int, level: int, cap: int) -> SetProcess:
    """Random integrand on levels ``< level``; refuses as soon as the selection count passes ``cap``."""
    count, slices = 1, []
    for k in range(steps):
        bodies = []
        for _ in range(1 << k):
            b = random_body(rng, dim)
            if k < level:
                count *= b.n_vertices
                if count > cap:
                    raise EnumerationCapExceeded(
                        f"selection enumeration up to level {level} needs more than {cap} cases (cap); refusing"
                    )
            bodies.append(b)
        slices.append(SetRV(k, tuple(bodies)))
    return SetProcess(tuple(slices))


def cmd_oracle(args) -> int:
    out = Path(args.out)
    if args.kind == "interval-endpoints":
        if args.config:
            try:
                data = sio.load_json(args.config)
                tree, (lo, hi) = interval_oracle_from_problem(sio._require(data, "problem", "config"))
            except (sio.ConfigError, OSError, ValueError) as exc:
                return _err(str(exc))
        else:
            if args.steps is None:
                return _err("interval-endpoints needs --config or --steps")
            problem = {
                "tree": {"steps": args.steps, "horizon": args.horizon},
                "terminal": {"kind": "bt_interval", "lower": args.lower, "upper": args.upper},
                "driver": {"kind": "affine", "beta": args.beta, "G": {"dim": 1, "vertices": [[args.g[0]], [args.g[1]]]}},
            }
            try:
                tree, (lo, hi) = interval_oracle_from_problem(problem)
            except (sio.ConfigError, ValueError) as exc:
                return _err(str(exc))
        sio.write_text(out, sio.endpoints_csv(tree, lo, hi))
        print(f"interval endpoints for N={tree.steps} written to {out}")
        return 0

    # selection-enumeration
    steps = 2 if args.steps is None else args.steps
    level = steps if args.level is None else args.level
    if not 0 <= level <= steps:
        return _err("--level must lie in 0..steps")
    tree = FiltrationTree(steps, args.horizon)
    rng = np.random.default_rng(args.seed)
    try:
        if level > 24:
            raise EnumerationCapExceeded(f"a depth-{level} enumeration is far beyond the cap {args.cap}; refusing")
        psi = _random_integrand(rng, steps, args.dim, level, args.cap)
        brute = ito_by_enumeration(tree, psi, level, cap=args.cap)
    except EnumerationCapExceeded as exc:
        return _err(str(exc))
    formula = set_ito_integral(tree, psi, level)
    gap = float(hausdorff_per_atom(brute, formula).max())
    payload = {
        "steps": steps,
        "horizon": args.horizon,
        "level": level,
        "seed": args.seed,
        "integrand": psi.to_dict(),
        "enumeration_hulls": brute.to_dict(),
        "minkowski_formula": formula.to_dict(),
        "max_gap": gap,
    }
    sio.write_text(out, sio.dumps(payload))
    print(f"selection enumeration N={steps} level={level}: max gap {gap:.3e} -> {out}")
    return 0


# ----------------------------------------------------------------------
# repr


def run_repr(data: dict, output: str | None = None, quiet: bool = False) -> tuple[int, dict]:
    seed = sio._require(data, "seed", "config")
    tree = sio.tree_from_spec(sio._require(data, "tree", "config"))
    xi = sio.terminal_from_spec(sio._require(data, "terminal", "config"), tree)
    out = Path(output or sio._require(data, "output", "config"))
    counts = data.get("samples")
    cap = int(data.get("cap", ORACLE_CAP))
    m = SetMartingale.from_terminal(xi)
    result: dict = {"seed": seed, "steps": tree.steps, "martingale": m.to_dict()}
    rows = []
    ok = True
    if counts is None:
        sels = martingale_selectors(m, cap=cap)
        reps = build_representers(tree, sels)
        per = [hausdorff_per_atom(reconstruct_integral(tree, reps, k), m[k]) for k in range(tree.steps + 1)]
        worst = max(float(h.max()) for h in per)
        mean = float(np.mean([np.sqrt(np.mean(h * h)) for h in per]))
        tc = time_consistency_suite(tree, m, sels)
        result.update(mode="enumeration", selectors=len(sels), time_consistency=tc.to_dict())
        rows.append([len(sels), worst, mean])
        ok = worst <= RESIDUAL_TOL and tc.passed
    else:
        counts = sorted(int(c) for c in counts)
        sels = martingale_selectors(m, samples=counts[-1], seed=seed)
        for c in counts:
            reps = build_representers(tree, sels[:c])
            per = [hausdorff_per_atom(reconstruct_integral(tree, reps, k), m[k]) for k in range(tree.steps + 1)]
            rows.append([c, max(float(h.max()) for h in per), float(np.mean([np.sqrt(np.mean(h * h)) for h in per]))])
        worst = [r[1] for r in rows]
        mean = [r[2] for r in rows]
        nonincreasing = all(b <= a for a, b in zip(worst, worst[1:]))
        decreasing = all(b < a for a, b in zip(mean, mean[1:]))
        result.update(mode="sampling", worst_gap_nonincreasing=nonincreasing, mean_gap_decreasing=decreasing)
        ok = nonincreasing and decreasing
    result["gaps"] = [{"selectors": c, "worst_gap": w, "mean_gap": g} for c, w, g in rows]
    result["passed"] = ok
    sio.write_text(out / "repr.json", sio.dumps(result))
    sio.write_text(out / "repr_gaps.csv", sio.csv_text(["selectors", "worst_gap", "mean_gap"], rows))
    if not quiet:
        for c, w, g in rows:
            print(f"selectors={c:<8d} worst_gap={w:.3e}  mean_gap={g:.3e}")
        print("OK" if ok else "FAILED")
    return (0 if ok else 1), result


def cmd_repr(args) -> int:
    try:
        data = sio.load_json(args.config)
        code, _ = run_repr(data, args.output)
    except (sio.ConfigError, OSError) as exc:
        return _err(str(exc))
    except EnumerationCapExceeded as exc:
        return _err(f"{exc}; set 'samples' in the config")
    return code


# ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="svbsde", description="Set-valued BSDEs on a binomial tree.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="solve a scenario config and write artifacts")
    s.add_argument("config")
    s.add_argument("--output", help="override the output directory of the config")
    s.set_defaults(fn=cmd_solve)

    c = sub.add_parser("check", help="run randomized property suites")
    c.add_argument("suites", nargs="+", help=f"suite names or 'all': {', '.join(SUITES)}")
    c.add_argument("--cases", type=int, default=None, help="cases per property (default 500, suite-specific)")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--tolerance", type=float, default=None, help="override every tolerance (negative control)")
    c.add_argument("--json", help="also write results as JSON")
    c.add_argument("-v", "--verbose", action="store_true")
    c.set_defaults(fn=cmd_check)

    o = sub.add_parser("oracle", help="write brute-force reference results")
    o.add_argument("kind", choices=["interval-endpoints", "selection-enumeration"])
    o.add_argument("--out", required=True)
    o.add_argument("--config", help="scenario config (interval-endpoints)")
    o.add_argument("--steps", type=int)
    o.add_argument("--horizon", type=float, default=1.0)
    o.add_argument("--beta", type=float, default=0.0)
    o.add_argument("--g", type=float, nargs=2, default=(0.0, 0.0), metavar=("G1", "G2"))
    o.add_argument("--lower", type=float, nargs="+", default=[0.0], help="coefficients of the lower endpoint in B_T")
    o.add_argument("--upper", type=float, nargs="+", default=[0.0], help="coefficients of the upper endpoint in B_T")
    o.add_argument("--level", type=int, help="integration level (selection-enumeration)")
    o.add_argument("--dim", type=int, default=1, choices=[1, 2])
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--cap", type=int, default=ORACLE_CAP)
    o.set_defaults(fn=cmd_oracle)

    r = sub.add_parser("repr", help="martingale representation demo")
    r.add_argument("config")
    r.add_argument("--output")
    r.set_defaults(fn=cmd_repr)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "check":
        args.cases_given = args.cases is not None
        if args.cases is None:
            args.cases = 500
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
