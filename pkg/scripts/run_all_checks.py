"""Run every property suite and write the verdicts to JSON.

    python scripts/run_all_checks.py --cases 200 --out results/checks.json
"""
import argparse
import json
import time
from pathlib import Path

from svbsde.checks import SUITES, CheckConfig, run_suite


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cases", type=int, default=None, help="cases per property (suite default if omitted)")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="results/checks.json")
    args = ap.parse_args()

    cfg = CheckConfig(seed=args.seed)
    rows = []
    for name in SUITES:
        t0 = time.perf_counter()
        results = run_suite(name, cfg, args.cases)
        for r in results:
            print(r.line())
        rows.append({"suite": name, "seconds": time.perf_counter() - t0, "results": [r.to_dict() for r in results]})
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(rows, indent=2))
    n_fail = sum(not r["passed"] for s in rows for r in s["results"])
    print(f"{n_fail} failing properties; written to {out}")
    return 1 if n_fail else 0


if __name__ == "__main__":
    raise SystemExit(main())
