"""Solve every shipped scenario config and run the representation demos."""
import argparse
from importlib.resources import files

from svbsde.cli import main as cli

SCENARIOS = ["zero", "affine-interval", "polygon"]
DEMOS = ["repr-demo", "repr-enumeration"]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results")
    args = ap.parse_args()
    configs = files("svbsde") / "configs"
    codes = []
    for name in SCENARIOS:
        codes.append(cli(["solve", str(configs / f"{name}.json"), "--output", f"{args.out}/{name}"]))
    for name in DEMOS:
        codes.append(cli(["repr", str(configs / f"{name}.json"), "--output", f"{args.out}/{name}"]))
    return max(codes)


if __name__ == "__main__":
    raise SystemExit(main())
