#!/usr/bin/env python3
"""Excess risk and acceptance at n = 100 across significance levels.

beta runs from 0.01 to 0.5; the 0.5 column is the plugin baseline. All
levels score the same 100 replicate datasets.
"""

import argparse

from selreg.experiments import run_scenario


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="results/excess_risk_vs_beta")
    parser.add_argument("--seed", type=int, default=20240712)
    parser.add_argument("--replicates", type=int, default=100)
    parser.add_argument("--n", type=int, default=100)
    parser.add_argument("--betas", type=float, nargs="+",
                        default=[0.01, 0.05, 0.1, 0.2, 0.35, 0.5])
    args = parser.parse_args()

    config = {
        "scenario": "excess_risk_vs_beta",
        "seed": args.seed,
        "lambda": 0.36,
        "beta_list": args.betas,
        "n": args.n,
        "replicates": args.replicates,
        "x_grid": {"linspace": [-2, 2, 81]},
        "synthetic": {"covariates": [{"uniform": [-2, 2]}],
                      "mean": "quadratic", "sd": "sigmoid"},
    }
    manifest = run_scenario(config, args.out_dir)
    print("\n".join(manifest["outputs"]))


if __name__ == "__main__":
    main()
