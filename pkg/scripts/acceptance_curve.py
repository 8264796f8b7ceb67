#!/usr/bin/env python3
"""Acceptance probability across the input space for growing sample sizes.

X ~ U(-2, 2), f(x) = x^2/4, sd = sigmoid, lambda = 0.36, beta = 0.05;
LOO-CV bandwidths, 100 replicate datasets per sample size.
"""

import argparse

from selreg.experiments import run_scenario


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="results/acceptance_curve")
    parser.add_argument("--seed", type=int, default=20240710)
    parser.add_argument("--replicates", type=int, default=100)
    parser.add_argument("--n", type=int, nargs="+",
                        default=[100, 200, 500, 1000])
    args = parser.parse_args()

    config = {
        "scenario": "acceptance_curve",
        "seed": args.seed,
        "lambda": 0.36,
        "beta": 0.05,
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
