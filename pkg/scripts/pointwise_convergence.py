#!/usr/bin/env python3
"""Excess risk at the five diagnostic points under the bandwidth power law.

h = c * n^(-1/5); the CSV reports excess against n*h, separating the
exponential regime (sigma^2 > lambda) from the polynomial one.
"""

import argparse

from selreg.experiments import run_scenario


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="results/pointwise_convergence")
    parser.add_argument("--seed", type=int, default=20240713)
    parser.add_argument("--replicates", type=int, default=100)
    parser.add_argument("--n", type=int, nargs="+",
                        default=[10, 20, 50, 100, 200, 500, 1000, 2000, 5000])
    parser.add_argument("--c", type=float, default=0.5)
    args = parser.parse_args()

    config = {
        "scenario": "pointwise_convergence",
        "seed": args.seed,
        "lambda": 0.36,
        "beta": 0.05,
        "n": args.n,
        "replicates": args.replicates,
        "h": {"power": {"c": args.c, "exponent": -0.2}},
        "synthetic": {"covariates": [{"uniform": [-2, 2]}],
                      "mean": "quadratic", "sd": "sigmoid"},
    }
    manifest = run_scenario(config, args.out_dir)
    print("\n".join(manifest["outputs"]))


if __name__ == "__main__":
    main()
