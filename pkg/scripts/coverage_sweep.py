#!/usr/bin/env python3
"""Risk-coverage sweep on a CSV dataset under a pivot-feature shift split.

Defaults target the bundled airfoil-like benchmark (generate it first with
make_airfoil_like.py, or point --csv at any numeric table). For every
abstention cost the run reports the accepted fraction of test points and
the MSE over the accepted set, per significance level.
"""

import argparse

import numpy as np

from selreg.experiments import run_scenario


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--csv", default="data/airfoil_like.csv")
    parser.add_argument("--target-col", type=int, default=5)
    parser.add_argument("--has-header", action="store_true")
    parser.add_argument("--pivot", type=int, default=1)
    parser.add_argument("--out-dir", default="results/coverage_sweep")
    parser.add_argument("--seed", type=int, default=99)
    parser.add_argument("--lambda-max", type=float, default=160.0)
    parser.add_argument("--steps", type=int, default=25)
    parser.add_argument("--betas", type=float, nargs="+", default=[0.05, 0.5])
    parser.add_argument("--zs", type=float, nargs="+", default=None,
                        help="sweep z values directly instead of betas")
    args = parser.parse_args()

    lambdas = [0.0] + list(np.geomspace(args.lambda_max / 300.0,
                                        args.lambda_max, args.steps - 1))
    config = {
        "scenario": "coverage_mse_sweep",
        "seed": args.seed,
        "lambdas": [float(v) for v in lambdas],
        "h": "loocv",
        "data": {"csv": args.csv, "target_column": args.target_col,
                 "has_header": args.has_header, "pivot_feature": args.pivot,
                 "standardize": True},
    }
    if args.zs is not None:
        config["z_list"] = args.zs
    else:
        config["beta_list"] = args.betas
    manifest = run_scenario(config, args.out_dir)
    print("\n".join(manifest["outputs"]))


if __name__ == "__main__":
    main()
