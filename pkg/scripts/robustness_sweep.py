#!/usr/bin/env python3
"""Perturbation-size sweep of the weak-value error bound, emitted as CSV
(delta, k, worst deviation, bound) for external plotting.

Usage:  python scripts/robustness_sweep.py --trials 100 --seed 0 > sweep.csv
"""

import argparse

from weakdetect.robustness import bound_check
from weakdetect.states import random_mixed, werner


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=100)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--state-seed", type=int, default=None,
                        help="random full-rank state; Werner(1/2) if omitted")
    args = parser.parse_args()

    rho = werner(0.5) if args.state_seed is None else random_mixed(args.state_seed)
    print("delta,k,worst_deviation,bound")
    for exponent in range(4, 0, -1):
        delta = 10.0**-exponent
        report = bound_check(rho, delta, trials=args.trials, seed=args.seed)
        for delta_value, k, deviation, bound in report.csv_rows():
            print(f"{delta_value!r},{k},{deviation!r},{bound!r}")


if __name__ == "__main__":
    main()
