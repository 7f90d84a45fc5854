#!/usr/bin/env python3
"""Null distribution check of the subset min/max statistics.

Generates clean data with a zero coefficient vector, scores every
observation, and reports the Kolmogorov-Smirnov distance of the pooled
statistics to the chi-square reference laws together with tail
frequencies at common cutoffs.

    python scripts/run_null_calibration.py --replications 100
"""

import argparse

import numpy as np
from scipy.stats import chi2, kstest

from hidetify import DataMatrix, generate_clean
from hidetify.influence import derive_seed, min_max_scores


def parse_args():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=100)
    parser.add_argument("--p", type=int, default=200)
    parser.add_argument("--replications", type=int, default=100)
    parser.add_argument("--m", type=int, default=5)
    parser.add_argument("--taus", default="0.25,0.5,0.75")
    parser.add_argument("--seed", type=int, default=0)
    return parser.parse_args()


def main():
    args = parse_args()
    taus = tuple(float(t) for t in args.taus.split(","))
    q = len(taus)
    pooled_min, pooled_max = [], []
    for rep in range(args.replications):
        rng = np.random.default_rng(derive_seed(args.seed, rep, 0))
        clean = generate_clean(args.n, args.p, derive_seed(args.seed, rep, 1))
        data = DataMatrix(clean.data.values, rng.standard_normal(args.n))
        tmin, _, tmax, _ = min_max_scores(
            data, range(args.n), args.m, args.n // 2, taus, seed=derive_seed(args.seed, rep, 2)
        )
        pooled_min.append(tmin)
        pooled_max.append(tmax)
    tmin = np.concatenate(pooled_min)
    tmax = np.concatenate(pooled_max)
    print(f"pooled samples: {tmin.size}")
    print(f"t_min: mean {tmin.mean():.3f} (chi2(1): 1), KS {kstest(tmin, chi2(1).cdf).statistic:.3f}")
    print(f"t_max: mean {tmax.mean():.3f} (chi2({q}): {q}), KS {kstest(tmax, chi2(q).cdf).statistic:.3f}")
    for alpha in (0.05, 0.01, 0.001):
        cut_min = chi2(1).isf(alpha)
        cut_max = chi2(q).isf(alpha)
        print(
            f"alpha {alpha:6.3f}: P(t_min > {cut_min:5.2f}) = {(tmin > cut_min).mean():.4f}   "
            f"P(t_max > {cut_max:5.2f}) = {(tmax > cut_max).mean():.4f}"
        )


if __name__ == "__main__":
    main()
