"""Sweep random and defective matrices through the invariant-subspace routines.

Writes one CSV row per matrix with the branch taken, subspace rank and
invariance residual for both the direct and the split-based construction.

    python scripts/invariant_subspace_sweep.py --count 500 --out sweep.csv
"""
import argparse
import csv
import sys
import warnings

import numpy as np

from ncg.errors import ClusterInstability
from ncg.jordan import dunford_decompose, find_invariant_subspace, invariant_subspace_via_split
from ncg.linop import operator_norm


def make_matrix(rng, n, kind):
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    if kind == "gaussian":
        return g
    if kind == "nilpotent":
        return np.triu(g, 1)
    # one Jordan block of random size under a random similarity
    k = int(rng.integers(2, n + 1))
    j = np.diag(rng.standard_normal(n) + 1j * rng.standard_normal(n))
    j[:k, :k] = j[0, 0] * np.eye(k) + np.eye(k, k=1)
    s = g + 3 * np.eye(n)
    return s @ j @ np.linalg.inv(s)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--count", type=int, default=200)
    p.add_argument("--min-dim", type=int, default=2)
    p.add_argument("--max-dim", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-")
    args = p.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    kinds = ["gaussian", "defective", "nilpotent"]
    fh = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    w = csv.writer(fh)
    w.writerow(["index", "kind", "dim", "clusters", "branch", "rank", "residual",
                "split_branch", "split_rank", "split_residual"])
    worst = 0.0
    for i in range(args.count):
        n = int(rng.integers(args.min_dim, args.max_dim + 1))
        kind = kinds[i % len(kinds)]
        a = make_matrix(rng, n, kind)
        norm = operator_norm(a)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ClusterInstability)
            clusters = len(dunford_decompose(a).blocks)
            s, branch = find_invariant_subspace(a)
            s2, branch2 = invariant_subspace_via_split(a)
        r1, r2 = s.invariance_residual(a) / norm, s2.invariance_residual(a) / norm
        worst = max(worst, r1, r2)
        w.writerow([i, kind, n, clusters, branch, s.rank, f"{r1:.3e}", branch2, s2.rank, f"{r2:.3e}"])
    if fh is not sys.stdout:
        fh.close()
    print(f"worst relative invariance residual: {worst:.3e}", file=sys.stderr)


if __name__ == "__main__":
    main()
