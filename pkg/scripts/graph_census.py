"""Count connected contraction graphs per vertex multiset and estimate how many
of them are numerically independent as functions of the polynomial.

The independence column is the numerical rank of the matrix of graph values
over random polynomials.  It is an empirical lower bound, not a proof.
"""

import argparse
import itertools

import numpy as np

from polyinv import Polynomial, enumerate_graphs, evaluate_graph


def vertex_multisets(degrees, max_vertices):
    for k in range(1, max_vertices + 1):
        for combo in itertools.combinations_with_replacement(degrees, k):
            if sum(combo) % 2 == 0:
                yield combo


def numerical_rank(graphs, n, samples, rng):
    if not graphs:
        return 0
    rows = []
    for _ in range(samples):
        p = Polynomial.random(n, max(d for d, _ in graphs[0].vertices), rng)
        rows.append([evaluate_graph(g, p) for g in graphs])
    m = np.array(rows)
    m /= np.maximum(np.abs(m).max(axis=0), 1e-300)
    s = np.linalg.svd(m, compute_uv=False)
    return int(np.sum(s > 1e-9 * s[0]))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--degrees", default="1,2,3", help="comma-separated vertex degrees to combine")
    ap.add_argument("--max-vertices", type=int, default=4)
    ap.add_argument("--n", type=int, default=3, help="dimension used for the rank estimate")
    ap.add_argument("--samples", type=int, default=60)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    degrees = sorted({int(t) for t in args.degrees.split(",")})
    print(f"{'vertices':<20} {'graphs':>6} {'rank':>5}")
    for combo in vertex_multisets(degrees, args.max_vertices):
        spec = ",".join(f"{d}:p" for d in combo)
        graphs = enumerate_graphs(spec)
        print(f"{spec:<20} {len(graphs):>6} {numerical_rank(graphs, args.n, args.samples, rng):>5}")


if __name__ == "__main__":
    main()
