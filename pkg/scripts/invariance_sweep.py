"""Worst relative drift of every catalog feature under random orthogonal maps,
per (dimension, degree)."""

import argparse
import time

import numpy as np

from polyinv import CatalogConfig, Polynomial, apply_rotation, feature_vector, random_orthogonal


def drift(n: int, D: int, polys: int, maps: int, rng: np.random.Generator, cfg: CatalogConfig) -> tuple[float, int]:
    worst = 0.0
    for _ in range(polys):
        p = Polynomial.random(n, D, rng)
        f = feature_vector(p, cfg).values
        for k in range(maps):
            g = feature_vector(apply_rotation(p, random_orthogonal(n, rng, det=-1 if k % 2 else 1)), cfg).values
            ref = np.maximum(np.abs(f), np.abs(g))
            rel = np.abs(f - g) / np.where(ref > 0, ref, 1.0)
            worst = max(worst, float(rel.max()))
    return worst, len(f)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--polys", type=int, default=10)
    ap.add_argument("--maps", type=int, default=20)
    ap.add_argument("--max-n", type=int, default=5)
    ap.add_argument("--max-degree", type=int, default=4)
    ap.add_argument("--insertions", type=int, default=2)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    cfg = CatalogConfig(include_mixed=True, insertions=args.insertions)
    print(f"{'n':>2} {'D':>2} {'features':>8} {'max rel drift':>14} {'seconds':>8}")
    for n in range(2, args.max_n + 1):
        for D in range(1, args.max_degree + 1):
            started = time.perf_counter()
            worst, count = drift(n, D, args.polys, args.maps, rng, cfg)
            print(f"{n:>2} {D:>2} {count:>8} {worst:>14.2e} {time.perf_counter() - started:>8.2f}")


if __name__ == "__main__":
    main()
