#!/usr/bin/env python
"""Random soundness sweep: largest observed B / 2^(E+1) per partition.

Values above 1 would contradict the class bound.
"""
from __future__ import annotations

import argparse

import numpy as np

from mkbell.mk import mk_pair_product_form
from mkbell.optimize import OptimizerConfig, maximize_many
from mkbell.partitions import enumerate_partitions, stats
from mkbell.states import random_block_mixture, random_block_state, random_settings


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--nmax", type=int, default=6)
    p.add_argument("--states", type=int, default=100)
    p.add_argument("--mixtures", type=int, default=25)
    p.add_argument("--restarts", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()

    cfg = OptimizerConfig(restarts=args.restarts, seed=args.seed)
    for n in range(2, args.nmax + 1):
        for part in enumerate_partitions(n):
            bound = 2.0 ** (stats(part).E + 1)
            rng = np.random.default_rng([args.seed, n, *part.parts])
            states = [random_block_state(part, rng) for _ in range(args.states)]
            states += [random_block_mixture(part, rng) for _ in range(args.mixtures)]
            rand = max(np.hypot(*mk_pair_product_form(s, random_settings(n, rng))) ** 2 for s in states)
            opt = max(r.best_value for r in maximize_many(states, cfg))
            print(f"{n} {str(part):<16} random {rand / bound:.6f}  optimized {opt / bound:.6f}")


if __name__ == "__main__":
    main()
