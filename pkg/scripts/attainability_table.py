#!/usr/bin/env python
"""Print optimized quadratic Bell values of GHZ/Bell block products next to 2^(E+1)."""
from __future__ import annotations

import argparse

from mkbell.optimize import OptimizerConfig, maximize
from mkbell.partitions import enumerate_partitions, stats
from mkbell.states import extremal_state


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--nmin", type=int, default=2)
    p.add_argument("--nmax", type=int, default=7)
    p.add_argument("--restarts", type=int, default=32)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()

    cfg = OptimizerConfig(restarts=args.restarts, seed=args.seed)
    print(f"{'n':>2} {'partition':<16} {'E':>2} {'2^(E+1)':>8} {'optimized':>18} {'error':>9}")
    for n in range(args.nmin, args.nmax + 1):
        for part in enumerate_partitions(n):
            e = stats(part).E
            got = maximize(extremal_state(part), cfg).best_value
            print(f"{n:>2} {str(part):<16} {e:>2} {2 ** (e + 1):>8} {got:>18.12f} {abs(got - 2 ** (e + 1)):>9.1e}")


if __name__ == "__main__":
    main()
