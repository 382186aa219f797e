#!/usr/bin/env python
"""Export ACC-diagram point clouds for every type of n qubits into a directory.

One CSV per type (separable, each partition) plus the radii sidecar. Plotting
is left to whatever tool reads the CSVs.
"""
from __future__ import annotations

import argparse
from pathlib import Path

from mkbell.classify import acc_points
from mkbell.optimize import OptimizerConfig
from mkbell.partitions import enumerate_partitions


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--samples", type=int, default=2000, help="random-policy samples per type")
    p.add_argument("--optimized-samples", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--outdir", type=Path, default=Path("acc_out"))
    args = p.parse_args()

    args.outdir.mkdir(parents=True, exist_ok=True)
    cfg = OptimizerConfig(restarts=8, seed=args.seed)
    jobs = [("separable", "separable", "haar")]
    for part in enumerate_partitions(args.n):
        if not part.is_separable:
            label = "-".join(map(str, part.parts))
            jobs += [(part, label, "haar"), (part, label + "_ghz", "ghz")]

    radii = None
    for spec, label, blocks in jobs:
        for policy, count in (("random", args.samples), ("optimized", args.optimized_samples)):
            pts = acc_points(args.n, spec, count, seed=args.seed, policy=policy, blocks=blocks, config=cfg)
            path = args.outdir / f"n{args.n}_{label}_{policy}.csv"
            path.write_text(pts.to_csv())
            radii = pts.radii_json()
            print(f"wrote {path} ({count} points)")
    (args.outdir / f"n{args.n}.radii.json").write_text(radii + "\n")


if __name__ == "__main__":
    main()
