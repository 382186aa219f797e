"""``mkbell`` command line: partitions, classify, acc, mk.

Exit codes: 0 success, 2 usage or input error, 3 capacity, 4 internal
inconsistency.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from .classify import DEFAULT_TOL, acc_points, class_bound, classify, parse_type_spec
from .errors import CapacityExceeded, InconsistentValue, InvalidArgument
from .jsonio import load_settings, load_state
from .mk import build_mk, build_mk_split
from .optimize import OptimizerConfig
from .partitions import enumerate_partitions, stats
from .states import MAX_QUBITS

EXIT_USAGE, EXIT_CAPACITY, EXIT_INCONSISTENT = 2, 3, 4


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="bound comparison tolerance")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="fmt", action="store_const", const="json")
    fmt.add_argument("--csv", dest="fmt", action="store_const", const="csv")
    p.add_argument("--out", type=Path, help="write output here instead of stdout")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="mkbell", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("partitions", parents=[common], help="list partitions with their indices")
    p.add_argument("n", type=int)

    p = sub.add_parser("classify", parents=[common], help="certify an entanglement class")
    p.add_argument("--state", type=Path, required=True, help="state JSON file")
    p.add_argument("--settings", type=Path, help="fixed settings JSON; skips optimization")
    p.add_argument("--restarts", type=int, default=32)

    p = sub.add_parser("acc", parents=[common], help="export ACC-diagram points as CSV")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--type", dest="type_spec", required=True, help="separable | haar | 3,1")
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--policy", choices=("random", "optimized"), default="random")
    p.add_argument("--blocks", choices=("haar", "ghz"), default="haar")
    p.add_argument("--restarts", type=int, default=32)
    p.add_argument("--radii", type=Path, help="radii sidecar path (default: next to --out)")

    p = sub.add_parser("mk", parents=[common], help="dump or check MK term maps")
    p.add_argument("action", choices=("dump", "check"))
    p.add_argument("N", type=int)
    return parser


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        out.write_text(text if text.endswith("\n") else text + "\n")


def _cmd_partitions(args) -> int:
    rows = []
    for p in enumerate_partitions(args.n):
        st = stats(p)
        rows.append(
            {
                "partition": p.to_json(),
                "L": st.L,
                "K1": st.K1,
                "E": st.E,
                "S": st.S,
                "bound": class_bound(st.E),
                "separable": st.separable,
            }
        )
    if args.fmt == "json":
        _emit(json.dumps(rows, indent=2), args.out)
    elif args.fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["partition", "L", "K1", "E", "S", "bound", "separable"])
        for r in rows:
            w.writerow([",".join(map(str, r["partition"])), r["L"], r["K1"], r["E"], r["S"], f"{r['bound']:g}", r["separable"]])
        _emit(buf.getvalue(), args.out)
    else:
        lines = [f"{'partition':<24} {'L':>3} {'K1':>3} {'E':>3} {'S':>3} {'bound':>12}"]
        for r in rows:
            label = "(" + ",".join(map(str, r["partition"])) + ")"
            note = "  separable" if r["separable"] else ""
            lines.append(f"{label:<24} {r['L']:>3} {r['K1']:>3} {r['E']:>3} {r['S']:>3} {r['bound']:>12g}{note}")
        _emit("\n".join(lines), args.out)
    return 0


def _cmd_classify(args) -> int:
    state = load_state(args.state)
    settings = load_settings(args.settings) if args.settings else None
    config = OptimizerConfig(restarts=args.restarts, seed=args.seed)
    report = classify(state, config, tol=args.tol, settings=settings)
    _emit(json.dumps(report.to_json(), indent=2), args.out)
    return 0


def _cmd_acc(args) -> int:
    config = OptimizerConfig(restarts=args.restarts, seed=args.seed)
    pts = acc_points(
        args.n,
        parse_type_spec(args.type_spec),
        args.samples,
        seed=args.seed,
        policy=args.policy,
        blocks=args.blocks,
        config=config,
    )
    _emit(pts.to_csv(), args.out)
    radii = args.radii
    if radii is None and args.out is not None:
        radii = args.out.with_suffix(".radii.json")
    if radii is not None:
        radii.write_text(pts.radii_json() + "\n")
    return 0


def _cmd_mk(args) -> int:
    n = args.N
    if not 2 <= n <= MAX_QUBITS:
        raise InvalidArgument(f"N must be in 2..{MAX_QUBITS}, got {n}")
    F, _ = build_mk(n)
    if args.action == "dump":
        if args.fmt == "json":
            body = {s: f"{c.numerator}/{c.denominator}" for s, c in F.terms.items()}
            _emit(json.dumps({"n": n, "terms": body}, indent=2), args.out)
        else:
            _emit(F.dump(), args.out)
        return 0
    lines, ok = [], True
    for k in range(2, n - 1):
        same = build_mk_split(n, k) == F
        ok &= same
        lines.append(f"k={k} {'PASS' if same else 'FAIL'}")
    if not lines:
        lines.append(f"no split sizes 2 <= k <= N-2 for N={n}")
    _emit("\n".join(lines), args.out)
    return 0 if ok else EXIT_INCONSISTENT


COMMANDS = {"partitions": _cmd_partitions, "classify": _cmd_classify, "acc": _cmd_acc, "mk": _cmd_mk}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except CapacityExceeded as exc:
        print(f"mkbell: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except InconsistentValue as exc:
        print(f"mkbell: {exc}", file=sys.stderr)
        return EXIT_INCONSISTENT
    except InvalidArgument as exc:
        print(f"mkbell: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
