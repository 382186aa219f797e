"""Exit criteria for the package; each test records one PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -s`` to see the lines as
they are produced; they are also collected in the terminal summary.
"""
import itertools
import time

import numpy as np
import pytest

from mkbell.classify import acc_points, classify
from mkbell.mk import (
    TermMap,
    build_mk,
    build_mk_split,
    dense_operator,
    evaluate,
    linear_bell_max,
    mk_pair_product_form,
    quadratic_bell,
)
from mkbell.optimize import OptimizerConfig, maximize, maximize_many
from mkbell.partitions import Partition, enumerate_partitions, stats
from mkbell.states import (
    Settings,
    basis,
    bell_phi_plus,
    extremal_state,
    ghz,
    make_pure,
    random_block_mixture,
    random_block_state,
    random_product_state,
    random_pure,
    random_settings,
    tensor,
)

from conftest import ACCEPTANCE_LINES
from oracles import random_state, random_unit

SQRT2 = np.sqrt(2)
# restarts for the optimized branch of the soundness sweep; every run is an
# adversarial attempt, so fewer restarts only weakens the attack, not the bound
SWEEP_RESTARTS = 4


def record(tag, ok, detail):
    line = f"[{tag}] {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def test_ac1_chsh_tsirelson():
    t0 = time.perf_counter()
    r = classify(bell_phi_plus())
    dt = time.perf_counter() - t0
    ok = abs(r.best_linear - 2 * SQRT2) <= 1e-6 and abs(r.best_quadratic - 8) <= 1e-6 and dt < 1
    record("AC1", ok, f"linear={r.best_linear:.12f} quadratic={r.best_quadratic:.12f} time={dt:.2f}s")
    assert ok


def test_ac2_three_qubit_class_bounds():
    t0 = time.perf_counter()
    full = maximize(ghz(3)).best_value
    two_one = maximize(tensor([bell_phi_plus(), basis(1, 0)])).best_value
    dt = time.perf_counter() - t0
    ok = abs(full - 16) <= 1e-5 and abs(two_one - 8) <= 1e-5 and dt < 5
    record("AC2", ok, f"ghz3={full:.10f} phi+(x)|0>={two_one:.10f} time={dt:.2f}s")
    assert ok


def test_ac3_theorem_attainability():
    t0 = time.perf_counter()
    worst, count, misses = 0.0, 0, []
    for n in range(4, 8):
        for p in enumerate_partitions(n):
            target = 2.0 ** (stats(p).E + 1)
            got = maximize(extremal_state(p), OptimizerConfig(restarts=32)).best_value
            err = abs(got - target)
            worst = max(worst, err)
            count += 1
            if err > 1e-4:
                misses.append((str(p), got, target))
    dt = time.perf_counter() - t0
    ok = not misses and dt < 600
    record("AC3", ok, f"{count} partitions, worst |B - 2^(E+1)|={worst:.2e}, misses={misses}, time={dt:.1f}s")
    assert ok


def test_ac4_theorem_soundness():
    t0 = time.perf_counter()
    cfg = OptimizerConfig(restarts=SWEEP_RESTARTS)
    violations, checked, worst_ratio = [], 0, 0.0
    for n in range(2, 8):
        for p in enumerate_partitions(n):
            bound = 2.0 ** (stats(p).E + 1)
            seed = [n, *p.parts]
            rng = np.random.default_rng(seed)
            states = [random_block_state(p, rng) for _ in range(200)]
            states += [random_block_mixture(p, rng) for _ in range(50)]
            random_vals = [
                float(np.hypot(*mk_pair_product_form(s, random_settings(n, rng)))) ** 2 for s in states
            ]
            opt_vals = [r.best_value for r in maximize_many(states, cfg)]
            for v in random_vals + opt_vals:
                checked += 1
                worst_ratio = max(worst_ratio, v / bound)
                if v > bound + 1e-6:
                    violations.append((str(p), v, bound))
    dt = time.perf_counter() - t0
    ok = not violations
    record(
        "AC4",
        ok,
        f"{checked} values checked, max B/2^(E+1)={worst_ratio:.9f}, violations={len(violations)}, time={dt:.1f}s",
    )
    assert ok, violations[:5]


def test_ac5_separable_bound():
    t0 = time.perf_counter()
    rng = np.random.default_rng(5)
    worst = 0.0
    for n in range(2, 8):
        for _ in range(10_000):
            f, fp = mk_pair_product_form(random_product_state(n, rng), random_settings(n, rng))
            worst = max(worst, abs(f), abs(fp))
    # cross-check the fast path on a subset with the term-map evaluation
    for n in range(2, 8):
        for _ in range(50):
            state, s = random_product_state(n, rng), random_settings(n, rng)
            worst = max(worst, linear_bell_max(state, s))
    dt = time.perf_counter() - t0
    ok = worst <= 2 + 1e-9 and dt < 60
    record("AC5", ok, f"6x10^4 product states, max(|F|,|F'|)={worst:.12f}, time={dt:.1f}s")
    assert ok


def test_ac6_operator_identities():
    split_ok = all(build_mk_split(n, k) == build_mk(n)[0] for n in range(4, 9) for k in range(2, n - 1))
    flip = str.maketrans("01", "10")
    dual_ok = all(
        build_mk(n)[1].coefficient("".join(s)) == build_mk(n)[0].coefficient("".join(s).translate(flip))
        for n in range(2, 11)
        for s in itertools.product("01", repeat=n)
    )
    rng = np.random.default_rng(6)
    worst = 0.0
    for i in range(100):
        n = 3 + i % 5
        rest, last = random_pure(n - 1, rng), random_pure(1, rng)
        arr = random_unit(rng, (n, 2))
        whole = quadratic_bell(tensor([rest, last]), Settings.from_array(arr))
        one = Settings.from_array(arr[-1:])
        d = evaluate(TermMap(1, {"0": 1}), one, last)
        dp = evaluate(TermMap(1, {"1": 1}), one, last)
        head = quadratic_bell(rest, Settings.from_array(arr[:-1]))
        worst = max(worst, abs(whole - 0.5 * (d * d + dp * dp) * head))
    ok = split_ok and dual_ok and worst <= 1e-9
    record("AC6", ok, f"split identity={split_ok} complement duality={dual_ok} single-qubit split err={worst:.1e}")
    assert ok


def test_ac7_oracle_equivalence():
    rng = np.random.default_rng(7)
    worst = 0.0
    for n in range(2, 7):
        F, _ = build_mk(n)
        for _ in range(100):
            psi = random_state(n, rng)
            s = Settings.from_array(random_unit(rng, (n, 2)))
            dense = np.vdot(psi, dense_operator(F, s) @ psi).real
            worst = max(worst, abs(evaluate(F, s, make_pure(n, psi)) - dense))
    chsh = Settings.in_plane([0.0, -np.pi / 4], [np.pi / 2, np.pi / 4])
    top = np.linalg.eigvalsh(dense_operator(build_mk(2)[0], chsh)).max()
    ok = worst <= 1e-10 and abs(top - 2 * SQRT2) <= 1e-10
    record("AC7", ok, f"max |sparse - dense|={worst:.1e}, F_2 top eigenvalue={top:.15f}")
    assert ok


def test_ac8_index_arithmetic():
    table = [stats(p).E for p in enumerate_partitions(4)]
    table_ok = table == [4, 3, 2, 2, 2]
    e_5221 = stats(Partition((5, 2, 2, 1))).E
    e_433 = stats(Partition((4, 3, 3))).E
    pair_ok = e_5221 == 6 and e_433 == 7
    es_ok = all(stats(p).E + stats(p).S == n + 2 for n in range(1, 21) for p in enumerate_partitions(n))
    ok = table_ok and pair_ok and es_ok
    record(
        "AC8",
        ok,
        f"E_4 table={table} ({table_ok}); E_10(5,2,2,1)={e_5221}, E_10(4,3,3)={e_433} "
        f"vs stated 6, 7 ({pair_ok}); E+S=n+2 for n<=20 ({es_ok})",
    )
    assert table_ok and es_ok
    assert pair_ok, "stated n=10 values disagree with E = n - K1 - 2L + 2"


def test_ac9_acc_diagram_three_qubits():
    sep = acc_points(3, "separable", 1000, seed=9).points
    two_one = acc_points(3, Partition((2, 1)), 50, seed=9, policy="optimized").points
    full = acc_points(3, Partition((3,)), 5, seed=9, policy="optimized", blocks="ghz").points
    sep_max = np.abs(sep).max()
    r21 = np.sqrt((two_one**2).sum(axis=1).max())
    r3 = np.sqrt((full**2).sum(axis=1).max())
    ok = sep_max <= 2 + 1e-9 and r21**2 <= 8 + 1e-6 and abs(r3 - 4) <= 1e-4
    record("AC9", ok, f"separable max(|F|,|F'|)={sep_max:.6f}, (2,1) max radius={r21:.9f}, (3) ghz radius={r3:.9f}")
    assert ok
