import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from mkbell.classify import ClassificationReport
from mkbell.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


GHZ3 = {"n": 3, "kind": "blocks", "partition": [3], "blocks": [{"type": "ghz"}]}
BELL_PAIRS = {"n": 4, "kind": "blocks", "partition": [2, 2], "blocks": [{"type": "ghz"}, {"type": "ghz"}]}
CHSH_SETTINGS = {
    "qubits": [
        {"a": [1, 0, 0], "ap": [0, 1, 0]},
        {"a": [np.cos(-np.pi / 4), np.sin(-np.pi / 4), 0], "ap": [np.cos(np.pi / 4), np.sin(np.pi / 4), 0]},
    ]
}


def test_partitions_table(capsys):
    code, out, _ = run(capsys, "partitions", "4")
    lines = out.strip().splitlines()
    assert code == 0 and len(lines) == 6
    row = lines[1].split()
    assert row[0] == "(4)" and row[3] == "4" and row[5] == "32"


def test_partitions_json_ten(capsys):
    code, out, _ = run(capsys, "partitions", "10", "--json")
    rows = {tuple(r["partition"]): r for r in json.loads(out)}
    assert code == 0 and len(rows) == 42
    assert rows[(5, 2, 2, 1)]["E"] == 5
    assert rows[(4, 3, 3)]["E"] == 6


def test_partitions_one_and_csv(capsys, tmp_path):
    code, out, _ = run(capsys, "partitions", "1")
    assert code == 0 and out.strip().splitlines()[1].startswith("(1)")
    dest = tmp_path / "p.csv"
    assert run(capsys, "partitions", "3", "--csv", "--out", str(dest))[0] == 0
    rows = list(csv.DictReader(dest.open()))
    assert [r["partition"] for r in rows] == ["3", "2,1", "1,1,1"]


@pytest.mark.parametrize("n", ["0", "65"])
def test_partitions_bad_n(capsys, n):
    code, _, err = run(capsys, "partitions", n)
    assert code == 2 and "n must be" in err


def test_unknown_flag_rejected(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["partitions", "4", "--frobnicate"])
    assert exc.value.code == 2


def test_classify_ghz3(capsys, tmp_path):
    code, out, _ = run(capsys, "classify", "--state", write(tmp_path, "s.json", GHZ3), "--restarts", "8")
    report = json.loads(out)
    assert code == 0
    assert report["certified_E_at_least"] == 3
    assert report["best_quadratic"] == pytest.approx(16, abs=1e-6)
    # lossless round trip through the domain type
    assert ClassificationReport.from_json(report).to_json() == report


def test_classify_bell_pairs(capsys, tmp_path):
    code, out, _ = run(capsys, "classify", "--state", write(tmp_path, "s.json", BELL_PAIRS), "--restarts", "8")
    report = json.loads(out)
    assert report["certified_E_at_least"] == 2
    assert report["best_quadratic"] == pytest.approx(8, abs=1e-5)


def test_classify_fixed_settings(capsys, tmp_path):
    state = {"n": 2, "kind": "blocks", "partition": [1, 1], "blocks": [{"type": "basis", "index": 0}, {"type": "plus"}]}
    code, out, _ = run(
        capsys,
        "classify",
        "--state", write(tmp_path, "s.json", state),
        "--settings", write(tmp_path, "set.json", CHSH_SETTINGS),
    )
    report = json.loads(out)
    assert code == 0 and report["optimized"] is False
    assert report["settings"]["qubits"][0]["a"] == [1.0, 0.0, 0.0]
    assert report["best_linear"] <= 2 + 1e-9


def test_classify_mixture_and_amplitudes(capsys, tmp_path):
    state = {
        "kind": "mixture",
        "components": [
            {"weight": 0.5, "state": {"n": 2, "kind": "amplitudes", "re": [1, 0, 0, 1]}},
            {"weight": 0.5, "state": {"n": 2, "kind": "amplitudes", "re": [0, 1, 0, 0], "im": [0, 0, 0, 0]}},
        ],
    }
    code, out, _ = run(capsys, "classify", "--state", write(tmp_path, "m.json", state), "--restarts", "4")
    assert code == 0 and json.loads(out)["n"] == 2


def test_classify_malformed_json(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "classify", "--state", str(bad))[0] == 2
    assert run(capsys, "classify", "--state", write(tmp_path, "u.json", {"n": 2, "kind": "cluster"}))[0] == 2
    assert run(capsys, "classify", "--state", str(tmp_path / "missing.json"))[0] == 2


def test_classify_capacity(capsys, tmp_path):
    state = {"n": 13, "kind": "ghz"}
    assert run(capsys, "classify", "--state", write(tmp_path, "big.json", state), "--restarts", "1")[0] == 3


def test_acc_separable(capsys, tmp_path):
    out_path = tmp_path / "sep.csv"
    code, _, _ = run(
        capsys, "acc", "--n", "3", "--type", "separable", "--samples", "1000", "--policy", "random", "--out", str(out_path)
    )
    rows = list(csv.DictReader(out_path.open()))
    assert code == 0 and len(rows) == 1000
    assert all(max(abs(float(r["f"])), abs(float(r["fprime"]))) <= 2 + 1e-9 for r in rows)
    radii = json.loads(out_path.with_suffix(".radii.json").read_text())
    assert radii == {"2": pytest.approx(8**0.5), "3": pytest.approx(4.0)}


def test_acc_three_one_optimized(capsys):
    code, out, _ = run(
        capsys, "acc", "--n", "4", "--type", "3,1", "--samples", "50", "--policy", "optimized", "--restarts", "8"
    )
    rows = list(csv.DictReader(out.splitlines()))
    vals = [float(r["f"]) ** 2 + float(r["fprime"]) ** 2 for r in rows]
    assert code == 0 and len(rows) == 50 and max(vals) <= 16 + 1e-4
    code, out, _ = run(
        capsys, "acc", "--n", "4", "--type", "3,1", "--samples", "3", "--policy", "optimized", "--blocks", "ghz"
    )
    vals = [float(r["f"]) ** 2 + float(r["fprime"]) ** 2 for r in csv.DictReader(out.splitlines())]
    assert max(vals) == pytest.approx(16, abs=1e-4)


def test_acc_bell_point_radius(capsys):
    code, out, _ = run(capsys, "acc", "--n", "2", "--type", "2", "--samples", "1", "--policy", "optimized", "--blocks", "ghz")
    row = next(csv.DictReader(out.splitlines()))
    assert np.hypot(float(row["f"]), float(row["fprime"])) == pytest.approx(2 * np.sqrt(2), abs=1e-5)


def test_acc_digits_and_determinism(capsys):
    a = run(capsys, "acc", "--n", "3", "--type", "haar", "--samples", "5", "--seed", "9")[1]
    b = run(capsys, "acc", "--n", "3", "--type", "haar", "--samples", "5", "--seed", "9")[1]
    assert a == b
    f = a.splitlines()[1].split(",")[0]
    assert len(f.lstrip("-").replace(".", "").lstrip("0").split("e")[0]) <= 17


def test_acc_bad_type(capsys):
    assert run(capsys, "acc", "--n", "3", "--type", "2,2", "--samples", "1")[0] == 2
    assert run(capsys, "acc", "--n", "11", "--type", "haar", "--samples", "1")[0] == 2


def test_mk_dump(capsys):
    code, out, _ = run(capsys, "mk", "dump", "3")
    assert code == 0
    assert out.splitlines() == ["001 1/2^0", "010 1/2^0", "100 1/2^0", "111 -1/2^0"]
    code, out, _ = run(capsys, "mk", "dump", "2")
    assert out.splitlines() == ["00 1/2^0", "01 1/2^0", "10 1/2^0", "11 -1/2^0"]
    code, out, _ = run(capsys, "mk", "dump", "4", "--json")
    assert json.loads(out)["terms"]["0000"] == "-1/2"


def test_mk_check(capsys):
    code, out, _ = run(capsys, "mk", "check", "6")
    assert code == 0 and out.splitlines() == ["k=2 PASS", "k=3 PASS", "k=4 PASS"]


@pytest.mark.parametrize("n", ["1", "15"])
def test_mk_bad_n(capsys, n):
    assert run(capsys, "mk", "dump", n)[0] == 2


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "mkbell.cli", "partitions", "3"], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0 and "(2,1)" in proc.stdout


def test_inconsistent_value_exit_code(capsys, tmp_path, monkeypatch):
    from mkbell import cli
    from mkbell.errors import InconsistentValue

    def boom(*args, **kwargs):
        raise InconsistentValue("value above ceiling")

    monkeypatch.setattr(cli, "classify", boom)
    assert run(capsys, "classify", "--state", write(tmp_path, "s.json", GHZ3))[0] == 4


def test_mk_check_failure_exit_code(capsys, monkeypatch):
    from mkbell import cli
    from mkbell.mk import TermMap

    monkeypatch.setattr(cli, "build_mk_split", lambda n, k: TermMap(n, {"0" * n: 1}))
    code, out, _ = run(capsys, "mk", "check", "5")
    assert code == 4 and "FAIL" in out
