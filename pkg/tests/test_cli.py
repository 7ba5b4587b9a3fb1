import json
import subprocess
import sys

import pytest

from metadice.cli import main
from metadice.fractal import parse_csv


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_preset_sid(capsys):
    code, out, _ = run(capsys, "preset", "sid")
    data = json.loads(out)
    assert code == 0
    assert [m["values"] for m in data["members"]] == [["1", "1", "4"], ["2", "2", "2"], ["0", "3", "3"]]
    assert data["cycle"]["min_probability"] == "5/9"


def test_preset_ed_and_cid(capsys):
    _, out, _ = run(capsys, "preset", "ed")
    data = json.loads(out)
    assert len(data["members"]) == 4 and all(len(m["values"]) == 6 for m in data["members"])
    assert data["labels"] == ["A", "D", "C", "B"]
    _, out, _ = run(capsys, "preset", "cid")
    assert [m["values"] for m in json.loads(out)["members"]] == [["2", "4", "9"], ["3", "5", "7"], ["1", "6", "8"]]


def test_preset_trybula(capsys):
    code, out, _ = run(capsys, "preset", "trybula", "--p", "2/3")
    assert code == 0 and json.loads(out)["cycle"]["pairwise_probabilities"] == ["2/3", "2/3", "5/9"]
    code, out, _ = run(capsys, "preset", "trybula", "--p", "golden")
    data = json.loads(out)
    assert code == 0 and data["float_mode"]
    assert all(abs(p - data["p"]) < 1e-12 for p in data["cycle"]["pairwise_probabilities"])
    code, _, _ = run(capsys, "preset", "trybula")
    assert code == 2
    code, _, _ = run(capsys, "preset", "trybula", "--p", "1/2")
    assert code == 2


def test_preset_unknown(capsys):
    code, out, _ = run(capsys, "preset", "nope")
    assert code == 2 and json.loads(out)["error"] == "UsageError"


def test_verify_sid_k3_reports_violations(capsys):
    # exact first-divergence relations fail for pairs sharing a non-constant prefix
    code, out, err = run(capsys, "verify", "--preset", "sid", "--k", "3")
    data = json.loads(out)
    t1 = data["reports"]["theorem1"]
    assert t1["pairs_checked"] == 351
    assert t1["value_violations"] == 28 and t1["sign_violations"] == 0
    assert data["reports"]["meta_intransitivity"]["ok"]
    assert data["reports"]["bijection"]["ok"]
    assert data["reports"]["proposition1"]["expected"] == "62/125"
    assert code == 1
    assert "351 pairs" in err


def test_verify_cid_k2(capsys):
    code, out, _ = run(capsys, "verify", "--preset", "cid", "--k", "2")
    data = json.loads(out)
    assert code == 0 and data["lambda"] == "9" and data["ok"]


def test_verify_inadmissible_lambda(capsys):
    code, out, _ = run(capsys, "verify", "--preset", "sid", "--k", "3", "--lambda", "4")
    assert code == 2 and json.loads(out)["error"] == "AdmissibilityError"


def test_verify_strict_includes_infinite_checks(capsys):
    code, out, _ = run(capsys, "verify", "--preset", "cid", "--k", "2", "--strict")
    data = json.loads(out)
    assert data["lambda"] == "10" and "theorem2" in data["reports"] and "proposition2" in data["reports"]
    assert code == 0


def test_verify_tuple_file(tmp_path, capsys):
    path = tmp_path / "t.json"
    path.write_text(json.dumps({"dice": [[2, 4, 9], [3, 5, 7], [1, 6, 8]]}))
    code, out, _ = run(capsys, "verify", "--tuple", str(path), "--k", "2")
    assert code == 0
    path.write_text(json.dumps({"dice": [[2, 4, 9], [1, 6, 8], [3, 5, 7]]}))
    code, out, _ = run(capsys, "verify", "--tuple", str(path), "--k", "2")
    assert code == 2 and json.loads(out)["error"] == "BasicTupleError"


def test_dim(capsys):
    _, out, _ = run(capsys, "dim", "--preset", "ed")
    assert abs(float(json.loads(out)["d_sup"]) - 0.7124) < 5e-5
    _, out, _ = run(capsys, "dim", "--preset", "sid", "--lambda", "6")
    data = json.loads(out)
    assert abs(float(data["d"]) - 0.6131) < 5e-5
    assert abs(float(data["d_sup"]) - 0.6826) < 5e-5
    assert data["fractal_dust"] is True
    _, out, _ = run(capsys, "dim", "--preset", "cid")
    assert float(json.loads(out)["d_sup"]) == 0.5
    code, _, _ = run(capsys, "dim", "--preset", "cid", "--lambda", "1")
    assert code == 2


def test_plot_svg_file(tmp_path, capsys):
    out_path = tmp_path / "out.svg"
    code, _, err = run(capsys, "plot", "--preset", "sid", "--k", "3", "--lambda", "5", "--svg", str(out_path))
    assert code == 0 and "affine rank 2" in err
    assert out_path.read_text().count("<circle") == 27


def test_plot_csv(tmp_path, capsys):
    out_path = tmp_path / "out.csv"
    run(capsys, "plot", "--preset", "sid", "--k", "1", "--csv", str(out_path))
    assert len(out_path.read_text().splitlines()) == 4
    code, out, _ = run(capsys, "plot", "--preset", "ed", "--k", "2", "--csv")
    lines = out.splitlines()
    assert code == 0 and len(lines) == 17 and lines[0].count(",") == 6
    assert len(parse_csv(out)) == 16


def test_plot_projection_flag(capsys):
    code, out, _ = run(capsys, "plot", "--preset", "sid", "--k", "2", "--svg", "--projection", "1,3")
    assert code == 0 and out.count("<circle") == 9 and ">x3<" in out


def test_simulate_cid_edges(capsys):
    code, out, _ = run(capsys, "simulate", "--preset", "cid", "--trials", "100000", "--seed", "7")
    data = json.loads(out)
    assert code == 0
    assert [r["exact_p_less"] for r in data["rows"]] == ["5/9"] * 3
    assert all(r["within_3se"] for r in data["rows"])


def test_simulate_sid_generation(capsys):
    code, out, _ = run(capsys, "simulate", "--preset", "sid", "--k", "2", "--trials", "100000", "--seed", "1")
    data = json.loads(out)
    assert len(data["rows"]) == 10
    # sampled pairs are compared against the first-divergence prediction
    for row in data["rows"]:
        if row["nu"] == 1:
            assert row["within_3se"]
        assert row["pair_within_3se"]
    # pairs sharing a non-constant prefix miss the first-divergence prediction
    misses = [r for r in data["rows"] if not r["within_3se"]]
    assert misses and all(r["pair"][0][0] in (1, 3) and r["nu"] == 2 for r in misses)
    assert code == 1


def test_simulate_golden(capsys):
    code, out, _ = run(capsys, "simulate", "--preset", "trybula", "--p", "golden", "--trials", "50000")
    assert code == 0 and len(json.loads(out)["rows"]) == 3


def test_simulate_zero_trials(capsys):
    code, _, _ = run(capsys, "simulate", "--preset", "cid", "--trials", "0")
    assert code == 2


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as info:
        main(["verify", "--preset", "sid", "--lambda", "abc"])
    assert info.value.code == 2
    code, _, _ = run(capsys, "verify")
    assert code == 2
    code, _, _ = run(capsys, "dim", "--preset", "trybula", "--p", "golden")
    assert code == 2


def test_deterministic_output(capsys):
    outs = [run(capsys, "plot", "--preset", "sid", "--k", "3", "--svg")[1] for _ in range(2)]
    assert outs[0] == outs[1]
    outs = [run(capsys, "simulate", "--preset", "sid", "--trials", "1000", "--seed", "3")[1] for _ in range(2)]
    assert outs[0] == outs[1]


def test_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "metadice", "dim", "--preset", "cid"], capture_output=True, text=True
    )
    assert res.returncode == 0 and json.loads(res.stdout)["d_sup"] == "0.5"
