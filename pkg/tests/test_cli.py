import csv
import json
import math

import numpy as np
import pytest

from operadic_lax import cli
from operadic_lax.algebras import export_builtins
from operadic_lax.lax_dynamics import COORD_LABELS, solve_params
from operadic_lax.algebras import SL2


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def read_csv(path):
    with open(path) as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], np.array(rows[1:], dtype=float)
    return header, body


def test_verify_classical_default(capsys):
    code, out, _ = run(capsys, "verify-classical")
    report = json.loads(out)
    assert code == 0 and report["passed"]
    assert report["checks"][0]["residual"] < 1e-12


def test_verify_classical_omega_two(capsys, tmp_path):
    path = tmp_path / "r.json"
    code, _, _ = run(capsys, "verify-classical", "--omega", "2", "--out", str(path))
    assert code == 0
    assert json.loads(path.read_text())["passed"]


@pytest.mark.parametrize("bad", ["0", "-1", "nan", "abc"])
def test_verify_classical_rejects_bad_omega(capsys, bad):
    with pytest.raises(SystemExit) as exc:
        cli.main(["verify-classical", "--omega", bad])
    assert exc.value.code == 2


def test_evolve_sl2_csv(capsys, tmp_path):
    path = tmp_path / "sl2.csv"
    code, out, _ = run(capsys, "evolve", "sl2", "--omega", "1", "--p0", "2",
                       "--t-end", repr(math.pi), "--dt", "1e-4", "--out", str(path))
    assert code == 0
    header, body = read_csv(path)
    assert header == cli.csv_header()
    col = {name: body[:, k] for k, name in enumerate(header)}
    assert col["t"][0] == 0.0 and col["t"][-1] == math.pi
    np.testing.assert_allclose(col["exact_mu_1_31"], 2 * np.cos(col["t"]), atol=1e-14)
    np.testing.assert_allclose(col["exact_mu_2_23"], 2 * np.cos(col["t"]), atol=1e-14)
    assert np.max(col["max_err"]) < 1e-7
    assert json.loads(out)["C3"] == 1.0


def test_evolve_rigid_columns_constant(capsys, tmp_path):
    path = tmp_path / "so3.csv"
    assert run(capsys, "evolve", "so3", "--t-end", "2", "--dt", "1e-3", "--out", str(path))[0] == 0
    header, body = read_csv(path)
    for label in COORD_LABELS:
        for prefix in ("rk4_", "exact_"):
            column = body[:, header.index(prefix + label)]
            assert np.all(column == column[0])


def test_evolve_csv_round_trip(capsys, tmp_path):
    path = tmp_path / "gen.json"
    path.write_text(json.dumps({
        "dim": 3, "degree": 2, "antisymmetrize": True,
        "constants": [
            {"upper": 1, "lower": [1, 2], "value": 0.7},
            {"upper": 3, "lower": [2, 3], "value": -0.4},
            {"upper": 2, "lower": [1, 3], "value": 1.1},
        ],
    }))
    out = tmp_path / "gen.csv"
    omega, p0 = 1.3, 1.7
    code, _, _ = run(capsys, "evolve", str(path), "--omega", str(omega), "--p0", str(p0),
                     "--dt", "1e-3", "--t-end", "9", "--record-every", "37", "--out", str(out))
    assert code == 0
    header, body = read_csv(out)
    from operadic_lax.algebras import load_algebra
    C = solve_params(load_algebra(str(path)).constants, p0)
    idx = [header.index(f"exact_{label}") for label in COORD_LABELS]
    for row in body:
        t, q, p = row[header.index("t")], row[header.index("exact_q")], row[header.index("exact_p")]
        again = cli.reevaluate_exact(C, omega, p0, t, q, p)
        np.testing.assert_allclose(again, row[idx], atol=1e-12, rtol=0)
    assert body[:, header.index("max_err")].max() < 1e-7


def test_csv_number_format():
    assert cli.fmt(0.1) == "0.10000000000000001"
    assert float(cli.fmt(math.pi)) == math.pi


def test_evolve_errors(capsys, tmp_path):
    assert run(capsys, "evolve", "nosuch", "--out", str(tmp_path / "x.csv"))[0] == 2
    assert run(capsys, "evolve", "sl2", "--out", str(tmp_path / "missing" / "x.csv"), "--t-end", "0.01", "--dt", "1e-3")[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"dim": 3, "degree": 2, "constants": [{"upper": 1, "lower": [1, 2], "value": 1.0}]}))
    assert run(capsys, "evolve", str(bad), "--out", str(tmp_path / "x.csv"))[0] == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["evolve", "sl2", "--p0", "-2", "--out", str(tmp_path / "x.csv")])
    assert exc.value.code == 2


@pytest.mark.parametrize(
    "name, expected, condition",
    [
        ("sl2", {"C3": 1.0, "C9": 1.0}, True),
        ("so3", {"C4": -1.0, "C9": 1.0}, False),
        ("heisenberg", {"C9": 1.0}, False),
    ],
)
def test_solve_params_command(capsys, name, expected, condition):
    code, out, _ = run(capsys, "solve-params", name, "--p0", "2")
    payload = json.loads(out)
    assert code == 0
    for nu in range(1, 10):
        assert payload[f"C{nu}"] == expected.get(f"C{nu}", 0.0)
    assert payload["condition_satisfied"] is condition


def test_solve_params_from_file(capsys, tmp_path):
    export_builtins(tmp_path)
    code, out, _ = run(capsys, "solve-params", str(tmp_path / "sl2.json"), "--p0", "4")
    assert code == 0 and json.loads(out)["C3"] == 0.5


@pytest.mark.parametrize("name, verdict", [("so3", "rigid"), ("heisenberg", "rigid"), ("sl2", "deformed")])
def test_classify_command(capsys, name, verdict):
    code, out, _ = run(capsys, "classify", name)
    report = json.loads(out)
    assert code == 0 and report["passed"]
    first = report["checks"][0]["details"]
    assert first["verdict"] == verdict
    assert first["condition_satisfied"] is (verdict == "deformed")
    names = [c["name"] for c in report["checks"]]
    if name == "sl2":
        assert names == ["classification", "jacobi_along_flow", "sl2_isomorphism"]
    else:
        assert names == ["classification"]


def test_verify_all_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run(capsys, "verify-all", "--seed", "42", "--out", str(a))[0] == 0
    assert run(capsys, "verify-all", "--seed", "42", "--out", str(b))[0] == 0

    def strip(path):
        data = json.loads(path.read_text())
        for check in data["checks"]:
            check.pop("runtime_s")
        return json.dumps(data, sort_keys=True)

    assert strip(a) == strip(b)


def test_verify_all_negative_control(capsys):
    code, out, _ = run(capsys, "verify-all", "--corrupt-builtin", "sl2")
    assert code == 1
    assert not json.loads(out)["passed"]


def test_export_algebras(capsys, tmp_path):
    code, out, _ = run(capsys, "export-algebras", str(tmp_path))
    assert code == 0
    assert len(out.split()) == 3
