import json
import subprocess
import sys

import pytest

from penner.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--format", "json")
    assert code == 0
    return json.loads(out)["rows"]


def csv_body(text):
    lines = [l for l in text.splitlines() if not l.startswith("#")]
    head = lines[0].split(",")
    return [dict(zip(head, l.split(","))) for l in lines[1:]]


def test_exact_linear_penner(capsys):
    code, out, _ = run(capsys, "exact", "--model", "linear_penner", "--N", "1", "--n-max", "2")
    assert code == 0
    assert out.startswith("# {")
    rows = csv_body(out)
    assert rows[1]["r_n"] == "2"
    assert rows[2]["Z_n"] == "2"
    assert rows[2]["logZ_n"].startswith("0.693147180559945309417232121458")


def test_exact_gaussian_r_column(capsys):
    rows = rows_json(capsys, "exact", "--model", "gaussian", "--N", "4", "--n-max", "3")
    assert [r["r_n"] for r in rows] == ["-", "1/4", "1/2", "3/4"]


def test_exact_double_penner(capsys):
    rows = rows_json(capsys, "exact", "--model", "double_penner", "--alpha0", "1",
                     "--alpha1", "1", "--n-max", "1")
    assert rows[1]["r_n"] == "1/20"


def test_recurrence_matches_exact(capsys):
    a = rows_json(capsys, "recurrence", "--model", "linear_penner", "--N", "2", "--n-max", "4")
    b = rows_json(capsys, "exact", "--model", "linear_penner", "--N", "2", "--n-max", "4")
    assert [r["r_n"] for r in a] == [r["r_n"] for r in b]


def test_verify_gaussian_passes_with_note(capsys):
    code, out, _ = run(capsys, "verify", "--model", "gaussian", "--n-max", "3")
    assert code == 0
    assert "# note:" in out and "symmetry" in out
    for row in csv_body(out):
        assert row["status"] == "pass"
        assert float(row["max_residual"]) < 1e-30


def test_verify_corrupted_r1_fails(capsys):
    code, out, _ = run(capsys, "verify", "--model", "gaussian", "--n-max", "3",
                       "--perturb-r1", "1/1000")
    assert code == 1
    worst = {r["check"]: float(r["max_residual"]) for r in csv_body(out)}
    assert worst["identity_1"] > 1e-4


def _terms(rows, q):
    return {(r["term"], r["j"]): r["coefficient"] for r in rows if r["quantity"] == q}


def test_genus_cubic_F1(capsys):
    rows = rows_json(capsys, "genus", "--model", "cubic_penner", "--x-order", "3")
    f1 = _terms(rows, "F1")
    assert f1[("x^j*log(x)", 0)] == "-1/12"
    assert [f1[("x^j", j)] for j in range(4)] == ["1/12*log(3)", "1/36", "-25/648", "7/324"]


def test_genus_linear_penner_rho0(capsys):
    rho0 = _terms(rows_json(capsys, "genus", "--model", "linear_penner"), "rho0")
    # zero coefficients beyond j = 0 are omitted from the long format
    assert rho0 == {("x^j", 0): "0", ("x^j", 1): "1", ("x^j", 2): "1"}


def test_genus_gaussian_F1(capsys):
    f1 = _terms(rows_json(capsys, "genus", "--model", "gaussian"), "F1")
    assert f1[("x^j*log(x)", 0)] == "-1/12"
    assert all(v == "0" for (t, _), v in f1.items() if t == "x^j")


def test_figure1_tags_and_rows(capsys):
    rows = rows_json(capsys, "figure1", "--N", "4", "--n-max", "4")
    assert len(rows) == 5
    assert rows[0]["F_exact"] in ("0", "0.0")
    assert [r["nearest"] for r in rows[1:]] == ["A", "B", "A", "B"]


def test_figure1_scaling(capsys):
    r4 = rows_json(capsys, "figure1", "--N", "4", "--n-max", "4")
    r8 = rows_json(capsys, "figure1", "--N", "8", "--n-max", "8")
    # matched X = n/N with even n on both grids
    for n4 in (2, 4):
        ratio = float(r4[n4]["residual"]) / float(r8[2 * n4]["residual"])
        assert 12 <= ratio <= 20


def test_planar_and_twocut_commands(capsys):
    rows = rows_json(capsys, "planar", "--model", "linear_penner", "--x", "1/2")
    assert rows[0]["sigma0"].startswith("2.0000000000") or rows[0]["sigma0"].startswith("1.99999")
    rows = rows_json(capsys, "twocut", "--model", "gaussian_penner", "--x", "1/2")
    assert rows[0]["alpha0"].startswith("1.5")


def test_usage_errors(capsys):
    assert run(capsys, "exact", "--model", "cubic_penner")[0] == 2
    assert run(capsys, "exact", "--model", "nope")[0] == 2
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "exact", "--model", "gaussian", "--precision", "5")[0] == 2


def test_regime_error_exit_code(capsys, tmp_path):
    pot = tmp_path / "quartic.json"
    pot.write_text(json.dumps({"poly": ["0", "-1/2", "0", "1/4"], "logterms": [],
                               "contour": "real_line", "z2": True}))
    code, _, err = run(capsys, "twocut", "--potential", str(pot), "--x", "0.3")
    assert code == 3 and "MergingCutsError" in err


def test_determinism_and_out_file(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        assert run(capsys, "genus", "--model", "cubic_penner", "--out", str(path))[0] == 0
    assert a.read_bytes() == b.read_bytes()
    head = a.read_text().splitlines()[0]
    cfg = json.loads(head[2:])
    assert {"backend", "precision", "x_order", "k_max"} <= set(cfg)


def test_plot_option(capsys, tmp_path):
    pytest.importorskip("matplotlib")
    png = tmp_path / "fig.png"
    code, _, _ = run(capsys, "figure1", "--N", "4", "--n-max", "6", "--plot", str(png))
    assert code == 0 and png.stat().st_size > 1000


def test_console_entry_point():
    out = subprocess.run([sys.executable, "-m", "penner", "--version"], capture_output=True,
                         text=True)
    assert out.returncode == 0 and "0.1.0" in out.stdout


def test_double_penner_continuum_commands(capsys):
    rows = rows_json(capsys, "planar", "--model", "double_penner", "--x", "1/2")
    assert rows[0]["sigma0"].startswith("0.5000000000")
    rho0 = _terms(rows_json(capsys, "genus", "--model", "double_penner", "--alpha0", "2",
                            "--alpha1", "1", "--x-order", "2"), "rho0")
    assert rho0[("x^j", 1)] == "2/27"
