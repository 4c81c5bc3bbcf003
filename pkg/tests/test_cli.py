"""Command-line interface: output formats, determinism, and exit codes."""

import json
import subprocess
import sys

import pytest

from sledist.cli import main


def run_cli(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# --- coeffs ----------------------------------------------------------------


def test_coeffs_json_smallest_case(capsys):
    code, out, err = run_cli(["coeffs", "--K", "2", "--N", "2"], capsys)
    assert code == 0 and err == ""
    doc = json.loads(out)
    assert doc["K"] == 2 and doc["N"] == 2
    entries = {(e["i"], e["j"]): (e["num"], e["den"]) for e in doc["entries"]}
    assert entries == {
        (1, 0): ("2", "1"),
        (1, 1): ("-2", "1"),
        (1, 2): ("1", "1"),
        (2, 0): ("-2", "1"),
    }


def test_coeffs_out_file(tmp_path, capsys):
    path = tmp_path / "table.json"
    code, out, _ = run_cli(["coeffs", "--K", "3", "--N", "5", "--out", str(path)], capsys)
    assert code == 0 and out == ""
    doc = json.loads(path.read_text())
    assert doc["K"] == 3 and doc["N"] == 5


def test_coeffs_engines_byte_identical(capsys):
    for K, N in [(2, 7), (3, 6)]:
        _, closed, _ = run_cli(
            ["coeffs", "--K", str(K), "--N", str(N), "--engine", "closed-form"], capsys
        )
        _, hankel, _ = run_cli(
            ["coeffs", "--K", str(K), "--N", str(N), "--engine", "hankel"], capsys
        )
        assert closed == hankel


def test_repeat_invocations_byte_identical():
    cmd = [sys.executable, "-m", "sledist.cli", "pdf", "--K", "2", "--N", "6", "--grid", "40"]
    a = subprocess.run(cmd, capture_output=True, check=True)
    b = subprocess.run(cmd, capture_output=True, check=True)
    assert a.stdout == b.stdout and len(a.stdout) > 0


# --- curves ------------------------------------------------------------------


def test_pdf_curve_output(capsys):
    code, out, _ = run_cli(["pdf", "--K", "2", "--N", "4", "--grid", "16"], capsys)
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "x,pdf,cdf"
    assert len(lines) >= 17  # grid points plus interior breakpoints
    first = lines[1].split(",")
    last = lines[-1].split(",")
    assert float(first[0]) == 1.0 and first[2] == "0.0"
    assert float(last[0]) == 2.0 and last[2] == "1.0"


def test_cdf_curve_monotone(tmp_path, capsys):
    path = tmp_path / "curve.csv"
    code, _, _ = run_cli(
        ["cdf", "--K", "3", "--N", "8", "--grid", "64", "--out", str(path)], capsys
    )
    assert code == 0
    rows = path.read_text().strip().split("\n")[1:]
    cdf = [float(r.split(",")[2]) for r in rows]
    assert cdf == sorted(cdf)
    assert cdf[-1] == 1.0


# --- scalars --------------------------------------------------------------------


def test_quantile_median_k2n2(capsys):
    code, out, _ = run_cli(["quantile", "--K", "2", "--N", "2", "--p", "0.5"], capsys)
    assert code == 0
    assert float(out) == pytest.approx(1 + 2 ** (-1 / 3), abs=1e-10)


def test_threshold_matches_complementary_quantile(capsys):
    _, t_out, _ = run_cli(["threshold", "--K", "2", "--N", "8", "--alpha", "0.05"], capsys)
    _, q_out, _ = run_cli(["quantile", "--K", "2", "--N", "8", "--p", "0.95"], capsys)
    assert t_out == q_out


def test_moments_output(capsys):
    code, out, _ = run_cli(["moments", "--K", "2", "--N", "2", "--max-order", "2"], capsys)
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "E[X^0] = 1"
    assert lines[1] == "E[X^1] = 7/4"
    assert lines[2] == "E[X^2] = 31/10"
    assert lines[3:] == [f"moment-product identity z={z}: OK" for z in range(1, 7)]


# --- exit codes -------------------------------------------------------------------


def test_domain_error_exits_1(capsys):
    code, _, err = run_cli(["quantile", "--K", "2", "--N", "5", "--p", "1.5"], capsys)
    assert code == 1 and err.startswith("error:")
    code, _, err = run_cli(["coeffs", "--K", "5", "--N", "3"], capsys)
    assert code == 1 and "error:" in err


def test_resource_limit_exits_2(capsys):
    code, _, err = run_cli(["coeffs", "--K", "50", "--N", "50"], capsys)
    assert code == 2 and "error:" in err


def test_bad_arguments_exit_nonzero():
    with pytest.raises(SystemExit) as info:
        main(["quantile", "--K", "2", "--N", "5"])  # missing --p
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        main(["no-such-command"])
    assert info.value.code == 2


# --- validate ---------------------------------------------------------------------


def test_validate_small_run(tmp_path, capsys):
    out_path = tmp_path / "sample.csv"
    code, out, _ = run_cli(
        [
            "validate",
            "--K", "2",
            "--N", "6",
            "--samples", "4000",
            "--seed", "2718",
            "--ks-threshold", "0.05",
            "--out", str(out_path),
        ],
        capsys,
    )
    assert code == 0
    assert "KS distance:" in out and ": pass" in out and "FAIL" not in out
    rows = out_path.read_text().strip().split("\n")
    assert rows[0] == "x" and len(rows) == 4001
    meta = json.loads((tmp_path / "sample.csv.meta.json").read_text())
    assert meta["K"] == 2 and meta["N"] == 6 and meta["samples"] == 4000
    assert meta["seed"] == 2718 and meta["generator"] == "Philox" and meta["partitions"] == 1


def test_validate_unreachable_threshold_fails(capsys):
    code, out, _ = run_cli(
        ["validate", "--K", "2", "--N", "6", "--samples", "500", "--seed", "1",
         "--ks-threshold", "1e-6"],
        capsys,
    )
    assert code == 1
    assert "FAIL" in out
