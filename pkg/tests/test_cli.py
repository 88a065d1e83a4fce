import json
import subprocess
import sys

import pytest

from crcurv.cli import main, record_line

SPHERE_FILE = """\
ambient flat q=2
dims d=2 l=1
domain u1 0.3 2.8
domain u2 0.3 2.8
domain u3 0.3 2.8
component cos(u1)
component sin(u1)*cos(u2)
component sin(u1)*sin(u2)*cos(u3)
component sin(u1)*sin(u2)*sin(u3)
"""


def run_cli(args):
    return main(args)


def read_jsonl(path):
    with open(path) as fh:
        return [json.loads(line) for line in fh]


def test_catalog_command(capsys):
    assert run_cli(["catalog"]) == 0
    out = capsys.readouterr().out
    assert "sphere_in_Cq:2,1,2" in out
    assert "flat_torus:2" in out


def test_explain_command(capsys):
    assert run_cli(["explain", "mixed_scalar"]) == 0
    out = capsys.readouterr().out
    assert "Mixed scalar curvature" in out
    assert run_cli(["explain", "nonsense"]) == 2


def test_run_mixed_scalar_sphere(tmp_path):
    out = tmp_path / "report.jsonl"
    code = run_cli(["run", "--chart", "sphere_in_Cq:2,1,2",
                    "--check", "mixed_scalar", "--points", "9",
                    "--seed", "0", "--out", str(out)])
    assert code == 0
    records = read_jsonl(out)
    assert records[0]["kind"] == "header"
    checks = [r for r in records if r["kind"] == "check"]
    assert len(checks) == 9
    for r in checks:
        assert r["passed"] is True
        assert r["equality"] is False
        assert abs(r["slack"] - 0.25) <= 1e-6


def test_run_invariant_flat_torus(tmp_path):
    out = tmp_path / "inv.jsonl"
    code = run_cli(["run", "--chart", "flat_torus:2",
                    "--invariant", "delta_m:+:1,1", "--points", "3",
                    "--out", str(out)])
    assert code == 0
    records = [r for r in read_jsonl(out) if r["kind"] == "invariant"]
    assert len(records) == 3
    for r in records:
        assert abs(r["value"]) <= 1e-10


def test_run_determinism_byte_identical(tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    args = ["run", "--chart", "sphere_in_Cq:2,1,2", "--check", "all",
            "--points", "2", "--seed", "7", "--restarts", "3",
            "--certify-samples", "500"]
    assert run_cli(args + ["--out", str(a)]) == 0
    assert run_cli(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_run_chart_file(tmp_path):
    chart = tmp_path / "my.chart"
    chart.write_text(SPHERE_FILE)
    out = tmp_path / "file.jsonl"
    code = run_cli(["run", "--chart", f"file:{chart}",
                    "--check", "mixed_scalar", "--points", "2",
                    "--out", str(out)])
    assert code == 0


def test_run_unknown_chart_exit_2(tmp_path):
    code = run_cli(["run", "--chart", "nope", "--check", "mixed_scalar",
                    "--points", "1", "--out", str(tmp_path / "x.jsonl")])
    assert code == 2


def test_run_bad_selection_exit_2(tmp_path):
    code = run_cli(["run", "--chart", "flat_torus:2",
                    "--check", "no_such_check", "--points", "1",
                    "--out", str(tmp_path / "x.jsonl")])
    assert code == 2


def test_run_computation_error_exit_3(tmp_path):
    # holomorphic check needs d >= 4; flat torus has d = 2
    code = run_cli(["run", "--chart", "flat_torus:2",
                    "--check", "holomorphic:2", "--points", "1",
                    "--out", str(tmp_path / "x.jsonl")])
    assert code == 3


def test_argparse_unknown_flag_exits_2():
    with pytest.raises(SystemExit) as exc:
        run_cli(["run", "--chart", "flat_torus:2", "--frobnicate"])
    assert exc.value.code == 2


def test_run_d_minimal_scan_record(tmp_path):
    out = tmp_path / "scan.jsonl"
    code = run_cli(["run", "--chart", "holomorphic_product",
                    "--check", "d_minimal", "--points", "3",
                    "--out", str(out)])
    assert code == 0
    scans = [r for r in read_jsonl(out) if r["kind"] == "scan"]
    assert len(scans) == 1
    assert scans[0]["is_d_minimal"] is True
    assert scans[0]["contradiction"] is False


def test_run_csv_format(tmp_path):
    out = tmp_path / "report.csv"
    code = run_cli(["run", "--chart", "sphere_in_Cq:2,1,2",
                    "--check", "mixed_scalar", "--points", "2",
                    "--format", "csv", "--out", str(out)])
    assert code == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0].startswith("kind,chart,point_index,name")
    assert len(lines) == 3


def test_grid_sampling(tmp_path):
    out = tmp_path / "grid.jsonl"
    code = run_cli(["run", "--chart", "flat_torus:2",
                    "--invariant", "mixed_scalar", "--grid", "2",
                    "--out", str(out)])
    assert code == 0
    records = [r for r in read_jsonl(out) if r["kind"] == "invariant"]
    assert len(records) == 8  # 2^3 grid points


def test_jobs_flag_matches_serial(tmp_path):
    a, b = tmp_path / "serial.jsonl", tmp_path / "par.jsonl"
    args = ["run", "--chart", "flat_torus:2", "--check", "mixed_scalar",
            "--points", "4", "--seed", "1"]
    assert run_cli(args + ["--jobs", "1", "--out", str(a)]) == 0
    assert run_cli(args + ["--jobs", "2", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_seventeen_digit_serialization():
    line = record_line({"value": 1.0 / 3.0, "flag": True, "n": 3,
                        "nested": {"u": [0.25, 1e-17]}})
    assert line == ('{"flag":true,"n":3,"nested":{"u":[0.25,'
                    '1.0000000000000001e-17]},"value":0.33333333333333331}')


def test_console_entrypoint():
    proc = subprocess.run([sys.executable, "-m", "crcurv.cli", "catalog"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "sphere_in_Cq" in proc.stdout
