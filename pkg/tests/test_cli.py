import subprocess
import sys

import pytest

from mapfdl.cli import main, read_config
from mapfdl.core import parse_instance, parse_plan, validate_plan
from mapfdl.solvers import AlgorithmSpec, solve

from conftest import I1_TEXT, I2_TEXT


@pytest.fixture
def files(tmp_path):
    (tmp_path / "i1.txt").write_text(I1_TEXT)
    (tmp_path / "i2.txt").write_text(I2_TEXT)
    return tmp_path


def test_solve_dbs_i1(files, capsys):
    assert main(["solve", "--alg", "dbs", "--in", str(files / "i1.txt")]) == 0
    assert capsys.readouterr().out == "cost 1\n"


@pytest.mark.parametrize("argv", [
    ["--alg", "ma-dbs", "--merge-threshold", "10"],
    ["--alg", "ma-dbs", "--merge-threshold", "0"],
    ["--alg", "cbs-dl"],
    ["--alg", "ilp"],
    ["--alg", "ilp", "--backend", "bnb"],
])
def test_solve_variants(files, capsys, argv):
    assert main(["solve", *argv, "--in", str(files / "i2.txt")]) == 0
    assert capsys.readouterr().out == "cost 0\n"


def test_plan_round_trip(files, capsys):
    out = files / "plan.txt"
    assert main(["solve", "--alg", "cbs-dl", "--in", str(files / "i2.txt"), "--out", str(out)]) == 0
    inst = parse_instance(I2_TEXT)
    plan = parse_plan(out.read_text(), inst)
    assert validate_plan(inst, plan).ok
    assert plan.cost == solve(inst, AlgorithmSpec("cbs-dl")).cost
    assert main(["validate", "--in", str(files / "i2.txt"), "--plan", str(out)]) == 0


def test_validate_tampered_swap(files, capsys):
    plan = files / "swap.txt"
    plan.write_text("plan 2 2 0\npath 0 0 1 2\npath 1 2 1 0\n")
    assert main(["validate", "--in", str(files / "i1.txt"), "--plan", str(plan)]) == 2
    assert "vertex collision" in capsys.readouterr().out


def test_validate_edge_swap_listed(files, capsys):
    (files / "line2.txt").write_text("mapfdl 1\ndeadline 1\ngraph 2 1\n0 1\nagents 2\n0 1\n1 0\n")
    (files / "p.txt").write_text("plan 2 1 0\npath 0 0 1\npath 1 1 0\n")
    assert main(["validate", "--in", str(files / "line2.txt"), "--plan", str(files / "p.txt")]) == 2
    assert "edge collision a0 a1" in capsys.readouterr().out


def test_timeout_exit_code(files, capsys):
    text = "mapfdl 1\ndeadline 4\ngraph 5 4\n0 1\n1 2\n2 3\n3 4\nagents 4\n0 4\n4 0\n1 3\n3 1\n"
    (files / "hard.txt").write_text(text)
    assert main(["solve", "--alg", "cbs-dl", "--node-budget", "1", "--in", str(files / "hard.txt")]) == 1
    assert capsys.readouterr().out == "timeout\n"


def test_input_errors(files, capsys):
    assert main(["solve", "--alg", "dbs", "--in", str(files / "missing.txt")]) == 2
    (files / "bad.txt").write_text("mapfdl 1\ndeadline 1\ngraph 3 1\n0 1\nagents 1\n0 2\n")
    assert main(["solve", "--alg", "dbs", "--in", str(files / "bad.txt")]) == 2
    assert "unreachable" in capsys.readouterr().err


def test_usage_error_goes_to_stderr(capsys):
    assert main(["solve", "--alg", "astar"]) == 2
    captured = capsys.readouterr()
    assert captured.out == "" and "usage" in captured.err


def test_generate_deterministic(files, capsys):
    a, b = files / "a.txt", files / "b.txt"
    for path in (a, b):
        assert main(["generate", "--preset", "desk-small", "--agents", "5", "--seed", "11", "--out", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()
    inst = parse_instance(a.read_text())
    assert inst.num_agents == 5 and inst.deadline == 24


def test_generate_custom_flags(capsys):
    assert main(["generate", "--preset", "tiny", "--width", "5", "--height", "4", "--deadline", "6",
                 "--distances", "3,4", "--agents", "2", "--seed", "1"]) == 0
    inst = parse_instance(capsys.readouterr().out)
    assert (inst.graph.height, inst.graph.width, inst.deadline) == (4, 5, 6)


def test_export_ilp(files, capsys):
    out = files / "m.lp"
    assert main(["export-ilp", "--in", str(files / "i1.txt"), "--out", str(out)]) == 0
    text = out.read_text()
    assert text.startswith("\\ ") and "Maximize" in text and "y_0 + y_1" in text


def test_config_file_selects_backend(files, capsys):
    cfg = files / "solver.cfg"
    cfg.write_text(f"# backend\nilp_command = {sys.executable} -m mapfdl.ilp_flow.runner {{model}} {{solution}}\n")
    assert read_config(cfg)["ilp_command"].endswith("{model} {solution}")
    assert main(["solve", "--alg", "ilp", "--config", str(cfg), "--in", str(files / "i1.txt")]) == 0
    assert capsys.readouterr().out == "cost 1\n"


def test_bench_writes_csvs(files, capsys):
    outdir = files / "bench"
    argv = ["bench", "--preset", "tiny", "--preset", "desk-small", "--agents", "2", "--instances", "2",
            "--algorithms", "ilp,cbs-dl,dbs,ma-dbs:0,ma-dbs:10,ma-dbs:100", "--time-limit", "10",
            "--no-isolate", "--trend", "--out-dir", str(outdir)]
    assert main(argv) == 0
    names = sorted(p.name for p in outdir.iterdir())
    assert "tiny.csv" in names and "desk-small_success_rate.csv" in names and "trend_summary.txt" in names
    assert (outdir / "tiny.csv").read_text().splitlines()[0] == \
           "instance,algorithm,params,status,cost,wall_ms,nodes_expanded"
    assert "COST MISMATCH" not in capsys.readouterr().out


def test_module_entry_point(files):
    proc = subprocess.run([sys.executable, "-m", "mapfdl", "solve", "--alg", "ma-dbs", "--merge-threshold", "0",
                           "--in", str(files / "i1.txt")], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "cost 1\n"
