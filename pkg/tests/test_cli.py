import dataclasses
import json
import subprocess
import sys

import pytest

from protkernel import repository as R
from protkernel.cli import main, parse_config
from protkernel.encoders import compute_table
from protkernel.errors import UsageError
from protkernel.graph import attach_boundary, build_graph, canonical_code, format_graph, parse_graph, unlabeled


@pytest.fixture(scope="module")
def repo_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("repo") / "rds.json"
    assert main(["repo", "--problem", "rds:r=1", "--t", "1", "--size-bound", "3", "--exclude", "K5",
                 "--output", str(path)]) == 0
    return path


def write_graph(path, g):
    path.write_text(format_graph(unlabeled(g)))
    return path


def tail_instance():
    return build_graph(6, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 5)])


def test_repo_is_byte_identical(repo_file, tmp_path, capsys):
    again = tmp_path / "again.json"
    assert main(["repo", "--problem", "rds:r=1", "--t", "1", "--size-bound", "3", "--exclude", "K5",
                 "--output", str(again)]) == 0
    assert again.read_bytes() == repo_file.read_bytes()
    err = capsys.readouterr().err
    assert "classes" in err and "max representative" in err
    doc = json.loads(repo_file.read_text())
    assert doc["header"]["problem"] == "rds:r=1" and doc["records"]
    repo = R.loads(repo_file.read_text())
    p1 = attach_boundary(build_graph(1, []), [(0, 1)])
    assert canonical_code(repo.buckets[repo.key_of(p1)].rep) == canonical_code(p1)


def test_zero_size_bound_is_usage_error(capsys):
    assert main(["repo", "--problem", "rds:r=1", "--size-bound", "0"]) == 2
    assert "size-bound" in capsys.readouterr().err


def test_greedy_with_modulator_rejected():
    with pytest.raises(UsageError):
        parse_config(["kernelize", "--input", "g", "--k", "1", "--repo", "r", "--mode", "greedy",
                      "--modulator", "m"])


def test_kernelize_tail(repo_file, tmp_path):
    inp = write_graph(tmp_path / "g.txt", tail_instance())
    out = tmp_path / "k.txt"
    rep = tmp_path / "rep.json"
    code = main(["kernelize", "--problem", "rds:r=1", "--exclude", "K5", "--input", str(inp), "--k", "3",
                 "--repo", str(repo_file), "--output", str(out), "--report", str(rep), "--verify"])
    assert code == 0
    doc = json.loads(rep.read_text())
    assert doc["output"]["k"] <= 3 and doc["output"]["n"] < 6
    assert doc["verify"]["equivalent"]
    assert parse_graph(out.read_text()).n == doc["output"]["n"]


def test_kernelize_unchanged_small(repo_file, tmp_path, capsys):
    inp = write_graph(tmp_path / "g.txt", build_graph(3, [(0, 1), (1, 2), (0, 2)]))
    assert main(["kernelize", "--input", str(inp), "--k", "1", "--repo", str(repo_file)]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["output"] == {"n": 3, "m": 3, "k": 1}


def test_kernelize_with_modulator_file(repo_file, tmp_path, capsys):
    inp = write_graph(tmp_path / "g.txt", tail_instance())
    mod = tmp_path / "x.txt"
    mod.write_text("2\n")
    assert main(["kernelize", "--input", str(inp), "--k", "3", "--repo", str(repo_file),
                 "--modulator", str(mod)]) == 0
    assert json.loads(capsys.readouterr().out)["decomposition"]["modulator"] == [2]


def test_missing_repository_is_actionable(tmp_path, capsys):
    inp = write_graph(tmp_path / "g.txt", tail_instance())
    assert main(["kernelize", "--input", str(inp), "--k", "3", "--repo", str(tmp_path / "none.json")]) == 2
    assert "not found" in capsys.readouterr().err


def test_mismatched_repository_problem(repo_file, tmp_path, capsys):
    inp = write_graph(tmp_path / "g.txt", tail_instance())
    assert main(["kernelize", "--problem", "fdel:F=K3", "--input", str(inp), "--k", "3",
                 "--repo", str(repo_file)]) == 2
    assert "UsageError" in capsys.readouterr().err


def test_bad_input_graph(repo_file, tmp_path):
    bad = tmp_path / "g.txt"
    bad.write_text("3 1\n0 1\nextra\n")
    assert main(["kernelize", "--input", str(bad), "--k", "1", "--repo", str(repo_file)]) == 2


def test_verify_is_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    args = ["verify", "--problem", "rds:r=1", "--t", "2", "--size-bound", "3", "--exclude", "K5",
            "--count", "6", "--seed", "4"]
    assert main(args + ["--report", str(a)]) == 0
    assert main(args + ["--report", str(b), "--mode", "modulator"]) == 0
    assert a.read_bytes() == b.read_bytes()
    doc = json.loads(a.read_text())
    assert doc["passed"] and doc["checks"]["equivalence"] == {"passed": 6, "total": 6}
    assert doc["checks"]["decomposition_valid"]["passed"] == 6


def test_verify_flags_corrupted_repository(repo_file, tmp_path):
    # the P1 bucket is given P4 as its representative: still a member, but not progressive
    repo = R.loads(repo_file.read_text())
    p4 = attach_boundary(build_graph(4, [(0, 1), (1, 2), (2, 3)]), [(0, 1)])
    bad = repo.key_of(p4)
    repo.b = 4
    repo.buckets[bad] = dataclasses.replace(repo.buckets[bad], rep=p4, table=compute_table(p4, repo.encoder),
                                            code=canonical_code(p4))
    path = tmp_path / "bad.json"
    R.save(repo, path)
    rep = tmp_path / "rep.json"
    code = main(["verify", "--repo", str(path), "--count", "4", "--mode", "greedy", "--report", str(rep)])
    out = json.loads(rep.read_text())
    assert code == 1 and not out["passed"]
    assert out["repository"]["progressive_violations"] > 0


def test_console_script_help():
    proc = subprocess.run([sys.executable, "-m", "protkernel.cli", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    for sub in ("repo", "kernelize", "verify"):
        assert sub in proc.stdout
