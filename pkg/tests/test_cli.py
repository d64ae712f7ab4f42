from __future__ import annotations

import json
import subprocess
import sys

import pytest

from graphrank.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    return code, json.loads(out)


def test_state_ring3(capsys):
    code, rep = run_json(capsys, "state", "--ring", "3")
    assert code == 0
    amps = rep["results"]["amplitudes"]
    assert len(amps) == 8
    assert [a[0] for a in amps] == [1, 1, 1, -1, 1, -1, -1, -1]
    assert all(a[1:] == [0, 3] for a in amps)


def test_state_empty_edge_file(tmp_path, capsys):
    f = tmp_path / "g.txt"
    f.write_text("3\n")
    code, rep = run_json(capsys, "state", "--edges", str(f))
    assert code == 0
    assert all(a == [1, 0, 3] for a in rep["results"]["amplitudes"])


def test_malformed_edge_file(tmp_path, capsys):
    f = tmp_path / "g.txt"
    f.write_text("3\n0 1\n2 9\n")
    code, _, err = run(capsys, "state", "--edges", str(f))
    assert code == 2
    assert "line 3" in err


def test_state_round_trip(tmp_path, capsys):
    f = tmp_path / "s.json"
    code, first = run_json(capsys, "state", "--ring", "5", "--out", str(f))
    code, second = run_json(capsys, "state", "--load", str(f))
    assert code == 0
    assert second["results"]["amplitudes"] == first["results"]["amplitudes"]


def test_cpd_commands(capsys):
    code, rep = run_json(capsys, "cpd", "ring", "7", "--verify")
    assert code == 0
    assert rep["results"]["terms"] == 12
    assert rep["results"]["verification"]["exact_match"]
    code, rep = run_json(capsys, "cpd", "line", "2")
    assert rep["results"]["terms"] == 2
    code, _, err = run(capsys, "cpd", "ring", "4")
    assert code == 2


def test_bounds_measures_census(capsys):
    _, rep = run_json(capsys, "bounds", "--ring", "7")
    assert (rep["results"]["lower"], rep["results"]["upper"]) == (9, 12)
    _, rep = run_json(capsys, "measures", "--ring", "5", "--method", "all")
    closed = rep["results"]["closed-form"]
    assert (closed["concurrence"], closed["negativity"], closed["geometric"]) == (1.0, 0.5, 0.5)
    assert rep["results"]["agree"]
    _, rep = run_json(capsys, "census", "4")
    assert rep["results"]["count"] == 8


def test_ntangle_all_methods(capsys):
    code, rep = run_json(capsys, "ntangle", "--complete", "4", "--method", "all")
    assert code == 0
    assert set(rep["results"]["values"].values()) == {1}
    code, rep = run_json(capsys, "ntangle", "--graph6", "C~")
    assert rep["inputs"]["n"] == 4


def test_orbit_and_structure(capsys):
    _, rep = run_json(capsys, "orbit", "--ring", "5")
    assert rep["results"]["size"] == 132 and rep["results"]["min_vertex_cover"] == 3
    code, rep = run_json(capsys, "structure", "2", "--trials", "50")
    assert code == 0 and rep["results"]["passed"]


def test_als_command(capsys):
    code, rep = run_json(capsys, "als", "--ring", "3", "--rank", "3", "--restarts", "5")
    assert code == 0 and rep["results"]["residual"] < 1e-8
    code, rep = run_json(capsys, "als", "--line", "4", "--sweep", "3..4", "--restarts", "3")
    assert [r["R"] for r in rep["results"]["table"]] == [3, 4]
    code, _, _ = run(capsys, "als", "--line", "4")
    assert code == 2


def test_resource_limit(capsys):
    code, _, err = run(capsys, "state", "--ring", "30")
    assert code == 3


def test_json_is_reproducible(capsys):
    _, a = run_json(capsys, "als", "--ring", "5", "--rank", "4", "--restarts", "2", "--seed", "3")
    _, b = run_json(capsys, "als", "--ring", "5", "--rank", "4", "--restarts", "2", "--seed", "3")
    a.pop("wall_time"), b.pop("wall_time")
    assert a == b


def test_bad_arguments_exit_with_input_code(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["bounds"])
    assert exc.value.code == 2


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "graphrank.cli", "census", "6"], capture_output=True, text=True)
    assert out.returncode == 0
    assert out.stdout.strip() == "1024"
