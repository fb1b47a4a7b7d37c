import csv
import io
import json

import pytest

from flowform.cli import main
from flowform.documents import dumps, scenario_to_dict
from flowform.geometry import LocalPoint as P
from flowform.planner import Scenario


def write_scenario(tmp_path, s, name="s.json"):
    path = tmp_path / name
    path.write_text(dumps(scenario_to_dict(s)))
    return str(path)


@pytest.fixture
def simple(tmp_path):
    s = Scenario([P(0, 0, 0), P(0, 3, 0)], [P(3, 0, 0), P(3, 3, 0)], cell_size=1.0)
    return write_scenario(tmp_path, s)


@pytest.fixture
def corridor(tmp_path):
    s = Scenario([P(0, 0, 0), P(1.5, 0, 0)], [P(1.5, 0, 0), P(2.5, 0, 0)], cell_size=1.0)
    return write_scenario(tmp_path, s, "corridor.json")


def test_plan_and_verify(tmp_path, simple, capsys):
    out = str(tmp_path / "p.json")
    assert main(["plan", simple, "-o", out]) == 0
    assert main(["verify", out, simple]) == 0
    assert capsys.readouterr().out.rstrip().endswith("plan OK")


def test_plan_to_stdout(simple, capsys):
    assert main(["plan", simple]) == 0
    assert json.loads(capsys.readouterr().out)["stats"]["value"] == 2


def test_infeasible_exit_2(corridor, capsys):
    assert main(["plan", corridor]) == 2
    err = capsys.readouterr().err
    assert "max flow 1 < 2" in err and "padding" in err


def test_missing_file_exit_1(tmp_path, capsys):
    assert main(["plan", str(tmp_path / "none.json")]) == 1
    assert "cannot read" in capsys.readouterr().err


def test_bad_option_exit_1(simple):
    assert main(["plan", simple, "--cell-size", "abc"]) == 1
    assert main(["plan", simple, "--padding", "-1"]) == 1
    assert main(["no-such-command"]) == 1


def test_verify_detects_tampering(tmp_path, simple, capsys):
    out = tmp_path / "p.json"
    main(["plan", simple, "-o", str(out)])
    doc = json.loads(out.read_text())
    doc["agents"][1]["cells"] = doc["agents"][0]["cells"]
    doc["agents"][1]["cost"] = doc["agents"][0]["cost"]
    out.write_text(json.dumps(doc))
    capsys.readouterr()
    assert main(["verify", str(out), simple, "--format", "json"]) == 2
    report = json.loads(capsys.readouterr().out)
    assert "disjoint" in [c["name"] for c in report["checks"] if not c["passed"]]


def test_verify_grid_mismatch_exit_1(tmp_path, simple, capsys):
    out = str(tmp_path / "p.json")
    main(["plan", simple, "-o", out, "--cell-size", "0.5"])
    assert main(["verify", out, simple]) == 1
    assert "does not match" in capsys.readouterr().err


@pytest.mark.parametrize(
    "args, lines",
    [
        (["cube", "--side", "4", "--spacing", "5", "--altitude", "25"], 64),
        (["grid", "--rows", "8", "--cols", "8", "--spacing", "5"], 64),
        (["cube", "--side", "1", "--spacing", "5"], 1),
    ],
)
def test_pattern_counts(args, lines, capsys):
    assert main(["pattern", *args]) == 0
    assert len(capsys.readouterr().out.splitlines()) == lines


def test_pattern_rejects_zero_side(capsys):
    assert main(["pattern", "cube", "--side", "0", "--spacing", "1"]) == 1


def test_cube_workflow_files(tmp_path, capsys):
    starts, goals = tmp_path / "g.txt", tmp_path / "c.txt"
    main(["pattern", "grid", "--rows", "2", "--cols", "2", "--spacing", "2", "-o", str(starts)])
    main(["pattern", "cube", "--side", "2", "--spacing", "2", "--altitude", "3", "-o", str(goals)])
    # 8 cube points need 8 starts; a 2x2 grid has only 4, so this must be rejected
    assert main(["make-scenario", "--starts", str(starts), "--goals", str(goals)]) == 1
    main(["pattern", "grid", "--rows", "2", "--cols", "4", "--spacing", "2", "-o", str(starts)])
    scen = tmp_path / "s.json"
    assert main(["make-scenario", "--starts", str(starts), "--goals", str(goals),
                 "--cell-size", "1", "--padding", "1", "-o", str(scen)]) == 0
    plan = str(tmp_path / "p.json")
    assert main(["plan", str(scen), "-o", plan]) == 0
    assert main(["verify", plan, str(scen)]) == 0


def test_export_plot(tmp_path, capsys):
    s = Scenario([P(0, 0, 0), P(0, 3, 0)], [P(4, 0, 0), P(4, 3, 0)], cell_size=1.0, waypoint_count=5)
    path = write_scenario(tmp_path, s)
    plan = str(tmp_path / "p.json")
    main(["plan", path, "-o", plan])
    capsys.readouterr()
    assert main(["export-plot", plan]) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert len(rows) == 10
    assert [r["agent"] for r in rows] == ["0"] * 5 + ["1"] * 5
    assert [r["seq"] for r in rows[:5]] == ["0", "1", "2", "3", "4"]
    assert main(["export-plot", plan, "--format", "json"]) == 0
    assert len(json.loads(capsys.readouterr().out)) == 10


def test_export_plot_empty_file(tmp_path):
    empty = tmp_path / "empty.json"
    empty.write_text("")
    assert main(["export-plot", str(empty)]) == 1


def test_bench(simple, capsys):
    assert main(["bench", simple, "--repeats", "3", "--format", "json"]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["flow_value"] == 2
    for phase in ("graph_build", "max_flow", "decomposition", "total"):
        assert len(summary["phases"][phase]["samples"]) == 3
    assert summary["phases"]["total"]["median"] < 1.0


def test_bench_infeasible(corridor):
    assert main(["bench", corridor]) == 2


def test_env_override(tmp_path, simple, monkeypatch, capsys):
    monkeypatch.setenv("FLOWFORM_PLAN_CELL_SIZE", "0.5")
    assert main(["plan", simple]) == 0
    assert json.loads(capsys.readouterr().out)["grid"]["cell_size"] == 0.5


def test_dump_state_graph(tmp_path, simple):
    dump = tmp_path / "g.txt"
    assert main(["plan", simple, "--dump-state-graph", str(dump), "-o", str(tmp_path / "p.json")]) == 0
    lines = dump.read_text().splitlines()
    # 3x3x1 grid: 9 internal, 2 arcs per each of 12 adjacencies, 2 source and 2 sink edges
    assert len(lines) == 9 + 24 + 4
    assert all(len(line.split()) == 4 for line in lines)


def test_random_scenario_is_seeded(capsys):
    main(["random-scenario", "--seed", "7"])
    first = capsys.readouterr().out
    main(["random-scenario", "--seed", "7"])
    assert capsys.readouterr().out == first
