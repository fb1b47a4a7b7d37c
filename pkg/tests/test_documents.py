import json

import pytest

from flowform.documents import (
    DocumentError,
    dumps,
    load_plan,
    load_scenario,
    plan_from_dict,
    plan_to_dict,
    scenario_from_dict,
    scenario_to_dict,
)
from flowform.geometry import GeoCoord, LocalPoint as P
from flowform.planner import Scenario, solve
from flowform.space_graph import Obstacle

SCEN = Scenario(
    [P(0, 0, 0), P(0, 3, 0)],
    [P(3, 0, 1), P(3, 3, 1)],
    [Obstacle(P(1.2, 1.2, 0), P(1.8, 1.8, 0.5))],
    cell_size=1.0,
    vertical_multiplier=2.0,
    padding=1,
    waypoint_count=4,
)


def test_scenario_round_trip(tmp_path):
    path = tmp_path / "s.json"
    path.write_text(dumps(scenario_to_dict(SCEN)))
    assert load_scenario(path) == SCEN


def test_overrides_win(tmp_path):
    path = tmp_path / "s.json"
    path.write_text(dumps(scenario_to_dict(SCEN)))
    s = load_scenario(path, cell_size=0.5, padding=None)
    assert s.cell_size == 0.5 and s.padding == 1


def test_geodetic_round_trip():
    s = Scenario([GeoCoord(47.0, 8.0, 0.0)], [GeoCoord(47.0001, 8.0, 10.0)])
    doc = scenario_to_dict(s)
    assert doc["frame"] == "geodetic"
    assert scenario_from_dict(json.loads(dumps(doc))) == s


def test_plan_round_trip():
    plan = solve(SCEN)
    doc = json.loads(dumps(plan_to_dict(plan, {"generator": "test"})))
    back = plan_from_dict(doc)
    assert back == plan
    assert list(doc)[-1] == "metadata"


def test_schema_error_names_location():
    doc = scenario_to_dict(SCEN)
    doc["starts"][1]["y"] = "three"
    with pytest.raises(DocumentError, match=r"\$\.starts\[1\]\.y"):
        scenario_from_dict(doc, "s.json")


def test_frame_mismatch_rejected():
    doc = scenario_to_dict(SCEN)
    doc["frame"] = "geodetic"
    with pytest.raises(DocumentError):
        scenario_from_dict(doc)


def test_value_error_is_wrapped():
    doc = scenario_to_dict(SCEN)
    doc["goals"] = doc["goals"][:1]
    with pytest.raises(DocumentError, match="2 starts but 1 goals"):
        scenario_from_dict(doc, "s.json")


def test_syntax_error_has_line(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{\n  "format": \n}')
    with pytest.raises(DocumentError, match=r"bad\.json:3:1"):
        load_scenario(path)


@pytest.mark.parametrize("text", ["", "  \n"])
def test_empty_file(tmp_path, text):
    path = tmp_path / "e.json"
    path.write_text(text)
    with pytest.raises(DocumentError, match="empty"):
        load_plan(path)


def test_missing_file(tmp_path):
    with pytest.raises(DocumentError, match="cannot read"):
        load_scenario(tmp_path / "nope.json")
