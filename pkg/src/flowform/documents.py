"""Versioned JSON documents for scenarios and plans.

Field names follow :class:`~flowform.planner.Scenario` and
:class:`~flowform.planner.Plan`. Everything that varies between identical
runs (wall time, tool version) lives under the plan's ``metadata`` key so
two plans of the same scenario compare byte-equal with it stripped.
"""

from __future__ import annotations

import json
import os
from typing import Any

import jsonschema

from flowform.errors import ValidationError
from flowform.geometry import GeoCoord, GridIndex, GridSpec, LocalPoint
from flowform.planner import AgentPlan, Plan, Scenario, SolverStats
from flowform.space_graph import Obstacle

SCENARIO_FORMAT = "flowform.scenario"
PLAN_FORMAT = "flowform.plan"
VERSION = 1

_num = {"type": "number"}
_local = {
    "type": "object",
    "properties": {"x": _num, "y": _num, "z": _num},
    "required": ["x", "y", "z"],
    "additionalProperties": False,
}
_geo = {
    "type": "object",
    "properties": {
        "latitude": {"type": "number", "minimum": -90, "maximum": 90},
        "longitude": {"type": "number", "minimum": -180, "maximum": 180},
        "altitude": _num,
    },
    "required": ["latitude", "longitude", "altitude"],
    "additionalProperties": False,
}
_cell = {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 3, "maxItems": 3}

SCENARIO_SCHEMA: dict[str, Any] = {
    "type": "object",
    "properties": {
        "format": {"const": SCENARIO_FORMAT},
        "version": {"const": VERSION},
        "frame": {"enum": ["local", "geodetic"]},
        "starts": {"type": "array", "minItems": 1},
        "goals": {"type": "array", "minItems": 1},
        "obstacles": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {"min_corner": _local, "max_corner": _local},
                "required": ["min_corner", "max_corner"],
                "additionalProperties": False,
            },
        },
        "cell_size": {"type": "number", "exclusiveMinimum": 0},
        "vertical_multiplier": {"type": "number", "minimum": 1},
        "padding": {"type": "integer", "minimum": 0},
        "waypoint_count": {"type": "integer", "minimum": 1},
        "clamp_ground": {"type": "boolean"},
    },
    "required": ["format", "version", "frame", "starts", "goals"],
    "additionalProperties": False,
    "if": {"properties": {"frame": {"const": "geodetic"}}},
    "then": {"properties": {"starts": {"items": _geo}, "goals": {"items": _geo}}},
    "else": {"properties": {"starts": {"items": _local}, "goals": {"items": _local}}},
}

PLAN_SCHEMA: dict[str, Any] = {
    "type": "object",
    "properties": {
        "format": {"const": PLAN_FORMAT},
        "version": {"const": VERSION},
        "grid": {
            "type": "object",
            "properties": {
                "origin": _local,
                "cell_size": {"type": "number", "exclusiveMinimum": 0},
                "dims": {"type": "array", "items": {"type": "integer", "minimum": 1},
                         "minItems": 3, "maxItems": 3},
            },
            "required": ["origin", "cell_size", "dims"],
        },
        "vertical_multiplier": _num,
        "anchor": {"oneOf": [{"type": "null"}, _geo]},
        "agents": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "properties": {
                    "agent": {"type": "integer", "minimum": 0},
                    "start_cell": _cell,
                    "goal_cell": _cell,
                    "cells": {"type": "array", "items": _cell, "minItems": 1},
                    "waypoints": {"type": "array", "items": _local, "minItems": 1},
                    "cost": _num,
                    "start_position": _local,
                    "goal_position": _local,
                },
                "required": ["agent", "start_cell", "goal_cell", "cells", "waypoints", "cost"],
            },
        },
        "stats": {
            "type": "object",
            "properties": {
                "value": {"type": "integer"},
                "cost": _num,
                "iterations": {"type": "integer"},
                "node_count": {"type": "integer"},
                "edge_count": {"type": "integer"},
            },
            "required": ["value", "cost", "iterations"],
        },
        "metadata": {"type": "object"},
    },
    "required": ["format", "version", "grid", "vertical_multiplier", "agents", "stats"],
}


class DocumentError(ValidationError):
    pass


def _load_json(path: str | os.PathLike) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise DocumentError(f"{path}: cannot read ({exc.strerror})") from None
    if not text.strip():
        raise DocumentError(f"{path}: empty document")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def _validate(doc: Any, schema: dict, name: str) -> None:
    err = jsonschema.exceptions.best_match(jsonschema.Draft202012Validator(schema).iter_errors(doc))
    if err is not None:
        raise DocumentError(f"{name}: at {err.json_path}: {err.message}")


def _local_d(p: LocalPoint) -> dict:
    return {"x": p.x, "y": p.y, "z": p.z}


def _geo_d(p: GeoCoord) -> dict:
    return {"latitude": p.latitude, "longitude": p.longitude, "altitude": p.altitude}


def _pos_d(p) -> dict:
    return _geo_d(p) if isinstance(p, GeoCoord) else _local_d(p)


def scenario_to_dict(s: Scenario) -> dict:
    return {
        "format": SCENARIO_FORMAT,
        "version": VERSION,
        "frame": "geodetic" if s.geodetic else "local",
        "starts": [_pos_d(p) for p in s.starts],
        "goals": [_pos_d(p) for p in s.goals],
        "obstacles": [
            {"min_corner": _local_d(o.min_corner), "max_corner": _local_d(o.max_corner)}
            for o in s.obstacles
        ],
        "cell_size": s.cell_size,
        "vertical_multiplier": s.vertical_multiplier,
        "padding": s.padding,
        "waypoint_count": s.waypoint_count,
        "clamp_ground": s.clamp_ground,
    }


def scenario_from_dict(doc: Any, name: str = "<scenario>", **overrides) -> Scenario:
    _validate(doc, SCENARIO_SCHEMA, name)
    kind = GeoCoord if doc["frame"] == "geodetic" else LocalPoint
    fields = {
        k: doc[k]
        for k in ("cell_size", "vertical_multiplier", "padding", "waypoint_count", "clamp_ground")
        if k in doc
    }
    fields.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return Scenario(
            starts=[kind(**p) for p in doc["starts"]],
            goals=[kind(**p) for p in doc["goals"]],
            obstacles=[
                Obstacle(LocalPoint(**o["min_corner"]), LocalPoint(**o["max_corner"]))
                for o in doc.get("obstacles", [])
            ],
            **fields,
        )
    except ValidationError as exc:
        raise DocumentError(f"{name}: {exc}") from None


def load_scenario(path: str | os.PathLike, **overrides) -> Scenario:
    return scenario_from_dict(_load_json(path), str(path), **overrides)


def plan_to_dict(plan: Plan, metadata: dict | None = None) -> dict:
    g = plan.grid
    doc = {
        "format": PLAN_FORMAT,
        "version": VERSION,
        "grid": {"origin": _local_d(g.origin), "cell_size": g.cell_size, "dims": list(g.dims)},
        "vertical_multiplier": plan.vertical_multiplier,
        "anchor": None if plan.anchor is None else _geo_d(plan.anchor),
        "agents": [
            {
                "agent": a.agent,
                "start_cell": list(a.start_cell),
                "goal_cell": list(a.goal_cell),
                "cells": [list(c) for c in a.cells],
                "waypoints": [_local_d(p) for p in a.waypoints],
                "cost": a.cost,
                "start_position": _local_d(a.start_position),
                "goal_position": _local_d(a.goal_position),
            }
            for a in plan.agents
        ],
        "stats": {
            "value": plan.stats.value,
            "cost": plan.stats.cost,
            "iterations": plan.stats.iterations,
            "node_count": plan.stats.node_count,
            "edge_count": plan.stats.edge_count,
        },
    }
    meta = {"wall_time_s": plan.stats.wall_time}
    meta.update(metadata or {})
    doc["metadata"] = meta
    return doc


def plan_from_dict(doc: Any, name: str = "<plan>") -> Plan:
    _validate(doc, PLAN_SCHEMA, name)
    try:
        g = doc["grid"]
        grid = GridSpec(LocalPoint(**g["origin"]), g["cell_size"], tuple(g["dims"]))
        agents = []
        for a in doc["agents"]:
            cells = tuple(GridIndex(*c) for c in a["cells"])
            agents.append(AgentPlan(
                agent=a["agent"],
                start_cell=GridIndex(*a["start_cell"]),
                goal_cell=GridIndex(*a["goal_cell"]),
                cells=cells,
                waypoints=tuple(LocalPoint(**p) for p in a["waypoints"]),
                cost=float(a["cost"]),
                start_position=LocalPoint(**a.get("start_position", {"x": 0, "y": 0, "z": 0})),
                goal_position=LocalPoint(**a.get("goal_position", {"x": 0, "y": 0, "z": 0})),
            ))
        st = doc["stats"]
        stats = SolverStats(
            value=st["value"],
            cost=float(st["cost"]),
            iterations=st["iterations"],
            wall_time=float(doc.get("metadata", {}).get("wall_time_s", 0.0)),
            node_count=st.get("node_count", 0),
            edge_count=st.get("edge_count", 0),
        )
        anchor = None if doc.get("anchor") is None else GeoCoord(**doc["anchor"])
    except ValidationError as exc:
        raise DocumentError(f"{name}: {exc}") from None
    return Plan(tuple(agents), grid, float(doc["vertical_multiplier"]), stats, anchor)


def load_plan(path: str | os.PathLike) -> Plan:
    return plan_from_dict(_load_json(path), str(path))


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


def write_document(doc: dict, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(doc))
