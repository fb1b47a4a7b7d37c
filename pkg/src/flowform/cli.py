"""Command-line front end.

Exit codes: 0 success, 1 bad input or usage, 2 infeasible scenario or a
plan that fails verification. Every option can also be set through an
environment variable ``FLOWFORM_<COMMAND>_<OPTION>``, e.g.
``FLOWFORM_PLAN_CELL_SIZE=1.5``.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import random
import statistics
import sys
import time

import click

from flowform import __version__
from flowform.corpus import random_scenario
from flowform.documents import (
    dumps,
    load_plan,
    load_scenario,
    plan_to_dict,
    scenario_to_dict,
)
from flowform.errors import FlowformError, InfeasibleError
from flowform.geometry import LocalPoint
from flowform.patterns import CubePattern, FilePattern, GridPattern, generate, write_points
from flowform.planner import Scenario, build_graphs, solve
from flowform.verifier import check_plan

EXIT_OK, EXIT_INPUT, EXIT_INFEASIBLE = 0, 1, 2

log = logging.getLogger("flowform")


def _setup_logging(verbose: bool) -> None:
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(name)s: %(message)s",
        force=True,
    )
    logging.getLogger("numba").setLevel(logging.WARNING)


def _emit(text: str, output: str | None) -> None:
    if output in (None, "-"):
        click.echo(text, nl=False)
    else:
        with open(output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


class _Fail(click.ClickException):
    def __init__(self, message: str, code: int = EXIT_INPUT):
        super().__init__(message)
        self.exit_code = code


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(__version__, prog_name="flowform")
def cli() -> None:
    """Collision-free formation path planning for unlabeled agents."""


def _planning_options(f):
    for opt in reversed([
        click.option("--cell-size", type=float, help="Grid cell edge in meters."),
        click.option("--vertical-multiplier", type=float, help="Cost factor for vertical moves."),
        click.option("--padding", type=click.IntRange(min=0), help="Spare cells around the box."),
        click.option("--waypoints", type=click.IntRange(min=1), help="Waypoints per agent."),
        click.option("--clamp-ground/--no-clamp-ground", default=None,
                     help="Keep padding from pushing the grid below z = 0."),
        click.option("-v", "--verbose", is_flag=True, help="Trace every augmentation on stderr."),
    ]):
        f = opt(f)
    return f


def _load(path: str, cell_size, vertical_multiplier, padding, waypoints, clamp_ground) -> Scenario:
    try:
        return load_scenario(
            path,
            cell_size=cell_size,
            vertical_multiplier=vertical_multiplier,
            padding=padding,
            waypoint_count=waypoints,
            clamp_ground=clamp_ground,
        )
    except FlowformError as exc:
        raise _Fail(str(exc)) from None


@cli.command("plan")
@click.argument("scenario", type=click.Path(dir_okay=False))
@click.option("-o", "--output", type=click.Path(dir_okay=False), help="Plan file (default stdout).")
@click.option("--dump-state-graph", type=click.Path(dir_okay=False),
              help="Write the flow network as 'from to weight capacity' lines.")
@_planning_options
def plan_cmd(scenario, output, dump_state_graph, cell_size, vertical_multiplier, padding,
             waypoints, clamp_ground, verbose):
    """Plan collision-free paths for SCENARIO."""
    _setup_logging(verbose)
    s = _load(scenario, cell_size, vertical_multiplier, padding, waypoints, clamp_ground)
    try:
        build = build_graphs(s)
        if dump_state_graph:
            with open(dump_state_graph, "w", encoding="utf-8") as fh:
                build.state.dump(fh)
        plan = solve(s, build)
    except InfeasibleError as exc:
        raise _Fail(str(exc), EXIT_INFEASIBLE) from None
    except FlowformError as exc:
        raise _Fail(str(exc)) from None
    _emit(dumps(plan_to_dict(plan, {"generator": f"flowform {__version__}"})), output)


@cli.command("verify")
@click.argument("plan", type=click.Path(dir_okay=False))
@click.argument("scenario", type=click.Path(dir_okay=False))
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
def verify_cmd(plan, scenario, fmt):
    """Check PLAN against SCENARIO; exit 2 if any check fails."""
    try:
        report = check_plan(load_plan(plan), load_scenario(scenario))
    except FlowformError as exc:
        raise _Fail(str(exc)) from None
    click.echo(report.to_json() if fmt == "json" else report.to_text())
    if not report.passed:
        sys.exit(EXIT_INFEASIBLE)


@cli.group("pattern")
def pattern_group():
    """Write formation points files (one 'x y z' line per point)."""


def _offset_option(f):
    return click.option("--offset", nargs=3, type=float, default=(0.0, 0.0, 0.0),
                        metavar="X Y Z", help="Shift applied to every point.")(f)


def _write_pattern(spec, output):
    try:
        points = generate(spec)
    except (FlowformError, OSError) as exc:
        raise _Fail(str(exc)) from None
    buf = io.StringIO()
    write_points(points, buf)
    _emit(buf.getvalue(), output)


@pattern_group.command("grid")
@click.option("--rows", type=int, required=True)
@click.option("--cols", type=int, required=True)
@click.option("--spacing", type=float, required=True)
@click.option("--altitude", type=float, default=0.0)
@_offset_option
@click.option("-o", "--output", type=click.Path(dir_okay=False))
def pattern_grid(rows, cols, spacing, altitude, offset, output):
    """Planar rows x cols lattice."""
    try:
        spec = GridPattern(rows, cols, spacing, altitude, LocalPoint(*offset))
    except FlowformError as exc:
        raise _Fail(str(exc)) from None
    _write_pattern(spec, output)


@pattern_group.command("cube")
@click.option("--side", type=int, required=True)
@click.option("--spacing", type=float, required=True)
@click.option("--altitude", type=float, default=0.0, help="Height of the bottom layer.")
@_offset_option
@click.option("-o", "--output", type=click.Path(dir_okay=False))
def pattern_cube(side, spacing, altitude, offset, output):
    """side^3 cubic lattice."""
    try:
        spec = CubePattern(side, spacing, altitude, LocalPoint(*offset))
    except FlowformError as exc:
        raise _Fail(str(exc)) from None
    _write_pattern(spec, output)


@pattern_group.command("file")
@click.argument("points", type=click.Path(dir_okay=False))
@_offset_option
@click.option("-o", "--output", type=click.Path(dir_okay=False))
def pattern_file(points, offset, output):
    """Re-emit a points file, shifted by --offset."""
    _write_pattern(FilePattern(points, LocalPoint(*offset)), output)


@cli.command("make-scenario")
@click.option("--starts", type=click.Path(dir_okay=False), required=True, help="Points file.")
@click.option("--goals", type=click.Path(dir_okay=False), required=True, help="Points file.")
@click.option("-o", "--output", type=click.Path(dir_okay=False))
@_planning_options
def make_scenario(starts, goals, output, cell_size, vertical_multiplier, padding, waypoints,
                  clamp_ground, verbose):
    """Combine two points files into a local-frame scenario document."""
    fields = {
        "cell_size": cell_size,
        "vertical_multiplier": vertical_multiplier,
        "padding": padding,
        "waypoint_count": waypoints,
        "clamp_ground": clamp_ground,
    }
    try:
        s = Scenario(
            generate(FilePattern(starts)),
            generate(FilePattern(goals)),
            **{k: v for k, v in fields.items() if v is not None},
        )
    except (FlowformError, OSError) as exc:
        raise _Fail(str(exc)) from None
    _emit(dumps(scenario_to_dict(s)), output)


@cli.command("random-scenario")
@click.option("--seed", type=int, required=True)
@click.option("--max-agents", type=click.IntRange(1, 3), default=3)
@click.option("-o", "--output", type=click.Path(dir_okay=False))
def random_scenario_cmd(seed, max_agents, output):
    """Seeded random scenario small enough for the exhaustive oracle."""
    s = random_scenario(random.Random(seed), max_agents=max_agents)
    _emit(dumps(scenario_to_dict(s)), output)


@cli.command("export-plot")
@click.argument("plan", type=click.Path(dir_okay=False))
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="csv")
@click.option("-o", "--output", type=click.Path(dir_okay=False))
def export_plot(plan, fmt, output):
    """One record per waypoint: agent, seq, x, y, z."""
    try:
        p = load_plan(plan)
    except FlowformError as exc:
        raise _Fail(str(exc)) from None
    records = [
        {"agent": a.agent, "seq": i, "x": w.x, "y": w.y, "z": w.z}
        for a in sorted(p.agents, key=lambda a: a.agent)
        for i, w in enumerate(a.waypoints)
    ]
    if fmt == "json":
        text = json.dumps(records, indent=1) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=["agent", "seq", "x", "y", "z"], lineterminator="\n")
        writer.writeheader()
        writer.writerows(records)
        text = buf.getvalue()
    _emit(text, output)


@cli.command("bench")
@click.argument("scenario", type=click.Path(dir_okay=False))
@click.option("--repeats", type=click.IntRange(min=1), default=1)
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
@_planning_options
def bench(scenario, repeats, fmt, cell_size, vertical_multiplier, padding, waypoints,
          clamp_ground, verbose):
    """Time graph build, max-flow and decomposition over REPEATS runs."""
    _setup_logging(verbose)
    s = _load(scenario, cell_size, vertical_multiplier, padding, waypoints, clamp_ground)
    samples: dict[str, list[float]] = {}
    value = nodes = edges = None
    status = EXIT_OK
    for _ in range(repeats):
        t0 = time.perf_counter()
        try:
            build = build_graphs(s)
            plan = solve(s, build)
            value = plan.stats.value
        except InfeasibleError as exc:
            value, status = exc.value, EXIT_INFEASIBLE
        except FlowformError as exc:
            raise _Fail(str(exc)) from None
        build.timings["total"] = time.perf_counter() - t0
        nodes, edges = build.state.node_count, build.state.edge_count
        for k, v in build.timings.items():
            samples.setdefault(k, []).append(v)
    summary = {
        "grid_dims": list(build.frame.grid.dims),
        "node_count": nodes,
        "edge_count": edges,
        "flow_value": value,
        "agents": s.agent_count,
        "repeats": repeats,
        "phases": {
            k: {"min": min(v), "median": statistics.median(v), "samples": v}
            for k, v in samples.items()
        },
    }
    if fmt == "json":
        click.echo(json.dumps(summary, indent=2))
    else:
        click.echo(f"grid {summary['grid_dims']}  nodes {nodes}  edges {edges}  "
                   f"flow {value}/{s.agent_count}  repeats {repeats}")
        for k, v in summary["phases"].items():
            click.echo(f"  {k:<14} min {v['min']:.4f} s  median {v['median']:.4f} s")
    if status:
        sys.exit(status)


def main(argv: list[str] | None = None) -> int:
    """Entry point; maps click's usage errors onto exit code 1."""
    try:
        cli.main(args=argv, prog_name="flowform", standalone_mode=False,
                 auto_envvar_prefix="FLOWFORM")
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return EXIT_INPUT
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code if isinstance(exc, _Fail) else EXIT_INPUT
    except SystemExit as exc:
        return int(exc.code or 0)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
