"""Plan validation and an exhaustive optimum for tiny scenarios.

Nothing here touches the flow solver. Adjacency, obstacle membership and
path costs are recomputed from the grid and obstacle boxes directly so a
solver bug cannot hide behind shared code.
"""

from __future__ import annotations

import heapq
import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Sequence

from flowform.errors import ValidationError
from flowform.geometry import GridSpec, point_to_cell
from flowform.planner import Plan, Scenario, resolve_frame
from flowform.space_graph import Obstacle

_EPS = 1e-9


class GridMismatchError(ValidationError):
    pass


class OracleLimitError(ValidationError):
    def __init__(self) -> None:
        super().__init__("instance too large for oracle")


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class Report:
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failed(self) -> list[str]:
        return [c.name for c in self.checks if not c.passed]

    def to_text(self) -> str:
        lines = [
            f"{'PASS' if c.passed else 'FAIL'}  {c.name}" + (f": {c.detail}" if c.detail else "")
            for c in self.checks
        ]
        lines.append("plan OK" if self.passed else f"plan FAILED ({', '.join(self.failed)})")
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in self.checks],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _cell_hits_box(cell: Sequence[int], grid: GridSpec, ob: Obstacle) -> bool:
    d = grid.cell_size
    for i, o, a, b in zip(cell, grid.origin.as_tuple(), ob.min_corner.as_tuple(), ob.max_corner.as_tuple()):
        lo, hi = o + i * d, o + (i + 1) * d
        if hi < a - _EPS * d or lo > b + _EPS * d:
            return False
    return True


def _same_grid(a: GridSpec, b: GridSpec) -> bool:
    return (
        a.dims == b.dims
        and math.isclose(a.cell_size, b.cell_size, rel_tol=1e-9)
        and all(math.isclose(x, y, rel_tol=1e-9, abs_tol=1e-9)
                for x, y in zip(a.origin.as_tuple(), b.origin.as_tuple()))
    )


def check_plan(plan: Plan, scenario: Scenario) -> Report:
    """Certify a plan against its scenario; raises GridMismatchError on a foreign grid."""
    frame = resolve_frame(scenario)
    grid = frame.grid
    if not _same_grid(grid, plan.grid):
        raise GridMismatchError(
            f"plan grid {plan.grid.dims}@{plan.grid.origin.as_tuple()} does not match "
            f"scenario grid {grid.dims}@{grid.origin.as_tuple()}"
        )
    report = Report()
    paths = [tuple(tuple(c) for c in a.cells) for a in plan.agents]

    owner: dict[tuple, int] = {}
    shared = []
    for a, path in zip(plan.agents, paths):
        for c in set(path):
            if c in owner:
                shared.append(f"cell {c} used by agents {owner[c]} and {a.agent}")
            owner.setdefault(c, a.agent)
    report.checks.append(Check("disjoint", not shared, "; ".join(shared[:5])))

    broken = []
    for a, path in zip(plan.agents, paths):
        if not path:
            broken.append(f"agent {a.agent} has an empty path")
        for u, v in zip(path, path[1:]):
            if sum(abs(x - y) for x, y in zip(u, v)) != 1:
                broken.append(f"agent {a.agent}: {u} -> {v}")
        if any(not grid.contains_index(c) for c in path):
            broken.append(f"agent {a.agent} leaves the grid")
    report.checks.append(Check("continuous", not broken, "; ".join(broken[:5])))

    start_cells = [tuple(point_to_cell(p, grid)) for p in frame.starts]
    goal_cells = sorted(tuple(point_to_cell(p, grid)) for p in frame.goals)
    problems = []
    if sorted(a.agent for a in plan.agents) != list(range(len(start_cells))):
        problems.append(f"plan covers agents {[a.agent for a in plan.agents]}, expected {len(start_cells)}")
    else:
        for a, path in zip(plan.agents, paths):
            if path and path[0] != start_cells[a.agent]:
                problems.append(f"agent {a.agent} starts in {path[0]}, not {start_cells[a.agent]}")
        tails = sorted(p[-1] for p in paths if p)
        if tails != goal_cells:
            problems.append("path ends do not match the goal cells one-to-one")
    report.checks.append(Check("endpoints", not problems, "; ".join(problems[:5])))

    hits = sorted({
        c for path in paths for c in path
        if grid.contains_index(c) and any(_cell_hits_box(c, grid, ob) for ob in scenario.obstacles)
    })
    report.checks.append(Check("obstacles", not hits, f"blocked cells used: {hits[:5]}" if hits else ""))

    H = scenario.vertical_multiplier
    wrong = []
    for a, path in zip(plan.agents, paths):
        cost = sum(H if u[2] != v[2] else 1.0 for u, v in zip(path, path[1:]))
        if not math.isclose(cost, a.cost, rel_tol=1e-9, abs_tol=1e-9):
            wrong.append(f"agent {a.agent}: recorded {a.cost}, actual {cost}")
    report.checks.append(Check("cost", not wrong, "; ".join(wrong[:5])))
    return report


@dataclass(frozen=True)
class OracleLimits:
    max_cells: int = 40
    max_agents: int = 3


@dataclass(frozen=True)
class OracleResult:
    routable: int
    min_cost: float | None


def brute_force_optimum(s: Scenario, limits: OracleLimits = OracleLimits()) -> OracleResult:
    frame = resolve_frame(s)
    grid = frame.grid
    if grid.cell_count > limits.max_cells or s.agent_count > limits.max_agents:
        raise OracleLimitError()
    blocked = {
        c for c in grid.iter_indices() if any(_cell_hits_box(c, grid, ob) for ob in s.obstacles)
    }
    starts = [tuple(point_to_cell(p, grid)) for p in frame.starts]
    goals = [tuple(point_to_cell(p, grid)) for p in frame.goals]
    return brute_force_cells(grid.dims, blocked, starts, goals, s.vertical_multiplier, limits)


def brute_force_cells(
    dims: Sequence[int],
    blocked: set,
    starts: Sequence[Sequence[int]],
    goals: Sequence[Sequence[int]],
    vertical_multiplier: float,
    limits: OracleLimits = OracleLimits(),
) -> OracleResult:
    """Exhaustive search over vertex-disjoint simple path tuples on a small grid.

    Returns how many agents can be routed at once and, when all can, the
    cheapest total cost over every goal assignment.
    """
    X, Y, Z = dims
    if X * Y * Z > limits.max_cells or len(starts) > limits.max_agents:
        raise OracleLimitError()
    if len(starts) != len(goals):
        raise ValidationError("starts and goals differ in count")
    cells = [(x, y, z) for x in range(X) for y in range(Y) for z in range(Z)]
    bit = {c: i for i, c in enumerate(cells)}
    blocked = {tuple(b) for b in blocked}
    free = 0
    for c in cells:
        if c not in blocked:
            free |= 1 << bit[c]
    starts = [bit[tuple(c)] for c in starts]
    goals = [bit[tuple(c)] for c in goals]
    if len(set(starts)) != len(starts) or len(set(goals)) != len(goals):
        raise ValidationError("starts or goals collide")
    if any(not free >> c & 1 for c in starts + goals):
        raise ValidationError("endpoint blocked")

    adj: list[list[tuple[int, float]]] = [[] for _ in cells]
    for c in cells:
        if c in blocked:
            continue
        for axis in range(3):
            for step in (1, -1):
                nb = list(c)
                nb[axis] += step
                nb = tuple(nb)
                if nb in bit and nb not in blocked:
                    adj[bit[c]].append((bit[nb], vertical_multiplier if axis == 2 else 1.0))
    search = _Search(adj, free)

    n = len(starts)
    best = search.min_cost(starts, goals)
    if best is not None:
        return OracleResult(n, best)
    for k in range(n - 1, 0, -1):
        for chosen in itertools.combinations(starts, k):
            for targets in itertools.permutations(goals, k):
                if search.feasible(list(zip(chosen, targets))):
                    return OracleResult(k, None)
    return OracleResult(0, None)


class _Search:
    def __init__(self, adj: list[list[tuple[int, float]]], free: int):
        self.adj = adj
        self.free = free
        self.nbr_mask = [sum(1 << v for v, _ in row) for row in adj]
        self._dist: dict[int, list[float]] = {}

    def reach(self, seed: int, allowed: int) -> int:
        seen = frontier = seed
        while frontier:
            nxt = 0
            f = frontier
            while f:
                low = f & -f
                nxt |= self.nbr_mask[low.bit_length() - 1]
                f ^= low
            frontier = nxt & allowed & ~seen
            seen |= frontier
        return seen

    def dist_to(self, goal: int) -> list[float]:
        if goal not in self._dist:
            d = [math.inf] * len(self.adj)
            d[goal] = 0.0
            heap = [(0.0, goal)]
            while heap:
                du, u = heapq.heappop(heap)
                if du > d[u]:
                    continue
                for v, w in self.adj[u]:
                    if du + w < d[v]:
                        d[v] = du + w
                        heapq.heappush(heap, (du + w, v))
            self._dist[goal] = d
        return self._dist[goal]

    def min_cost(self, starts: list[int], goals: list[int]) -> float | None:
        best = [math.inf]
        for targets in itertools.permutations(goals):
            self._route(list(zip(starts, targets)), best, stop_at_first=False)
        return None if best[0] == math.inf else best[0]

    def feasible(self, pairs: list[tuple[int, int]]) -> bool:
        best = [math.inf]
        self._route(pairs, best, stop_at_first=True)
        return best[0] < math.inf

    def _route(self, pairs, best, stop_at_first):
        hs = [self.dist_to(g) for _, g in pairs]
        if any(h[s] == math.inf for h, (s, _) in zip(hs, pairs)):
            return
        endpoints = [(1 << s) | (1 << g) for s, g in pairs]
        tail_bound = [0.0] * (len(pairs) + 1)
        for i in range(len(pairs) - 1, -1, -1):
            tail_bound[i] = tail_bound[i + 1] + hs[i][pairs[i][0]]

        def pairs_ok(i: int, used: int) -> bool:
            allowed = self.free & ~used
            for j in range(i, len(pairs)):
                s, g = pairs[j]
                if not self.reach(1 << s, allowed) >> g & 1:
                    return False
            return True

        def agent(i: int, used: int, cost: float) -> bool:
            if i == len(pairs):
                best[0] = min(best[0], cost)
                return stop_at_first
            s, g = pairs[i]
            others = 0
            for j, m in enumerate(endpoints):
                if j != i:
                    others |= m
            forbidden = used | others

            def walk(cur: int, visited: int, c: float) -> bool:
                if c + hs[i][cur] + tail_bound[i + 1] >= best[0]:
                    return False
                if cur == g:
                    return agent(i + 1, used | visited, c)
                for v, w in self.adj[cur]:
                    vb = 1 << v
                    if (visited | forbidden) & vb:
                        continue
                    nv = visited | vb
                    # cur's own goal must stay reachable, as must every later pair's
                    if not self.reach(vb, self.free & ~(used | visited)) >> g & 1:
                        continue
                    if not pairs_ok(i + 1, used | nv):
                        continue
                    if walk(v, nv, c + w):
                        return True
                return False

            return walk(s, 1 << s, cost)

        agent(0, 0, 0.0)
