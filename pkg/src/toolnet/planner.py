"""Forward search over symbolic actions, plain or prioritized by tool likelihoods."""
from __future__ import annotations

import heapq
import math
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterator

from .catalog import NO_TOOL, object_class
from .goals import GoalSpec
from .model import ToolDistribution
from .world import (AGENT, FLOOR, SymbolicAction, WorldGraph, apply, precondition_failure,
                    satisfied)

DEFAULT_BUDGET = 50_000
STATE_GRID = 0.5
NEUTRAL_COST = 1.0
MIN_TOOL_COST, MAX_TOOL_COST = 0.05, 6.0

Predictor = Callable[[WorldGraph, GoalSpec], ToolDistribution]


@dataclass
class SearchStats:
    mode: str
    found: bool
    nodes_expanded: int
    depth: int
    ebf: float
    wall_time: float
    plan: tuple[SymbolicAction, ...] = ()
    model_queries: int = 0

    def to_json(self) -> dict:
        return {"mode": self.mode, "found": self.found, "nodes_expanded": self.nodes_expanded,
                "depth": self.depth, "ebf": self.ebf, "wall_time": self.wall_time,
                "plan": [a.to_json() for a in self.plan], "model_queries": self.model_queries}


def effective_branching_factor(n: int, d: int) -> float:
    """b* with b + b^2 + ... + b^d = n - 1, found by bisection on [1e-6, n].

    Bisection runs down to float resolution, so substituting b* back gives
    n - 1 to well under 1e-4 even for large trees.
    """
    if d == 0:
        if n == 1:
            return 0.0
        raise ValueError("depth 0 requires exactly one expanded node")
    if n < 1 or d < 0:
        raise ValueError(f"invalid (nodes={n}, depth={d})")
    target = n - 1

    def total(b: float) -> float:
        if abs(b - 1.0) < 1e-12:
            return float(d)
        return b * (b ** d - 1) / (b - 1)

    lo, hi = 1e-6, float(max(n, 1))
    if target <= total(lo):
        return lo
    for _ in range(200):
        mid = (lo + hi) / 2
        if mid in (lo, hi):
            break
        if total(mid) < target:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


# -------------------------------------------------------------------- successors

def candidate_actions(w: WorldGraph) -> Iterator[SymbolicAction]:
    """Grounded actions worth checking; filtered by preconditions in ``successors``."""
    held = w.held
    ids = [n.id for n in w.nodes if n.id not in (AGENT, FLOOR)]
    on = w.support[AGENT][1]
    if on != FLOOR:
        yield SymbolicAction("ClimbDown", (on,))
    for oid in ids:
        yield SymbolicAction("MoveTo", (oid,))
    for n in w.nodes:
        if n.id in (AGENT, FLOOR):
            continue
        if held is None and n.has("movable"):
            yield SymbolicAction("Pick", (n.id,))
        if n.has("can_open"):
            yield SymbolicAction("Close" if "open" in n.states else "Open", (n.id,))
        if "switch" in object_class(n.cls).roles:
            yield SymbolicAction("SwitchOff" if "on" in n.states else "SwitchOn", (n.id,))
        if n.has("can_climb"):
            yield SymbolicAction("ClimbUp", (n.id,))
        if n.has("can_operate"):
            yield SymbolicAction("Operate", (n.id, n.id))
        if "dirty" in n.states:
            yield SymbolicAction("Clean", (n.id,))
    if held is None:
        return
    h = w.node(held)
    roles = object_class(h.cls).roles
    for oid in [FLOOR] + ids:
        if oid != held:
            yield SymbolicAction("Drop", (held, oid))
    for n in w.nodes:
        if n.id in (AGENT, FLOOR, held):
            continue
        if n.has("movable"):
            yield SymbolicAction("Push", (n.id,))
        if h.has("can_operate"):
            yield SymbolicAction("Operate", (held, n.id))
        if "adhesive" in roles:
            yield SymbolicAction("Apply", (held, n.id))
        if "sticky" in n.states:
            yield SymbolicAction("PushUntilForce", (held, n.id))


def successors(w: WorldGraph) -> list[tuple[SymbolicAction, WorldGraph]]:
    out = []
    for a in candidate_actions(w):
        if precondition_failure(a, w) is None:
            out.append((a, apply(a, w)))
    return out


# -------------------------------------------------------------------- search

def _finish(mode, start, expanded, plan, queries=0) -> SearchStats:
    elapsed = time.perf_counter() - start
    if plan is None:
        return SearchStats(mode, False, expanded, 0, 0.0, elapsed, (), queries)
    d = len(plan)
    ebf = effective_branching_factor(expanded, d) if d else 0.0
    return SearchStats(mode, True, expanded, d, ebf, elapsed, tuple(plan), queries)


def _unwind(parents: dict, key) -> list[SymbolicAction]:
    plan = []
    while parents[key] is not None:
        key, action = parents[key]
        plan.append(action)
    return plan[::-1]


def bfs(w: WorldGraph, goal: GoalSpec, budget: int = DEFAULT_BUDGET) -> SearchStats:
    """Breadth-first search with duplicate-state pruning; goal tested on generation."""
    if budget <= 0:
        raise ValueError("budget must be positive")
    start = time.perf_counter()
    if satisfied(goal, w):
        return _finish("uninformed", start, 1, [])
    root = w.state_key(STATE_GRID)
    parents = {root: None}
    frontier = deque([(root, w)])
    expanded = 0
    while frontier and expanded < budget:
        key, cur = frontier.popleft()
        expanded += 1
        for a, nxt in successors(cur):
            k = nxt.state_key(STATE_GRID)
            if k in parents:
                continue
            parents[k] = (key, a)
            if satisfied(goal, nxt):
                return _finish("uninformed", start, expanded, _unwind(parents, k))
            frontier.append((k, nxt))
    return _finish("uninformed", start, expanded, None)


def tool_costs(dist: ToolDistribution, goal: GoalSpec | None = None) -> dict[str, float]:
    """-log2 p per tool token, clipped.

    The no-tool slot is not an action argument, and goal objects keep the
    neutral cost since they are never predicted as tools.
    """
    out = {}
    for tok, p in zip(dist.tokens, dist.values):
        if tok == NO_TOOL or (goal is not None and goal.mentions(tok)):
            continue
        c = -math.log2(p) if p > 0 else MAX_TOOL_COST
        out[tok] = min(MAX_TOOL_COST, max(MIN_TOOL_COST, c))
    return out


def action_priority(a: SymbolicAction, w: WorldGraph, costs: dict[str, float]) -> float:
    """Cost of the cheapest tool among the arguments, else the neutral cost."""
    tool = [costs[w.node(x).cls] for x in a.args if w.node(x).cls in costs]
    return min(tool) if tool else NEUTRAL_COST


def guided(w: WorldGraph, goal: GoalSpec, predictor: Predictor,
           budget: int = DEFAULT_BUDGET) -> SearchStats:
    """Uniform-cost search where tool actions cost -log2 p(tool).

    The predictor runs at the root and again after each successful Pick of a
    tool, so the guidance follows the current sub-goal context.
    """
    if budget <= 0:
        raise ValueError("budget must be positive")
    start = time.perf_counter()
    if satisfied(goal, w):
        return _finish("guided", start, 1, [])
    queries = 1
    root_costs = tool_costs(predictor(w, goal), goal)
    root = w.state_key(STATE_GRID)
    parents = {root: None}
    best = {root: 0.0}
    tie = 0
    heap = [(0.0, tie, root, w, root_costs)]
    expanded = 0
    while heap and expanded < budget:
        g, _, key, cur, costs = heapq.heappop(heap)
        if g > best.get(key, math.inf):
            continue
        expanded += 1
        for a, nxt in successors(cur):
            k = nxt.state_key(STATE_GRID)
            g2 = g + action_priority(a, cur, costs)
            if g2 >= best.get(k, math.inf):
                continue
            best[k] = g2
            parents[k] = (key, a)
            if satisfied(goal, nxt):
                return _finish("guided", start, expanded, _unwind(parents, k), queries)
            c2 = costs
            if a.name == "Pick" and cur.node(a.args[0]).cls in costs:
                c2 = tool_costs(predictor(nxt, goal), goal)
                queries += 1
            tie += 1
            heapq.heappush(heap, (g2, tie, k, nxt, c2))
    return _finish("guided", start, expanded, None, queries)


def search(w: WorldGraph, goal: GoalSpec, mode: str = "uninformed",
           predictor: Predictor | None = None, budget: int = DEFAULT_BUDGET) -> SearchStats:
    if mode == "uninformed":
        return bfs(w, goal, budget)
    if mode == "guided":
        if predictor is None:
            raise ValueError("guided search needs a predictor")
        return guided(w, goal, predictor, budget)
    raise ValueError(f"unknown search mode {mode!r}")


def model_predictor(model, provider) -> Predictor:
    from .model import build_input

    def predict(w: WorldGraph, goal: GoalSpec) -> ToolDistribution:
        return model.predict(build_input(w, goal, provider))
    return predict
