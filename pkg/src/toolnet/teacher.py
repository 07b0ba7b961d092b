"""Scripted teacher policies standing in for human demonstrators.

For a goal the teacher enumerates *strategies* (which carrier, reach aid,
cleaner, adhesive, fastening device, fuel or weight to use) from the
capabilities of the objects present in the scene, scripts each one into a
symbolic plan and keeps those that execute and reach the goal. A style
seed then picks one plan, cheaper plans being exponentially more likely.

Objects whose class is foreign to the domain vocabulary count as usable
tools; that is how substitutes such as a crate in a home are exploited.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .catalog import DOMAIN_OBJECTS, NO_TOOL, object_class
from .goals import GOALS, GoalSpec
from .world import (AGENT, FLOOR, NEAR_DIST, ObjectNode, PreconditionError, SymbolicAction,
                    WorldGraph, _dist, _drop_mode, act, action_cost, apply, drop_point,
                    satisfied)

STYLE_TEMPERATURE = 3.0


class TeachingFailure(Exception):
    def __init__(self, goal: GoalSpec, predicate: str):
        super().__init__(f"no teacher strategy reaches {goal.key}; first failure: {predicate}")
        self.goal = goal
        self.predicate = predicate


@dataclass(frozen=True)
class Strategy:
    reach: str | None = None      # climbable or reacher id used when an object is out of reach
    carrier: str | None = None    # tray/box/... used to move several objects at once
    tool: str | None = None       # goal specific: cleaner, adhesive, driver, welder, fuel, weight
    extra: str | None = None      # secondary object: fastener, cutter, paint device


@dataclass(frozen=True)
class TaughtPlan:
    actions: tuple[SymbolicAction, ...]
    cost: float
    tools: frozenset[str]


def usable_tool(n: ObjectNode, domain: str) -> bool:
    return n.is_tool or n.cls not in DOMAIN_OBJECTS[domain]


def plan_tools(actions, w: WorldGraph, goal: GoalSpec) -> frozenset[str]:
    """Tool classes appearing in action arguments, goal objects excluded."""
    out = set()
    for a in actions:
        for oid in a.args:
            n = w.node(oid)
            if usable_tool(n, w.domain) and n.has("movable") and not goal.mentions(n.cls):
                out.add(n.cls)
    return frozenset(out)


def plan_cost(actions, w: WorldGraph) -> float:
    total = 0.0
    for a in actions:
        total += action_cost(a, w)
        w = apply(a, w)
    return round(total, 9)


class _Script:
    def __init__(self, w: WorldGraph, s: Strategy):
        self.w = w
        self.s = s
        self.actions: list[SymbolicAction] = []

    def do(self, name: str, *args: str) -> None:
        a = act(name, *args)
        self.w = apply(a, self.w)
        self.actions.append(a)

    def ground(self) -> None:
        parent = self.w.support[AGENT][1]
        if parent != FLOOR:
            self.do("ClimbDown", parent)

    def goto(self, oid: str) -> None:
        self.ground()
        a, t = self.w.agent.pos, self.w.node(oid).pos
        if (a[0], a[1]) != (t[0], t[1]):
            self.do("MoveTo", oid)

    def free_hand(self) -> None:
        if self.w.held is not None:
            self.ground()
            self.do("Drop", self.w.held, FLOOR)

    def open_path(self, oid: str) -> None:
        for rel, parent in reversed(self.w.ancestors(oid)):
            p = self.w.node(parent)
            if rel == "Inside" and p.has("can_open") and "open" not in p.states:
                self.goto(parent)
                self.do("Open", parent)

    def fetch(self, oid: str) -> None:
        if self.w.held == oid:
            return
        self.free_hand()
        self.open_path(oid)
        self.goto(oid)
        if self.w.near(AGENT, oid):
            self.do("Pick", oid)
        else:
            self.reach(oid)

    def reach(self, oid: str) -> None:
        aid = self.s.reach
        if aid is None or aid == oid:
            raise PreconditionError(act("Pick", oid), "near")
        if "reacher" in object_class(self.w.node(aid).cls).roles:
            self.fetch(aid)
            self.goto(oid)
            self.do("Push", oid)
            self.do("Drop", aid, FLOOR)
            self.do("Pick", oid)
        else:
            self.fetch(aid)
            self.goto(oid)
            self.do("Drop", aid, FLOOR)
            self.do("ClimbUp", aid)
            self.do("Pick", oid)

    def lift_to(self, target: str) -> None:
        """Climb at ``target`` holding the current object, when its drop point is high."""
        item = self.w.held
        x, y = self.w.node(item), self.w.node(target)
        mode = _drop_mode(self.w, x, y)
        if mode is None or _dist(self.w.agent.pos, drop_point(self.w, x, y, mode)) < NEAR_DIST:
            return
        aid = self.s.reach
        if aid is None or not self.w.node(aid).has("can_climb"):
            return  # Drop fails with a 'near' precondition
        self.free_hand()
        self.fetch(aid)
        self.goto(target)
        self.do("Drop", aid, FLOOR)
        self.do("Pick", item)
        self.do("ClimbUp", aid)

    def deliver(self, item: str, target: str) -> None:
        self.fetch(item)
        t = self.w.node(target)
        self.goto(target)
        if t.has("can_open") and t.has("container") and "open" not in t.states:
            self.do("Open", target)
        self.lift_to(target)
        self.do("Drop", item, target)

    def carry_all(self, items: list[str], target: str) -> None:
        c = self.s.carrier
        if c is None:
            for it in items:
                self.deliver(it, target)
            return
        self.fetch(c)
        cn = self.w.node(c)
        if cn.has("can_open") and "open" not in cn.states:
            self.do("Open", c)
        for it in items:
            self.open_path(it)
            self.goto(it)
            self.do("Drop", c, FLOOR)
            if self.w.near(AGENT, it) and self.w.accessible(it):
                self.do("Pick", it)
            else:
                self.reach(it)
            self.ground()
            self.do("Drop", it, c)
            self.do("Pick", c)
        self.deliver(c, target)


# -------------------------------------------------------------------- strategies

def _first(w: WorldGraph, cls: str) -> str | None:
    nodes = w.by_class(cls)
    return nodes[0].id if nodes else None


def _candidates(w: WorldGraph, goal: GoalSpec, pred) -> list[str]:
    return [n.id for n in w.nodes
            if n.has("movable") and not goal.mentions(n.cls) and pred(n)]


def _usable(w: WorldGraph, goal: GoalSpec, pred) -> list[str]:
    return _candidates(w, goal, lambda n: usable_tool(n, w.domain) and pred(n))


def _roles(n: ObjectNode) -> frozenset[str]:
    return object_class(n.cls).roles


def _reach_options(w: WorldGraph, goal: GoalSpec) -> list[str | None]:
    return [None] + _usable(w, goal, lambda n: n.has("can_climb") or "reacher" in _roles(n))


def _fits(obj: ObjectNode, carrier: ObjectNode) -> bool:
    cap = object_class(carrier.cls).capacity
    return cap is not None and all(s <= c + 1e-9 for s, c in zip(obj.size, cap))


def strategies(goal: GoalSpec, w: WorldGraph) -> list[tuple[Strategy, callable]]:
    """All (strategy, script body) pairs the teacher may try for ``goal`` in ``w``."""
    out = []
    reach = _reach_options(w, goal)
    kinds = {c[0] for c in goal.constraints}

    def add(body, **kw):
        for r in reach:
            out.append((Strategy(reach=r, **kw), body))

    if kinds <= {"inside", "on_top"}:
        target = _first(w, goal.constraints[0][2])
        items = sorted({n.id for c in goal.constraints for n in w.by_class(c[1])})
        if target is None or not items:
            return []
        carriers = _usable(w, goal, lambda n: (n.has("surface") or n.has("container"))
                           and all(_fits(w.node(i), n) for i in items))
        for c in [None] + carriers:
            add(lambda s, items=items, target=target: s.carry_all(items, target), carrier=c)
        return out

    if kinds == {"weight_on"}:
        target = _first(w, goal.constraints[0][2])
        for wt in _candidates(w, goal, lambda n: "heavy" in _roles(n)):
            add(lambda s, wt=wt, target=target: s.deliver(wt, target), tool=wt)
        return out

    if kinds == {"state"} and goal.constraints[0][2] == "dirty":
        spot = _first(w, goal.constraints[0][1])
        if spot is None:
            return []
        cls = w.node(spot).cls
        for cl in _usable(w, goal, lambda n: cls in object_class(n.cls).cleans):
            def body(s, cl=cl, spot=spot):
                s.fetch(cl)
                s.goto(spot)
                s.do("Clean", spot)
            add(body, tool=cl)
        return out

    if kinds == {"state"} and goal.constraints[0][2] == "on":
        dev = _first(w, goal.constraints[0][1])
        if dev is None:
            return []
        if "switch" in _roles(w.node(dev)):
            def body(s, dev=dev):
                if s.s.reach is not None and not s.w.near(AGENT, dev):
                    if s.w.node(s.s.reach).has("can_climb"):
                        s.fetch(s.s.reach)
                        s.goto(dev)
                        s.do("Drop", s.s.reach, FLOOR)
                        s.do("ClimbUp", s.s.reach)
                    else:
                        s.fetch(s.s.reach)
                        s.goto(dev)
                if s.w.support[AGENT][1] == FLOOR:
                    s.goto(dev)
                s.do("SwitchOn", dev)
            add(body)
            return out
        # generator: fuel inside, then run it
        for fuel in _candidates(w, goal, lambda n: "fuel" in _roles(n)):
            cutters = [None]
            if "cuttable" in _roles(w.node(fuel)):
                cutters = _usable(w, goal, lambda n: "cutter" in _roles(n))
            for cut in cutters:
                def body(s, fuel=fuel, cut=cut, dev=dev):
                    if cut is not None:
                        s.fetch(cut)
                        s.goto(fuel)
                        s.do("Operate", cut, fuel)
                    s.deliver(fuel, dev)
                    s.goto(dev)
                    s.do("Operate", dev, dev)
                add(body, tool=fuel, extra=cut)
        return out

    if kinds == {"connected"} and len(goal.constraints) == 1:
        obj = _first(w, goal.constraints[0][1])
        base = _first(w, goal.constraints[0][2])
        if obj is None or base is None:
            return []
        for adh in _usable(w, goal, lambda n: "adhesive" in _roles(n)):
            def body(s, adh=adh, obj=obj, base=base):
                s.fetch(adh)
                s.goto(base)
                s.do("Apply", adh, base)
                s.free_hand()
                s.fetch(obj)
                s.goto(base)
                s.do("PushUntilForce", obj, base)
            add(body, tool=adh)
        if "mount" in _roles(w.node(base)) and "rigid" in _roles(w.node(obj)):
            for drv in _usable(w, goal, lambda n: "driver" in _roles(n)):
                fastener = object_class(w.node(drv).cls).fastener
                for f in [n.id for n in w.by_class(fastener)] if fastener else []:
                    def body(s, drv=drv, f=f, obj=obj, base=base):
                        s.deliver(obj, base)
                        s.deliver(f, obj)
                        s.fetch(drv)
                        s.goto(obj)
                        s.do("Operate", drv, obj)
                    add(body, tool=drv, extra=f)
        return out

    if kinds == {"connected", "state"}:
        parts = _first(w, goal.constraints[0][1])
        station = _first(w, goal.constraints[0][2])
        if parts is None or station is None:
            return []
        attach = []
        for adh in _usable(w, goal, lambda n: "adhesive" in _roles(n)):
            def a_body(s, adh=adh):
                s.fetch(adh)
                s.goto(station)
                s.do("Apply", adh, station)
                s.free_hand()
                s.fetch(parts)
                s.goto(station)
                s.do("PushUntilForce", parts, station)
            attach.append((adh, None, a_body))
        for wd in _usable(w, goal, lambda n: "welder" in _roles(n)):
            def w_body(s, wd=wd):
                s.deliver(parts, station)
                s.fetch(wd)
                s.goto(parts)
                s.do("Operate", wd, parts)
            attach.append((wd, None, w_body))
        for drv in _usable(w, goal, lambda n: "driver" in _roles(n)):
            fastener = object_class(w.node(drv).cls).fastener
            for f in [n.id for n in w.by_class(fastener)] if fastener else []:
                def d_body(s, drv=drv, f=f):
                    s.deliver(parts, station)
                    s.deliver(f, parts)
                    s.fetch(drv)
                    s.goto(parts)
                    s.do("Operate", drv, parts)
                attach.append((drv, f, d_body))
        for painter in _usable(w, goal, lambda n: "painter" in _roles(n)):
            for tool, fastener, a_body in attach:
                def body(s, a_body=a_body, painter=painter):
                    a_body(s)
                    s.fetch(painter)
                    s.goto(parts)
                    s.do("Operate", painter, parts)
                add(body, tool=tool, extra=painter)
        return out

    raise ValueError(f"teacher has no policy for constraints {goal.constraints}")


def _run(goal: GoalSpec, w: WorldGraph, s: Strategy, body) -> tuple[SymbolicAction, ...]:
    script = _Script(w, s)
    body(script)
    if not satisfied(goal, script.w):
        raise PreconditionError(act("MoveTo", FLOOR) if not script.actions else script.actions[-1],
                                "goal")
    return tuple(script.actions)


def teach_all(goal: GoalSpec, w: WorldGraph) -> list[TaughtPlan]:
    """Every distinct valid plan over the teacher's strategies, sorted by cost."""
    return list(_teach_all_cached(goal, _WorldKey(w)))


class _WorldKey:
    """Identity wrapper so worlds can key an lru cache by content."""

    def __init__(self, w: WorldGraph):
        self.w = w
        self.h = hash((w.domain, w.nodes, tuple(sorted(w.support.items()))))

    def __hash__(self):
        return self.h

    def __eq__(self, other):
        return self.h == other.h and self.w.same_as(other.w)


@lru_cache(maxsize=4096)
def _teach_all_cached(goal: GoalSpec, key: _WorldKey) -> tuple[TaughtPlan, ...]:
    w = key.w
    seen: dict[tuple, TaughtPlan] = {}
    failures = []
    for s, body in strategies(goal, w):
        try:
            actions = _run(goal, w, s, body)
        except PreconditionError as err:
            failures.append(err.predicate)
            continue
        if actions not in seen:
            seen[actions] = TaughtPlan(actions, plan_cost(actions, w), plan_tools(actions, w, goal))
    plans = sorted(seen.values(), key=lambda p: (p.cost, [str(a) for a in p.actions]))
    if not plans:
        raise TeachingFailure(goal, failures[0] if failures else "no-strategy")
    return tuple(plans)


def feasible(goal: GoalSpec, w: WorldGraph) -> bool:
    try:
        teach_all(goal, w)
    except TeachingFailure:
        return False
    return True


def all_goals_feasible(w: WorldGraph) -> bool:
    return all(feasible(g, w) for g in GOALS[w.domain])


def choose(plans: list[TaughtPlan], style_seed: int) -> TaughtPlan:
    costs = np.array([p.cost for p in plans])
    weights = np.exp(-(costs - costs.min()) / STYLE_TEMPERATURE)
    rng = np.random.default_rng(style_seed)
    return plans[int(rng.choice(len(plans), p=weights / weights.sum()))]


def teach(goal: GoalSpec, w: WorldGraph, style_seed: int) -> TaughtPlan:
    """One demonstration for ``goal`` in ``w``; raises TeachingFailure if none exists."""
    return choose(teach_all(goal, w), style_seed)


def acceptable_tools(goal: GoalSpec, w: WorldGraph) -> frozenset[str]:
    """Tool labels (``no-tool`` for tool-free plans) over every valid teacher plan."""
    out = set()
    for p in teach_all(goal, w):
        out |= p.tools or {NO_TOOL}
    return frozenset(out)
