"""Object-centric world state and a symbolic action simulator.

The world is a set of :class:`ObjectNode` values plus a *support* map that
records, for every object except the floor, the single relation holding it
in place: ``OnTop``, ``Inside`` or ``ConnectedTo`` some parent (a held
object is ``ConnectedTo`` the agent). ``Near`` edges are derived from
positions. Moving an object moves everything it supports.

Worlds are immutable; :func:`apply` returns a fresh successor.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np

from .catalog import ATTRIBUTES, FLAGS, RELATIONS, object_class
from .goals import GoalSpec

AGENT = "agent"
FLOOR = "floor"
AGENT_Z = 0.5
HELD_DZ = 0.3
NEAR_DIST = 1.0
REACH_DIST = 2.0
FLOOR_EXTENT = 10.0
MOUNT_Z = 1.2

ACTION_ARITY = {
    "Push": 1, "ClimbUp": 1, "ClimbDown": 1, "Open": 1, "Close": 1,
    "SwitchOn": 1, "SwitchOff": 1, "Drop": 2, "Pick": 1, "MoveTo": 1,
    "Operate": 2, "Clean": 1, "Apply": 2, "PushUntilForce": 2,
}

ACTION_COST = {
    "MoveTo": 1.0, "Pick": 1.0, "Drop": 1.0, "Open": 0.5, "Close": 0.5,
    "SwitchOn": 0.5, "SwitchOff": 0.5, "ClimbUp": 1.5, "ClimbDown": 1.5,
    "Push": 1.5, "Operate": 2.0, "Clean": 2.0, "Apply": 1.5, "PushUntilForce": 1.5,
}
MOVE_COST_PER_M = 0.3


class PreconditionError(Exception):
    """Raised by :func:`apply` when an action's precondition fails."""

    def __init__(self, action: "SymbolicAction", predicate: str):
        super().__init__(f"{action}: precondition '{predicate}' does not hold")
        self.action = action
        self.predicate = predicate


@dataclass(frozen=True)
class SymbolicAction:
    name: str
    args: tuple[str, ...]

    def __post_init__(self):
        arity = ACTION_ARITY.get(self.name)
        if arity is None:
            raise ValueError(f"unknown action {self.name!r}")
        if len(self.args) != arity:
            raise ValueError(f"{self.name} takes {arity} argument(s), got {self.args}")

    def __str__(self) -> str:
        return f"{self.name}({', '.join(self.args)})"

    def to_json(self) -> list:
        return [self.name, *self.args]

    @classmethod
    def from_json(cls, d: list) -> "SymbolicAction":
        return cls(d[0], tuple(d[1:]))


def act(name: str, *args: str) -> SymbolicAction:
    return SymbolicAction(name, tuple(args))


@dataclass(frozen=True)
class ObjectNode:
    id: str
    cls: str
    states: frozenset[str]
    pos: tuple[float, float, float]
    size: tuple[float, float, float]
    flags: frozenset[str]
    goal: int = 0

    @property
    def is_tool(self) -> bool:
        return "tool" in self.flags

    def has(self, flag: str) -> bool:
        return flag in self.flags

    def state_vector(self) -> np.ndarray:
        return np.array([1.0 if a in self.states else 0.0 for a in ATTRIBUTES])


def _dist(p, q) -> float:
    return math.sqrt((p[0] - q[0]) ** 2 + (p[1] - q[1]) ** 2 + (p[2] - q[2]) ** 2)


def _r(v: float) -> float:
    return round(v, 6)


@dataclass(frozen=True, eq=False)
class WorldGraph:
    domain: str
    nodes: tuple[ObjectNode, ...]
    support: Mapping[str, tuple[str, str]]
    seed: int | None = None

    # ---------------------------------------------------------------- lookup
    @cached_property
    def index(self) -> dict[str, int]:
        return {n.id: i for i, n in enumerate(self.nodes)}

    def node(self, oid: str) -> ObjectNode:
        try:
            return self.nodes[self.index[oid]]
        except KeyError:
            raise LookupError(f"no object {oid!r} in scene") from None

    def __contains__(self, oid: str) -> bool:
        return oid in self.index

    @property
    def ids(self) -> list[str]:
        return [n.id for n in self.nodes]

    def by_class(self, cls: str) -> list[ObjectNode]:
        return [n for n in self.nodes if n.cls == cls]

    def classes(self) -> set[str]:
        return {n.cls for n in self.nodes}

    @property
    def agent(self) -> ObjectNode:
        return self.node(AGENT)

    @cached_property
    def children(self) -> dict[str, list[str]]:
        out: dict[str, list[str]] = {}
        for child, (_, parent) in self.support.items():
            out.setdefault(parent, []).append(child)
        return out

    @cached_property
    def held(self) -> str | None:
        for child in self.children.get(AGENT, ()):
            if self.support[child][0] == "ConnectedTo":
                return child
        return None

    def subtree(self, oid: str) -> list[str]:
        out, stack = [], [oid]
        while stack:
            cur = stack.pop()
            out.append(cur)
            stack.extend(self.children.get(cur, ()))
        return out

    def ancestors(self, oid: str) -> list[tuple[str, str]]:
        """(relation, parent) links from ``oid`` up to the floor."""
        out = []
        cur = oid
        while cur in self.support:
            rel, parent = self.support[cur]
            out.append((rel, parent))
            cur = parent
        return out

    def distance(self, a: str, b: str) -> float:
        return _dist(self.node(a).pos, self.node(b).pos)

    def near(self, a: str, b: str) -> bool:
        return self.distance(a, b) < NEAR_DIST

    def accessible(self, oid: str) -> bool:
        """False if ``oid`` sits inside a closed container."""
        for rel, parent in self.ancestors(oid):
            if rel == "Inside":
                p = self.node(parent)
                if p.has("can_open") and "open" not in p.states:
                    return False
        return True

    # ---------------------------------------------------------------- edges
    @cached_property
    def near_pairs(self) -> list[tuple[str, str]]:
        pos = np.array([n.pos for n in self.nodes])
        d = np.sqrt(((pos[:, None, :] - pos[None, :, :]) ** 2).sum(-1))
        ii, jj = np.nonzero(np.triu(d < NEAR_DIST, k=1))
        ids = self.ids
        return [(ids[i], ids[j]) for i, j in zip(ii, jj)]

    @property
    def edges(self) -> frozenset[tuple[str, str, str]]:
        out = {(rel, child, parent) for child, (rel, parent) in self.support.items()}
        for a, b in self.near_pairs:
            out.add(("Near", a, b))
            out.add(("Near", b, a))
        return frozenset(out)

    # ---------------------------------------------------------------- goal
    def with_goal(self, goal: GoalSpec | None) -> "WorldGraph":
        nodes = tuple(replace(n, goal=int(goal is not None and goal.mentions(n.cls)))
                      for n in self.nodes)
        return replace(self, nodes=nodes)

    def without(self, ids: Iterable[str]) -> "WorldGraph":
        """Copy with objects (and whatever they support) removed."""
        drop: set[str] = set()
        for oid in ids:
            drop.update(self.subtree(oid))
        nodes = tuple(n for n in self.nodes if n.id not in drop)
        support = {c: v for c, v in self.support.items() if c not in drop}
        return WorldGraph(self.domain, nodes, support, self.seed)

    # ---------------------------------------------------------------- hashing
    def state_key(self, grid: float = 0.5) -> tuple:
        """Hashable summary: relations, discrete states, positions on a coarse grid."""
        return tuple(
            (n.id, self.support.get(n.id), n.states,
             math.floor(n.pos[0] / grid), math.floor(n.pos[1] / grid), math.floor(n.pos[2] / grid))
            for n in self.nodes)

    def same_as(self, other: "WorldGraph") -> bool:
        return (self.domain == other.domain and self.nodes == other.nodes
                and dict(self.support) == dict(other.support))

    # ---------------------------------------------------------------- json
    def to_json(self) -> dict:
        return {
            "domain": self.domain,
            "seed": self.seed,
            "nodes": [{"id": n.id, "class": n.cls, "states": sorted(n.states),
                       "pos": list(n.pos), "size": list(n.size), "flags": sorted(n.flags),
                       "goal": n.goal} for n in self.nodes],
            "edges": [{"type": r, "src": s, "dst": d} for r, s, d in sorted(self.edges)],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=1)

    @classmethod
    def from_json(cls, d: dict) -> "WorldGraph":
        nodes = tuple(ObjectNode(n["id"], n["class"], frozenset(n["states"]), tuple(n["pos"]),
                                 tuple(n["size"]), frozenset(n["flags"]), int(n.get("goal", 0)))
                      for n in d["nodes"])
        support = {e["src"]: (e["type"], e["dst"]) for e in d["edges"] if e["type"] != "Near"}
        return cls(d["domain"], nodes, support, d.get("seed"))


# -------------------------------------------------------------------- invariants

def check_invariants(w: WorldGraph, goal: GoalSpec | None = None) -> None:
    """Raise AssertionError when ``w`` breaks a structural invariant."""
    ids = set(w.index)
    assert len(ids) == len(w.nodes), "duplicate node ids"
    assert AGENT in ids, "agent node missing"
    for n in w.nodes:
        assert all(s > 0 for s in n.size), f"{n.id}: non-positive size"
        assert set(n.flags) <= set(FLAGS), f"{n.id}: unknown flags"
        assert set(n.states) <= set(ATTRIBUTES), f"{n.id}: unknown states"
        if goal is not None:
            assert n.goal == int(goal.mentions(n.cls)), f"{n.id}: goal bit"
    inside_count: dict[str, int] = {}
    for rel, src, dst in w.edges:
        assert rel in RELATIONS, rel
        assert src in ids and dst in ids, f"dangling edge {(rel, src, dst)}"
        assert src != dst, f"self edge on {src}"
        if rel == "Near":
            assert ("Near", dst, src) in w.edges
        if rel == "Inside":
            inside_count[src] = inside_count.get(src, 0) + 1
    assert all(c <= 1 for c in inside_count.values())
    for oid in w.support:
        seen = {oid}
        for _, parent in w.ancestors(oid):
            assert parent not in seen, f"support cycle through {oid}"
            seen.add(parent)


# -------------------------------------------------------------------- simulator

def _fits(obj: ObjectNode, carrier: ObjectNode) -> bool:
    cap = object_class(carrier.cls).capacity
    return cap is None or all(s <= c + 1e-9 for s, c in zip(obj.size, cap))


def _roles(n: ObjectNode) -> frozenset[str]:
    return object_class(n.cls).roles


def _drop_mode(w: WorldGraph, x: ObjectNode, y: ObjectNode) -> str | None:
    if y.id == FLOOR:
        return "floor"
    cls = object_class(y.cls)
    if y.has("container"):
        if cls.accepts is not None and cls.accepts not in _roles(x):
            return None
        return "Inside"
    if y.has("surface") or "base" in cls.roles:
        return "OnTop"
    if "mount" in cls.roles and "flat" in _roles(x):
        return "mount"
    return None


def drop_point(w: WorldGraph, x: ObjectNode, y: ObjectNode, mode: str) -> tuple:
    """Where ``x`` comes to rest when dropped onto ``y`` in the given mode."""
    ax, ay, _ = w.agent.pos
    if mode == "floor":
        return (ax, ay, x.size[2] / 2)
    if mode == "Inside":
        return (y.pos[0], y.pos[1], y.pos[2] - y.size[2] / 2 + x.size[2] / 2 + 0.05)
    if mode == "OnTop":
        return (y.pos[0], y.pos[1], y.pos[2] + y.size[2] / 2 + x.size[2] / 2)
    return (ax, y.pos[1], MOUNT_Z)


def _contact_near(w: WorldGraph, y: ObjectNode) -> bool:
    """Agent within reach of ``y``; a wall is reached anywhere along its face."""
    if "mount" in _roles(y):
        a = w.agent.pos
        return _dist(a, (a[0], y.pos[1], MOUNT_Z)) < NEAR_DIST
    return w.near(AGENT, y.id)


def _holds_reacher(w: WorldGraph) -> bool:
    return w.held is not None and "reacher" in _roles(w.node(w.held))


def precondition_failure(action: SymbolicAction, w: WorldGraph) -> str | None:
    """Name of the first failing precondition, or None if applicable."""
    for a in action.args:
        w.node(a)  # LookupError on unknown ids
    name, args = action.name, action.args
    held = w.held
    agent_support = w.support[AGENT]
    on_floor = agent_support[1] == FLOOR
    x = w.node(args[0])

    if name == "MoveTo":
        if x.id in (AGENT, FLOOR):
            return "movable-target"
        if held is not None and x.id in w.subtree(held):
            return "not-held"
        if not on_floor:
            return "agent-on-floor"
        return None

    if name == "Pick":
        if not x.has("movable"):
            return "movable"
        if held is not None:
            return "gripper-free"
        if agent_support[1] == x.id:
            return "not-supporting-agent"
        if not w.near(AGENT, x.id):
            return "near"
        if not w.accessible(x.id):
            return "accessible"
        if w.support[x.id][0] == "ConnectedTo":
            return "not-attached"
        return None

    if name == "Drop":
        y = w.node(args[1])
        if held != x.id:
            return "holding"
        if y.id in w.subtree(x.id) or y.id == AGENT:
            return "distinct-target"
        mode = _drop_mode(w, x, y)
        if mode is None:
            return "receptacle"
        if mode == "floor":
            return None
        if _dist(w.agent.pos, drop_point(w, x, y, mode)) >= NEAR_DIST:
            return "near"
        if not w.accessible(y.id):
            return "accessible"
        if mode == "Inside" and y.has("can_open") and "open" not in y.states:
            return "open"
        if mode in ("Inside", "OnTop") and not _fits(x, y):
            return "fits"
        return None

    if name in ("Open", "Close"):
        if not x.has("can_open"):
            return "can-open"
        if not w.near(AGENT, x.id):
            return "near"
        if not w.accessible(x.id):
            return "accessible"
        is_open = "open" in x.states
        if name == "Open" and is_open:
            return "closed"
        if name == "Close" and not is_open:
            return "open"
        return None

    if name in ("SwitchOn", "SwitchOff"):
        if "switch" not in _roles(x):
            return "switch"
        if not (w.near(AGENT, x.id) or (_holds_reacher(w) and w.distance(AGENT, x.id) < REACH_DIST)):
            return "near"
        is_on = "on" in x.states
        if name == "SwitchOn" and is_on:
            return "off"
        if name == "SwitchOff" and not is_on:
            return "on"
        return None

    if name == "ClimbUp":
        if not x.has("can_climb"):
            return "can-climb"
        if not on_floor:
            return "agent-on-floor"
        if held == x.id:
            return "not-held"
        if w.support[x.id] != ("OnTop", FLOOR):
            return "on-floor"
        if not w.near(AGENT, x.id):
            return "near"
        return None

    if name == "ClimbDown":
        if agent_support != ("OnTop", x.id):
            return "on-climbable"
        return None

    if name == "Push":
        if not _holds_reacher(w):
            return "holding-reacher"
        if not x.has("movable") or x.id == held:
            return "movable"
        if w.support[x.id][1] == FLOOR:
            return "off-floor"
        if agent_support[1] == x.id:
            return "not-supporting-agent"
        if w.distance(AGENT, x.id) >= REACH_DIST:
            return "within-reach"
        if not w.accessible(x.id):
            return "accessible"
        if w.support[x.id][0] == "ConnectedTo":
            return "not-attached"
        return None

    if name == "Operate":
        t = w.node(args[1])
        cls = object_class(x.cls)
        if x.id == t.id:
            if not (cls.accepts == "fuel" or "printer" in cls.roles):
                return "standalone-device"
            if held == x.id:
                return "device-placed"
            if not w.near(AGENT, x.id):
                return "near"
            if "on" in x.states:
                return "off"
            if cls.accepts == "fuel" and not _has_fuel(w, x.id):
                return "fuel"
            return None
        if held != x.id:
            return "holding-device"
        if not w.near(AGENT, t.id):
            return "near"
        if "welder" in cls.roles:
            s = w.support[t.id]
            if s[0] != "OnTop" or s[1] == FLOOR:
                return "resting-on-surface"
            return None
        if "driver" in cls.roles:
            s = w.support[t.id]
            if s[0] != "OnTop" or s[1] == FLOOR:
                return "resting-on-surface"
            if _fastener_on(w, t.id, cls.fastener) is None:
                return "fastener"
            return None
        if "painter" in cls.roles:
            if not t.has("movable") or "painted" in t.states:
                return "paintable"
            return None
        if "cutter" in cls.roles:
            if "cuttable" not in _roles(t) or "cut" in t.states:
                return "cuttable"
            return None
        return "device"

    if name == "Clean":
        if held is None or x.cls not in object_class(w.node(held).cls).cleans:
            return "cleaner"
        if not w.near(AGENT, x.id):
            return "near"
        if "dirty" not in x.states:
            return "dirty"
        return None

    if name == "Apply":
        y = w.node(args[1])
        if held != x.id or "adhesive" not in _roles(x):
            return "holding-adhesive"
        if "stickable" not in _roles(y) or y.id == x.id:
            return "stickable"
        if not _contact_near(w, y):
            return "near"
        if "sticky" in y.states:
            return "not-sticky"
        return None

    if name == "PushUntilForce":
        y = w.node(args[1])
        if held != x.id:
            return "holding"
        if y.id == x.id or "sticky" not in y.states:
            return "sticky"
        if not _contact_near(w, y):
            return "near"
        return None

    raise AssertionError(f"no precondition entry for {name}")


def _has_fuel(w: WorldGraph, gen: str) -> bool:
    for c in w.children.get(gen, ()):
        n = w.node(c)
        if w.support[c][0] == "Inside" and "fuel" in _roles(n):
            if "cuttable" in _roles(n) and "cut" not in n.states:
                continue
            return True
    return False


def _fastener_on(w: WorldGraph, target: str, fastener: str | None) -> str | None:
    for c in sorted(w.children.get(target, ())):
        n = w.node(c)
        if n.cls == fastener and w.support[c][0] == "OnTop" and "driven" not in n.states:
            return c
    return None


def applicable(action: SymbolicAction, w: WorldGraph) -> bool:
    return precondition_failure(action, w) is None


class _Edit:
    """Mutable scratch copy used while building a successor."""

    def __init__(self, w: WorldGraph):
        self.w = w
        self.nodes = {n.id: n for n in w.nodes}
        self.support = dict(w.support)
        self.children = {k: list(v) for k, v in w.children.items()}

    def pos(self, oid):
        return self.nodes[oid].pos

    def move(self, oid: str, new_pos) -> None:
        old = self.nodes[oid].pos
        delta = (new_pos[0] - old[0], new_pos[1] - old[1], new_pos[2] - old[2])
        stack = [oid]
        while stack:
            cur = stack.pop()
            n = self.nodes[cur]
            p = n.pos
            self.nodes[cur] = replace(n, pos=(_r(p[0] + delta[0]), _r(p[1] + delta[1]),
                                              _r(p[2] + delta[2])))
            stack.extend(self.children.get(cur, ()))

    def attach(self, oid: str, rel: str, parent: str) -> None:
        old = self.support.get(oid)
        if old is not None:
            self.children[old[1]].remove(oid)
        self.support[oid] = (rel, parent)
        self.children.setdefault(parent, []).append(oid)
        n = self.nodes[oid]
        states = set(n.states)
        states.discard("inside")
        states.discard("grabbed")
        if rel == "Inside":
            states.add("inside")
        if rel == "ConnectedTo" and parent == AGENT:
            states.add("grabbed")
        self.nodes[oid] = replace(n, states=frozenset(states))

    def set_state(self, oid: str, attr: str, on: bool = True) -> None:
        n = self.nodes[oid]
        states = set(n.states)
        (states.add if on else states.discard)(attr)
        self.nodes[oid] = replace(n, states=frozenset(states))

    def finish(self) -> WorldGraph:
        nodes = tuple(self.nodes[n.id] for n in self.w.nodes)
        return WorldGraph(self.w.domain, nodes, self.support, self.w.seed)


def _top(n: ObjectNode) -> float:
    return n.pos[2] + n.size[2] / 2


def apply(action: SymbolicAction, w: WorldGraph) -> WorldGraph:
    """Successor state after ``action``; raises PreconditionError if inapplicable."""
    failed = precondition_failure(action, w)
    if failed is not None:
        raise PreconditionError(action, failed)
    e = _Edit(w)
    name, args = action.name, action.args
    ax, ay, az = w.agent.pos
    x = w.node(args[0])

    if name == "MoveTo":
        e.move(AGENT, (x.pos[0], x.pos[1], AGENT_Z))
    elif name == "Pick":
        e.attach(x.id, "ConnectedTo", AGENT)
        e.move(x.id, (ax, ay, az + HELD_DZ))
    elif name == "Drop":
        y = w.node(args[1])
        mode = _drop_mode(w, x, y)
        rel = "Inside" if mode == "Inside" else "OnTop"
        e.attach(x.id, rel, FLOOR if mode == "floor" else y.id)
        e.move(x.id, drop_point(w, x, y, mode))
    elif name == "Open":
        e.set_state(x.id, "open", True)
    elif name == "Close":
        e.set_state(x.id, "open", False)
    elif name == "SwitchOn":
        e.set_state(x.id, "on", True)
    elif name == "SwitchOff":
        e.set_state(x.id, "on", False)
    elif name == "ClimbUp":
        e.attach(AGENT, "OnTop", x.id)
        e.move(AGENT, (x.pos[0], x.pos[1], AGENT_Z + object_class(x.cls).climb_height))
    elif name == "ClimbDown":
        e.attach(AGENT, "OnTop", FLOOR)
        e.move(AGENT, (x.pos[0], x.pos[1], AGENT_Z))
    elif name == "Push":
        e.attach(x.id, "OnTop", FLOOR)
        e.move(x.id, (ax, ay, x.size[2] / 2))
    elif name == "Operate":
        t = w.node(args[1])
        roles = object_class(x.cls).roles
        if x.id == t.id:
            e.set_state(x.id, "on", True)
        elif "welder" in roles:
            e.attach(t.id, "ConnectedTo", w.support[t.id][1])
            e.set_state(t.id, "welded")
        elif "driver" in roles:
            f = _fastener_on(w, t.id, object_class(x.cls).fastener)
            e.attach(t.id, "ConnectedTo", w.support[t.id][1])
            e.attach(f, "ConnectedTo", t.id)
            e.set_state(f, "driven")
            if x.cls == "drill":
                e.set_state(t.id, "drilled")
        elif "painter" in roles:
            e.set_state(t.id, "painted")
        elif "cutter" in roles:
            e.set_state(t.id, "cut")
    elif name == "Clean":
        e.set_state(x.id, "dirty", False)
    elif name == "Apply":
        e.set_state(args[1], "sticky")
    elif name == "PushUntilForce":
        y = w.node(args[1])
        e.attach(x.id, "ConnectedTo", y.id)
        if "mount" in _roles(y):
            e.move(x.id, (ax, y.pos[1], MOUNT_Z))
        else:
            e.move(x.id, (y.pos[0], y.pos[1], _top(y) + x.size[2] / 2))
    else:
        raise AssertionError(f"no effect entry for {name}")
    return e.finish()


def action_cost(action: SymbolicAction, w: WorldGraph) -> float:
    """Execution-time proxy for one action taken in state ``w``."""
    cost = ACTION_COST[action.name]
    if action.name == "MoveTo":
        a, t = w.agent.pos, w.node(action.args[0]).pos
        cost += MOVE_COST_PER_M * math.hypot(a[0] - t[0], a[1] - t[1])
    return cost


def replay(w: WorldGraph, actions: Iterable[SymbolicAction]) -> WorldGraph:
    for a in actions:
        w = apply(a, w)
    return w


# -------------------------------------------------------------------- goals

def _chain_reaches(w: WorldGraph, oid: str, target_cls: str, rel_needed: str) -> bool:
    for rel, parent in w.ancestors(oid):
        if parent == AGENT:
            return False
        if w.node(parent).cls == target_cls:
            return rel == rel_needed
    return False


def constraint_holds(c: tuple, w: WorldGraph) -> bool:
    kind = c[0]
    if kind == "weight_on":
        target = c[2]
        return any(
            "heavy" in _roles(w.node(child)) and w.support[child][0] == "OnTop"
            for t in w.by_class(target) for child in w.children.get(t.id, ()))
    subjects = w.by_class(c[1])
    if not subjects:
        return False
    if kind == "inside":
        return all(_chain_reaches(w, n.id, c[2], "Inside") for n in subjects)
    if kind == "on_top":
        return all(_chain_reaches(w, n.id, c[2], "OnTop") for n in subjects)
    if kind == "connected":
        return all(w.support.get(n.id, ("", ""))[0] == "ConnectedTo"
                   and w.node(w.support[n.id][1]).cls == c[2] for n in subjects)
    if kind == "state":
        return all((c[2] in n.states) == bool(c[3]) for n in subjects)
    raise ValueError(f"unknown constraint kind {kind!r}")


def satisfied(goal: GoalSpec, w: WorldGraph) -> bool:
    return all(constraint_holds(c, w) for c in goal.constraints)
