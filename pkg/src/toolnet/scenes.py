"""Seeded scene generation from per-class placement priors."""
from __future__ import annotations

import numpy as np

from .catalog import DOMAIN_OBJECTS, DOMAINS, TOOLS, node_flags, object_class
from .world import AGENT, AGENT_Z, FLOOR, MOUNT_Z, ObjectNode, WorldGraph

WALL_Y = 9.95
ANCHOR_GAP = 2.0
HIGH_SWITCH_P = 0.6
OMIT_TOOL_P = 0.25

# Furniture placed directly on the floor, at least ANCHOR_GAP apart.
ANCHORS = {
    "home": ("fridge", "cupboard", "table", "couch", "shelf", "dumpster"),
    "factory": ("worktable", "long-shelf", "cupboard", "platform", "assembly-station",
                "generator"),
}

# Placement options per class: "floor", ("on", anchor) or ("in", anchor).
_F = "floor"
PLACEMENT = {
    "home": {
        "milk-carton": [("on", "table"), ("on", "shelf"), ("on", "fridge")],
        "apple": [("on", "table"), ("on", "couch"), ("on", "shelf"), ("in", "fridge")],
        "orange": [("on", "table"), ("on", "couch"), ("on", "shelf"), ("in", "fridge")],
        "banana": [("on", "table"), ("on", "couch"), ("on", "shelf"), ("in", "fridge")],
        "paper": [("on", "table"), _F, ("on", "couch")],
        "cube": [_F, ("on", "table"), ("on", "shelf")],
        "bottle": [_F, ("on", "table"), ("in", "fridge")],
        "book": [("on", "shelf"), ("on", "table"), ("on", "couch")],
        "big-tray": [("on", "table"), _F, ("on", "couch")],
        "tray": [("on", "table"), _F, ("on", "couch")],
        "box": [_F, ("on", "table")],
        "chair": [_F],
        "stool": [_F],
        "stick": [_F],
        "glue": [("on", "table"), ("on", "shelf"), ("in", "cupboard")],
        "tape": [("on", "table"), ("on", "shelf"), ("in", "cupboard")],
        "mop": [_F],
        "vacuum": [_F],
        "sponge": [("on", "table"), _F],
        "dirt": [_F],
    },
    "factory": {
        "crate": [_F],
        "tray": [_F, ("on", "worktable")],
        "box": [_F, ("on", "worktable")],
        "toolbox": [_F, ("on", "worktable")],
        "stick": [_F],
        "ladder": [_F],
        "ramp": [_F],
        "stool": [_F],
        "lift": [_F],
        "trolley": [_F],
        "drill": [("on", "worktable"), ("on", "long-shelf"), ("in", "cupboard")],
        "hammer": [("on", "long-shelf"), ("in", "cupboard"), _F],
        "screwdriver": [("on", "long-shelf"), ("in", "cupboard"), _F],
        "brick": [_F, ("on", "worktable")],
        "blow-dryer": [("on", "worktable"), ("on", "long-shelf"), _F],
        "spraypaint": [("on", "worktable"), ("on", "long-shelf"), _F],
        "welder": [("on", "worktable"), _F],
        "wood-cutter": [("on", "worktable"), _F],
        "3d-printer": [("on", "worktable"), _F],
        "gasoline": [_F, ("on", "long-shelf"), ("in", "cupboard")],
        "coal": [_F, ("on", "long-shelf"), ("in", "cupboard")],
        "screw": [("on", "worktable"), ("in", "cupboard"), ("on", "long-shelf")],
        "nail": [("on", "worktable"), ("in", "cupboard"), ("on", "long-shelf")],
        "wood": [_F, ("on", "worktable")],
        "oil": [_F],
        "water": [_F],
        "board": [_F, ("on", "worktable")],
        "mop": [_F],
        "paper": [("on", "worktable")],
        "glue": [("on", "worktable"), ("in", "cupboard"), ("on", "long-shelf")],
        "tape": [("on", "worktable"), ("in", "cupboard"), ("on", "long-shelf")],
        "spare-parts": [_F, ("on", "worktable")],
    },
}

INITIAL_STATES = {"dirt": {"dirty"}, "oil": {"dirty"}, "water": {"dirty"}}


def _rng(domain: str, seed: int) -> np.random.Generator:
    return np.random.default_rng([DOMAINS.index(domain), seed])


def _grid(v: float) -> float:
    return round(round(v * 10) / 10, 6)


def _node(token: str, domain: str, pos, states=()) -> ObjectNode:
    cls = object_class(token)
    return ObjectNode(token, token, frozenset(states), tuple(float(p) for p in pos),
                      cls.size, node_flags(token, domain))


def _sample_anchor_xy(rng, n: int) -> list[tuple[float, float]]:
    pts: list[tuple[float, float]] = []
    while len(pts) < n:
        x, y = _grid(rng.uniform(1.0, 9.0)), _grid(rng.uniform(1.0, 8.5))
        if all(np.hypot(x - a, y - b) >= ANCHOR_GAP for a, b in pts):
            pts.append((x, y))
    return pts


def _sample_floor_xy(rng, taken: list[tuple[float, float]]) -> tuple[float, float]:
    while True:
        x, y = _grid(rng.uniform(0.5, 9.5)), _grid(rng.uniform(0.5, 9.0))
        if all(np.hypot(x - a, y - b) >= 0.8 for a, b in taken):
            return x, y


def _place(domain: str, seed: int, present: list[str]) -> WorldGraph:
    rng = _rng(domain, seed)
    nodes: list[ObjectNode] = []
    support: dict[str, tuple[str, str]] = {}
    nodes.append(_node(FLOOR, domain, (5.0, 5.0, 0.005)))
    nodes.append(_node("wall", domain, (5.0, WALL_Y, MOUNT_Z)))
    support["wall"] = ("OnTop", FLOOR)

    anchors = ANCHORS[domain]
    anchor_xy = _sample_anchor_xy(rng, len(anchors))
    anchor_nodes = {}
    for token, (x, y) in zip(anchors, anchor_xy):
        n = _node(token, domain, (x, y, object_class(token).size[2] / 2))
        anchor_nodes[token] = n
        nodes.append(n)
        support[token] = ("OnTop", FLOOR)

    if domain == "home":
        nodes.append(_node("door", domain, (_grid(rng.uniform(1.0, 9.0)), WALL_Y, 1.0)))
        support["door"] = ("ConnectedTo", "wall")
        z = 1.9 if rng.random() < HIGH_SWITCH_P else MOUNT_Z
        nodes.append(_node("light-switch", domain, (_grid(rng.uniform(1.0, 9.0)), WALL_Y, z)))
        support["light-switch"] = ("ConnectedTo", "wall")

    taken = list(anchor_xy)
    for token in present:
        if token not in PLACEMENT[domain]:
            continue
        options = PLACEMENT[domain][token]
        choice = options[int(rng.integers(len(options)))]
        size = object_class(token).size
        states = INITIAL_STATES.get(token, ())
        if choice == _F:
            x, y = _sample_floor_xy(rng, taken)
            taken.append((x, y))
            pos = (x, y, size[2] / 2)
            support[token] = ("OnTop", FLOOR)
        else:
            rel, anchor = choice
            a = anchor_nodes[anchor]
            jx = max(0.0, a.size[0] / 2 - 0.2)
            jy = max(0.0, a.size[1] / 2 - 0.1)
            x = _grid(a.pos[0] + rng.uniform(-jx, jx))
            y = _grid(a.pos[1] + rng.uniform(-jy, jy))
            if rel == "on":
                pos = (x, y, a.pos[2] + a.size[2] / 2 + size[2] / 2)
                support[token] = ("OnTop", anchor)
            else:
                pos = (x, y, a.pos[2] - a.size[2] / 2 + size[2] / 2 + 0.05)
                support[token] = ("Inside", anchor)
                states = set(states) | {"inside"}
        nodes.append(_node(token, domain, tuple(round(p, 6) for p in pos), states))

    ax, ay = _sample_floor_xy(rng, taken)
    nodes.append(_node(AGENT, domain, (ax, ay, AGENT_Z)))
    support[AGENT] = ("OnTop", FLOOR)
    return WorldGraph(domain, tuple(nodes), support, seed)


def omitted_tools(domain: str, seed: int) -> list[str]:
    """Tools the seed's placement plan leaves out (before feasibility repair)."""
    rng = np.random.default_rng([DOMAINS.index(domain), seed, 1])
    draws = rng.random(len(TOOLS[domain]))
    return [t for t, d in zip(TOOLS[domain], draws) if d < OMIT_TOOL_P]


def make_scene(domain: str, seed: int) -> WorldGraph:
    """Deterministic scene for ``(domain, seed)``.

    Each tool may be left out; omitted tools are restored in vocabulary
    order until every goal of the domain has at least one teacher strategy.
    """
    if domain not in DOMAINS:
        raise ValueError(f"unknown domain {domain!r}; expected one of {DOMAINS}")
    if seed < 0:
        raise ValueError("scene seed must be non-negative")
    from .teacher import all_goals_feasible

    omitted = omitted_tools(domain, seed)
    while True:
        present = [t for t in DOMAIN_OBJECTS[domain] if t not in omitted]
        w = _place(domain, seed, present)
        if all_goals_feasible(w) or not omitted:
            return w
        omitted = omitted[1:]
