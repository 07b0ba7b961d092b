"""Generalization scenarios built by mutating corpus (goal, scene) pairs.

Five mutation types:

I    relocate goal objects, or swap the places of two tools sharing a role
II   remove the goal's most used training tool from the scene
III  replace a demonstrated tool by its nearest neighbor (in the knowledge
     table) that never occurs in a training scene
IV   replace a demonstrated tool by an unrelated object
V    replace a goal object by another object, updating the goal itself

Acceptable answers come from the scripted teacher: every tool used by some
valid teacher plan in the mutated scene (``no-tool`` if a plan needs none).
"""
from __future__ import annotations

import json
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .catalog import CLASSES, DOMAIN_OBJECTS, NO_TOOL, node_flags, object_class
from .dataset import Corpus, DemoPlan, SceneRef, resolve, split_of
from .embeddings import EmbeddingProvider
from .goals import GOALS, GoalSpec
from .scenes import PLACEMENT
from .teacher import TeachingFailure, acceptable_tools, usable_tool
from .world import FLOOR, ObjectNode, WorldGraph, _Edit, check_invariants, satisfied

TYPES = ("I", "II", "III", "IV", "V")
UNRELATED = ("headphone",)
MIN_SIMILARITY = 0.5
GOAL_SWAPS = {
    "home": (("apple", "guava"), ("apple", "pillow"), ("cube", "pillow"), ("bottle", "pillow")),
    "factory": (("paper", "board"), ("hammer", "drill"), ("crate", "box")),
}
# Role groups used to pick same-role tool pairs for Type I swaps.
ROLE_GROUPS = (
    lambda n: n.has("can_climb"),
    lambda n: (n.has("surface") or n.has("container")) and n.has("movable"),
    lambda n: n.has("cleaning_agent"),
    lambda n: "adhesive" in object_class(n.cls).roles,
)


@dataclass(frozen=True)
class GenCase:
    type: str
    base: SceneRef
    base_goal: int
    goal: GoalSpec
    mutation: dict
    acceptable: frozenset[str]
    scene: WorldGraph = field(compare=False)
    extra_candidates: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {"type": self.type, "base": self.base.to_json(), "base_goal": self.base_goal,
                "goal": self.goal.to_json(), "mutation": self.mutation,
                "acceptable": sorted(self.acceptable),
                "extra_candidates": list(self.extra_candidates),
                "scene": self.scene.to_json()}

    @classmethod
    def from_json(cls, d: dict) -> "GenCase":
        return cls(d["type"], SceneRef.from_json(d["base"]), int(d["base_goal"]),
                   GoalSpec.from_json(d["goal"]), d["mutation"], frozenset(d["acceptable"]),
                   WorldGraph.from_json(d["scene"]), tuple(d.get("extra_candidates", ())))


def score(prediction: str, case: GenCase) -> bool:
    return prediction in case.acceptable


def write_cases(path: str | Path, cases: Iterable[GenCase]) -> None:
    with open(path, "w") as fh:
        for c in cases:
            fh.write(json.dumps(c.to_json(), sort_keys=True) + "\n")


def read_cases(path: str | Path) -> list[GenCase]:
    with open(path) as fh:
        return [GenCase.from_json(json.loads(line)) for line in fh if line.strip()]


# -------------------------------------------------------------------- scene edits

def _new_node(token: str, oid: str, domain: str, pos, states=frozenset()) -> ObjectNode:
    return ObjectNode(oid, token, frozenset(states), tuple(pos), object_class(token).size,
                      node_flags(token, domain))


def replace_object(w: WorldGraph, oid: str, token: str) -> WorldGraph:
    """Swap the class of ``oid`` for ``token`` in place, keeping its support and contents."""
    old = w.node(oid)
    new_id = token if token not in w else f"{token}_2"
    size = object_class(token).size
    pos = (old.pos[0], old.pos[1], round(old.pos[2] - old.size[2] / 2 + size[2] / 2, 6))
    states = old.states & {"inside"}
    node = _new_node(token, new_id, w.domain, pos, states)
    nodes = tuple(node if n.id == oid else n for n in w.nodes)
    support = {}
    for c, (rel, p) in w.support.items():
        support[new_id if c == oid else c] = (rel, new_id if p == oid else p)
    return WorldGraph(w.domain, nodes, support, w.seed)


def relocate(w: WorldGraph, oid: str, rel: str, parent: str, xy) -> WorldGraph:
    e = _Edit(w)
    x = w.node(oid)
    e.attach(oid, rel, parent)
    if parent == FLOOR:
        z = x.size[2] / 2
    else:
        p = w.node(parent)
        z = (p.pos[2] + p.size[2] / 2 + x.size[2] / 2 if rel == "OnTop"
             else p.pos[2] - p.size[2] / 2 + x.size[2] / 2 + 0.05)
    e.move(oid, (round(xy[0], 6), round(xy[1], 6), round(z, 6)))
    return e.finish()


def swap_places(w: WorldGraph, a: str, b: str) -> WorldGraph:
    na, nb = w.node(a), w.node(b)
    ra, rb = w.support[a], w.support[b]
    w = relocate(w, a, rb[0], rb[1], nb.pos[:2])
    return relocate(w, b, ra[0], ra[1], na.pos[:2])


# -------------------------------------------------------------------- helpers

def base_pairs(corpus: Corpus) -> list[tuple[GoalSpec, SceneRef, list[DemoPlan]]]:
    """Every distinct (goal, scene) pair with its plans, in corpus order."""
    groups: dict[tuple, list[DemoPlan]] = defaultdict(list)
    for p in corpus.plans:
        groups[p.pair].append(p)
    keys = sorted(groups, key=lambda k: groups[k][0].sort_key())
    return [(groups[k][0].goal, groups[k][0].scene, groups[k]) for k in keys]


def training_classes(corpus: Corpus, domain: str) -> set[str]:
    seen = set()
    for p in corpus.domain(domain).split("train"):
        seen |= resolve(p.scene).classes()
    return seen


def most_used_tool(corpus: Corpus, goal: GoalSpec) -> str | None:
    """Argmax of the goal's training tool histogram; ties to the smallest token."""
    counts = Counter()
    for p in corpus.plans:
        if split_of(p) == "train" and p.goal.key == goal.key:
            counts.update(p.tools_used)
    if not counts:
        return None
    best = max(counts.values())
    return sorted(t for t, c in counts.items() if c == best)[0]


def nearest_unseen(token: str, provider: EmbeddingProvider, unseen: Iterable[str],
                   min_similarity: float = MIN_SIMILARITY) -> str | None:
    """Unseen class closest to ``token`` by cosine; ties to the smallest token.

    None when even the closest one is below ``min_similarity``: an object
    that far away is not an alternate tool.
    """
    e = provider.embed(token)
    best, best_sim = None, -np.inf
    for cand in sorted(unseen):
        sim = float(provider.embed(cand) @ e)
        if sim > best_sim + 1e-12:
            best, best_sim = cand, sim
    return best if best_sim >= min_similarity else None


def _answers(goal: GoalSpec, w: WorldGraph) -> frozenset[str] | None:
    if satisfied(goal, w):
        return None
    try:
        return acceptable_tools(goal, w)
    except TeachingFailure:
        return None


def _make(kind, ref, base_goal, goal, w, mutation, extra=()) -> GenCase | None:
    check_invariants(w)
    acc = _answers(goal, w)
    if acc is None:
        return None
    return GenCase(kind, ref, base_goal.goal_id, goal, mutation, acc, w, tuple(extra))


# -------------------------------------------------------------------- generators

def _type_i(goal, ref, plans, w, rng) -> list[GenCase]:
    out = []
    movable_goal = [n for n in w.nodes if goal.mentions(n.cls) and n.has("movable")
                    and n.cls in PLACEMENT[w.domain]]
    if movable_goal:
        n = movable_goal[int(rng.integers(len(movable_goal)))]
        options = [o for o in PLACEMENT[w.domain][n.cls]
                   if o == "floor" or o[1] in w.index]
        here = w.support[n.id]
        options = [o for o in options if o == "floor" or (o[1] != here[1])]
        if options:
            o = options[int(rng.integers(len(options)))]
            if o == "floor":
                xy = (round(float(rng.uniform(0.5, 9.5)), 1), round(float(rng.uniform(0.5, 9.0)), 1))
                w2 = relocate(w, n.id, "OnTop", FLOOR, xy)
            else:
                rel = "OnTop" if o[0] == "on" else "Inside"
                w2 = relocate(w, n.id, rel, o[1], w.node(o[1]).pos[:2])
            c = _make("I", ref, goal, goal, w2, {"kind": "relocate", "object": n.id,
                                                  "to": o if o == "floor" else list(o)})
            if c:
                out.append(c)
    used = sorted({t for p in plans for t in p.tools_used})
    for grp in ROLE_GROUPS:
        pool = [n for n in w.nodes if n.is_tool and n.has("movable") and grp(n)
                and not goal.mentions(n.cls)]
        if len(pool) < 2 or not any(n.cls in used for n in pool):
            continue
        a = next(n for n in pool if n.cls in used)
        others = [n for n in pool if n.id != a.id]
        b = others[int(rng.integers(len(others)))]
        w2 = swap_places(w, a.id, b.id)
        c = _make("I", ref, goal, goal, w2, {"kind": "swap", "objects": [a.id, b.id]})
        if c:
            out.append(c)
        break
    return out


def _type_ii(goal, ref, plans, w, tool) -> list[GenCase]:
    if tool is None:
        return []
    ids = [n.id for n in w.by_class(tool)]
    if not ids:
        return []
    c = _make("II", ref, goal, goal, w.without(ids), {"removed": tool})
    return [c] if c else []


def _type_iii(goal, ref, plans, w, provider, unseen) -> list[GenCase]:
    out = []
    used = sorted({t for p in plans for t in p.tools_used})
    for tool in used:
        nodes = w.by_class(tool)
        if not nodes:
            continue
        sub = nearest_unseen(tool, provider, unseen)
        if sub is None:
            continue
        w2 = replace_object(w, nodes[0].id, sub)
        c = _make("III", ref, goal, goal, w2, {"replaced": tool, "by": sub}, extra=(sub,))
        if c is None:
            continue
        out.append(c)
        # Isolated variant: drop the other working tools so only the substitute remains.
        others = sorted(n.id for n in w2.nodes if n.cls in c.acceptable - {sub, NO_TOOL}
                        and not goal.mentions(n.cls))
        if others and NO_TOOL not in c.acceptable:
            c2 = _make("III", ref, goal, goal, w2.without(others),
                       {"replaced": tool, "by": sub, "removed": others}, extra=(sub,))
            if c2 is not None and c2.acceptable == frozenset({sub}):
                out.append(c2)
    return out


def _type_iv(goal, ref, plans, w, rng) -> list[GenCase]:
    used = sorted({t for p in plans for t in p.tools_used})
    present = [t for t in used if w.by_class(t)]
    if not present:
        return []
    tool = present[int(rng.integers(len(present)))]
    other = UNRELATED[int(rng.integers(len(UNRELATED)))]
    w2 = replace_object(w, w.by_class(tool)[0].id, other)
    c = _make("IV", ref, goal, goal, w2, {"replaced": tool, "by": other}, extra=(other,))
    return [c] if c else []


def _type_v(goal, ref, plans, w) -> list[GenCase]:
    out = []
    for old, new in GOAL_SWAPS.get(w.domain, ()):
        if old not in goal.objects or new in goal.text or not w.by_class(old):
            continue
        w2 = replace_object(w, w.by_class(old)[0].id, new)
        g2 = goal.replace_token(old, new)
        c = _make("V", ref, goal, g2, w2, {"replaced": old, "by": new})
        if c:
            out.append(c)
    return out


def gen_type(kind: str, corpus: Corpus, provider: EmbeddingProvider, seed: int = 0,
             domains: Sequence[str] | None = None) -> tuple[list[GenCase], int]:
    """Cases of one type over every original corpus pair, plus a count of skipped pairs."""
    if kind not in TYPES:
        raise ValueError(f"unknown GenTest type {kind!r}")
    cases, skipped = [], 0
    unseen_by_domain, removed_tool = {}, {}
    for i, (goal, ref, plans) in enumerate(base_pairs(corpus)):
        if domains is not None and ref.domain not in domains:
            continue
        w = resolve(ref)
        rng = np.random.default_rng([seed, TYPES.index(kind), i])
        if kind == "I":
            new = _type_i(goal, ref, plans, w, rng)
        elif kind == "II":
            if goal.key not in removed_tool:
                removed_tool[goal.key] = most_used_tool(corpus, goal)
            new = _type_ii(goal, ref, plans, w, removed_tool[goal.key])
        elif kind == "III":
            if ref.domain not in unseen_by_domain:
                seen = training_classes(corpus, ref.domain)
                table = set(getattr(provider, "table", {})) or set(CLASSES)
                unseen_by_domain[ref.domain] = sorted(
                    t for t in table if t in CLASSES and t not in seen
                    and t not in DOMAIN_OBJECTS[ref.domain] and t not in UNRELATED
                    and object_class(t).flags & {"movable"})
            new = _type_iii(goal, ref, plans, w, provider, unseen_by_domain[ref.domain])
        elif kind == "IV":
            new = _type_iv(goal, ref, plans, w, rng)
        else:
            new = _type_v(goal, ref, plans, w)
        if not new:
            skipped += 1
        cases.extend(new)
    return cases, skipped


def generate(corpus: Corpus, provider: EmbeddingProvider, seed: int = 0,
             domains: Sequence[str] | None = None) -> tuple[list[GenCase], dict[str, int]]:
    cases, skipped = [], {}
    for kind in TYPES:
        c, s = gen_type(kind, corpus, provider, seed, domains)
        cases.extend(c)
        skipped[kind] = s
    return cases, skipped


def usable_substitute(case: GenCase) -> bool:
    return all(usable_tool(n, case.scene.domain) for n in case.scene.nodes
               if n.cls in case.extra_candidates)


def case_input(case: GenCase, provider: EmbeddingProvider, factored: bool):
    from .model import build_input
    extra = case.extra_candidates if factored else ()
    return build_input(case.scene, case.goal, provider, extra)


def outcomes(model, cases: Sequence[GenCase], provider: EmbeddingProvider) -> list[bool]:
    from .model import argmax_tool
    return [score(argmax_tool(model.predict(case_input(c, provider, model.config.factored))), c)
            for c in cases]


def evaluate_cases(model, cases: Sequence[GenCase], provider: EmbeddingProvider) -> dict:
    """Per-type accuracy plus the pooled accuracy under ``all``; empty types are omitted."""
    if not cases:
        raise ValueError("cannot evaluate on an empty case set")
    total, correct = Counter(), Counter()
    for c, ok in zip(cases, outcomes(model, cases, provider)):
        for k in (c.type, "all"):
            total[k] += 1
            correct[k] += ok
    return {k: correct[k] / total[k] for k in total}
