"""Demonstration corpus: teaching, augmentation, labels and weights, JSON Lines I/O."""
from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field, replace
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .catalog import DOMAINS, NO_TOOL
from .goals import GOALS, GoalSpec
from .scenes import make_scene
from .teacher import TeachingFailure, choose, plan_cost, plan_tools, teach, teach_all  # noqa: F401
from .world import PreconditionError, SymbolicAction, WorldGraph, replay, satisfied

W_OPT = 2.0
MAX_REMOVED = 5
TRAIN_SEEDS = tuple(range(9))
HELDOUT_SEED = 9
_FIXED = ("agent", "floor", "wall")


@dataclass(frozen=True)
class SceneRef:
    domain: str
    seed: int
    removed: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {"domain": self.domain, "seed": self.seed, "removed": list(self.removed)}

    @classmethod
    def from_json(cls, d: dict) -> "SceneRef":
        return cls(d["domain"], int(d["seed"]), tuple(d.get("removed", ())))


@lru_cache(maxsize=256)
def base_scene(domain: str, seed: int) -> WorldGraph:
    return make_scene(domain, seed)


def resolve(ref: SceneRef) -> WorldGraph:
    w = base_scene(ref.domain, ref.seed)
    return w.without(ref.removed) if ref.removed else w


@dataclass(frozen=True)
class DemoPlan:
    goal: GoalSpec
    scene: SceneRef
    actions: tuple[SymbolicAction, ...]
    tools_used: frozenset[str]
    sim_cost: float
    style_seed: int
    provenance: str = "teacher"
    optimal: bool = False

    @property
    def pair(self) -> tuple:
        return (self.goal.key, self.scene)

    def sort_key(self) -> tuple:
        s = self.scene
        return (DOMAINS.index(s.domain), self.goal.goal_id, s.seed, s.removed, self.provenance,
                self.style_seed)

    def to_json(self) -> dict:
        return {"goal": self.goal.to_json(), "scene": self.scene.to_json(),
                "actions": [a.to_json() for a in self.actions],
                "tools_used": sorted(self.tools_used), "sim_cost": self.sim_cost,
                "style_seed": self.style_seed, "provenance": self.provenance,
                "optimal": self.optimal}

    @classmethod
    def from_json(cls, d: dict) -> "DemoPlan":
        return cls(GoalSpec.from_json(d["goal"]), SceneRef.from_json(d["scene"]),
                   tuple(SymbolicAction.from_json(a) for a in d["actions"]),
                   frozenset(d["tools_used"]), float(d["sim_cost"]), int(d["style_seed"]),
                   d.get("provenance", "teacher"), bool(d.get("optimal", False)))


def split_of(plan: DemoPlan) -> str:
    """Nine scenes train; the held-out scene alternates val/test by style seed."""
    if plan.scene.seed != HELDOUT_SEED:
        return "train"
    return "val" if plan.style_seed % 2 == 0 else "test"


@dataclass
class Corpus:
    plans: list[DemoPlan]
    report: dict = field(default_factory=dict)

    def split(self, name: str) -> list[DemoPlan]:
        return [p for p in self.plans if split_of(p) == name]

    def domain(self, domain: str) -> "Corpus":
        return Corpus([p for p in self.plans if p.scene.domain == domain], self.report)

    def write(self, path: str | Path) -> None:
        with open(path, "w") as fh:
            for p in self.plans:
                fh.write(json.dumps(p.to_json(), sort_keys=True) + "\n")

    @classmethod
    def read(cls, path: str | Path) -> "Corpus":
        with open(path) as fh:
            return cls([DemoPlan.from_json(json.loads(line)) for line in fh if line.strip()])


# -------------------------------------------------------------------- teaching

def style_seed_sequence(domain: str, scene_seed: int, goal_id: int, style: int) -> list[int]:
    return [DOMAINS.index(domain), scene_seed, goal_id, style]


def teach_pair(goal: GoalSpec, ref: SceneRef, styles: Sequence[int]) -> list[DemoPlan]:
    w = resolve(ref)
    plans = teach_all(goal, w)
    out = []
    for s in styles:
        p = choose(plans, style_seed_sequence(ref.domain, ref.seed, goal.goal_id, s))
        out.append(DemoPlan(goal, ref, p.actions, p.tools, p.cost, s))
    return out


def generate_corpus(domains: Sequence[str] = DOMAINS, scene_seeds: Sequence[int] = range(10),
                    styles: int = 8, workers: int = 1) -> Corpus:
    jobs = [(g, SceneRef(d, s)) for d in domains for s in scene_seeds for g in GOALS[d]]
    results = _map(lambda job: teach_pair(job[0], job[1], range(styles)), jobs, workers)
    plans = [p for batch in results for p in batch]
    return Corpus(mark_optimal(plans), {"teacher_plans": len(plans)})


def _map(fn, items, workers: int):
    if workers <= 1:
        return [fn(x) for x in items]
    from concurrent.futures import ThreadPoolExecutor
    with ThreadPoolExecutor(workers) as ex:
        return list(ex.map(fn, items))


def mark_optimal(plans: Iterable[DemoPlan]) -> list[DemoPlan]:
    """Flag the cheapest plan(s) of every (goal, scene) pair; return sorted plans."""
    plans = list(plans)
    best: dict[tuple, float] = {}
    for p in plans:
        best[p.pair] = min(best.get(p.pair, np.inf), p.sim_cost)
    out = [replace(p, optimal=p.sim_cost <= best[p.pair] + 1e-9) for p in plans]
    return sorted(out, key=DemoPlan.sort_key)


def replays_to_goal(plan: DemoPlan, w: WorldGraph | None = None) -> bool:
    w = resolve(plan.scene) if w is None else w
    try:
        return satisfied(plan.goal, replay(w, plan.actions))
    except (PreconditionError, LookupError):
        return False


# -------------------------------------------------------------------- augmentation

def augment_cross_scene(corpus: Corpus, seeds: Sequence[int] = TRAIN_SEEDS) -> Corpus:
    """Replay every original train plan on the other train scenes; keep successes."""
    added, attempted = [], 0
    for p in corpus.plans:
        if p.provenance != "teacher" or split_of(p) != "train" or p.scene.removed:
            continue
        for s in seeds:
            if s == p.scene.seed:
                continue
            attempted += 1
            ref = SceneRef(p.scene.domain, s)
            w = resolve(ref)
            if not replays_to_goal(p, w):
                continue
            added.append(DemoPlan(p.goal, ref, p.actions, plan_tools(p.actions, w, p.goal),
                                  plan_cost(p.actions, w), p.style_seed,
                                  f"cross-scene:{p.scene.seed}"))
    report = dict(corpus.report, cross_scene={"attempted": attempted, "accepted": len(added)})
    return Corpus(mark_optimal(corpus.plans + added), report)


def removal_candidates(plan: DemoPlan, w: WorldGraph) -> list[str]:
    """Objects that are neither goal-mentioned nor action arguments, nor support such objects."""
    keep = {a for act in plan.actions for a in act.args} | set(_FIXED)
    keep |= {n.id for n in w.nodes if plan.goal.mentions(n.cls)}
    out = []
    for n in w.nodes:
        if n.id in keep:
            continue
        if any(x in keep for x in w.subtree(n.id)):
            continue
        out.append(n.id)
    return out


def augment_object_removal(corpus: Corpus, removal_seed: int = 0) -> Corpus:
    """For every original train plan, drop 1..5 irrelevant objects and re-verify."""
    added, attempted = [], 0
    originals = [p for p in corpus.plans if p.provenance == "teacher" and split_of(p) == "train"]
    for i, p in enumerate(originals):
        w = resolve(p.scene)
        cands = removal_candidates(p, w)
        if not cands:
            continue
        attempted += 1
        rng = np.random.default_rng([removal_seed, DOMAINS.index(p.scene.domain), i])
        k = int(rng.integers(1, min(MAX_REMOVED, len(cands)) + 1))
        removed = tuple(sorted(rng.choice(cands, size=k, replace=False).tolist()))
        ref = SceneRef(p.scene.domain, p.scene.seed, removed)
        w2 = resolve(ref)
        if not replays_to_goal(p, w2):
            continue
        added.append(DemoPlan(p.goal, ref, p.actions, p.tools_used, plan_cost(p.actions, w2),
                              p.style_seed, "removal"))
    report = dict(corpus.report, object_removal={"attempted": attempted, "accepted": len(added)})
    return Corpus(mark_optimal(corpus.plans + added), report)


def augment(corpus: Corpus, removal_seed: int = 0) -> Corpus:
    """Both strategies applied to the original plans, merged."""
    cross = augment_cross_scene(corpus)
    removal = augment_object_removal(corpus, removal_seed)
    extra = [p for p in removal.plans if p.provenance == "removal"]
    report = dict(cross.report, object_removal=removal.report["object_removal"])
    return Corpus(mark_optimal(cross.plans + extra), report)


# -------------------------------------------------------------------- labels

@dataclass(frozen=True)
class TrainRecord:
    """All demonstrations sharing one (goal, scene) input."""
    goal: GoalSpec
    scene: SceneRef
    labels: tuple[tuple[frozenset[str], float], ...]   # (tools used, alpha) per plan

    def targets(self, tokens: Sequence[str], weighting: bool) -> tuple[np.ndarray, np.ndarray]:
        """Summed weighted positive and negative label counts per output token."""
        c1 = np.zeros(len(tokens))
        c0 = np.zeros(len(tokens))
        for tools, alpha in self.labels:
            a = alpha if weighting else 1.0
            y = label_vector(tools, tokens)
            c1 += a * y
            c0 += a * (1.0 - y)
        return c1, c0


def label_vector(tools: frozenset[str], tokens: Sequence[str]) -> np.ndarray:
    """1 for each used tool; the no-tool slot is 1 iff no tool was used."""
    return np.array([1.0 if (t == NO_TOOL and not tools) or t in tools else 0.0 for t in tokens])


def alpha(plan: DemoPlan, w_opt: float = W_OPT) -> float:
    return w_opt if plan.optimal else 1.0


def label_and_weight(plans: Iterable[DemoPlan], w_opt: float = W_OPT) -> list[TrainRecord]:
    groups: dict[tuple, list[DemoPlan]] = defaultdict(list)
    for p in plans:
        groups[p.pair].append(p)
    out = []
    for key in sorted(groups, key=lambda k: groups[k][0].sort_key()):
        ps = groups[key]
        out.append(TrainRecord(ps[0].goal, ps[0].scene,
                               tuple((p.tools_used, alpha(p, w_opt)) for p in ps)))
    return out


def pair_answers(plans: Iterable[DemoPlan]) -> dict[tuple, frozenset[str]]:
    """Tools used by any plan of each pair (no-tool when some plan used none)."""
    out: dict[tuple, set] = defaultdict(set)
    for p in plans:
        out[p.pair] |= p.tools_used or {NO_TOOL}
    return {k: frozenset(v) for k, v in out.items()}


def tool_histogram(plans: Iterable[DemoPlan]) -> dict[str, dict[str, int]]:
    """Per goal key: how many plans used each tool."""
    out: dict[str, dict[str, int]] = defaultdict(lambda: defaultdict(int))
    for p in plans:
        for t in p.tools_used or {NO_TOOL}:
            out[p.goal.key][t] += 1
    return {k: dict(v) for k, v in out.items()}

