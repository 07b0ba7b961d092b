"""Declarative goals for both domains, as structured records.

A goal carries its word tokens, the subset naming goal objects, and the
constraint predicates the simulator checks. Constraints are plain tuples
so they serialize to JSON unchanged:

* ``("inside", cls, container)``  every ``cls`` node ends up inside a ``container``
* ``("on_top", cls, target)``     every ``cls`` node rests (possibly via carriers) on ``target``
* ``("connected", cls, target)``  every ``cls`` node is attached to ``target``
* ``("state", cls, attribute, value)``
* ``("weight_on", "heavy", target)`` some heavy object rests directly on ``target``
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace


@dataclass(frozen=True)
class GoalSpec:
    domain: str
    goal_id: int
    text: tuple[str, ...]
    objects: tuple[str, ...]
    constraints: tuple[tuple, ...] = field(default=())

    def __post_init__(self):
        missing = set(self.objects) - set(self.text)
        if missing:
            raise ValueError(f"goal objects {sorted(missing)} not in goal text {self.text}")

    @property
    def key(self) -> str:
        return f"{self.domain}:{self.goal_id}"

    def mentions(self, token: str) -> bool:
        return token in self.text

    def replace_token(self, old: str, new: str) -> "GoalSpec":
        """Swap a goal object token everywhere (text, objects, constraints)."""
        sub = lambda t: new if t == old else t  # noqa: E731
        text = tuple(sub(t) for t in self.text)
        objects = tuple(sub(t) for t in self.objects)
        constraints = tuple(tuple(sub(x) if isinstance(x, str) else x for x in c)
                            for c in self.constraints)
        return replace(self, text=text, objects=objects, constraints=constraints)

    def to_json(self) -> dict:
        return {"domain": self.domain, "goal_id": self.goal_id, "text": list(self.text),
                "objects": list(self.objects), "constraints": [list(c) for c in self.constraints]}

    @classmethod
    def from_json(cls, d: dict) -> "GoalSpec":
        return cls(d["domain"], int(d["goal_id"]), tuple(d["text"]), tuple(d["objects"]),
                   tuple(tuple(c) for c in d["constraints"]))


def _g(domain, gid, text, objects, *constraints):
    return GoalSpec(domain, gid, tuple(text.split()), tuple(objects.split()), tuple(constraints))


GOALS: dict[str, tuple[GoalSpec, ...]] = {
    "home": (
        _g("home", 1, "place milk-carton in fridge", "milk-carton fridge",
           ("inside", "milk-carton", "fridge")),
        _g("home", 2, "put fruits apple orange banana in cupboard", "apple orange banana cupboard",
           ("inside", "apple", "cupboard"), ("inside", "orange", "cupboard"),
           ("inside", "banana", "cupboard")),
        _g("home", 3, "remove dirt from floor", "dirt floor", ("state", "dirt", "dirty", False)),
        _g("home", 4, "stick paper to wall", "paper wall", ("connected", "paper", "wall")),
        _g("home", 5, "put cube in box", "cube box", ("inside", "cube", "box")),
        _g("home", 6, "place bottle in dumpster", "bottle dumpster",
           ("inside", "bottle", "dumpster")),
        _g("home", 7, "place weight on paper", "paper", ("weight_on", "heavy", "paper")),
        _g("home", 8, "illuminate room light-switch", "light-switch",
           ("state", "light-switch", "on", True)),
    ),
    "factory": (
        _g("factory", 1, "stack crate on platform", "crate platform",
           ("on_top", "crate", "platform")),
        _g("factory", 2, "stick paper to wall", "paper wall", ("connected", "paper", "wall")),
        _g("factory", 3, "fix board on wall", "board wall", ("connected", "board", "wall")),
        _g("factory", 4, "turn generator on", "generator", ("state", "generator", "on", True)),
        _g("factory", 5, "assemble paint spare-parts on assembly-station",
           "spare-parts assembly-station",
           ("connected", "spare-parts", "assembly-station"),
           ("state", "spare-parts", "painted", True)),
        _g("factory", 6, "move hammer screwdriver to worktable", "hammer screwdriver worktable",
           ("on_top", "hammer", "worktable"), ("on_top", "screwdriver", "worktable")),
        _g("factory", 7, "clean water", "water", ("state", "water", "dirty", False)),
        _g("factory", 8, "clean oil", "oil", ("state", "oil", "dirty", False)),
    ),
}


def goal(domain: str, goal_id: int) -> GoalSpec:
    for g in GOALS[domain]:
        if g.goal_id == goal_id:
            return g
    raise KeyError(f"no goal {goal_id} in domain {domain!r}")
