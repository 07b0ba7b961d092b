"""Static object vocabulary for the home and factory domains.

Every class token maps to an :class:`ObjectClass` carrying its physical
extent, its property flags, and a few functional roles
used by the simulator and the scripted teachers (carrier capacity, climb
height, what a cleaning agent can clean, ...). Tokens outside both domain
vocabularies (``crate`` in a home, ``headphone``, ``pillow``...) exist so
that generalization scenes can introduce them.
"""
from __future__ import annotations

from dataclasses import dataclass

FLAGS = (
    "tool", "movable", "surface", "can_open", "can_operate", "can_climb",
    "container", "cleaning_agent",
)

ATTRIBUTES = (
    "grabbed", "inside", "on", "open", "sticky", "dirty",
    "welded", "drilled", "driven", "cut", "painted",
)

RELATIONS = ("OnTop", "Inside", "ConnectedTo", "Near")

DOMAINS = ("home", "factory")


@dataclass(frozen=True)
class ObjectClass:
    token: str
    size: tuple[float, float, float]
    flags: frozenset[str] = frozenset()
    capacity: tuple[float, float, float] | None = None
    climb_height: float = 0.0
    cleans: frozenset[str] = frozenset()
    accepts: str | None = None          # restricts what a container takes
    roles: frozenset[str] = frozenset()
    fastener: str | None = None         # fastener class a driver needs


def _c(token, size, flags="", capacity=None, climb=0.0, cleans=(), accepts=None,
       roles=(), fastener=None):
    return ObjectClass(token, tuple(size), frozenset(flags.split()), capacity and tuple(capacity),
                       climb, frozenset(cleans), accepts, frozenset(roles), fastener)


_MV = "movable"
_BIG = (2.0, 2.0, 2.0)

CLASSES: dict[str, ObjectClass] = {c.token: c for c in [
    # fixtures and furniture
    _c("agent", (0.6, 0.6, 1.0)),
    _c("floor", (10.0, 10.0, 0.01), "surface"),
    _c("wall", (10.0, 0.1, 2.4), roles=("mount", "stickable")),
    _c("door", (0.9, 0.1, 2.0), "can_open"),
    _c("light-switch", (0.1, 0.05, 0.1), "can_operate", roles=("switch",)),
    _c("fridge", (0.8, 0.7, 1.8), "surface can_open container", capacity=_BIG),
    _c("cupboard", (1.0, 0.5, 2.0), "surface can_open container", capacity=_BIG),
    _c("table", (1.2, 0.8, 0.75), "surface"),
    _c("couch", (1.8, 0.8, 0.8), "surface"),
    _c("shelf", (1.0, 0.4, 1.6), "surface"),
    _c("dumpster", (0.8, 0.6, 1.0), "can_open container", capacity=_BIG),
    _c("worktable", (1.5, 0.8, 0.9), "surface"),
    _c("long-shelf", (2.0, 0.5, 2.0), "surface"),
    _c("platform", (1.5, 1.5, 1.4), "surface"),
    _c("assembly-station", (1.2, 1.0, 0.9), "surface", roles=("stickable",)),
    _c("generator", (1.0, 0.8, 1.0), "can_operate container", capacity=_BIG, accepts="fuel"),
    # goal objects and clutter
    _c("milk-carton", (0.1, 0.1, 0.25), _MV, roles=("heavy",)),
    _c("apple", (0.08, 0.08, 0.08), _MV),
    _c("orange", (0.08, 0.08, 0.08), _MV),
    _c("banana", (0.18, 0.05, 0.05), _MV),
    _c("guava", (0.07, 0.07, 0.07), _MV),
    _c("pillow", (0.6, 0.4, 0.2), _MV),
    _c("headphone", (0.2, 0.18, 0.1), _MV),
    _c("paper", (0.3, 0.21, 0.01), _MV, roles=("flat", "stickable", "base")),
    _c("cube", (0.1, 0.1, 0.1), _MV, roles=("heavy",)),
    _c("bottle", (0.08, 0.08, 0.3), _MV, roles=("heavy",)),
    _c("dirt", (0.5, 0.5, 0.01)),
    _c("oil", (0.6, 0.6, 0.01)),
    _c("water", (0.6, 0.6, 0.01)),
    _c("crate", (0.5, 0.5, 0.5), f"{_MV} surface", capacity=(0.5, 0.5, 0.45), roles=("heavy",)),
    _c("screw", (0.01, 0.01, 0.05), _MV),
    _c("nail", (0.01, 0.01, 0.06), _MV),
    _c("wood", (0.6, 0.1, 0.1), _MV, roles=("fuel", "cuttable")),
    _c("board", (1.0, 0.5, 0.03), _MV, roles=("flat", "stickable", "base", "rigid")),
    _c("spare-parts", (0.3, 0.3, 0.2), _MV, roles=("base", "stickable")),
    # tools (bold entries) and their unseen alternates
    _c("tray", (0.5, 0.35, 0.05), f"tool {_MV} surface", capacity=(0.5, 0.35, 0.35)),
    _c("big-tray", (0.8, 0.5, 0.05), f"tool {_MV} surface", capacity=(0.8, 0.5, 0.4)),
    _c("box", (0.7, 0.5, 0.4), f"tool {_MV} can_open container", capacity=(0.65, 0.45, 0.35),
       roles=("heavy",)),
    _c("basket", (0.5, 0.4, 0.3), f"{_MV} container", capacity=(0.48, 0.38, 0.3)),
    _c("bucket", (0.35, 0.35, 0.4), f"{_MV} container", capacity=(0.33, 0.33, 0.38)),
    _c("toolbox", (0.55, 0.3, 0.3), f"tool {_MV} can_open container",
       capacity=(0.5, 0.28, 0.28)),
    _c("trolley", (1.0, 0.6, 0.8), f"tool {_MV} surface", capacity=(1.0, 0.6, 0.8)),
    _c("lift", (1.2, 1.0, 0.3), f"tool {_MV} surface", capacity=(1.2, 1.0, 1.2)),
    _c("book", (0.25, 0.2, 0.05), f"tool {_MV}", roles=("heavy",)),
    _c("brick", (0.2, 0.1, 0.06), f"tool {_MV}", roles=("heavy",)),
    _c("chair", (0.5, 0.5, 0.9), f"tool {_MV} can_climb surface", climb=0.5),
    _c("stool", (0.4, 0.4, 0.6), f"tool {_MV} can_climb surface", climb=0.6),
    _c("ladder", (0.5, 0.2, 2.0), f"tool {_MV} can_climb", climb=1.2),
    _c("step-ladder", (0.5, 0.4, 1.0), f"{_MV} can_climb", climb=0.9),
    _c("seat", (0.45, 0.45, 0.45), f"{_MV} can_climb surface", climb=0.45),
    _c("ramp", (1.2, 0.8, 0.5), f"tool {_MV} can_climb", climb=0.8),
    _c("stick", (1.2, 0.03, 0.03), f"tool {_MV}", roles=("reacher",)),
    _c("glue", (0.05, 0.05, 0.15), f"tool {_MV}", roles=("adhesive",)),
    _c("tape", (0.1, 0.1, 0.05), f"tool {_MV}", roles=("adhesive",)),
    _c("mop", (0.3, 0.3, 1.3), f"tool {_MV} cleaning_agent", cleans=("dirt", "water", "oil")),
    _c("sponge", (0.1, 0.07, 0.04), f"tool {_MV} cleaning_agent", cleans=("dirt", "water", "oil")),
    _c("vacuum", (0.4, 0.4, 1.0), f"tool {_MV} cleaning_agent", cleans=("dirt", "water")),
    _c("blow-dryer", (0.25, 0.1, 0.25), f"tool {_MV} can_operate cleaning_agent",
       cleans=("water",)),
    _c("drill", (0.25, 0.08, 0.2), f"tool {_MV} can_operate", roles=("driver",), fastener="screw"),
    _c("hammer", (0.3, 0.1, 0.04), f"tool {_MV}", roles=("driver",), fastener="nail"),
    _c("screwdriver", (0.2, 0.03, 0.03), f"tool {_MV}", roles=("driver",), fastener="screw"),
    _c("welder", (0.4, 0.3, 0.3), f"tool {_MV} can_operate", roles=("welder",)),
    _c("spraypaint", (0.07, 0.07, 0.2), f"tool {_MV} can_operate", roles=("painter",)),
    _c("wood-cutter", (0.4, 0.3, 0.3), f"tool {_MV} can_operate", roles=("cutter",)),
    _c("3d-printer", (0.6, 0.6, 0.6), f"tool {_MV} can_operate", roles=("printer",)),
    _c("gasoline", (0.3, 0.2, 0.35), f"tool {_MV}", roles=("fuel",)),
    _c("coal", (0.3, 0.3, 0.2), f"tool {_MV}", roles=("fuel",)),
]}

# Objects populating each domain; tools are the subset usable as tools.
DOMAIN_OBJECTS = {
    "home": (
        "floor", "wall", "fridge", "cupboard", "table", "couch", "big-tray", "tray", "book",
        "paper", "cube", "light-switch", "bottle", "box", "apple", "orange", "banana", "chair",
        "stick", "dumpster", "milk-carton", "shelf", "glue", "tape", "stool", "mop", "sponge",
        "vacuum", "dirt", "door",
    ),
    "factory": (
        "floor", "wall", "ramp", "worktable", "tray", "box", "crate", "stick", "long-shelf",
        "lift", "cupboard", "drill", "hammer", "ladder", "trolley", "brick", "blow-dryer",
        "spraypaint", "welder", "generator", "gasoline", "coal", "toolbox", "wood-cutter",
        "3d-printer", "screw", "nail", "screwdriver", "wood", "platform", "oil", "water",
        "board", "mop", "paper", "glue", "tape", "assembly-station", "spare-parts", "stool",
    ),
}

TOOLS = {
    "home": ("big-tray", "tray", "book", "box", "chair", "stick", "glue", "tape", "stool",
             "mop", "sponge", "vacuum"),
    "factory": ("ramp", "tray", "box", "stick", "lift", "drill", "hammer", "ladder", "trolley",
                "brick", "blow-dryer", "spraypaint", "welder", "gasoline", "coal", "toolbox",
                "wood-cutter", "3d-printer", "screwdriver", "mop", "glue", "tape", "stool"),
}

NO_TOOL = "no-tool"


def object_class(token: str) -> ObjectClass:
    try:
        return CLASSES[token]
    except KeyError:
        raise KeyError(f"unknown object class {token!r}") from None


def is_tool(token: str, domain: str) -> bool:
    return token in TOOLS[domain]


def node_flags(token: str, domain: str) -> frozenset[str]:
    """Legend flags of a class as seen in ``domain``.

    ``tool`` is set only for the domain's bold vocabulary, so an alternate
    such as ``crate`` placed into a home scene is not a tool there.
    """
    flags = set(object_class(token).flags)
    flags.discard("tool")
    if is_tool(token, domain):
        flags.add("tool")
    return frozenset(flags)

