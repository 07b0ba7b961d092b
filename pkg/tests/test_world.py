import itertools
import math

import pytest

from toolnet.catalog import DOMAINS
from toolnet.goals import GOALS, goal
from toolnet.scenes import ANCHORS, make_scene
from toolnet.teacher import all_goals_feasible, teach
from toolnet.world import (AGENT, FLOOR, NEAR_DIST, PreconditionError, WorldGraph, act,
                           action_cost, apply, applicable, check_invariants,
                           precondition_failure, replay, satisfied)

SCENES = [(d, s) for d in DOMAINS for s in range(10)]


@pytest.mark.parametrize("domain,seed", SCENES)
def test_generated_scenes_are_valid(domain, seed):
    w = make_scene(domain, seed)
    check_invariants(w)
    assert all_goals_feasible(w)
    for g in GOALS[domain]:
        assert not satisfied(g, w), g.key
    anchors = [w.node(a).pos for a in ANCHORS[domain]]
    for p, q in itertools.combinations(anchors, 2):
        assert math.hypot(p[0] - q[0], p[1] - q[1]) >= 2.0 - 1e-9


def test_scene_generation_is_deterministic():
    assert make_scene("home", 3).same_as(make_scene("home", 3))
    assert not make_scene("home", 3).same_as(make_scene("home", 4))


@pytest.mark.parametrize("args", [("garage", 0), ("home", -1)])
def test_bad_scene_arguments(args):
    with pytest.raises(ValueError):
        make_scene(*args)


def test_json_round_trip(home):
    back = WorldGraph.from_json(home.to_json())
    assert back.same_as(home)
    assert back.edges == home.edges


def test_near_edges_are_symmetric_and_thresholded(home):
    for rel, a, b in home.edges:
        if rel == "Near":
            assert ("Near", b, a) in home.edges
            assert home.distance(a, b) < NEAR_DIST


def _far_movable(w):
    return next(n.id for n in w.nodes if n.has("movable") and not w.near(AGENT, n.id)
                and w.support[n.id][1] == FLOOR)


def test_pick_requires_nearness(home):
    target = _far_movable(home)
    assert precondition_failure(act("Pick", target), home) == "near"
    with pytest.raises(PreconditionError) as err:
        apply(act("Pick", target), home)
    assert err.value.predicate == "near"


def test_move_pick_drop_cycle(home):
    target = _far_movable(home)
    w = replay(home, [act("MoveTo", target), act("Pick", target)])
    assert w.held == target
    assert "grabbed" in w.node(target).states
    assert not applicable(act("Pick", target), w)
    w2 = apply(act("Drop", target, FLOOR), w)
    assert w2.held is None
    assert w2.support[target] == ("OnTop", FLOOR)
    check_invariants(w2)


def test_moving_carries_the_held_subtree(home):
    target = _far_movable(home)
    w = replay(home, [act("MoveTo", target), act("Pick", target)])
    dest = next(a for a in ANCHORS["home"] if home.distance(a, target) > 2)
    w2 = apply(act("MoveTo", dest), w)
    a, t = w2.agent.pos, w2.node(target).pos
    assert (t[0], t[1]) == (a[0], a[1])


def test_move_cost_grows_with_distance(home):
    target = _far_movable(home)
    a, t = home.agent.pos, home.node(target).pos
    expected = 1.0 + 0.3 * math.hypot(a[0] - t[0], a[1] - t[1])
    assert action_cost(act("MoveTo", target), home) == pytest.approx(expected)
    assert action_cost(act("Open", "fridge"), home) == 0.5


def test_state_key_tracks_changes(home):
    target = _far_movable(home)
    assert home.state_key() == make_scene("home", 0).state_key()
    assert apply(act("MoveTo", target), home).state_key() != home.state_key()


def test_without_drops_supported_objects(home):
    anchor = next(a for a in ANCHORS["home"] if home.children.get(a))
    inner = home.children[anchor]
    w = home.without([anchor])
    assert anchor not in w and all(c not in w for c in inner)
    check_invariants(w)


def test_open_close_toggle(home):
    w = apply(act("MoveTo", "fridge"), home)
    opened = apply(act("Open", "fridge"), w)
    assert "open" in opened.node("fridge").states
    assert precondition_failure(act("Open", "fridge"), opened) == "closed"
    closed = apply(act("Close", "fridge"), opened)
    assert "open" not in closed.node("fridge").states


def test_goal_satisfaction_follows_support_chain(home):
    g = goal("home", 1)
    plan = teach(g, home, [0, 0, 1, 0])
    end = replay(home, plan.actions)
    assert satisfied(g, end)
    assert end.support["milk-carton"] == ("Inside", "fridge")
    # holding the carton next to the fridge does not count
    before_drop = replay(home, plan.actions[:-1])
    assert not satisfied(g, before_drop)


def test_unknown_action_and_arity():
    with pytest.raises(ValueError):
        act("Teleport", "x")
    with pytest.raises(ValueError):
        act("Drop", "x")
