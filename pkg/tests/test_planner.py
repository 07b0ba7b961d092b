import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from toolnet.catalog import NO_TOOL
from toolnet.goals import goal
from toolnet.model import ToolDistribution, tool_candidates
from toolnet.planner import (bfs, effective_branching_factor, guided, search, successors,
                             tool_costs)
from toolnet.teacher import teach
from toolnet.world import apply, replay, satisfied


def test_ebf_closed_forms():
    assert effective_branching_factor(6, 1) == pytest.approx(5, abs=1e-5)
    assert effective_branching_factor(7, 2) == pytest.approx(2, abs=1e-5)
    assert effective_branching_factor(1, 0) == 0.0
    with pytest.raises(ValueError):
        effective_branching_factor(5, 0)


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 10**6), st.integers(1, 12))
def test_ebf_back_substitution(n, d):
    b = effective_branching_factor(n, d)
    assert abs(sum(b ** i for i in range(1, d + 1)) - (n - 1)) < 1e-4


def test_ebf_is_monotone_in_nodes():
    vals = [effective_branching_factor(n, 4) for n in (10, 100, 1000, 10000)]
    assert vals == sorted(vals)


def test_satisfied_goal_needs_no_search(home):
    g = goal("home", 8)
    done = replay(home, teach(g, home, 0).actions)
    for stats in (bfs(done, g), guided(done, g, lambda w, g: None)):
        assert stats.found and stats.depth == 0 and stats.nodes_expanded == 1
        assert stats.plan == ()


def test_successors_are_applicable(home):
    for a, nxt in successors(home):
        assert apply(a, home).state_key() == nxt.state_key()


def _uniform(w, g):
    toks = tool_candidates(w)
    return ToolDistribution(toks + (NO_TOOL,), np.full(len(toks) + 1, 0.5))


def test_both_modes_find_valid_plans(home):
    g = goal("home", 3)
    u = bfs(home, g)
    gd = guided(home, g, _uniform)
    for s in (u, gd):
        assert s.found
        assert satisfied(g, replay(home, s.plan))
        assert s.ebf > 0
    assert u.depth <= len(teach(g, home, 0).actions)


def test_budget_exhaustion_is_a_result(home):
    s = bfs(home, goal("home", 2), budget=3)
    assert not s.found and s.nodes_expanded == 3 and s.plan == ()


def test_tool_costs_clip_and_skip_goal_objects():
    d = ToolDistribution(("box", "tray", NO_TOOL), np.array([1.0, 0.0, 0.5]))
    c = tool_costs(d)
    assert c == {"box": 0.05, "tray": 6.0}
    assert "box" not in tool_costs(d, goal("home", 5))


def test_search_argument_errors(home):
    with pytest.raises(ValueError):
        search(home, goal("home", 1), mode="guided")
    with pytest.raises(ValueError):
        search(home, goal("home", 1), mode="dfs")
    with pytest.raises(ValueError):
        bfs(home, goal("home", 1), budget=0)
