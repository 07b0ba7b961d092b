import numpy as np
import pytest

from toolnet.catalog import NO_TOOL, TOOLS
from toolnet.goals import goal
from toolnet.model import (ABLATION_ROWS, AblationConfig, ConfigError, ToolDistribution,
                           ToolNet, argmax_tool, build_input, tool_candidates)
from toolnet.scenes import make_scene
from toolnet.trainer import provider_for
from toolnet.world import WorldGraph


def _model(row, domain="home", seed=0, **dims):
    cfg = AblationConfig.row(row, **dims)
    return ToolNet.init(cfg, domain, seed), provider_for(cfg)


def _permute(w: WorldGraph, rng) -> WorldGraph:
    order = rng.permutation(len(w.nodes))
    return WorldGraph(w.domain, tuple(w.nodes[i] for i in order), dict(w.support), w.seed)


def test_rows_are_cumulative():
    flags = [AblationConfig.row(r) for r in ABLATION_ROWS]
    assert not any([flags[0].metric, flags[0].attn, flags[0].factored])
    assert flags[-1] == AblationConfig.row("full")
    assert all(f.metric for f in flags[1:]) and all(f.weighting is False for f in flags[:-1])
    with pytest.raises(ConfigError):
        AblationConfig.row("+X")


def test_attention_without_metric_is_rejected():
    with pytest.raises(ConfigError):
        AblationConfig(attn=True)


@pytest.mark.parametrize("row", ABLATION_ROWS)
def test_outputs_are_probabilities(row, home):
    m, pv = _model(row)
    d = m.predict(build_input(home, goal("home", 1), pv))
    assert np.all((d.values >= 0) & (d.values <= 1))
    assert d.tokens[-1] == NO_TOOL


def test_fixed_head_uses_domain_vocabulary(home):
    m, pv = _model("+Attn")
    d = m.predict(build_input(home, goal("home", 1), pv))
    assert d.tokens == TOOLS["home"] + (NO_TOOL,)


def test_factored_head_scores_candidates_present(home):
    m, pv = _model("+L")
    d = m.predict(build_input(home, goal("home", 1), pv))
    assert d.tokens[:-1] == tool_candidates(home)


def test_no_tool_composition(home):
    m, pv = _model("+NT")
    tokens, out, extra = m.forward(build_input(home, goal("home", 3), pv))
    p_nt = extra["p_no_tool"].data[0, 0]
    assert out.data[0, -1] == p_nt
    assert np.allclose(out.data[0, :-1], (1 - p_nt) * extra["p_tools"].data[0], atol=1e-12, rtol=0)


def test_empty_candidates_leave_only_no_tool(home):
    bare = home.without([n.id for n in home.nodes if n.is_tool])
    for row in ("+L", "+NT"):
        m, pv = _model(row)
        d = m.predict(build_input(bare, goal("home", 1), pv))
        assert d.tokens == (NO_TOOL,)


def test_unseen_token_gets_a_score_only_with_factored_head(home):
    m, pv = _model("+C")
    gi = build_input(home, goal("home", 5), pv, extra_candidates=("bucket",))
    d = m.predict(gi)
    assert "bucket" in d.tokens and np.isfinite(d["bucket"])
    base, bpv = _model("GGCN")
    assert "bucket" not in base.predict(build_input(home, goal("home", 5), bpv)).tokens


def test_attention_weights_sum_to_one(home):
    m, pv = _model("+Attn")
    _, _, extra = m.forward(build_input(home, goal("home", 2), pv))
    assert abs(extra["alpha"].data.sum() - 1.0) < 1e-12


def test_single_node_attention_is_identity():
    w = make_scene("home", 0)
    solo = WorldGraph("home", (w.agent,), {}, 0)
    m, pv = _model("+Attn")
    gi = build_input(solo, goal("home", 1), pv)
    scene, alpha = m.encode(gi)
    states = np.hstack([m.propagate(m.propagate(m.node_init(gi), gi), gi).data,
                        m.metric(gi).data])
    assert alpha.data[0, 0] == 1.0
    assert np.allclose(scene.data, states, atol=1e-15)


@pytest.mark.parametrize("row", ["GGCN", "+Attn", "+W"])
def test_node_order_does_not_matter(row, home):
    m, pv = _model(row)
    g = goal("home", 2)
    ref_tokens, ref, ref_extra = m.forward(build_input(home, g, pv))
    rng = np.random.default_rng(0)
    for _ in range(5):
        tokens, out, extra = m.forward(build_input(_permute(home, rng), g, pv))
        assert tokens == ref_tokens
        assert np.abs(out.data - ref.data).max() < 1e-9
        assert np.abs(extra["h_scene"].data - ref_extra["h_scene"].data).max() < 1e-9


def test_argmax_ties():
    d = ToolDistribution(("box", "tray", NO_TOOL), np.array([0.5, 0.5, 0.5]))
    assert argmax_tool(d) == "box"
    d = ToolDistribution(("box", NO_TOOL), np.array([0.2, 0.9]))
    assert argmax_tool(d) == NO_TOOL


def test_save_load_round_trip(tmp_path, home):
    m, pv = _model("+W", seed=5)
    path = tmp_path / "m.npz"
    m.save(path, pv)
    back, header = ToolNet.load(path)
    assert header["domain"] == "home" and header["provider"]["source"] == "toy-kb"
    gi = build_input(home, goal("home", 4), pv)
    assert np.array_equal(back.predict(gi).values, m.predict(gi).values)


def test_init_is_seeded():
    a, _ = _model("+W", seed=1)
    b, _ = _model("+W", seed=1)
    c, _ = _model("+W", seed=2)
    assert all(np.array_equal(a.params[k].data, b.params[k].data) for k in a.params)
    assert any(not np.array_equal(a.params[k].data, c.params[k].data) for k in a.params)
