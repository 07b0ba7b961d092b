"""Acceptance criteria 1-9, one test each, with a PASS/FAIL line per criterion.

Run alone with ``pytest tests/test_acceptance.py -v`` (about ten minutes on
one CPU core); the summary lines appear at the end of the session.
"""
import subprocess
import sys
import time

import numpy as np
import pytest

from toolnet import autodiff as ad
from toolnet.catalog import DOMAINS, NO_TOOL
from toolnet.dataset import (MAX_REMOVED, SceneRef, label_and_weight, replays_to_goal,
                             resolve)
from toolnet.gentest import generate, outcomes
from toolnet.goals import GOALS
from toolnet.model import ABLATION_ROWS, AblationConfig, ToolNet, build_input
from toolnet.pipeline import planner_pairs
from toolnet.planner import bfs, effective_branching_factor, guided, model_predictor
from toolnet.scenes import make_scene
from toolnet.trainer import (TrainConfig, evaluate, make_eval_set, prepare, provider_for,
                             record_loss, train)
from toolnet.world import WorldGraph, replay, satisfied

RESULTS: dict[int, str] = {}


def record(n: int, ok: bool, detail: str) -> None:
    RESULTS[n] = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(RESULTS[n])
    assert ok, RESULTS[n]


@pytest.fixture(scope="module", autouse=True)
def summary(request):
    yield
    tr = request.config.pluginmanager.getplugin("terminalreporter")
    lines = [RESULTS.get(n, f"criterion {n}: NOT RUN")
             for n in range(1, 10)]
    if tr is not None:
        tr.write_line("")
        for line in lines:
            tr.write_line(line)
    else:
        print("\n".join(lines))


# -------------------------------------------------------------------- shared fixtures

@pytest.fixture(scope="module")
def trained(augmented):
    """Models per domain for the rows the criteria name, plus training time per row."""
    out, elapsed = {}, {}
    for row in ("+W", "GGCN", "+NT", "+C"):
        ab = AblationConfig.row(row)
        t = time.perf_counter()
        for d in DOMAINS:
            out[row, d], _ = train(augmented, d, TrainConfig(epochs=200), ab)
        elapsed[row] = time.perf_counter() - t
    return out, elapsed


def _test_accuracy(model, corpus, domain):
    pv = provider_for(model.config)
    sub = corpus.domain(domain)
    es = make_eval_set(sub.split("test"), sub.split("val") + sub.split("test"), pv)
    preds = evaluate(model, es)
    return preds, len(es.plans)


# -------------------------------------------------------------------- criteria

def test_criterion_1_gradients(augmented):
    t = time.perf_counter()
    recs = label_and_weight(augmented.domain("home").split("train"))
    rec = recs[int(np.random.default_rng(0).integers(len(recs)))]
    worst = {}
    for row in ABLATION_ROWS:
        ab = AblationConfig.row(row, hidden=4)
        ex = prepare([rec], provider_for(ab))[0]
        m = ToolNet.init(ab, "home", seed=1)
        errs = ad.gradient_check(lambda: record_loss(m, ex, ab.weighting), m.params, h=1e-5)
        worst[row] = max(errs.values())
    elapsed = time.perf_counter() - t
    top = max(worst.values())
    record(1, top < 1e-3 and elapsed < 120,
           f"max relative error {top:.2e} over 7 rows (limit 1e-3), {elapsed:.0f}s (limit 120s)")


def test_criterion_2_permutation_invariance():
    rng = np.random.default_rng(2)
    worst = 0.0
    for i in range(5):
        d = DOMAINS[i % 2]
        w = make_scene(d, int(rng.integers(10)))
        g = GOALS[d][int(rng.integers(8))]
        ab = AblationConfig.row("+W")
        m = ToolNet.init(ab, d, seed=i)
        pv = provider_for(ab)
        tokens, out, extra = m.forward(build_input(w, g, pv))
        for _ in range(20):
            order = rng.permutation(len(w.nodes))
            wp = WorldGraph(d, tuple(w.nodes[j] for j in order), dict(w.support), w.seed)
            t2, o2, e2 = m.forward(build_input(wp, g, pv))
            assert t2 == tokens
            worst = max(worst, np.abs(o2.data - out.data).max(),
                        np.abs(e2["h_scene"].data - extra["h_scene"].data).max())
    record(2, worst < 1e-9, f"max deviation {worst:.1e} over 5 scenes x 20 permutations")


def test_criterion_3_likelihood_composition():
    ab = AblationConfig.row("+W")
    pv = provider_for(ab)
    slot_exact, tool_err, in_range, alpha_err = True, 0.0, True, 0.0
    for d in DOMAINS:
        m = ToolNet.init(ab, d, seed=3)
        for s in range(3):
            w = make_scene(d, s)
            for g in GOALS[d]:
                tokens, out, extra = m.forward(build_input(w, g, pv, ("bucket",)))
                p_nt = extra["p_no_tool"].data[0, 0]
                row = out.data[0]
                slot_exact &= row[-1] == p_nt
                tool_err = max(tool_err, np.abs(row[:-1] - (1 - p_nt) * extra["p_tools"].data[0]).max())
                in_range &= bool(np.all((row >= 0) & (row <= 1)))
                alpha_err = max(alpha_err, abs(extra["alpha"].data.sum() - 1))
    ok = slot_exact and tool_err < 1e-12 and in_range and alpha_err < 1e-12
    record(3, ok, f"no-tool slot bitwise={slot_exact}, tool slot error {tool_err:.1e}, "
                  f"in [0,1]={in_range}, attention sum error {alpha_err:.1e}")


def test_criterion_4_corpus_validity(corpus, augmented):
    plans = corpus.plans + [p for p in augmented.plans if p.provenance != "teacher"]
    valid = sum(replays_to_goal(p) for p in plans)
    bad_removal = 0
    for p in augmented.plans:
        if p.provenance != "removal":
            continue
        base = resolve(SceneRef(p.scene.domain, p.scene.seed))
        args = {a for act in p.actions for a in act.args}
        if not 1 <= len(p.scene.removed) <= MAX_REMOVED:
            bad_removal += 1
        for oid in p.scene.removed:
            if oid in args or p.goal.mentions(base.node(oid).cls):
                bad_removal += 1
    ok = valid == len(plans) and bad_removal == 0
    record(4, ok, f"{valid}/{len(plans)} plans replay to the goal, "
                  f"{bad_removal} removal violations")


def test_criterion_5_end_to_end_learning(trained, augmented):
    models, elapsed = trained
    acc = {}
    for row in ("+W", "GGCN"):
        correct = total = 0
        for d in DOMAINS:
            a, k = _test_accuracy(models[row, d], augmented, d)
            acc[row, d] = a
            correct += a * k
            total += k
        acc[row] = correct / total
    ok = acc["+W"] >= 0.9 and elapsed["+W"] < 600 and acc["GGCN"] < acc["+W"]
    record(5, ok, f"full {acc['+W']:.4f} (home {acc['+W', 'home']:.3f}, factory "
                  f"{acc['+W', 'factory']:.3f}) in {elapsed['+W']:.0f}s; "
                  f"GGCN {acc['GGCN']:.4f} (home {acc['GGCN', 'home']:.3f}, factory "
                  f"{acc['GGCN', 'factory']:.3f})")


def test_criterion_6_generalization(trained, augmented, toy):
    models, _ = trained
    cases, _ = generate(augmented, toy)
    only_sub = [c for c in cases if c.type == "III" and c.acceptable == set(c.extra_candidates)]
    only_nt = [c for c in cases if c.type == "II" and c.acceptable == {NO_TOOL}]

    def rate(row, subset):
        ok = 0
        for d in DOMAINS:
            sub = [c for c in subset if c.base.domain == d]
            if sub:
                m = models[row, d]
                ok += sum(outcomes(m, sub, provider_for(m.config)))
        return ok / len(subset)
    assert only_sub and only_nt
    base, lc, nt = rate("GGCN", only_sub), rate("+C", only_sub), rate("+NT", only_nt)
    ok = base == 0.0 and lc >= 0.5 and nt >= 0.8
    record(6, ok, f"Type III unseen-only ({len(only_sub)} cases): GGCN {base:.3f}, +C {lc:.3f} "
                  f"(+W {rate('+W', only_sub):.3f}); Type II no-tool-only ({len(only_nt)} cases): "
                  f"+NT {nt:.3f} (+W {rate('+W', only_nt):.3f})")


def test_criterion_7_planner_pruning(trained, augmented):
    models, _ = trained
    halved = pairs = 0
    valid = True
    ebf = {"uninformed": [], "guided": []}
    for d in DOMAINS:
        m = models["+W", d]
        pred = model_predictor(m, provider_for(m.config))
        chosen = planner_pairs(augmented, d, 20, 5)
        assert len(chosen) == 20
        for g, ref in chosen:
            w = resolve(ref)
            u, gd = bfs(w, g), guided(w, g, pred)
            pairs += 1
            for s, name in ((u, "uninformed"), (gd, "guided")):
                valid &= s.found and satisfied(g, replay(w, s.plan))
                if s.found and s.depth:
                    ebf[name].append(s.ebf)
            halved += gd.found and u.found and gd.nodes_expanded <= 0.5 * u.nodes_expanded
    frac = halved / pairs
    eu, eg = np.array(ebf["uninformed"]), np.array(ebf["guided"])
    record(7, frac >= 0.8 and valid,
           f"guided <= 50% nodes on {halved}/{pairs} pairs ({frac:.2f}), all valid={valid}; "
           f"EBF uninformed {eu.mean():.2f}+-{eu.std():.2f}, guided {eg.mean():.2f}+-{eg.std():.2f}")


def test_criterion_8_ebf_oracle():
    rng = np.random.default_rng(8)
    worst = 0.0
    for _ in range(1000):
        d = int(rng.integers(1, 13))
        n = int(rng.integers(2, 10**6))
        b = effective_branching_factor(n, d)
        worst = max(worst, abs(sum(b ** i for i in range(1, d + 1)) - (n - 1)))
    record(8, worst < 1e-4, f"max back-substitution error {worst:.1e} on 1000 random (N, d)")


def test_criterion_9_determinism(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("epochs = 3\ngentest_stride = 20\nplan_pairs = 3\nplan_max_len = 4\n")
    outs = [tmp_path / "a", tmp_path / "b"]
    for out in outs:
        subprocess.run([sys.executable, "-m", "toolnet.cli", "all", "--config", str(cfg),
                        "--out", str(out), "-q"], check=True)
    names = ["corpus.jsonl", "corpus_aug.jsonl", "gentest.jsonl", "results.csv",
             "plans/home.jsonl", "plans/factory.jsonl"]
    same = {n: (outs[0] / n).read_bytes() == (outs[1] / n).read_bytes() for n in names}
    models = sorted(p.name for p in (outs[0] / "models").glob("*.npz"))
    same_models = all((outs[0] / "models" / n).read_bytes() == (outs[1] / "models" / n).read_bytes()
                      for n in models)
    ok = all(same.values()) and same_models and len(models) == 14
    record(9, ok, "identical across two runs: " + ", ".join(n for n, s in same.items() if s)
                  + f", {len(models)} checkpoints={same_models}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
