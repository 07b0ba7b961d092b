import pytest

from toolnet.catalog import NO_TOOL
from toolnet.dataset import resolve
from toolnet.gentest import (TYPES, gen_type, generate, most_used_tool, nearest_unseen,
                             read_cases, replace_object, score, training_classes, write_cases)
from toolnet.world import check_invariants, satisfied


@pytest.fixture(scope="module")
def cases(corpus, toy):
    out, skipped = generate(corpus, toy)
    assert set(skipped) == set(TYPES)
    return out


def test_every_type_is_represented(cases):
    assert {c.type for c in cases} == set(TYPES)


def test_cases_are_well_formed(cases):
    for c in cases:
        base = resolve(c.base)
        assert not c.scene.same_as(base), c.mutation
        assert c.acceptable
        check_invariants(c.scene)
        assert not satisfied(c.goal, c.scene)


def test_type_ii_removes_the_most_used_tool(cases, corpus):
    for c in cases:
        if c.type != "II":
            continue
        assert c.mutation["removed"] == most_used_tool(corpus, c.goal)
        assert not c.scene.by_class(c.mutation["removed"])


def test_type_iii_substitutes_are_unseen_and_offered(cases, corpus):
    seen = {d: training_classes(corpus, d) for d in ("home", "factory")}
    iii = [c for c in cases if c.type == "III"]
    assert iii
    for c in iii:
        sub = c.mutation["by"]
        assert sub not in seen[c.base.domain]
        assert c.extra_candidates == (sub,)
        assert c.scene.by_class(sub)


def test_some_type_iii_cases_need_the_substitute(cases):
    only = [c for c in cases if c.type == "III" and c.acceptable == {c.mutation["by"]}]
    assert only


def test_nearest_unseen_follows_the_table(toy):
    assert nearest_unseen("stool", toy, ["seat", "headphone", "apple"]) == "seat"
    assert nearest_unseen("glue", toy, ["headphone", "apple"]) is None


def test_pillow_needs_a_bigger_carrier(cases):
    pillow = [c for c in cases if c.type == "V" and c.mutation["by"] == "pillow"]
    assert pillow
    for c in pillow:
        assert "tray" not in c.acceptable
        assert "pillow" in c.goal.objects


def test_type_iv_uses_an_unrelated_object(cases):
    iv = [c for c in cases if c.type == "IV"]
    assert iv
    for c in iv:
        assert c.mutation["by"] == "headphone"
        assert "headphone" not in c.acceptable


def test_score():
    class C:
        acceptable = frozenset({NO_TOOL, "gasoline"})
    assert score(NO_TOOL, C)
    assert score("gasoline", C)
    assert not score("coal", C)


def test_round_trip(tmp_path, cases):
    path = tmp_path / "g.jsonl"
    write_cases(path, cases[:40])
    back = read_cases(path)
    assert back == cases[:40]
    assert all(b.scene.same_as(c.scene) for b, c in zip(back, cases[:40]))


def test_generation_is_deterministic(corpus, toy):
    a, _ = gen_type("I", corpus, toy, seed=5, domains=["home"])
    b, _ = gen_type("I", corpus, toy, seed=5, domains=["home"])
    assert [c.to_json() for c in a] == [c.to_json() for c in b]


def test_unknown_type(corpus, toy):
    with pytest.raises(ValueError):
        gen_type("VI", corpus, toy)


def test_replace_object_keeps_support(home):
    w = replace_object(home, "tray", "crate")
    assert "tray" not in w and w.by_class("crate")
    assert w.support["crate"] == home.support["tray"]
    check_invariants(w)
