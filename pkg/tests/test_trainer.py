import numpy as np
import pytest

from toolnet import autodiff as ad
from toolnet.dataset import Corpus, label_and_weight, label_vector
from toolnet.model import AblationConfig, ToolNet
from toolnet.trainer import (EvalSet, TrainConfig, bce_loss, evaluate, prepare, provider_for,
                             record_loss, train, weighted_bce)


def test_bce_is_zero_only_at_the_labels():
    y = [1.0, 0.0, 1.0]
    exact = bce_loss(ad.constant(np.array([y])), y)
    assert exact.item() < 1e-8
    off = bce_loss(ad.constant(np.array([[0.9, 0.2, 0.6]])), y)
    assert off.item() > 0


def test_bce_weighting_scales_the_loss():
    p = ad.constant(np.array([[0.3, 0.6]]))
    y = [1.0, 0.0]
    assert bce_loss(p, y, 2.0, weighting=True).item() == pytest.approx(
        2 * bce_loss(p, y).item())
    assert bce_loss(p, y, 2.0, weighting=False).item() == pytest.approx(bce_loss(p, y).item())


def test_bce_shape_mismatch():
    with pytest.raises(ad.DimensionError):
        weighted_bce(ad.constant(np.ones((1, 3)) * 0.5), np.ones(2), np.zeros(2))


def test_grouped_record_loss_equals_per_plan_sum(corpus):
    rec = label_and_weight(corpus.domain("home").split("train"))[3]
    cfg = AblationConfig.row("+W", hidden=4)
    ex = prepare([rec], provider_for(cfg))[0]
    m = ToolNet.init(cfg, "home", 0)
    tokens, out, _ = m.forward(ex.gi)
    per_plan = sum(bce_loss(out, label_vector(t, tokens), a, weighting=True).item()
                   for t, a in rec.labels)
    assert record_loss(m, ex, True).item() == pytest.approx(per_plan, rel=1e-12)


def test_config_validation():
    with pytest.raises(ValueError):
        TrainConfig(lr=0)
    with pytest.raises(ValueError):
        TrainConfig(optimizer="rmsprop")


def test_empty_eval_set_is_an_error():
    m = ToolNet.init(AblationConfig(), "home", 0)
    with pytest.raises(ValueError):
        evaluate(m, EvalSet([], {}))


def test_short_training_is_deterministic(augmented):
    small = Corpus([p for p in augmented.plans if p.goal.goal_id in (3, 8)])
    cfg = TrainConfig(epochs=2, seed=3)
    ab = AblationConfig.row("+W", hidden=8)
    m1, h1 = train(small, "home", cfg, ab)
    m2, h2 = train(small, "home", cfg, ab)
    assert h1.epochs == h2.epochs
    assert all(np.array_equal(m1.params[k].data, m2.params[k].data) for k in m1.params)
    assert h1.epochs[1]["train_loss"] < h1.epochs[0]["train_loss"]


def test_unknown_domain_has_no_plans(augmented):
    with pytest.raises(ValueError):
        train(Corpus(augmented.domain("home").plans), "factory", TrainConfig(epochs=1),
              AblationConfig())
