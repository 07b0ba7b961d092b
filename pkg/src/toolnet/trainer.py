"""Weighted binary cross-entropy training and accuracy evaluation."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from . import autodiff as ad
from .dataset import Corpus, DemoPlan, TrainRecord, label_and_weight, pair_answers, resolve
from .embeddings import EmbeddingProvider, hash_provider, toy_kb_provider
from .model import AblationConfig, GraphInput, ToolNet, argmax_tool, build_input

EPS = 1e-9


class TrainingError(RuntimeError):
    pass


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 200
    lr: float = 1e-3
    optimizer: str = "adam"
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8
    batch_size: int = 1
    seed: int = 0
    patience: int = 20
    w_opt: float = 2.0

    def __post_init__(self):
        if self.epochs < 1 or self.lr <= 0 or self.batch_size < 1 or self.patience < 1:
            raise ValueError("training hyperparameters must be positive")
        if self.optimizer not in ("adam", "sgd"):
            raise ValueError(f"unknown optimizer {self.optimizer!r}")
        if self.w_opt <= 0:
            raise ValueError("w_opt must be positive")


def provider_for(config: AblationConfig, seed: int = 0) -> EmbeddingProvider:
    """Knowledge-table vectors under the +C flag, hash vectors otherwise."""
    if config.conceptnet:
        return toy_kb_provider(seed)
    return hash_provider(config.embed_dim, seed)


# -------------------------------------------------------------------- loss

def weighted_bce(pred: ad.Tensor, c1: np.ndarray, c0: np.ndarray) -> ad.Tensor:
    """-sum_j [c1_j log p_j + c0_j log(1 - p_j)] with p clamped to [EPS, 1 - EPS]."""
    if pred.shape != (1, len(c1)) or len(c0) != len(c1):
        raise ad.DimensionError(
            f"prediction shape {pred.shape} does not match {len(c1)} label slots")
    p = ad.clip(pred, EPS, 1.0 - EPS)
    one = ad.constant(np.ones(p.shape))
    pos = ad.hadamard(ad.constant(c1.reshape(1, -1)), ad.log(p))
    neg = ad.hadamard(ad.constant(c0.reshape(1, -1)), ad.log(ad.sub(one, p)))
    return ad.scale(ad.sum_reduce(ad.add(pos, neg)), -1.0)


def bce_loss(pred: ad.Tensor, y: Sequence[float], alpha: float = 1.0,
             weighting: bool = False) -> ad.Tensor:
    y = np.asarray(y, dtype=np.float64)
    a = alpha if weighting else 1.0
    return weighted_bce(pred, a * y, a * (1.0 - y))


# -------------------------------------------------------------------- optimizers

class Adam:
    def __init__(self, params: Mapping[str, ad.Tensor], lr: float, beta1: float = 0.9,
                 beta2: float = 0.999, eps: float = 1e-8):
        self.params = params
        self.lr, self.b1, self.b2, self.eps = lr, beta1, beta2, eps
        self.m = {k: np.zeros_like(v.data) for k, v in params.items()}
        self.v = {k: np.zeros_like(v.data) for k, v in params.items()}
        self.t = 0

    def step(self) -> None:
        self.t += 1
        c1 = 1 - self.b1 ** self.t
        c2 = 1 - self.b2 ** self.t
        for k, p in self.params.items():
            g = p.grad
            self.m[k] = self.b1 * self.m[k] + (1 - self.b1) * g
            self.v[k] = self.b2 * self.v[k] + (1 - self.b2) * g * g
            p.data -= self.lr * (self.m[k] / c1) / (np.sqrt(self.v[k] / c2) + self.eps)


class SGD:
    def __init__(self, params: Mapping[str, ad.Tensor], lr: float):
        self.params, self.lr = params, lr

    def step(self) -> None:
        for p in self.params.values():
            p.data -= self.lr * p.grad


# -------------------------------------------------------------------- data plumbing

@dataclass
class Example:
    record: TrainRecord
    gi: GraphInput


def prepare(records: Iterable[TrainRecord], provider: EmbeddingProvider) -> list[Example]:
    return [Example(r, build_input(resolve(r.scene), r.goal, provider)) for r in records]


def record_loss(model: ToolNet, ex: Example, weighting: bool) -> ad.Tensor:
    tokens, out, _ = model.forward(ex.gi)
    c1, c0 = ex.record.targets(tokens, weighting)
    return weighted_bce(out, c1, c0)


@dataclass
class EvalSet:
    """Held-out plans with the acceptable answers of their (goal, scene) pairs."""
    plans: list[DemoPlan]
    answers: dict[tuple, frozenset[str]]
    inputs: dict[tuple, GraphInput] = field(default_factory=dict)


def make_eval_set(plans: Sequence[DemoPlan], answer_plans: Sequence[DemoPlan],
                  provider: EmbeddingProvider) -> EvalSet:
    inputs = {}
    for p in plans:
        if p.pair not in inputs:
            inputs[p.pair] = build_input(resolve(p.scene), p.goal, provider)
    return EvalSet(list(plans), pair_answers(answer_plans), inputs)


def evaluate(model: ToolNet, es: EvalSet) -> float:
    """Fraction of plans whose pair prediction is among the pair's demonstrated answers."""
    if not es.plans:
        raise ValueError("cannot evaluate on an empty case set")
    preds = {k: argmax_tool(model.predict(gi)) for k, gi in es.inputs.items()}
    correct = sum(preds[p.pair] in es.answers[p.pair] for p in es.plans)
    return correct / len(es.plans)


def predictions(model: ToolNet, es: EvalSet) -> dict[tuple, str]:
    return {k: argmax_tool(model.predict(gi)) for k, gi in es.inputs.items()}


# -------------------------------------------------------------------- training

@dataclass
class History:
    epochs: list[dict] = field(default_factory=list)
    best_epoch: int = -1
    best_val: float = -1.0

    def to_json(self) -> dict:
        return asdict(self)


def train(corpus: Corpus, domain: str, config: TrainConfig, ablation: AblationConfig,
          provider: EmbeddingProvider | None = None, model_seed: int | None = None,
          log: Callable[[str], None] | None = None) -> tuple[ToolNet, History]:
    """Fit one domain's model; returns the best-validation parameters and the history.

    The checkpoint kept is the first epoch reaching the best validation
    accuracy, ties broken by lower validation loss; training stops once
    accuracy has not improved for ``patience`` epochs.
    """
    provider = provider or provider_for(ablation, config.seed)
    sub = corpus.domain(domain)
    train_plans = sub.split("train")
    val_plans = sub.split("val")
    if not train_plans:
        raise ValueError(f"no training plans for domain {domain!r}")
    records = label_and_weight(train_plans, config.w_opt)
    examples = prepare(records, provider)
    val_records = prepare(label_and_weight(val_plans, config.w_opt), provider)
    heldout = val_plans + sub.split("test")
    val_set = make_eval_set(val_plans, heldout, provider) if val_plans else None

    model = ToolNet.init(ablation, domain, config.seed if model_seed is None else model_seed)
    params = model.params
    opt = (Adam(params, config.lr, config.beta1, config.beta2, config.adam_eps)
           if config.optimizer == "adam" else SGD(params, config.lr))
    rng = np.random.default_rng(config.seed)
    history = History()
    best_key = None
    best_params = model.copy_params()
    best_acc_epoch = 0
    best_acc = -1.0
    for epoch in range(config.epochs):
        order = rng.permutation(len(examples))
        total = 0.0
        for start in range(0, len(order), config.batch_size):
            ad.zero_grad(params.values())
            batch = order[start:start + config.batch_size]
            for i in batch:
                loss = record_loss(model, examples[i], ablation.weighting)
                ad.backward(loss)
                total += loss.item()
            opt.step()
        if not math.isfinite(total):
            raise TrainingError(f"training loss diverged at epoch {epoch}")
        entry = {"epoch": epoch, "train_loss": total / len(examples)}
        if val_set is not None:
            acc = evaluate(model, val_set)
            vloss = sum(record_loss(model, ex, False).item() for ex in val_records)
            entry.update(val_acc=acc, val_loss=vloss / max(1, len(val_records)))
            key = (acc, -round(entry["val_loss"], 12))
            if best_key is None or key > best_key:
                best_key = key
                best_params = model.copy_params()
                history.best_epoch, history.best_val = epoch, acc
            if acc > best_acc:
                best_acc, best_acc_epoch = acc, epoch
        else:
            best_params = model.copy_params()
            history.best_epoch = epoch
        history.epochs.append(entry)
        if log:
            log(" ".join(f"{k}={v:.4f}" if isinstance(v, float) else f"{k}={v}"
                         for k, v in entry.items()))
        if val_set is not None and epoch - best_acc_epoch >= config.patience:
            break
    model.set_params(best_params)
    return model, history
