"""Goal-conditioned tool predictor over scene graphs.

The encoder is a gated graph convolution: node states start as a tanh
projection of word vector, state bits, normalized pose and size and the
goal bit, then for ``steps`` rounds gather relation-specific messages from
in-neighbors and update through a GRU cell. Optional pieces, switched by
:class:`AblationConfig`, follow the incremental ladder

    GGCN -> +Metric -> +Attn -> +L -> +NT -> +C -> +W

metric node encodings through PReLU layers, goal-conditioned attention
pooling, a per-candidate likelihood head scored from each tool's word
vector, a separate "is any tool needed" head composed with the per-tool
scores, knowledge-table embeddings, and loss weighting of optimal plans.
All tensors are row-major: a node's state is a row.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from . import autodiff as ad
from .catalog import ATTRIBUTES, NO_TOOL, TOOLS
from .embeddings import EmbeddingProvider
from .goals import GoalSpec
from .world import FLOOR_EXTENT, WorldGraph

REL_CHANNELS = ("OnTop", "OnTop^-1", "Inside", "Inside^-1", "ConnectedTo", "ConnectedTo^-1",
                "Near")
SIZE_SCALE = 2.0
ABLATION_ROWS = ("GGCN", "+Metric", "+Attn", "+L", "+NT", "+C", "+W")
_ROW_FLAGS = ("metric", "attn", "factored", "no_tool_head", "conceptnet", "weighting")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class AblationConfig:
    metric: bool = False
    attn: bool = False
    factored: bool = False
    no_tool_head: bool = False
    conceptnet: bool = False
    weighting: bool = False
    hidden: int = 32
    steps: int = 2
    metric_layers: int = 2
    embed_dim: int = 32

    def __post_init__(self):
        if self.steps < 1:
            raise ConfigError("propagation steps must be >= 1")
        if self.hidden < 1 or self.embed_dim < 1 or self.metric_layers < 1:
            raise ConfigError("dimensions must be positive")
        if self.attn and not self.metric:
            raise ConfigError("attention pools [h; m] node states and needs metric=True")

    @classmethod
    def row(cls, name: str, **dims) -> "AblationConfig":
        """Configuration for one rung of the incremental ladder (``full`` = ``+W``)."""
        if name == "full":
            name = "+W"
        if name not in ABLATION_ROWS:
            raise ConfigError(f"unknown ablation row {name!r}; expected one of {ABLATION_ROWS}")
        k = ABLATION_ROWS.index(name)
        return cls(**{f: i < k for i, f in enumerate(_ROW_FLAGS)}, **dims)

    @property
    def state_dim(self) -> int:
        return 2 * self.hidden if self.metric else self.hidden

    def to_json(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ToolDistribution:
    tokens: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        if len(self.tokens) != len(self.values):
            raise ValueError("tokens and values differ in length")

    def __getitem__(self, token: str) -> float:
        return float(self.values[self.tokens.index(token)])

    def as_dict(self) -> dict[str, float]:
        return {t: float(v) for t, v in zip(self.tokens, self.values)}


def argmax_tool(dist: ToolDistribution) -> str:
    """Highest entry; ties go to the lexicographically smallest tool, no-tool loses ties."""
    best = max(dist.values)
    tied = [t for t, v in zip(dist.tokens, dist.values) if v == best]
    tools = sorted(t for t in tied if t != NO_TOOL)
    return tools[0] if tools else NO_TOOL


# -------------------------------------------------------------------- features

@dataclass
class GraphInput:
    """Constant (non-trainable) arrays for one (scene, goal) pair."""
    node_ids: list[str]
    features: np.ndarray          # n x (d + |attrs| + 7)
    metric_features: np.ndarray   # n x (d + 6)
    adjacency: list[np.ndarray]   # per relation channel, A[v, u] = 1 for message u -> v
    e_goal: np.ndarray            # 1 x d, all goal tokens
    e_goal_obj: np.ndarray        # 1 x d, goal-object tokens
    candidates: tuple[str, ...]   # tool tokens scored by the factored head
    cand_emb: np.ndarray          # |candidates| x d


def tool_candidates(w: WorldGraph, extra: Sequence[str] = ()) -> tuple[str, ...]:
    """Movable tool-flagged classes present, plus caller-supplied tokens, sorted."""
    present = {n.cls for n in w.nodes if n.is_tool and n.has("movable")}
    return tuple(sorted(present | set(extra)))


def build_input(w: WorldGraph, goal: GoalSpec, provider: EmbeddingProvider,
                extra_candidates: Sequence[str] = ()) -> GraphInput:
    ids = [n.id for n in w.nodes]
    index = {oid: i for i, oid in enumerate(ids)}
    emb = np.array([provider.embed(n.cls) for n in w.nodes])
    attrs = np.array([[1.0 if a in n.states else 0.0 for a in ATTRIBUTES] for n in w.nodes])
    pos = np.array([n.pos for n in w.nodes]) / FLOOR_EXTENT
    size = np.array([n.size for n in w.nodes]) / SIZE_SCALE
    gbit = np.array([[1.0 if goal.mentions(n.cls) else 0.0] for n in w.nodes])
    features = np.hstack([emb, attrs, pos, size, gbit])
    metric_features = np.hstack([emb, pos, size])
    n = len(ids)
    adj = [np.zeros((n, n)) for _ in REL_CHANNELS]
    for rel, src, dst in w.edges:
        s, d = index[src], index[dst]
        if rel == "Near":
            adj[6][d, s] = 1.0
        else:
            c = REL_CHANNELS.index(rel)
            adj[c][d, s] = 1.0
            adj[c + 1][s, d] = 1.0
    cands = tool_candidates(w, extra_candidates)
    cand_emb = (np.array([provider.embed(t) for t in cands]) if cands
                else np.zeros((0, provider.dim)))
    return GraphInput(ids, features, metric_features, adj,
                      provider.bow(goal.text).reshape(1, -1),
                      provider.bow(goal.objects).reshape(1, -1), cands, cand_emb)


# -------------------------------------------------------------------- parameters

def _glorot(rng: np.random.Generator, fan_in: int, fan_out: int) -> np.ndarray:
    lim = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-lim, lim, size=(fan_in, fan_out))


@dataclass
class ToolNet:
    config: AblationConfig
    domain: str
    params: dict[str, ad.Tensor] = field(default_factory=dict)

    @property
    def vocab(self) -> tuple[str, ...]:
        """Output order of the fixed-width head: domain tools, no-tool last."""
        return TOOLS[self.domain] + (NO_TOOL,)

    @classmethod
    def init(cls, config: AblationConfig, domain: str, seed: int = 0) -> "ToolNet":
        rng = np.random.default_rng(seed)
        c = config
        d, h = c.embed_dim, c.hidden
        feat = d + len(ATTRIBUTES) + 7
        p: dict[str, np.ndarray] = {"W_init": _glorot(rng, feat, h)}
        for j, rel in enumerate(REL_CHANNELS):
            p[f"W_p{j}"] = _glorot(rng, h, h)
        for g in ("z", "r", "h"):
            p[f"W_{g}"] = _glorot(rng, 2 * h, h)
            p[f"b_{g}"] = np.zeros((1, h))
        if c.metric:
            p["W_metric0"] = _glorot(rng, d + 6, h)
            p["slope0"] = np.full((1, 1), 0.25)
            for k in range(1, c.metric_layers):
                p[f"W_metric{k}"] = _glorot(rng, h, h)
                p[f"slope{k}"] = np.full((1, 1), 0.25)
        if c.attn:
            p["W_attn"] = _glorot(rng, c.state_dim + d, 1)
        head_in = c.state_dim + d
        n_tools = len(TOOLS[domain])
        if c.factored:
            p["W_L1"] = _glorot(rng, d + head_in, h)
            p["b_L1"] = np.zeros((1, h))
            p["W_L2"] = _glorot(rng, h, 1)
            p["b_L2"] = np.zeros((1, 1))
        else:
            width = n_tools if c.no_tool_head else n_tools + 1
            p["W_out"] = _glorot(rng, head_in, width)
            p["b_out"] = np.zeros((1, width))
        if c.no_tool_head:
            p["W_nt"] = _glorot(rng, head_in, 1)
            p["b_nt"] = np.zeros((1, 1))
        return cls(config, domain, {k: ad.parameter(v, name=k) for k, v in p.items()})

    def parameter_count(self) -> int:
        return int(sum(t.data.size for t in self.params.values()))

    # ---------------------------------------------------------------- forward
    def node_init(self, gi: GraphInput) -> ad.Tensor:
        p = self.params
        return ad.tanh(ad.matmul(ad.constant(gi.features), p["W_init"]))

    def propagate(self, h: ad.Tensor, gi: GraphInput) -> ad.Tensor:
        p = self.params
        x = None
        for j, a in enumerate(gi.adjacency):
            if not a.any():
                continue
            msg = ad.matmul(ad.constant(a), ad.matmul(h, p[f"W_p{j}"]))
            x = msg if x is None else ad.add(x, msg)
        if x is None:
            x = ad.constant(np.zeros(h.shape))
        xh = ad.concat([x, h], axis=1)
        z = ad.sigmoid(ad.add(ad.matmul(xh, p["W_z"]), p["b_z"]))
        r = ad.sigmoid(ad.add(ad.matmul(xh, p["W_r"]), p["b_r"]))
        cand = ad.tanh(ad.add(ad.matmul(ad.concat([x, ad.hadamard(r, h)], axis=1), p["W_h"]),
                              p["b_h"]))
        one = ad.constant(np.ones(z.shape))
        return ad.add(ad.hadamard(ad.sub(one, z), h), ad.hadamard(z, cand))

    def metric(self, gi: GraphInput) -> ad.Tensor:
        p = self.params
        m = ad.prelu(ad.matmul(ad.constant(gi.metric_features), p["W_metric0"]), p["slope0"])
        for k in range(1, self.config.metric_layers):
            m = ad.prelu(ad.matmul(m, p[f"W_metric{k}"]), p[f"slope{k}"])
        return m

    def encode(self, gi: GraphInput) -> tuple[ad.Tensor, ad.Tensor | None]:
        """Scene vector (1 x state_dim) and attention weights (n x 1) when enabled."""
        h = self.node_init(gi)
        for _ in range(self.config.steps):
            h = self.propagate(h, gi)
        states = ad.concat([h, self.metric(gi)], axis=1) if self.config.metric else h
        if not self.config.attn:
            return ad.sum_reduce(states, axis=0), None
        n = states.shape[0]
        query = ad.concat([states, ad.tile_rows(ad.constant(gi.e_goal_obj), n)], axis=1)
        alpha = ad.softmax(ad.matmul(query, self.params["W_attn"]), axis=0)
        return ad.matmul(ad.transpose(alpha), states), alpha

    def forward(self, gi: GraphInput) -> tuple[tuple[str, ...], ad.Tensor, dict]:
        """Output tokens, a 1 x K likelihood row, and intermediates for inspection."""
        c, p = self.config, self.params
        scene, alpha = self.encode(gi)
        head_in = ad.concat([scene, ad.constant(gi.e_goal)], axis=1)
        extras = {"h_scene": scene, "alpha": alpha}
        if c.factored:
            tokens = gi.candidates
            rows = gi.cand_emb if c.no_tool_head else np.vstack(
                [gi.cand_emb, np.zeros((1, c.embed_dim))])
            k = rows.shape[0]
            if k:
                inp = ad.concat([ad.constant(rows), ad.tile_rows(head_in, k)], axis=1)
                hid = ad.tanh(ad.add(ad.matmul(inp, p["W_L1"]), p["b_L1"]))
                tool_p = ad.transpose(ad.sigmoid(ad.add(ad.matmul(hid, p["W_L2"]), p["b_L2"])))
            else:
                tool_p = None
        else:
            tokens = TOOLS[self.domain]
            tool_p = ad.sigmoid(ad.add(ad.matmul(head_in, p["W_out"]), p["b_out"]))
        if c.no_tool_head:
            p_nt = ad.sigmoid(ad.add(ad.matmul(head_in, p["W_nt"]), p["b_nt"]))
            extras["p_no_tool"] = p_nt
            extras["p_tools"] = tool_p
            if tool_p is None:
                out = p_nt
            else:
                keep = ad.sub(ad.constant(np.ones((1, 1))), p_nt)
                out = ad.concat([ad.hadamard(tool_p, keep), p_nt], axis=1)
        else:
            out = tool_p
        return tuple(tokens) + (NO_TOOL,), out, extras

    def predict(self, gi: GraphInput) -> ToolDistribution:
        tokens, out, _ = self.forward(gi)
        return ToolDistribution(tokens, out.data[0].copy())

    # ---------------------------------------------------------------- persistence
    def header(self, provider: EmbeddingProvider) -> dict:
        return {"config": self.config.to_json(), "domain": self.domain,
                "provider": provider.fingerprint()}

    def save(self, path, provider: EmbeddingProvider) -> None:
        ad.save_params(path, self.params, self.header(provider))

    @classmethod
    def load(cls, path) -> tuple["ToolNet", dict]:
        params, header = ad.load_params(path)
        config = AblationConfig(**header["config"])
        return cls(config, header["domain"], params), header

    def copy_params(self) -> dict[str, np.ndarray]:
        return {k: v.data.copy() for k, v in self.params.items()}

    def set_params(self, values: dict[str, np.ndarray]) -> None:
        for k, v in values.items():
            self.params[k].data[...] = v
