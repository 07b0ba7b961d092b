"""Word vectors for object classes and goal tokens.

Three providers share one interface: seeded hash vectors (no data needed),
vectors loaded from a whitespace text table, and the bundled toy knowledge
table whose clusters of related objects share a dominant direction.
Every lookup is unit-normalized; tokens missing from a table fall back to
the hash vector under the provider's seed.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

DEFAULT_DIM = 32
DEFAULT_SEED = 0
TOY_KB_FILE = "toy_kb.txt"

# Groups of objects that share a dominant component in the toy table.
TOY_CLUSTERS = (
    ("tray", "box", "crate", "basket", "bucket", "toolbox", "big-tray", "trolley", "lift"),
    ("stool", "ladder", "step-ladder", "chair", "seat", "ramp"),
    ("mop", "sponge", "vacuum", "blow-dryer"),
    ("glue", "tape"),
    ("screwdriver", "hammer", "drill", "nail", "screw"),
    ("apple", "orange", "banana", "guava"),
    ("gasoline", "coal", "wood"),
    ("book", "brick"),
)
CLUSTER_WEIGHT = 0.85


class EmbeddingParseError(ValueError):
    pass


def _hash_vector(token: str, dim: int, seed: int) -> np.ndarray:
    digest = int.from_bytes(hashlib.sha256(token.encode()).digest()[:8], "little")
    v = np.random.default_rng([seed, digest]).standard_normal(dim)
    return v / np.linalg.norm(v)


def _unit(v: np.ndarray) -> np.ndarray:
    n = np.linalg.norm(v)
    return v / n if n > 0 else v


@dataclass(frozen=True, eq=False)
class EmbeddingProvider:
    dim: int = DEFAULT_DIM
    source: str = "hash"
    seed: int = DEFAULT_SEED
    table: Mapping[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        if self.dim <= 0:
            raise ValueError("embedding dimension must be positive")
        if self.source not in ("hash", "file", "toy-kb"):
            raise ValueError(f"unknown embedding source {self.source!r}")

    def embed(self, token: str) -> np.ndarray:
        v = self.table.get(token)
        if v is None:
            return _hash_vector(token, self.dim, self.seed)
        return _unit(np.asarray(v, dtype=np.float64))

    def bow(self, tokens: Sequence[str]) -> np.ndarray:
        if len(tokens) == 0:
            return np.zeros(self.dim)
        return np.mean([self.embed(t) for t in tokens], axis=0)

    def fingerprint(self) -> dict:
        h = hashlib.sha256()
        for tok in sorted(self.table):
            h.update(tok.encode())
            h.update(np.asarray(self.table[tok], dtype=np.float64).tobytes())
        return {"source": self.source, "dim": self.dim, "seed": self.seed,
                "table_sha256": h.hexdigest()[:16]}


def hash_provider(dim: int = DEFAULT_DIM, seed: int = DEFAULT_SEED) -> EmbeddingProvider:
    return EmbeddingProvider(dim, "hash", seed)


def load_table(path: str | Path, expected_dim: int, seed: int = DEFAULT_SEED,
               source: str = "file") -> EmbeddingProvider:
    """Parse ``token v1 ... vd`` lines; blank lines and ``#`` comments are skipped."""
    table: dict[str, np.ndarray] = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts or parts[0].startswith("#"):
                continue
            if len(parts) != expected_dim + 1:
                raise EmbeddingParseError(
                    f"{path}:{lineno}: expected {expected_dim} values, got {len(parts) - 1}")
            try:
                table[parts[0]] = np.array([float(x) for x in parts[1:]])
            except ValueError as err:
                raise EmbeddingParseError(f"{path}:{lineno}: {err}") from None
    return EmbeddingProvider(expected_dim, source, seed, table)


def build_toy_table(tokens: Sequence[str], dim: int = DEFAULT_DIM, seed: int = 7) -> dict:
    """Cluster members = CLUSTER_WEIGHT * shared direction + own direction, normalized."""
    table = {}
    centers = {}
    for i, members in enumerate(TOY_CLUSTERS):
        c = _hash_vector(f"cluster:{i}", dim, seed)
        for m in members:
            centers[m] = c
    own_w = np.sqrt(1 - CLUSTER_WEIGHT ** 2)
    for tok in sorted(set(tokens) | set(centers)):
        own = _hash_vector(tok, dim, seed)
        v = CLUSTER_WEIGHT * centers[tok] + own_w * own if tok in centers else own
        table[tok] = _unit(v)
    return table


def write_table(path: str | Path, table: Mapping[str, np.ndarray]) -> None:
    with open(path, "w") as fh:
        for tok in sorted(table):
            fh.write(tok + " " + " ".join(f"{x:.17g}" for x in table[tok]) + "\n")


def toy_kb_path() -> Path:
    return Path(str(resources.files("toolnet") / "data" / TOY_KB_FILE))


def toy_kb_provider(seed: int = DEFAULT_SEED) -> EmbeddingProvider:
    return load_table(toy_kb_path(), DEFAULT_DIM, seed=seed, source="toy-kb")


def toy_kb_vocabulary() -> list[str]:
    from .catalog import CLASSES
    from .goals import GOALS
    words = set(CLASSES)
    for goals in GOALS.values():
        for g in goals:
            words.update(g.text)
    return sorted(words)


def make_provider(name: str, dim: int = DEFAULT_DIM, seed: int = DEFAULT_SEED,
                  path: str | None = None) -> EmbeddingProvider:
    if name == "hash":
        return hash_provider(dim, seed)
    if name == "toy-kb":
        if dim != DEFAULT_DIM:
            raise ValueError(f"the bundled toy table has dimension {DEFAULT_DIM}")
        return toy_kb_provider(seed)
    if name == "file":
        if path is None:
            raise ValueError("file provider needs a path")
        return load_table(path, dim, seed)
    raise ValueError(f"unknown embedding provider {name!r}")
