"""Small dense reverse-mode differentiation engine.

Every value is a 2-D float64 array wrapped in :class:`Tensor`. Operations
record their parents and a backward closure; :func:`backward` walks the
recorded nodes in reverse creation order (a tape) and accumulates
gradients into leaf tensors that require them.

Broadcasting is limited to adding a ``(1, n)`` bias row to an ``(m, n)``
matrix.
"""
from __future__ import annotations

import itertools
import json
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

_ids = itertools.count()


class DimensionError(ValueError):
    pass


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "parents", "backward_fn", "id", "name")

    def __init__(self, data, requires_grad: bool = False, name: str | None = None,
                 parents: tuple["Tensor", ...] = (), backward_fn: Callable | None = None):
        arr = np.asarray(data, dtype=np.float64)
        if arr.ndim == 0:
            arr = arr.reshape(1, 1)
        elif arr.ndim == 1:
            arr = arr.reshape(1, -1)
        elif arr.ndim != 2:
            raise DimensionError(f"tensors are 2-D, got shape {arr.shape}")
        self.data = arr
        self.requires_grad = requires_grad
        self.grad = np.zeros_like(arr) if requires_grad and not parents else None
        self.parents = parents
        self.backward_fn = backward_fn
        self.id = next(_ids)
        self.name = name

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    def item(self) -> float:
        return float(self.data.reshape(-1)[0])

    def numpy(self) -> np.ndarray:
        return self.data

    def zero_grad(self) -> None:
        if self.grad is not None:
            self.grad[...] = 0.0

    def __repr__(self) -> str:
        label = f" {self.name!r}" if self.name else ""
        return f"Tensor{label}(shape={self.shape})"

    # operator sugar
    def __add__(self, other):
        return add(self, _wrap(other))

    def __radd__(self, other):
        return add(_wrap(other), self)

    def __sub__(self, other):
        return sub(self, _wrap(other))

    def __rsub__(self, other):
        return sub(_wrap(other), self)

    def __mul__(self, other):
        return hadamard(self, _wrap(other))

    def __rmul__(self, other):
        return hadamard(_wrap(other), self)

    def __matmul__(self, other):
        return matmul(self, other)


def _wrap(x) -> Tensor:
    return x if isinstance(x, Tensor) else constant(np.full((1, 1), float(x)))


def constant(data) -> Tensor:
    return Tensor(data, requires_grad=False)


def parameter(data, name: str | None = None) -> Tensor:
    return Tensor(np.array(data, dtype=np.float64, copy=True), requires_grad=True, name=name)


def _node(data: np.ndarray, parents: tuple[Tensor, ...], backward_fn: Callable) -> Tensor:
    needs = any(p.requires_grad for p in parents)
    return Tensor(data, requires_grad=needs, parents=parents if needs else (),
                  backward_fn=backward_fn if needs else None)


# ---------------------------------------------------------------- linear algebra

def matmul(a: Tensor, b: Tensor) -> Tensor:
    if a.shape[1] != b.shape[0]:
        raise DimensionError(f"matmul inner dimensions disagree: {a.shape} x {b.shape}")
    ad, bd = a.data, b.data

    def bw(g):
        return (g @ bd.T if a.requires_grad else None,
                ad.T @ g if b.requires_grad else None)
    return _node(ad @ bd, (a, b), bw)


def _broadcast_pair(a: Tensor, b: Tensor, what: str) -> None:
    if a.shape == b.shape:
        return
    if b.shape == (1, a.shape[1]) or a.shape == (1, b.shape[1]):
        return
    if a.shape == (1, 1) or b.shape == (1, 1):
        return
    raise DimensionError(f"{what}: incompatible shapes {a.shape} and {b.shape}")


def _reduce_to(g: np.ndarray, shape: tuple[int, int]) -> np.ndarray:
    if g.shape == shape:
        return g
    if shape == (1, 1):
        return g.sum().reshape(1, 1)
    if shape[0] == 1:
        return g.sum(axis=0, keepdims=True)
    return g.sum(axis=1, keepdims=True)


def add(a: Tensor, b: Tensor) -> Tensor:
    _broadcast_pair(a, b, "add")

    def bw(g):
        return _reduce_to(g, a.shape), _reduce_to(g, b.shape)
    return _node(a.data + b.data, (a, b), bw)


def sub(a: Tensor, b: Tensor) -> Tensor:
    _broadcast_pair(a, b, "sub")

    def bw(g):
        return _reduce_to(g, a.shape), -_reduce_to(g, b.shape)
    return _node(a.data - b.data, (a, b), bw)


def hadamard(a: Tensor, b: Tensor) -> Tensor:
    _broadcast_pair(a, b, "hadamard")
    ad, bd = a.data, b.data

    def bw(g):
        return (_reduce_to(g * bd, a.shape) if a.requires_grad else None,
                _reduce_to(g * ad, b.shape) if b.requires_grad else None)
    return _node(ad * bd, (a, b), bw)


def scale(a: Tensor, c: float) -> Tensor:
    return _node(a.data * c, (a,), lambda g: (g * c,))


# ---------------------------------------------------------------- nonlinearities

def sigmoid(a: Tensor) -> Tensor:
    x = a.data
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return _node(out, (a,), lambda g: (g * out * (1.0 - out),))


def tanh(a: Tensor) -> Tensor:
    out = np.tanh(a.data)
    return _node(out, (a,), lambda g: (g * (1.0 - out * out),))


def prelu(a: Tensor, slope: Tensor) -> Tensor:
    """Parametric ReLU with one learnable scalar slope of shape (1, 1)."""
    if slope.shape != (1, 1):
        raise DimensionError(f"prelu slope must be (1, 1), got {slope.shape}")
    x = a.data
    neg = x < 0
    s = slope.data[0, 0]
    out = np.where(neg, s * x, x)

    def bw(g):
        ga = np.where(neg, s * g, g) if a.requires_grad else None
        gs = np.array([[np.sum(g * x * neg)]]) if slope.requires_grad else None
        return ga, gs
    return _node(out, (a, slope), bw)


def log(a: Tensor) -> Tensor:
    x = a.data
    return _node(np.log(x), (a,), lambda g: (g / x,))


def clip(a: Tensor, lo: float, hi: float) -> Tensor:
    x = a.data
    inside = (x >= lo) & (x <= hi)
    return _node(np.clip(x, lo, hi), (a,), lambda g: (g * inside,))


def softmax(a: Tensor, axis: int = 0) -> Tensor:
    x = a.data
    e = np.exp(x - x.max(axis=axis, keepdims=True))
    out = e / e.sum(axis=axis, keepdims=True)

    def bw(g):
        return (out * (g - (g * out).sum(axis=axis, keepdims=True)),)
    return _node(out, (a,), bw)


# ---------------------------------------------------------------- structure

def concat(parts: Sequence[Tensor], axis: int = -1) -> Tensor:
    axis = 1 if axis in (-1, 1) else 0
    other = 1 - axis
    ref = parts[0].shape[other]
    for p in parts:
        if p.shape[other] != ref:
            raise DimensionError(
                f"concat along axis {axis}: shapes {[q.shape for q in parts]} disagree")
    sizes = [p.shape[axis] for p in parts]
    cuts = np.cumsum(sizes)[:-1]
    out = np.concatenate([p.data for p in parts], axis=axis)

    def bw(g):
        return tuple(np.split(g, cuts, axis=axis))
    return _node(out, tuple(parts), bw)


def sum_reduce(a: Tensor, axis: int | None = None) -> Tensor:
    shape = a.shape
    if axis is None:
        out = np.array([[a.data.sum()]])
    else:
        out = a.data.sum(axis=axis, keepdims=True)
    return _node(out, (a,), lambda g: (np.broadcast_to(g, shape).copy(),))


def rows(a: Tensor, index: Sequence[int]) -> Tensor:
    idx = np.asarray(index, dtype=np.intp)
    shape = a.shape

    def bw(g):
        full = np.zeros(shape)
        np.add.at(full, idx, g)
        return (full,)
    return _node(a.data[idx], (a,), bw)


def transpose(a: Tensor) -> Tensor:
    return _node(a.data.T.copy(), (a,), lambda g: (g.T,))


def tile_rows(a: Tensor, n: int) -> Tensor:
    """Repeat a single row ``n`` times."""
    if a.shape[0] != 1:
        raise DimensionError(f"tile_rows expects one row, got {a.shape}")
    return _node(np.repeat(a.data, n, axis=0), (a,), lambda g: (g.sum(axis=0, keepdims=True),))


# ---------------------------------------------------------------- backward pass

def backward(loss: Tensor) -> None:
    """Accumulate d(loss)/d(leaf) into every reachable leaf's ``grad``."""
    if loss.data.size != 1:
        raise ValueError(f"backward needs a scalar loss, got shape {loss.shape}")
    if not loss.requires_grad:
        return
    seen: dict[int, Tensor] = {}
    stack = [loss]
    while stack:
        t = stack.pop()
        if t.id in seen:
            continue
        seen[t.id] = t
        stack.extend(p for p in t.parents if p.requires_grad and p.id not in seen)
    adjoint: dict[int, np.ndarray] = {loss.id: np.ones_like(loss.data)}
    for tid in sorted(seen, reverse=True):
        t = seen[tid]
        g = adjoint.pop(tid, None)
        if g is None:
            continue
        if t.backward_fn is None:
            t.grad += g
            continue
        for parent, pg in zip(t.parents, t.backward_fn(g)):
            if pg is None or not parent.requires_grad:
                continue
            prev = adjoint.get(parent.id)
            adjoint[parent.id] = pg if prev is None else prev + pg


def zero_grad(params: Iterable[Tensor]) -> None:
    for p in params:
        p.zero_grad()


# ---------------------------------------------------------------- checkpoints

def save_params(path: str | Path, params: Mapping[str, Tensor], header: dict | None = None) -> None:
    """Write parameters to an ``.npz`` archive (float64, exact round trip).

    Each entry is stored under its parameter name with its 2-D shape; an
    optional JSON header is stored under ``__header__``.
    """
    arrays = {name: t.data for name, t in params.items()}
    if header is not None:
        arrays["__header__"] = np.frombuffer(
            json.dumps(header, sort_keys=True).encode(), dtype=np.uint8)
    with open(path, "wb") as fh:
        np.savez(fh, **arrays)


def load_params(path: str | Path) -> tuple[dict[str, Tensor], dict | None]:
    with np.load(path) as z:
        header = None
        params = {}
        for name in z.files:
            if name == "__header__":
                header = json.loads(z[name].tobytes().decode())
            else:
                params[name] = parameter(z[name], name=name)
    return params, header


# ---------------------------------------------------------------- checking

def relative_error(a: np.ndarray, b: np.ndarray, floor: float = 1e-6) -> np.ndarray:
    """Elementwise |a - b| / max(|a|, |b|, floor); the floor keeps near-zero entries sane."""
    return np.abs(a - b) / np.maximum(np.maximum(np.abs(a), np.abs(b)), floor)


def numeric_grad(fn: Callable[[], Tensor], p: Tensor, h: float = 1e-5) -> np.ndarray:
    """Central differences of the scalar ``fn()`` with respect to every entry of ``p``."""
    g = np.zeros_like(p.data)
    it = np.nditer(p.data, flags=["multi_index"])
    for _ in it:
        i = it.multi_index
        old = p.data[i]
        p.data[i] = old + h
        up = fn().item()
        p.data[i] = old - h
        down = fn().item()
        p.data[i] = old
        g[i] = (up - down) / (2 * h)
    return g


def gradient_check(fn: Callable[[], Tensor], params: Mapping[str, Tensor],
                   h: float = 1e-5) -> dict[str, float]:
    """Largest relative error between autodiff and central differences, per parameter."""
    zero_grad(params.values())
    backward(fn())
    out = {}
    for name, p in params.items():
        analytic = p.grad.copy()
        out[name] = float(relative_error(analytic, numeric_grad(fn, p, h)).max())
    return out
