import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from toolnet import autodiff as ad


def _rand(rng, *shape, name=None):
    return ad.parameter(rng.standard_normal(shape), name=name)


def _check(fn, params, tol=1e-6):
    errs = ad.gradient_check(fn, params)
    assert max(errs.values()) < tol, errs


@pytest.mark.parametrize("op", ["sigmoid", "tanh", "log", "softmax0", "softmax1"])
def test_unary_ops_match_finite_differences(op):
    rng = np.random.default_rng(1)
    x = _rand(rng, 3, 4)
    if op == "log":
        x.data = np.abs(x.data) + 0.5
    w = ad.constant(rng.standard_normal((3, 4)))

    def f():
        y = {"sigmoid": ad.sigmoid, "tanh": ad.tanh, "log": ad.log,
             "softmax0": lambda t: ad.softmax(t, axis=0),
             "softmax1": lambda t: ad.softmax(t, axis=1)}[op](x)
        return ad.sum_reduce(ad.hadamard(y, w))
    _check(f, {"x": x})


def test_matmul_bias_prelu_concat_chain():
    rng = np.random.default_rng(2)
    x, W, b = _rand(rng, 5, 3), _rand(rng, 3, 4), _rand(rng, 1, 4)
    slope = ad.parameter(np.full((1, 1), 0.25))

    def f():
        h = ad.prelu(ad.add(ad.matmul(x, W), b), slope)
        z = ad.concat([h, ad.tanh(h)], axis=1)
        return ad.sum_reduce(ad.scale(ad.hadamard(z, z), 0.5))
    _check(f, {"x": x, "W": W, "b": b, "slope": slope})


def test_rows_tile_transpose_sub():
    rng = np.random.default_rng(3)
    a, r = _rand(rng, 4, 3), _rand(rng, 1, 3)

    def f():
        picked = ad.rows(a, [0, 2, 2])
        t = ad.sub(picked, ad.tile_rows(r, 3))
        return ad.sum_reduce(ad.matmul(ad.transpose(t), t))
    _check(f, {"a": a, "r": r})


def test_clip_passes_gradient_only_inside():
    x = ad.parameter(np.array([[-2.0, 0.5, 3.0]]))
    ad.backward(ad.sum_reduce(ad.clip(x, 0.0, 1.0)))
    assert x.grad.tolist() == [[0.0, 1.0, 0.0]]


def test_shared_subexpression_accumulates():
    x = ad.parameter(np.array([[3.0]]))
    y = ad.hadamard(x, x)
    ad.backward(ad.add(y, y))
    assert x.grad[0, 0] == pytest.approx(12.0)


def test_softmax_sums_to_one():
    rng = np.random.default_rng(0)
    s = ad.softmax(ad.constant(rng.standard_normal((7, 1)) * 50), axis=0)
    assert abs(s.data.sum() - 1.0) < 1e-12


def test_shape_mismatch_raises():
    with pytest.raises(ad.DimensionError):
        ad.add(ad.constant(np.ones((2, 3))), ad.constant(np.ones((3, 2))))
    with pytest.raises(ad.DimensionError):
        ad.matmul(ad.constant(np.ones((2, 3))), ad.constant(np.ones((2, 3))))


def test_backward_needs_scalar():
    with pytest.raises(ValueError):
        ad.backward(ad.parameter(np.ones((2, 2))))


def test_checkpoint_round_trip_is_exact(tmp_path):
    rng = np.random.default_rng(4)
    params = {"W": _rand(rng, 3, 2), "b": _rand(rng, 1, 2)}
    path = tmp_path / "p.npz"
    ad.save_params(path, params, {"note": "x"})
    back, header = ad.load_params(path)
    assert header == {"note": "x"}
    for k in params:
        assert np.array_equal(back[k].data, params[k].data)


def test_relative_error_floor():
    err = ad.relative_error(np.array([1e-12]), np.array([0.0]))
    assert err[0] < 1e-5
    assert ad.relative_error(np.array([1.0]), np.array([1.1]))[0] == pytest.approx(0.1 / 1.1)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.integers(1, 4), st.integers(0, 10_000))
def test_random_dense_layer_gradients(n, d, k, seed):
    rng = np.random.default_rng(seed)
    x, W = _rand(rng, n, d), _rand(rng, d, k)
    target = ad.constant(rng.uniform(0.1, 0.9, (n, k)))

    def f():
        p = ad.sigmoid(ad.matmul(x, W))
        return ad.sum_reduce(ad.hadamard(ad.sub(p, target), ad.sub(p, target)))
    _check(f, {"x": x, "W": W})
