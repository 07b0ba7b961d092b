import numpy as np
import pytest

from toolnet.embeddings import (EmbeddingParseError, build_toy_table, hash_provider,
                                load_table, make_provider, toy_kb_path, toy_kb_vocabulary)


def test_hash_vectors_are_unit_and_deterministic():
    p = hash_provider(16, seed=3)
    v = p.embed("tray")
    assert v.shape == (16,)
    assert np.linalg.norm(v) == pytest.approx(1.0)
    assert np.array_equal(v, hash_provider(16, seed=3).embed("tray"))
    assert not np.array_equal(v, hash_provider(16, seed=4).embed("tray"))


def test_bow_is_mean_and_empty_is_zero():
    p = hash_provider(8)
    assert np.allclose(p.bow(["a", "b"]), (p.embed("a") + p.embed("b")) / 2)
    assert not p.bow([]).any()


def test_toy_table_clusters(toy):
    cos = lambda a, b: float(toy.embed(a) @ toy.embed(b))  # noqa: E731
    assert cos("box", "crate") > 0.6
    assert cos("stool", "seat") > 0.6
    assert cos("box", "headphone") < 0.3
    assert cos("box", "crate") > cos("box", "stool")


def test_bundled_file_matches_builder(toy):
    rebuilt = build_toy_table(toy_kb_vocabulary())
    assert set(rebuilt) == set(toy.table)
    for tok, v in rebuilt.items():
        assert np.allclose(toy.embed(tok), v, atol=1e-15)
    assert toy_kb_path().exists()


def test_missing_tokens_fall_back_to_hash(toy):
    v = toy.embed("zeppelin")
    assert np.array_equal(v, hash_provider(32, toy.seed).embed("zeppelin"))


def test_parse_error_reports_line(tmp_path):
    f = tmp_path / "t.txt"
    f.write_text("# comment\na 1 2 3\nb 1 2\n")
    with pytest.raises(EmbeddingParseError, match=":3:"):
        load_table(f, 3)
    f.write_text("a 1 x 3\n")
    with pytest.raises(EmbeddingParseError, match=":1:"):
        load_table(f, 3)


def test_loaded_vectors_are_normalized(tmp_path):
    f = tmp_path / "t.txt"
    f.write_text("a 3 4\n")
    p = load_table(f, 2)
    assert np.allclose(p.embed("a"), [0.6, 0.8])


def test_make_provider_errors():
    with pytest.raises(ValueError):
        make_provider("glove")
    with pytest.raises(ValueError):
        make_provider("toy-kb", dim=8)
    with pytest.raises(ValueError):
        make_provider("file")
