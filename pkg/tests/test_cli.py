import csv

import pytest

from toolnet import cli, pipeline as pl
from toolnet.model import ABLATION_ROWS


def test_config_file_and_overrides(tmp_path):
    f = tmp_path / "run.cfg"
    f.write_text("# demo\nepochs = 5\nlr=0.01  # faster\n")
    cfg = pl.load_config(f, ["epochs=7"])
    assert cfg.epochs == 7 and cfg.lr == 0.01
    assert pl.load_config(None, []).ablation_list == list(ABLATION_ROWS)


@pytest.mark.parametrize("override,key", [("bogus=1", "bogus"), ("epochs=ten", "epochs"),
                                          ("domains=garage", "domains"), ("epochs=0", "epochs")])
def test_config_errors_name_the_key(override, key):
    with pytest.raises(pl.ConfigError) as err:
        pl.load_config(None, [override])
    assert err.value.key == key


def test_exit_codes(tmp_path, capsys, monkeypatch):
    assert cli.main(["eval", "--out", str(tmp_path)]) == 2
    assert "corpus_aug.jsonl" in capsys.readouterr().err
    assert cli.main(["train", "--out", str(tmp_path), "--set", "nope=1"]) == 2
    assert "nope" in capsys.readouterr().err
    assert cli.main(["train", "--out", str(tmp_path), "--ablation", "+Z"]) == 2
    assert cli.main(["gen-demos", "--config", str(tmp_path / "missing.cfg")]) == 2

    def boom(*a, **k):
        raise RuntimeError("kaput")
    monkeypatch.setattr(pl, "gen_demos", boom)
    assert cli.main(["gen-demos", "--out", str(tmp_path)]) == 1
    assert "kaput" in capsys.readouterr().err


def test_gen_scenes_is_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert cli.main(["gen-scenes", "--domain", "home", "--count", "10", "--seed", "7",
                         "--out", str(out), "-q"]) == 0
    files = sorted(p.name for p in (a / "scenes").iterdir())
    assert set(files) == {f"home_{s}.json" for s in range(7, 17)}
    for name in files:
        assert (a / "scenes" / name).read_bytes() == (b / "scenes" / name).read_bytes()


def test_small_run_end_to_end(tmp_path):
    args = ["--out", str(tmp_path), "-q", "--set", "domains=home", "--set", "epochs=1",
            "--set", "gentest_stride=40", "--set", "plan_pairs=2", "--set", "plan_max_len=4"]
    assert cli.main(["all", *args]) == 0
    with open(tmp_path / "results.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert [r["ablation"] for r in rows] == list(ABLATION_ROWS)
    assert rows[0]["test_factory"] == ""
    assert 0.0 <= float(rows[-1]["test_home"]) <= 1.0
    report = (tmp_path / "report.md").read_text()
    for row in ABLATION_ROWS:
        assert f"| {row} |" in report
    with open(tmp_path / "plan_summary.csv") as fh:
        plan = list(csv.DictReader(fh))
    assert plan[0]["all_valid"] == "True"
