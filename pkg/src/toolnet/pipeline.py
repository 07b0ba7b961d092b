"""File-based pipeline stages behind the command line.

Every stage reads its inputs from, and writes its outputs to, one run
directory. All randomness comes from seeds in the run config.

Config format: one ``key = value`` per line, ``#`` starts a comment.
Keys and defaults are listed in ``RunConfig``.
"""
from __future__ import annotations

import csv
import json
import statistics
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Callable, Sequence

from .catalog import DOMAINS
from .dataset import Corpus, augment, generate_corpus, replays_to_goal, resolve
from .gentest import TYPES, evaluate_cases, generate, outcomes, read_cases, write_cases
from .model import ABLATION_ROWS, AblationConfig, ToolNet
from .planner import bfs, guided, model_predictor
from .scenes import make_scene
from .trainer import TrainConfig, evaluate, make_eval_set, provider_for, train
from .world import replay, satisfied


class ConfigError(ValueError):
    def __init__(self, key: str, message: str):
        super().__init__(f"config key {key!r}: {message}")
        self.key = key


class MissingInput(FileNotFoundError):
    def __init__(self, path: Path, hint: str = ""):
        super().__init__(f"missing input {path}" + (f" (run `{hint}` first)" if hint else ""))
        self.path = path


@dataclass(frozen=True)
class RunConfig:
    out_dir: str = "run"
    domains: str = "home,factory"
    scene_seeds: int = 10
    styles: int = 8
    removal_seed: int = 0
    ablations: str = ",".join(ABLATION_ROWS)
    hidden: int = 32
    steps: int = 2
    metric_layers: int = 2
    embed_dim: int = 32
    embed_seed: int = 0
    epochs: int = 200
    lr: float = 1e-3
    optimizer: str = "adam"
    batch_size: int = 1
    patience: int = 20
    w_opt: float = 2.0
    train_seed: int = 0
    gentest_seed: int = 0
    gentest_stride: int = 1
    plan_model: str = "+W"
    plan_pairs: int = 20
    plan_max_len: int = 5
    plan_budget: int = 50_000
    workers: int = 1

    def __post_init__(self):
        for d in self.domain_list:
            if d not in DOMAINS:
                raise ConfigError("domains", f"unknown domain {d!r}")
        for r in self.ablation_list:
            if r not in ABLATION_ROWS:
                raise ConfigError("ablations", f"unknown ablation row {r!r}")
        if self.plan_model not in ABLATION_ROWS:
            raise ConfigError("plan_model", f"unknown ablation row {self.plan_model!r}")
        for key in ("scene_seeds", "styles", "epochs", "batch_size", "patience",
                    "gentest_stride", "plan_pairs", "plan_budget", "workers"):
            if getattr(self, key) < 1:
                raise ConfigError(key, "must be >= 1")

    @property
    def root(self) -> Path:
        return Path(self.out_dir)

    @property
    def domain_list(self) -> list[str]:
        return [d.strip() for d in self.domains.split(",") if d.strip()]

    @property
    def ablation_list(self) -> list[str]:
        return [r.strip() for r in self.ablations.split(",") if r.strip()]

    def ablation(self, row: str) -> AblationConfig:
        return AblationConfig.row(row, hidden=self.hidden, steps=self.steps,
                                  metric_layers=self.metric_layers, embed_dim=self.embed_dim)

    def train_config(self) -> TrainConfig:
        return TrainConfig(epochs=self.epochs, lr=self.lr, optimizer=self.optimizer,
                           batch_size=self.batch_size, seed=self.train_seed,
                           patience=self.patience, w_opt=self.w_opt)

    def to_text(self) -> str:
        return "".join(f"{k} = {v}\n" for k, v in asdict(self).items())


def _coerce(key: str, raw: str, typ):
    try:
        if typ is int:
            return int(raw)
        if typ is float:
            return float(raw)
        return raw
    except ValueError:
        raise ConfigError(key, f"expected {typ.__name__}, got {raw!r}") from None


_TYPES = {f.name: {"int": int, "float": float, "str": str}[f.type] for f in fields(RunConfig)}


def parse_pairs(items: Sequence[str], source: str = "override") -> dict[str, str]:
    out = {}
    for item in items:
        line = item.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(line, f"{source} line is not key = value")
        k, v = (s.strip() for s in line.split("=", 1))
        out[k] = v
    return out


def load_config(path: str | Path | None = None, overrides: Sequence[str] = ()) -> RunConfig:
    raw: dict[str, str] = {}
    if path is not None:
        p = Path(path)
        if not p.exists():
            raise MissingInput(p)
        raw.update(parse_pairs(p.read_text().splitlines(), "config"))
    raw.update(parse_pairs(overrides))
    values = {}
    for k, v in raw.items():
        if k not in _TYPES:
            raise ConfigError(k, "unknown key")
        values[k] = _coerce(k, v, _TYPES[k])
    try:
        return RunConfig(**values)
    except ConfigError:
        raise
    except ValueError as err:
        raise ConfigError("?", str(err)) from None


# -------------------------------------------------------------------- paths

def row_slug(row: str) -> str:
    return row.lstrip("+").lower()


def corpus_path(cfg: RunConfig) -> Path:
    return cfg.root / "corpus.jsonl"


def augmented_path(cfg: RunConfig) -> Path:
    return cfg.root / "corpus_aug.jsonl"


def model_path(cfg: RunConfig, row: str, domain: str) -> Path:
    return cfg.root / "models" / f"{row_slug(row)}_{domain}.npz"


def gentest_path(cfg: RunConfig) -> Path:
    return cfg.root / "gentest.jsonl"


def results_path(cfg: RunConfig) -> Path:
    return cfg.root / "results.csv"


def _need(path: Path, hint: str) -> Path:
    if not path.exists():
        raise MissingInput(path, hint)
    return path


def _write_json(path: Path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


Log = Callable[[str], None]


def _quiet(_: str) -> None:
    pass


# -------------------------------------------------------------------- stages

def gen_scenes(cfg: RunConfig, domain: str | None = None, count: int | None = None,
               seed: int = 0, log: Log = _quiet) -> list[Path]:
    """Scene files ``scenes/<domain>_<seed>.json`` for seeds seed .. seed+count-1."""
    out = []
    count = cfg.scene_seeds if count is None else count
    for d in ([domain] if domain else cfg.domain_list):
        for s in range(seed, seed + count):
            path = cfg.root / "scenes" / f"{d}_{s}.json"
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(make_scene(d, s).dumps() + "\n")
            out.append(path)
    log(f"wrote {len(out)} scenes")
    return out


def gen_demos(cfg: RunConfig, log: Log = _quiet) -> Path:
    corpus = generate_corpus(cfg.domain_list, range(cfg.scene_seeds), cfg.styles, cfg.workers)
    bad = [p for p in corpus.plans if not replays_to_goal(p)]
    if bad:
        raise RuntimeError(f"{len(bad)} teacher plans fail to replay")
    path = corpus_path(cfg)
    path.parent.mkdir(parents=True, exist_ok=True)
    corpus.write(path)
    log(f"wrote {len(corpus.plans)} plans to {path}")
    return path


def augment_stage(cfg: RunConfig, log: Log = _quiet) -> Path:
    corpus = Corpus.read(_need(corpus_path(cfg), "gen-demos"))
    aug = augment(corpus, cfg.removal_seed)
    invalid = sum(not replays_to_goal(p) for p in aug.plans)
    report = dict(aug.report, total=len(aug.plans), invalid=invalid)
    if invalid:
        raise RuntimeError(f"{invalid} augmented plans fail to replay")
    aug.write(augmented_path(cfg))
    _write_json(cfg.root / "augment_report.json", report)
    log(f"augmented corpus: {len(aug.plans)} plans ({json.dumps(report, sort_keys=True)})")
    return augmented_path(cfg)


def train_stage(cfg: RunConfig, rows: Sequence[str] | None = None,
                domains: Sequence[str] | None = None, log: Log = _quiet) -> list[Path]:
    corpus = Corpus.read(_need(augmented_path(cfg), "augment"))
    out = []
    for row in rows or cfg.ablation_list:
        ab = cfg.ablation(row)
        provider = provider_for(ab, cfg.embed_seed)
        for d in domains or cfg.domain_list:
            model, history = train(corpus, d, cfg.train_config(), ab, provider)
            path = model_path(cfg, row, d)
            path.parent.mkdir(parents=True, exist_ok=True)
            model.save(path, provider)
            _write_json(path.with_suffix(".history.json"), history.to_json())
            log(f"{row} {d}: best epoch {history.best_epoch}, val acc {history.best_val:.4f}")
            out.append(path)
    return out


def _load_model(cfg: RunConfig, row: str, domain: str) -> ToolNet:
    model, _ = ToolNet.load(_need(model_path(cfg, row, domain), f"train --ablation {row}"))
    return model


def gentest_stage(cfg: RunConfig, log: Log = _quiet) -> Path:
    corpus = Corpus.read(_need(augmented_path(cfg), "augment"))
    provider = provider_for(AblationConfig(conceptnet=True), cfg.embed_seed)
    cases, skipped = generate(_strided(corpus, cfg.gentest_stride), provider, cfg.gentest_seed,
                              cfg.domain_list)
    write_cases(gentest_path(cfg), cases)
    counts = {t: sum(c.type == t for c in cases) for t in TYPES}
    report = {"counts": counts, "skipped_pairs": skipped, "accuracy": {}}
    for row in cfg.ablation_list:
        for d in cfg.domain_list:
            if model_path(cfg, row, d).exists():
                sub = [c for c in cases if c.base.domain == d]
                if sub:
                    m = _load_model(cfg, row, d)
                    report["accuracy"][f"{row} {d}"] = evaluate_cases(
                        m, sub, provider_for(m.config, cfg.embed_seed))
    _write_json(cfg.root / "gentest_report.json", report)
    log(f"wrote {len(cases)} cases {counts}")
    return gentest_path(cfg)


def _strided(corpus: Corpus, stride: int) -> Corpus:
    """Keep every ``stride``-th (goal, scene) pair; 1 keeps everything."""
    if stride == 1:
        return corpus
    pairs = sorted({p.pair for p in corpus.plans},
                   key=lambda k: (k[0], k[1].domain, k[1].seed, k[1].removed))
    keep = set(pairs[::stride])
    return Corpus([p for p in corpus.plans if p.pair in keep], corpus.report)


RESULT_COLUMNS = (["ablation", "test_home", "test_factory"]
                  + [f"gentest_{t}" for t in TYPES] + ["gentest_home", "gentest_factory"])


def eval_stage(cfg: RunConfig, log: Log = _quiet) -> Path:
    """results.csv: one row per ablation, test and GenTest accuracies."""
    corpus = Corpus.read(_need(augmented_path(cfg), "augment"))
    cases = read_cases(_need(gentest_path(cfg), "gentest"))
    rows = []
    for row in cfg.ablation_list:
        rec = {"ablation": row}
        by_type: dict[str, list[int]] = {t: [0, 0] for t in TYPES}
        for d in DOMAINS:
            if d not in cfg.domain_list:
                rec[f"test_{d}"] = rec[f"gentest_{d}"] = ""
                continue
            m = _load_model(cfg, row, d)
            provider = provider_for(m.config, cfg.embed_seed)
            sub = corpus.domain(d)
            es = make_eval_set(sub.split("test"), sub.split("val") + sub.split("test"), provider)
            rec[f"test_{d}"] = evaluate(m, es)
            dc = [c for c in cases if c.base.domain == d]
            if dc:
                oks = outcomes(m, dc, provider)
                rec[f"gentest_{d}"] = sum(oks) / len(oks)
                for c, ok in zip(dc, oks):
                    by_type[c.type][0] += ok
                    by_type[c.type][1] += 1
            else:
                rec[f"gentest_{d}"] = ""
        for t in TYPES:
            ok, n = by_type[t]
            rec[f"gentest_{t}"] = ok / n if n else ""
        rows.append(rec)
        log(" ".join(f"{k}={_fmt(v)}" for k, v in rec.items()))
    path = results_path(cfg)
    with open(path, "w", newline="") as fh:
        wr = csv.DictWriter(fh, RESULT_COLUMNS, lineterminator="\n")
        wr.writeheader()
        for r in rows:
            wr.writerow({k: _fmt(v) for k, v in r.items()})
    return path


def _fmt(v) -> str:
    return f"{v:.4f}" if isinstance(v, float) else str(v)


def planner_pairs(corpus: Corpus, domain: str, n: int, max_len: int) -> list[tuple]:
    """Up to ``n`` (goal, scene) pairs whose shortest teacher plan has <= max_len actions.

    Held-out scene pairs come first, then the training scenes in seed order.
    """
    best: dict[tuple, tuple[int, object]] = {}
    for p in corpus.domain(domain).plans:
        if p.provenance != "teacher" or p.scene.removed:
            continue
        L = len(p.actions)
        if p.pair not in best or L < best[p.pair][0]:
            best[p.pair] = (L, p.goal)
    pairs = [(g, k[1]) for k, (L, g) in best.items() if L <= max_len]
    pairs.sort(key=lambda gr: (gr[1].seed != 9, gr[1].seed, gr[0].goal_id))
    return pairs[:n]


def plan_stage(cfg: RunConfig, log: Log = _quiet) -> Path:
    corpus = Corpus.read(_need(augmented_path(cfg), "augment"))
    summary = []
    for d in cfg.domain_list:
        model = _load_model(cfg, cfg.plan_model, d)
        predictor = model_predictor(model, provider_for(model.config, cfg.embed_seed))
        out = cfg.root / "plans" / f"{d}.jsonl"
        out.parent.mkdir(parents=True, exist_ok=True)
        records = []
        for goal, ref in planner_pairs(corpus, d, cfg.plan_pairs, cfg.plan_max_len):
            w = resolve(ref)
            u = bfs(w, goal, cfg.plan_budget)
            g = guided(w, goal, predictor, cfg.plan_budget)
            valid = all(satisfied(goal, replay(w, s.plan)) for s in (u, g) if s.found)
            records.append({"goal": goal.key, "scene": ref.to_json(),
                            "uninformed": _stable(u.to_json()), "guided": _stable(g.to_json()),
                            "valid": valid})
            log(f"{goal.key} seed {ref.seed}: uninformed {u.nodes_expanded}, "
                f"guided {g.nodes_expanded}")
        with open(out, "w") as fh:
            for r in records:
                fh.write(json.dumps(r, sort_keys=True) + "\n")
        summary.append(summarize_plans(d, records))
    path = cfg.root / "plan_summary.csv"
    with open(path, "w", newline="") as fh:
        wr = csv.DictWriter(fh, list(summary[0]), lineterminator="\n")
        wr.writeheader()
        wr.writerows(summary)
    return path


def _stable(stats: dict) -> dict:
    """Drop wall time so plan files are reproducible byte for byte."""
    return {k: v for k, v in stats.items() if k != "wall_time"}


def summarize_plans(domain: str, records: list[dict]) -> dict:
    def ebf(mode):
        vals = [r[mode]["ebf"] for r in records if r[mode]["found"]]
        if not vals:
            return "", ""
        sd = statistics.stdev(vals) if len(vals) > 1 else 0.0
        return f"{statistics.mean(vals):.2f}", f"{sd:.2f}"
    halved = sum(r["guided"]["found"] and r["uninformed"]["found"]
                 and r["guided"]["nodes_expanded"] <= 0.5 * r["uninformed"]["nodes_expanded"]
                 for r in records)
    (um, us), (gm, gs) = ebf("uninformed"), ebf("guided")
    return {"domain": domain, "pairs": len(records),
            "found_uninformed": sum(r["uninformed"]["found"] for r in records),
            "found_guided": sum(r["guided"]["found"] for r in records),
            "all_valid": all(r["valid"] for r in records),
            "guided_le_half": halved,
            "ebf_uninformed": um, "ebf_uninformed_sd": us,
            "ebf_guided": gm, "ebf_guided_sd": gs}


def report_stage(cfg: RunConfig, log: Log = _quiet) -> Path:
    lines = ["# Run report", "", "## Config", "", "```", cfg.to_text().rstrip(), "```", ""]
    aug = cfg.root / "augment_report.json"
    if aug.exists():
        lines += ["## Corpus", "", "```json", aug.read_text().rstrip(), "```", ""]
    res = _need(results_path(cfg), "eval")
    lines += ["## Accuracy (test and GenTest)", ""] + _md_table(res) + [""]
    gt = cfg.root / "gentest_report.json"
    if gt.exists():
        counts = json.loads(gt.read_text())["counts"]
        lines += ["## GenTest cases", "", "| type | cases |", "|---|---|"]
        lines += [f"| {t} | {n} |" for t, n in counts.items()] + [""]
    ps = cfg.root / "plan_summary.csv"
    if ps.exists():
        lines += ["## Planner", ""] + _md_table(ps) + [""]
    path = cfg.root / "report.md"
    path.write_text("\n".join(lines))
    log(f"wrote {path}")
    return path


def _md_table(path: Path) -> list[str]:
    with open(path) as fh:
        rows = list(csv.reader(fh))
    head, body = rows[0], rows[1:]
    out = ["| " + " | ".join(head) + " |", "|" + "---|" * len(head)]
    out += ["| " + " | ".join(r) + " |" for r in body]
    return out


def run_all(cfg: RunConfig, log: Log = _quiet) -> Path:
    gen_demos(cfg, log)
    augment_stage(cfg, log)
    train_stage(cfg, log=log)
    gentest_stage(cfg, log)
    eval_stage(cfg, log)
    plan_stage(cfg, log)
    return report_stage(cfg, log)


def with_overrides(cfg: RunConfig, **kw) -> RunConfig:
    return replace(cfg, **{k: v for k, v in kw.items() if v is not None})
