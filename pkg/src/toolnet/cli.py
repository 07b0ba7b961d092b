"""Command line entry point: ``toolnet <command> [--config FILE] [--set key=value ...]``.

Exit codes: 0 success, 2 missing input or bad config, 1 internal failure.
"""
from __future__ import annotations

import argparse
import logging
import sys

from . import pipeline as pl

log = logging.getLogger("toolnet")


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="toolnet", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def cmd(name, help_):
        s = sub.add_parser(name, help=help_, description=help_)
        s.add_argument("--config", help="flat key = value config file")
        s.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override one config key (repeatable)")
        s.add_argument("--out", help="run directory (overrides out_dir)")
        s.add_argument("--workers", type=int, help="parallel workers for batch stages")
        s.add_argument("-q", "--quiet", action="store_true")
        return s

    s = cmd("gen-scenes", "write procedural scene JSON files")
    s.add_argument("--domain", choices=("home", "factory"))
    s.add_argument("--count", type=int)
    s.add_argument("--seed", type=int, default=0, help="first scene seed")
    cmd("gen-demos", "teach every (goal, scene) pair and write corpus.jsonl")
    cmd("augment", "cross-scene and object-removal augmentation")
    s = cmd("train", "train ablation models, one per domain")
    s.add_argument("--ablation", action="append",
                   help="ablation row (GGCN, +Metric, +Attn, +L, +NT, +C, +W or full); repeatable")
    s.add_argument("--domain", choices=("home", "factory"))
    s.add_argument("--seed", type=int, help="training seed")
    cmd("gentest", "generate generalization cases and score trained models")
    cmd("eval", "write results.csv with test and GenTest accuracy per ablation")
    cmd("plan", "paired uninformed and guided searches")
    cmd("report", "consolidated markdown summary of a run")
    cmd("all", "run every stage from gen-demos to report")
    return p


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(message)s", stream=sys.stderr, force=True)
    say = log.info
    try:
        overrides = list(args.set)
        if args.out:
            overrides.append(f"out_dir={args.out}")
        if args.workers is not None:
            overrides.append(f"workers={args.workers}")
        if args.command == "train" and args.seed is not None:
            overrides.append(f"train_seed={args.seed}")
        cfg = pl.load_config(args.config, overrides)
        cfg.root.mkdir(parents=True, exist_ok=True)
        c = args.command
        if c == "gen-scenes":
            pl.gen_scenes(cfg, args.domain, args.count, args.seed, say)
        elif c == "gen-demos":
            pl.gen_demos(cfg, say)
        elif c == "augment":
            pl.augment_stage(cfg, say)
        elif c == "train":
            rows = ["+W" if r == "full" else r for r in args.ablation or []] or None
            for r in rows or ():
                if r not in pl.ABLATION_ROWS:
                    raise pl.ConfigError("ablation", f"unknown ablation row {r!r}")
            pl.train_stage(cfg, rows, [args.domain] if args.domain else None, say)
        elif c == "gentest":
            pl.gentest_stage(cfg, say)
        elif c == "eval":
            pl.eval_stage(cfg, say)
        elif c == "plan":
            pl.plan_stage(cfg, say)
        elif c == "report":
            pl.report_stage(cfg, say)
        else:
            pl.run_all(cfg, say)
    except pl.MissingInput as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except pl.ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except Exception as err:  # noqa: BLE001
        print(f"error: {type(err).__name__}: {err}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
