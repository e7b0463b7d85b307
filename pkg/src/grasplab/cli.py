"""Command line entry points.

    grasplab nlu parse|ground|train ...
    grasplab run --config <file> [--serve <port>] [--headless --script <file>]
    grasplab exp nlu|adapt|control ...
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path


def _nlu_grammar(arg: str):
    from .nlu import Grammar
    from .nlu.ground import load_default_grammar
    if arg in ("base", "extended"):
        return load_default_grammar(arg)
    return Grammar.load(arg)


def cmd_nlu(args) -> int:
    from .nlu import (AmbiguousGroundingError, NoGroundingError, ParseFailure,
                      parse, tokenize, train_factors)
    from .nlu.factors import load_corpus
    from .nlu.ground import Grounder, data_path

    grammar = _nlu_grammar(args.grammar)
    if args.action == "parse":
        try:
            tree = parse(grammar, tokenize(args.text))
        except ParseFailure as err:
            print(f"parse failure: {err}", file=sys.stderr)
            return 1
        print(tree.pretty())
        return 0

    corpus = load_corpus(args.corpus or data_path("corpus.tsv"))
    if args.action == "train":
        model = train_factors(corpus, grammar)
        out = args.out or "factor_model.tsv"
        model.save(out)
        print(f"trained {len(model.feature_index)} features -> {out}")
        return 0

    grounder = Grounder(grammar, train_factors(corpus, grammar))
    try:
        result = grounder.ground(args.text)
    except ParseFailure as err:
        print(f"parse failure: {err}", file=sys.stderr)
        return 1
    except NoGroundingError as err:
        print(f"understanding error: {err}", file=sys.stderr)
        return 2
    except AmbiguousGroundingError as err:
        print(f"ambiguous: {err}", file=sys.stderr)
        return 3
    print(f"{result.action.name}  ({result.latency_ms} ms)")
    return 0


def cmd_run(args) -> int:
    from .config import GraspLabConfig
    from .nlu.ground import Grounder
    from .orchestrator import ModelHolder
    from .system import GraspSystem
    from .vision import DatasetStore

    config = GraspLabConfig.load(args.config)
    store = (DatasetStore.load(args.dataset)
             if args.dataset and Path(args.dataset).exists()
             else DatasetStore(seed=0))
    holder = ModelHolder(path=args.model)
    if args.model and Path(args.model).exists():
        holder.load_from(args.model)
    grounder = Grounder.default("extended")
    system = GraspSystem(config=config, store=store, holder=holder,
                         grounder=grounder)

    if args.headless:
        script = Path(args.script).read_text() if args.script else "wait 1000\n"
        system.run_script(script)
        log = system.logger.text()
        if args.log:
            Path(args.log).write_text(log)
            print(f"event log -> {args.log}")
        else:
            print(log, end="")
        return 0

    from .service import serve
    print(f"serving on ws://127.0.0.1:{args.serve}/ws")
    serve(system, port=args.serve, ui_dir=args.ui)
    return 0


def cmd_exp(args) -> int:
    from .config import GraspLabConfig
    from .experiments import (run_adaptation, run_control_report,
                              run_nlu_suite, timestamped_out)

    config = GraspLabConfig.load(args.config)
    out = Path(args.out) if args.out else timestamped_out()
    if args.study == "nlu":
        for grammar in ("base", "extended"):
            rows, path, latency = run_nlu_suite(grammar, out_dir=out,
                                                config=config)
            ok = sum(r["pct_success"] == 100 for r in rows)
            print(f"{grammar}: {ok}/{len(rows)} sentences at 100% success, "
                  f"median latency {latency} ms -> {path}")
    elif args.study == "adapt":
        for seed in range(args.seed, args.seed + args.seeds):
            curve, path = run_adaptation(seed, increments=args.increments,
                                         out_dir=out, config=config)
            final = [r for r in curve if r["object"] == "banana"][-1]
            print(f"seed {seed}: banana desired posterior "
                  f"{final['desired_posterior']:.3f} argmax {final['argmax']}"
                  f" -> {path}")
    else:
        rows, path = run_control_report(out_dir=out, config=config)
        print(f"control report ({len(rows)} checks) -> {path}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="grasplab")
    sub = parser.add_subparsers(dest="command", required=True)

    p_nlu = sub.add_parser("nlu", help="parse or ground text commands")
    p_nlu.add_argument("action", choices=("parse", "ground", "train"))
    p_nlu.add_argument("text", nargs="?", default="")
    p_nlu.add_argument("--grammar", default="extended",
                       help="base, extended, or a grammar file path")
    p_nlu.add_argument("--corpus", default=None)
    p_nlu.add_argument("--out", default=None)
    p_nlu.set_defaults(fn=cmd_nlu)

    p_run = sub.add_parser("run", help="run the full system")
    p_run.add_argument("--config", default=None)
    p_run.add_argument("--serve", type=int, default=8765)
    p_run.add_argument("--headless", action="store_true")
    p_run.add_argument("--script", default=None)
    p_run.add_argument("--log", default=None)
    p_run.add_argument("--model", default=None)
    p_run.add_argument("--dataset", default=None)
    p_run.add_argument("--ui", default=None,
                       help="static UI directory to serve at /")
    p_run.set_defaults(fn=cmd_run)

    p_exp = sub.add_parser("exp", help="headless experiments")
    p_exp.add_argument("study", choices=("nlu", "adapt", "control"))
    p_exp.add_argument("--seed", type=int, default=0)
    p_exp.add_argument("--seeds", type=int, default=1,
                       help="number of consecutive seeds to run")
    p_exp.add_argument("--increments", type=int, default=6)
    p_exp.add_argument("--out", default=None)
    p_exp.add_argument("--config", default=None)
    p_exp.set_defaults(fn=cmd_exp)

    args = parser.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    raise SystemExit(main())
