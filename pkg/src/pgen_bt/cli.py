"""Command-line entry point: ``pgen-bt <subcommand> ...``.

Exit status: 0 success, 1 usage error, 2 data/validation error, 3 backend failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import analysis, metrics
from .backends import BackendError, SubprocessBackend, parse_backend_spec
from .corpus import (
    CorpusError, load_mono, load_parallel, vocab_stats, write_mono,
    write_parallel, write_vocab_stats,
)
from .ngram_lm import NGramModel, train_lm
from .pgen import (
    GenerationBudgetExceeded, NGramBackend, PromptConfig, build_generation_prompt,
    build_tuning_samples, generate_corpus,
)
from .pipeline import ConfigError, PipelineConfig, effective_k, run_pipeline, run_sweep, toy_config_path
from .selection import select_top
from .translator import (
    BackTranslationError, InsufficientSyntheticData, SynthesisPlan, TableTranslator,
    TranslationTable, back_translate, synthesize, train_ibm1,
)

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_BACKEND = 0, 1, 2, 3

log = logging.getLogger("pgen_bt")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _mono(path, args, label="other"):
    """Load a monolingual file; a .tsv file contributes its text side."""
    if str(path).endswith(".tsv"):
        return load_parallel(path, args.lowercase).texts(label)
    return load_mono(path, args.lowercase, domain_label=label)


def _dump(obj, path):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(obj, f, ensure_ascii=False, indent=1, sort_keys=True)
        f.write("\n")


def _out(args, default):
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out / (args.output or default)


def _config(args) -> PipelineConfig:
    if args.config is None:
        raise UsageError("--config is required for this subcommand")
    path = toy_config_path() if args.config == "toy" else Path(args.config)
    cfg = PipelineConfig.load(path)
    return cfg.replace(
        seed=args.seed, k=args.k, ratio=args.ratio, target_size=args.target_size,
        backend=args.backend, workers=args.workers,
    )


def cmd_stats(args):
    stats = vocab_stats(_mono(args.input, args))
    path = _out(args, "vocab.json")
    write_vocab_stats(stats, path)
    print(f"{len(stats.counts)} types, {stats.total_tokens} tokens -> {path}")


def cmd_train_lm(args):
    corpus = _mono(args.input, args)
    seed = args.seed if args.seed is not None else 0
    if args.raw:
        samples = list(corpus)
    else:
        samples = build_tuning_samples(corpus, effective_k(args.k or 20), args.tuning_count or len(corpus), seed)
        if args.samples_out:
            write_mono(samples, args.samples_out)
    lambdas = [float(x) for x in args.lambdas.split(",")] if args.lambdas else None
    model = train_lm(samples, args.order, lambdas, args.unk_threshold)
    path = _out(args, "lm.json")
    model.save(path)
    print(f"{model} -> {path}")


def cmd_build_prompts(args):
    corpus = _mono(args.input, args)
    seed = args.seed if args.seed is not None else 0
    path = _out(args, "prompts.txt")
    k = effective_k(args.k if args.k is not None else 20)
    write_mono((build_generation_prompt(corpus, k, seed, i) for i in range(args.count)), path)
    print(f"{args.count} prompts (k={k}) -> {path}")


def _backend_spec(spec):
    try:
        return parse_backend_spec(spec or "builtin")
    except ValueError as e:
        raise UsageError(str(e)) from e


def _generation_backend(args, seed):
    external = _backend_spec(args.backend)
    if external is not None:
        return SubprocessBackend(external)
    if not args.lm:
        raise UsageError("builtin backend needs --lm MODEL.json")
    return NGramBackend(NGramModel.load(args.lm), args.max_new_tokens, args.temperature, seed)


def cmd_generate(args):
    source = _mono(args.input, args, "authentic")
    authentic = _mono(args.authentic, args, "authentic") if args.authentic else source
    seed = args.seed if args.seed is not None else 0
    target = args.target_size or (args.ratio or 1) * len(source)
    cfg = PromptConfig(
        k=effective_k(args.k if args.k is not None else 20), target_size=target,
        max_new_tokens=args.max_new_tokens, temperature=args.temperature,
        min_len=args.min_len, max_len=args.max_len, dedup_within=not args.no_dedup_within,
        dedup_against_authentic=not args.no_dedup_authentic, seed=seed,
        attempt_budget=args.attempt_budget,
    )
    backend = _generation_backend(args, seed)
    path = _out(args, "pgen.txt")
    try:
        result = generate_corpus(backend, source, authentic, cfg, workers=args.workers or 1)
    except GenerationBudgetExceeded as e:
        if e.partial is not None:
            write_mono(e.partial, path)
        _dump(e.stats.to_json(), path.with_suffix(".stats.json"))
        raise
    finally:
        if isinstance(backend, SubprocessBackend):
            backend.close()
    write_mono(result.corpus, path)
    _dump(result.stats.to_json(), path.with_suffix(".stats.json"))
    print(f"{len(result.corpus)} sentences from {result.stats.prompts} prompts -> {path}")


def cmd_select(args):
    pool = _mono(args.pool, args, "general")
    in_domain = _mono(args.in_domain, args, "authentic")
    lm_in = train_lm(in_domain, args.order, unk_threshold=args.unk_threshold)
    lm_gen = train_lm(pool, args.order, unk_threshold=args.unk_threshold)
    res = select_top(pool, lm_in, lm_gen, args.n or len(in_domain))
    path = _out(args, "selected.txt")
    write_mono(res.selected, path)
    res.write_scored(path.with_suffix(".scored.tsv"))
    print(f"selected {len(res.selected)} of {len(pool)} -> {path}")


def cmd_analyze(args):
    reference = _mono(args.reference, args, "authentic")
    reference = reference.relabel(name=args.reference_name)
    corpora = []
    for item in args.corpus:
        name, sep, p = item.partition("=")
        if not sep:
            raise UsageError(f"--corpus expects NAME=PATH, got {item!r}")
        corpora.append(_mono(p, args).relabel(name=name))
    if not corpora:
        raise UsageError("analyze needs at least one --corpus NAME=PATH")
    seed = args.seed if args.seed is not None else 0
    report = analysis.distribution_report(corpora, reference, args.top_n, seed)
    path = _out(args, "distribution.json")
    _dump(report, path)
    for name, v in report["js"].items():
        print(f"JS({name} || {reference.name}) = {v:.6f}")
    if args.general:
        clf = analysis.train_domain_classifier(reference, _mono(args.general, args, "general"), args.alpha)
        res = {c.name: analysis.classify_corpus(clf, c) for c in corpora}
        _dump(res, path.with_name("classifier.json"))
        for name, r in res.items():
            print(f"{name}: in_domain {r['in_domain']:.4f}")


def cmd_train_bt(args):
    table = train_ibm1(load_parallel(args.input, args.lowercase), args.iterations)
    path = _out(args, "bt_table.tsv")
    table.save(path)
    print(f"log-likelihood {table.log_likelihoods[0]:.2f} -> {table.log_likelihoods[-1]:.2f}; table -> {path}")


def cmd_back_translate(args):
    mono = _mono(args.input, args)
    external = _backend_spec(args.bt_backend)
    if external is not None:
        translator = SubprocessBackend(external)
    elif args.table:
        translator = TableTranslator(TranslationTable.load(args.table), args.drop_threshold)
    else:
        raise UsageError("back-translate needs --table TABLE.tsv or --bt-backend external:CMD")
    try:
        pseudo = back_translate(translator, mono)
    finally:
        if external is not None:
            translator.close()
    path = _out(args, "pseudo.tsv")
    write_parallel(pseudo, path)
    print(f"{len(pseudo)} pairs -> {path}")


def cmd_synthesize(args):
    authentic = load_parallel(args.authentic, args.lowercase)
    synthetic = load_parallel(args.synthetic, args.lowercase)
    seed = args.seed if args.seed is not None else 0
    train, finetune = synthesize(authentic, synthetic, SynthesisPlan(args.ratio or 1, seed))
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    write_parallel(train, out / "train.tsv")
    write_parallel(finetune, out / "finetune.tsv")
    print(f"train {len(train)} pairs, finetune {len(finetune)} pairs -> {out}")


def cmd_evaluate(args):
    hyps = [tuple(l.split()) for l in open(args.hyps, encoding="utf-8")]
    refs = list(load_mono(args.refs, args.lowercase))
    if args.lowercase:
        hyps = [tuple(w.lower() for w in h) for h in hyps]
    train_stats = vocab_stats(_mono(args.train, args)) if args.train else None
    report = metrics.evaluate(hyps, refs, train_stats).to_json()
    path = _out(args, "eval.json")
    _dump(report, path)
    b = report["bleu"]
    print(f"BLEU-1..4 {b[0]:.2f} {b[1]:.2f} {b[2]:.2f} {b[3]:.2f}  ROUGE-L {report['rouge_l']:.2f}  "
          f"METEOR {report['meteor']:.2f} -> {path}")


def cmd_pipeline(args):
    cfg = _config(args)
    out = Path(args.out or "pipeline_out")
    m = run_pipeline(cfg, out)
    print(json.dumps({"sizes": m["sizes"], "js": m["intrinsic"]["js"]}, indent=1))
    print(f"manifest -> {out / 'manifest.json'}")


def cmd_sweep(args):
    cfg = _config(args)
    try:
        values = [int(v) for v in args.values.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"--values must be comma-separated integers, got {args.values!r}")
    out = Path(args.out or f"sweep_{args.axis}")
    rows = run_sweep(cfg, args.axis, values, out, parallel=args.parallel)
    for r in rows:
        print(f"{args.axis}={r['value']}: {r['status']}")
    print(f"summary -> {out / 'summary.tsv'}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="pipeline JSON config ('toy' = bundled fixture)")
    common.add_argument("--seed", type=int)
    common.add_argument("--k", type=int, help="sentences per tuning sample / prompt length + 1")
    common.add_argument("--ratio", type=int, help="synthetic-to-authentic multiple")
    common.add_argument("--target-size", type=int)
    common.add_argument("--backend", help="generation backend: builtin | external:CMD")
    common.add_argument("--out", help="output directory")
    common.add_argument("--output", help="output file name inside --out")
    common.add_argument("--workers", type=int)
    common.add_argument("--lowercase", action="store_true")
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="pgen-bt", description="Prompt-based in-domain text generation + back-translation toolkit")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("stats", parents=[common], help="vocabulary counts as JSON")
    s.add_argument("input")
    s.set_defaults(func=cmd_stats)

    s = sub.add_parser("train-lm", parents=[common], help="fit the builtin n-gram generator")
    s.add_argument("input")
    s.add_argument("--order", type=int, default=3)
    s.add_argument("--lambdas", help="comma-separated, low to high order")
    s.add_argument("--unk-threshold", type=int, default=1)
    s.add_argument("--tuning-count", type=int)
    s.add_argument("--samples-out")
    s.add_argument("--raw", action="store_true", help="train on plain sentences, no tuning samples")
    s.set_defaults(func=cmd_train_lm)

    s = sub.add_parser("build-prompts", parents=[common], help="write generation prompts")
    s.add_argument("input")
    s.add_argument("--count", type=int, default=10)
    s.set_defaults(func=cmd_build_prompts)

    s = sub.add_parser("generate", parents=[common], help="prompt-based generation")
    s.add_argument("input", help="source sentences for prompts")
    s.add_argument("--authentic", help="dedup reference (default: input)")
    s.add_argument("--lm")
    s.add_argument("--max-new-tokens", type=int, default=128)
    s.add_argument("--temperature", type=float, default=1.0)
    s.add_argument("--min-len", type=int, default=3)
    s.add_argument("--max-len", type=int, default=60)
    s.add_argument("--no-dedup-within", action="store_true")
    s.add_argument("--no-dedup-authentic", action="store_true")
    s.add_argument("--attempt-budget", type=int)
    s.set_defaults(func=cmd_generate)

    s = sub.add_parser("select", parents=[common], help="cross-entropy-difference selection")
    s.add_argument("pool")
    s.add_argument("in_domain")
    s.add_argument("--n", type=int)
    s.add_argument("--order", type=int, default=3)
    s.add_argument("--unk-threshold", type=int, default=1)
    s.set_defaults(func=cmd_select)

    s = sub.add_parser("analyze", parents=[common], help="frequency curves, JS, domain classifier")
    s.add_argument("reference")
    s.add_argument("--reference-name", default="authentic")
    s.add_argument("--corpus", action="append", default=[], metavar="NAME=PATH")
    s.add_argument("--top-n", type=int, default=10000)
    s.add_argument("--general", help="general-domain corpus to train the classifier")
    s.add_argument("--alpha", type=float, default=1.0)
    s.set_defaults(func=cmd_analyze)

    s = sub.add_parser("train-bt", parents=[common], help="IBM Model 1 text->gloss table")
    s.add_argument("input", help="gloss<TAB>text file")
    s.add_argument("--iterations", type=int, default=20)
    s.set_defaults(func=cmd_train_bt)

    s = sub.add_parser("back-translate", parents=[common], help="text -> pseudo gloss pairs")
    s.add_argument("input")
    s.add_argument("--table")
    s.add_argument("--bt-backend", help="builtin | external:CMD")
    s.add_argument("--drop-threshold", type=float, default=0.3)
    s.set_defaults(func=cmd_back_translate)

    s = sub.add_parser("synthesize", parents=[common], help="mix synthetic and authentic pairs")
    s.add_argument("authentic")
    s.add_argument("synthetic")
    s.set_defaults(func=cmd_synthesize)

    s = sub.add_parser("evaluate", parents=[common], help="BLEU/ROUGE-L/METEOR + buckets")
    s.add_argument("hyps")
    s.add_argument("refs")
    s.add_argument("--train", help="training target side, for frequency buckets")
    s.set_defaults(func=cmd_evaluate)

    s = sub.add_parser("pipeline", parents=[common], help="run the whole workflow")
    s.set_defaults(func=cmd_pipeline)

    s = sub.add_parser("sweep", parents=[common], help="pipeline over k or ratio values")
    s.add_argument("--axis", choices=("k", "ratio"), required=True)
    s.add_argument("--values", required=True, help="comma-separated integers")
    s.add_argument("--parallel", action="store_true")
    s.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:  # --help, or a usage error from _Parser.error
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except UsageError as e:
        print(f"pgen-bt: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (BackendError, BackTranslationError) as e:
        print(f"pgen-bt: backend failure: {e}", file=sys.stderr)
        return EXIT_BACKEND
    except (CorpusError, ConfigError, InsufficientSyntheticData, GenerationBudgetExceeded,
            FileNotFoundError, ValueError) as e:
        print(f"pgen-bt: {e}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
