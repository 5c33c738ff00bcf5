"""End-to-end workflow and parameter sweeps.

Steps: tune the generator on ``k``-sentence samples of the authentic text,
generate in-domain text, train the text->gloss model, back-translate, and mix
synthetic with authentic pairs. Intrinsic analyses (JS to the authentic text,
Self-BLEU, domain classification, and Text-Selected / Text-General baselines
when a general pool is configured) are written next to the corpora, together
with a manifest that records input hashes, seeds, and every output.
"""
from __future__ import annotations

import dataclasses
import hashlib
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from . import analysis, metrics
from .backends import SubprocessBackend, parse_backend_spec
from .corpus import (
    MonoCorpus, ParallelCorpus, load_mono, load_parallel, sample_corpus, vocab_stats,
    write_mono, write_parallel,
)
from .ngram_lm import DEFAULT_LAMBDAS, train_lm
from .pgen import NGramBackend, PromptConfig, build_tuning_samples, generate_corpus
from .selection import select_top
from .translator import SynthesisPlan, TableTranslator, back_translate, synthesize, train_ibm1

logger = logging.getLogger(__name__)

MANIFEST = "manifest.json"


class ConfigError(ValueError):
    pass


@dataclass
class PipelineConfig:
    authentic: str
    general: str | None = None
    test: str | None = None
    seed: int = 13
    lowercase: bool = False
    # generation
    k: int = 20
    ratio: int = 5
    target_size: int | None = None
    max_new_tokens: int = 128
    temperature: float = 1.0
    min_len: int = 3
    max_len: int = 60
    dedup_within: bool = True
    dedup_against_authentic: bool = True
    attempt_budget: int | None = None
    backend: str = "builtin"
    # generator LM
    lm_order: int = 3
    lm_lambdas: list = field(default_factory=lambda: list(DEFAULT_LAMBDAS))
    unk_threshold: int = 1
    tuning_count: int | None = None
    # selection baseline
    selection_n: int | None = None
    selection_order: int = 3
    # back-translation
    bt_backend: str = "builtin"
    bt_iterations: int = 20
    drop_threshold: float = 0.3
    # analysis
    top_n: int = 10000
    self_bleu_cap: int = 500
    # execution only; not part of the manifest
    workers: int = 1
    base_dir: str = "."

    @classmethod
    def from_dict(cls, d: dict, base_dir=".") -> "PipelineConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "authentic" not in d:
            raise ConfigError("config needs an 'authentic' parallel corpus path")
        d = dict(d)
        d.setdefault("base_dir", str(base_dir))
        return cls(**d)

    @classmethod
    def load(cls, path) -> "PipelineConfig":
        path = Path(path)
        try:
            with open(path, encoding="utf-8") as f:
                d = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read config {path}: {e}") from e
        return cls.from_dict(d, base_dir=path.parent)

    def replace(self, **kw) -> "PipelineConfig":
        return dataclasses.replace(self, **{k: v for k, v in kw.items() if v is not None})

    def resolve(self, p: str | None) -> Path | None:
        if p is None:
            return None
        p = Path(p)
        return p if p.is_absolute() else Path(self.base_dir) / p

    def validate(self) -> None:
        for key in ("authentic", "general", "test"):
            p = getattr(self, key)
            if p is not None and not self.resolve(p).is_file():
                raise ConfigError(f"{key}: no such file {self.resolve(p)}")
        if self.k < 0:
            raise ConfigError("k must be >= 0")
        if self.ratio < 1:
            raise ConfigError("ratio must be >= 1")
        parse_backend_spec(self.backend)
        parse_backend_spec(self.bt_backend)

    def recorded(self) -> dict:
        d = dataclasses.asdict(self)
        for k in ("workers", "base_dir"):
            d.pop(k)
        return d


def toy_config_path() -> Path:
    """Path of the bundled toy two-domain configuration."""
    return Path(str(resources.files("pgen_bt") / "data" / "toy_config.json"))


def sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for block in iter(lambda: f.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


def _line_count(path) -> int:
    with open(path, "rb") as f:
        return sum(1 for _ in f)


def _dump_json(obj, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(obj, f, ensure_ascii=False, indent=1, sort_keys=True)
        f.write("\n")


def effective_k(k: int) -> int:
    # k = 0 has no (k-1)-sentence prompt; treat it as unconditional generation like k = 1
    return max(k, 1)


def run_pipeline(cfg: PipelineConfig, out_dir) -> dict:
    """Run every step into ``out_dir`` and return the manifest."""
    cfg.validate()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    outputs = {}

    def record(name, fname):
        outputs[name] = {"path": fname, "sha256": sha256(out / fname), "lines": _line_count(out / fname)}

    authentic = load_parallel(cfg.resolve(cfg.authentic), cfg.lowercase, name="authentic")
    text = authentic.texts("authentic").relabel(name="authentic")
    N = len(text)
    k = effective_k(cfg.k)
    target = cfg.target_size or cfg.ratio * N
    if target < cfg.ratio * N:
        raise ConfigError(f"target_size {target} is below ratio x authentic = {cfg.ratio * N}")
    pcfg = PromptConfig(
        k=k, target_size=target, max_new_tokens=cfg.max_new_tokens, temperature=cfg.temperature,
        min_len=cfg.min_len, max_len=cfg.max_len, dedup_within=cfg.dedup_within,
        dedup_against_authentic=cfg.dedup_against_authentic, seed=cfg.seed,
        attempt_budget=cfg.attempt_budget,
    )

    # step 1.1: tune the generator
    samples = build_tuning_samples(text, k, cfg.tuning_count or N, cfg.seed)
    write_mono(samples, out / "tuning_samples.txt")
    record("tuning_samples", "tuning_samples.txt")
    external = parse_backend_spec(cfg.backend)
    if external is None:
        model = train_lm(samples, cfg.lm_order, cfg.lm_lambdas, cfg.unk_threshold)
        model.save(out / "lm.json")
        record("lm", "lm.json")
        backend = NGramBackend(model, cfg.max_new_tokens, cfg.temperature, cfg.seed)
    else:
        backend = SubprocessBackend(external)

    # step 1.2: prompt-based generation
    try:
        result = generate_corpus(backend, text, text, pcfg, workers=cfg.workers)
    finally:
        if external is not None:
            backend.close()
    pgen = result.corpus
    write_mono(pgen, out / "pgen.txt")
    record("pgen", "pgen.txt")
    _dump_json(result.stats.to_json(), out / "generation_stats.json")
    record("generation_stats", "generation_stats.json")

    # step 2.1: back-translation model
    bt_external = parse_backend_spec(cfg.bt_backend)
    if bt_external is None:
        table = train_ibm1(authentic, cfg.bt_iterations)
        table.save(out / "bt_table.tsv")
        record("bt_table", "bt_table.tsv")
        translator = TableTranslator(table, cfg.drop_threshold)
    else:
        translator = SubprocessBackend(bt_external)

    # step 2.2: back-translate and mix
    try:
        pseudo = back_translate(translator, pgen)
        test_eval = _evaluate_bt(cfg, translator, authentic, out, record) if cfg.test else None
    finally:
        if bt_external is not None:
            translator.close()
    write_parallel(pseudo, out / "pseudo.tsv")
    record("pseudo", "pseudo.tsv")
    train, finetune = synthesize(authentic, pseudo, SynthesisPlan(cfg.ratio, cfg.seed))
    write_parallel(train, out / "train.tsv")
    write_parallel(finetune, out / "finetune.tsv")
    record("train", "train.tsv")
    record("finetune", "finetune.tsv")

    intrinsic = _intrinsic(cfg, text, pgen, out, record)

    inputs = {}
    for key in ("authentic", "general", "test"):
        p = getattr(cfg, key)
        if p is not None:
            inputs[key] = {"path": p, "sha256": sha256(cfg.resolve(p))}
    manifest = {
        "config": cfg.recorded(),
        "effective": {"k": k, "target_size": target, "ratio": cfg.ratio},
        "seeds": {"global": cfg.seed, "tuning": cfg.seed, "prompts": cfg.seed,
                  "sampling": cfg.seed, "shuffle": cfg.seed, "analysis": cfg.seed},
        "inputs": inputs,
        "outputs": outputs,
        "sizes": {"authentic": N, "pgen": len(pgen), "pseudo": len(pseudo),
                  "train": len(train), "finetune": len(finetune)},
        "generation": result.stats.to_json(),
        "intrinsic": intrinsic,
        "bt_eval": test_eval,
    }
    _dump_json(manifest, out / MANIFEST)
    return manifest


def _evaluate_bt(cfg, translator, authentic, out, record):
    """Text->gloss quality of the BT model on the held-out test pairs."""
    test = load_parallel(cfg.resolve(cfg.test), cfg.lowercase, name="test")
    hyps = [tuple(translator(t)) for _, t in test]
    refs = [g for g, _ in test]
    write_mono(hyps, out / "test.bt.gloss")
    record("test_bt_hyp", "test.bt.gloss")
    train_stats = vocab_stats(authentic.glosses)
    report = metrics.evaluate(hyps, refs, train_stats).to_json()
    _dump_json(report, out / "bt_eval.json")
    record("bt_eval", "bt_eval.json")
    return report


def _intrinsic(cfg, text: MonoCorpus, pgen: MonoCorpus, out: Path, record) -> dict:
    corpora = [pgen.relabel(name="pgen")]
    clf_results = {}
    if cfg.general is not None:
        pool = load_mono(cfg.resolve(cfg.general), cfg.lowercase, name="general", domain_label="general")
        n_sel = min(cfg.selection_n or len(text), len(pool))
        lm_in = train_lm(text, cfg.selection_order, unk_threshold=cfg.unk_threshold)
        lm_gen = train_lm(pool, cfg.selection_order, unk_threshold=cfg.unk_threshold)
        sel = select_top(pool, lm_in, lm_gen, n_sel)
        selected = sel.selected.relabel(name="selected")
        sel.write_scored(out / "selected.scored.tsv")
        write_mono(selected, out / "selected.txt")
        record("selected_scored", "selected.scored.tsv")
        record("selected", "selected.txt")
        general = sample_corpus(pool, min(len(text), len(pool)), cfg.seed).relabel(name="general")
        write_mono(general, out / "general_sample.txt")
        record("general_sample", "general_sample.txt")
        corpora += [selected, general]

        # classifier on disjoint halves: train on the first part, report on the rest
        n_train = min(len(text), len(pool)) * 4 // 5
        clf = analysis.train_domain_classifier(
            MonoCorpus(text.sentences[:n_train], "authentic", "authentic"),
            MonoCorpus(pool.sentences[:n_train], "general", "general"),
        )
        held_in = MonoCorpus(text.sentences[n_train:], "authentic.heldout", "authentic")
        held_gen = MonoCorpus(pool.sentences[n_train:], "general.heldout", "general")
        for c in (held_in, held_gen, *corpora):
            clf_results[c.name] = analysis.classify_corpus(clf, c)
        _dump_json(clf_results, out / "classifier.json")
        record("classifier", "classifier.json")

    report = analysis.distribution_report(corpora, text, cfg.top_n, cfg.seed)
    _dump_json(report, out / "distribution.json")
    record("distribution", "distribution.json")
    sb = metrics.self_bleu(pgen, sample_cap=cfg.self_bleu_cap) if len(pgen) > 1 else None
    return {"js": report["js"], "js_sample_size": report["sample_size"],
            "self_bleu_pgen": sb, "classifier": clf_results}


SUMMARY_COLUMNS = ("value", "status", "js_to_authentic", "self_bleu", "pgen_size", "train_size", "out_dir")


def _sweep_one(args):
    cfg, axis, value, run_dir = args
    try:
        m = run_pipeline(dataclasses.replace(cfg, **{axis: value}), run_dir)
    except Exception as e:  # a failing value is recorded; the sweep goes on
        logger.error("sweep %s=%s failed: %s", axis, value, e)
        return {"value": value, "status": f"failed: {type(e).__name__}: {e}".replace("\t", " ").replace("\n", " ")}
    return {
        "value": value, "status": "ok",
        "js_to_authentic": m["intrinsic"]["js"]["pgen"],
        "self_bleu": m["intrinsic"]["self_bleu_pgen"],
        "pgen_size": m["sizes"]["pgen"], "train_size": m["sizes"]["train"],
    }


def run_sweep(cfg: PipelineConfig, axis: str, values, out_dir, parallel: bool = False) -> list:
    """One pipeline per value in ``out_dir/<axis>_<value>``; writes summary.tsv."""
    if axis not in ("k", "ratio"):
        raise ConfigError(f"sweep axis must be 'k' or 'ratio', got {axis!r}")
    values = sorted(set(int(v) for v in values))
    if not values:
        raise ConfigError("sweep needs at least one value")
    if axis == "ratio" and values[0] < 1 or axis == "k" and values[0] < 0:
        raise ConfigError(f"invalid {axis} values {values}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    jobs = [(cfg, axis, v, out / f"{axis}_{v}") for v in values]
    if parallel and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=len(jobs)) as ex:
            rows = list(ex.map(_sweep_one, jobs))
    else:
        rows = [_sweep_one(j) for j in jobs]
    for row, job in zip(rows, jobs):
        row["out_dir"] = job[3].name
    with open(out / "summary.tsv", "w", encoding="utf-8", newline="\n") as f:
        f.write("\t".join(SUMMARY_COLUMNS) + "\n")
        for row in rows:
            f.write("\t".join(_fmt(row.get(c)) for c in SUMMARY_COLUMNS) + "\n")
    return rows


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.6f}"
    return str(v)
