"""Lexical back-translation model and pseudo-parallel data synthesis.

The BT model is IBM Model 1 trained text -> gloss, with ``NULL`` prepended to
every source (text) sentence. Decoding is monotone: each text token becomes its
most probable gloss token, or is dropped when that probability is below
``drop_threshold`` (glosses are shorter than text, function words vanish).
"""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .corpus import UNK, MonoCorpus, ParallelCorpus

NULL = "NULL"
DEFAULT_DROP_THRESHOLD = 0.3


@dataclass
class TranslationTable:
    """t[source][target] = P(target | source)."""

    t: dict = field(default_factory=dict)
    log_likelihoods: list = field(default_factory=list)

    def prob(self, target: str, source: str) -> float:
        return self.t.get(source, {}).get(target, 0.0)

    def best(self, source: str):
        """(target, prob) with the highest probability, ties to the smaller string."""
        row = self.t.get(source)
        if not row:
            return None, 0.0
        tgt = min(row, key=lambda w: (-row[w], w))
        return tgt, row[tgt]

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            for src in sorted(self.t):
                row = self.t[src]
                for tgt in sorted(row):
                    f.write(f"{src}\t{tgt}\t{row[tgt]!r}\n")

    @classmethod
    def load(cls, path) -> "TranslationTable":
        t = defaultdict(dict)
        with open(path, encoding="utf-8") as f:
            for lineno, line in enumerate(f, 1):
                parts = line.rstrip("\n").split("\t")
                if len(parts) != 3:
                    raise ValueError(f"{path}:{lineno}: expected source<TAB>target<TAB>prob")
                t[parts[0]][parts[1]] = float(parts[2])
        return cls(dict(t))


def _t2g_pairs(parallel: ParallelCorpus):
    return [((NULL,) + text, gloss) for gloss, text in parallel]


def ibm1_log_likelihood(table: TranslationTable, parallel: ParallelCorpus) -> float:
    """sum over pairs and gloss tokens of log( 1/(l+1) * sum_i t(g | e_i) )."""
    ll = 0.0
    for src, tgt in _t2g_pairs(parallel):
        norm = math.log(len(src))
        for g in tgt:
            ll += math.log(sum(table.prob(g, e) for e in src)) - norm
    return ll


def train_ibm1(parallel: ParallelCorpus, iterations: int = 20) -> TranslationTable:
    """EM for P(gloss | text). ``table.log_likelihoods[i]`` is the corpus
    log-likelihood after ``i`` iterations (index 0 = initialization)."""
    if len(parallel) == 0:
        raise ValueError("cannot train on an empty corpus")
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    pairs = _t2g_pairs(parallel)

    cooc = defaultdict(set)
    for src, tgt in pairs:
        for e in src:
            cooc[e].update(tgt)
    t = {e: {g: 1.0 / len(gs) for g in sorted(gs)} for e, gs in sorted(cooc.items())}
    table = TranslationTable(t)
    table.log_likelihoods.append(ibm1_log_likelihood(table, parallel))

    for _ in range(iterations):
        counts = defaultdict(lambda: defaultdict(float))
        for src, tgt in pairs:
            for g in tgt:
                z = sum(t[e][g] for e in src)
                for e in src:
                    counts[e][g] += t[e][g] / z
        t = {}
        for e in sorted(counts):
            row = counts[e]
            total = sum(row.values())
            t[e] = {g: row[g] / total for g in sorted(row)}
        table.t = t
        table.log_likelihoods.append(ibm1_log_likelihood(table, parallel))
    return table


def translate_greedy(
    table: TranslationTable,
    sentence: Sequence[str],
    drop_threshold: float = DEFAULT_DROP_THRESHOLD,
) -> tuple:
    out = []
    for tok in sentence:
        tgt, p = table.best(tok)
        if tgt is not None and p >= drop_threshold:
            out.append(tgt)
    return tuple(out) if out else (UNK,)


class TableTranslator:
    """Translation backend wrapping a trained table."""

    def __init__(self, table: TranslationTable, drop_threshold: float = DEFAULT_DROP_THRESHOLD):
        self.table = table
        self.drop_threshold = drop_threshold

    def __call__(self, sentence: Sequence[str]) -> tuple:
        return translate_greedy(self.table, sentence, self.drop_threshold)


class BackTranslationError(RuntimeError):
    def __init__(self, index: int, cause: Exception):
        self.index = index
        super().__init__(f"back-translation failed at sentence {index}: {cause}")


def back_translate(backend: Callable, mono: MonoCorpus, name: str = "pseudo") -> ParallelCorpus:
    """Pair every text sentence with its backend translation (gloss side).

    An empty backend output is stored as ``[UNK]``.
    """
    if len(mono) == 0:
        raise ValueError("nothing to back-translate")
    pairs = []
    for i, text in enumerate(mono):
        try:
            gloss = tuple(backend(text))
        except Exception as e:
            raise BackTranslationError(i, e) from e
        pairs.append((gloss or (UNK,), text))
    return ParallelCorpus(pairs, name)


@dataclass(frozen=True)
class SynthesisPlan:
    ratio: int = 1
    shuffle_seed: int = 0

    def __post_init__(self):
        if self.ratio < 1:
            raise ValueError("ratio must be >= 1")


class InsufficientSyntheticData(ValueError):
    pass


def synthesize(authentic: ParallelCorpus, synthetic: ParallelCorpus, plan: SynthesisPlan):
    """Return ``(train, finetune)``: train mixes ``ratio * |authentic|`` synthetic
    pairs with the authentic pairs (shuffled); finetune is the authentic data."""
    need = plan.ratio * len(authentic)
    if len(synthetic) < need:
        raise InsufficientSyntheticData(
            f"need {need} synthetic pairs (ratio {plan.ratio} x {len(authentic)}), have {len(synthetic)}"
        )
    combined = list(synthetic.pairs[:need]) + list(authentic.pairs)
    perm = np.random.default_rng(plan.shuffle_seed).permutation(len(combined))
    train = ParallelCorpus([combined[i] for i in perm], "train")
    return train, ParallelCorpus(authentic.pairs, "finetune")
