"""Monolingual and parallel corpora, vocabulary statistics, seeded sampling.

Tokenization is whitespace splitting only. Sentences are tuples of strings so
corpora are hashable and safe to share.
"""
from __future__ import annotations

import json
import logging
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

logger = logging.getLogger(__name__)

SEP = "[SEP]"
EOS = "[EOS]"
UNK = "[UNK]"
BOS = "[BOS]"
RESERVED = frozenset({SEP, EOS, UNK, BOS})

DOMAIN_LABELS = ("authentic", "pgen", "selected", "general", "other")

Sentence = tuple  # tuple[str, ...]


class CorpusError(ValueError):
    """Malformed or unusable corpus input."""


def tokenize(line: str, lowercase: bool = False) -> tuple[str, ...]:
    if lowercase:
        line = line.lower()
    return tuple(line.split())


def detokenize(sentence: Sequence[str]) -> str:
    return " ".join(sentence)


@dataclass(frozen=True)
class MonoCorpus:
    sentences: tuple
    name: str = "corpus"
    domain_label: str = "other"

    def __post_init__(self):
        if self.domain_label not in DOMAIN_LABELS:
            raise CorpusError(f"unknown domain label {self.domain_label!r}")
        object.__setattr__(self, "sentences", tuple(tuple(s) for s in self.sentences))
        for i, s in enumerate(self.sentences):
            if not s:
                raise CorpusError(f"{self.name}: sentence {i} is empty")

    def __len__(self) -> int:
        return len(self.sentences)

    def __iter__(self) -> Iterator[tuple[str, ...]]:
        return iter(self.sentences)

    def __getitem__(self, i):
        return self.sentences[i]

    def relabel(self, name: str | None = None, domain_label: str | None = None) -> "MonoCorpus":
        return MonoCorpus(self.sentences, name or self.name, domain_label or self.domain_label)


@dataclass(frozen=True)
class ParallelCorpus:
    """Aligned (gloss, text) sentence pairs."""

    pairs: tuple
    name: str = "parallel"

    def __post_init__(self):
        object.__setattr__(
            self, "pairs", tuple((tuple(g), tuple(t)) for g, t in self.pairs)
        )
        for i, (g, t) in enumerate(self.pairs):
            if not g or not t:
                raise CorpusError(f"{self.name}: pair {i} has an empty side")

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    @property
    def glosses(self) -> MonoCorpus:
        return MonoCorpus([g for g, _ in self.pairs], f"{self.name}.gloss", "other")

    def texts(self, domain_label: str = "authentic") -> MonoCorpus:
        return MonoCorpus([t for _, t in self.pairs], f"{self.name}.text", domain_label)


@dataclass(frozen=True)
class VocabStats:
    counts: dict = field(default_factory=dict)
    total_tokens: int = 0
    rank_order: tuple = ()

    def to_json(self) -> dict:
        out = {w: self.counts[w] for w in self.rank_order}
        out["_total"] = self.total_tokens
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "VocabStats":
        counts = {w: int(c) for w, c in obj.items() if w != "_total"}
        return _stats_from_counts(counts)


def _stats_from_counts(counts: dict) -> VocabStats:
    order = tuple(sorted(counts, key=lambda w: (-counts[w], w)))
    return VocabStats(dict(counts), sum(counts.values()), order)


def load_mono(
    path,
    lowercase: bool = False,
    name: str | None = None,
    domain_label: str = "other",
) -> MonoCorpus:
    """Read one sentence per line; blank lines are skipped with a counted warning."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such corpus file: {path}")
    sentences = []
    skipped = 0
    with open(path, encoding="utf-8") as f:
        for line in f:
            toks = tokenize(line, lowercase)
            if toks:
                sentences.append(toks)
            else:
                skipped += 1
    if skipped:
        logger.warning("%s: skipped %d blank line(s)", path, skipped)
    if not sentences:
        raise CorpusError(f"{path}: no usable lines")
    return MonoCorpus(sentences, name or path.stem, domain_label)


def load_parallel(path, lowercase: bool = False, name: str | None = None) -> ParallelCorpus:
    """Read a ``gloss<TAB>text`` file."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such corpus file: {path}")
    pairs = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            if line.count("\t") != 1:
                raise CorpusError(f"{path}:{lineno}: expected exactly one tab, found {line.count(chr(9))}")
            gloss, text = line.split("\t")
            g, t = tokenize(gloss, lowercase), tokenize(text, lowercase)
            if not g or not t:
                raise CorpusError(f"{path}:{lineno}: empty {'gloss' if not g else 'text'} side")
            pairs.append((g, t))
    if not pairs:
        raise CorpusError(f"{path}: no usable lines")
    return ParallelCorpus(pairs, name or path.stem)


def write_mono(corpus: Iterable[Sequence[str]], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for s in corpus:
            f.write(detokenize(s) + "\n")


def write_parallel(corpus: ParallelCorpus, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for g, t in corpus:
            f.write(f"{detokenize(g)}\t{detokenize(t)}\n")


def vocab_stats(corpus: Iterable[Sequence[str]]) -> VocabStats:
    counts = Counter()
    for s in corpus:
        counts.update(s)
    return _stats_from_counts(counts)


def write_vocab_stats(stats: VocabStats, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(stats.to_json(), f, ensure_ascii=False, indent=1)
        f.write("\n")


def sample_corpus(corpus: MonoCorpus, n: int, seed: int) -> MonoCorpus:
    """Uniform sample of ``n`` sentences without replacement, kept in corpus order."""
    if not 1 <= n <= len(corpus):
        raise CorpusError(f"sample size {n} outside [1, {len(corpus)}]")
    rng = np.random.default_rng(seed)
    idx = np.sort(rng.choice(len(corpus), size=n, replace=False))
    return MonoCorpus([corpus[i] for i in idx], corpus.name, corpus.domain_label)
