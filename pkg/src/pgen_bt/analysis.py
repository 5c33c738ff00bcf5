"""Intrinsic domain analyses: word-frequency distributions, KL / JS divergence
(nats), and a multinomial naive Bayes domain classifier."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .corpus import MonoCorpus, VocabStats, sample_corpus, vocab_stats

IN_DOMAIN = "in_domain"
GENERAL = "general"


@dataclass(frozen=True)
class Distribution:
    probs: dict

    def __post_init__(self):
        if any(p < 0 for p in self.probs.values()):
            raise ValueError("negative probability")
        s = math.fsum(self.probs.values())
        if abs(s - 1.0) > 1e-9:
            raise ValueError(f"probabilities sum to {s}, not 1")

    def __getitem__(self, w) -> float:
        return self.probs.get(w, 0.0)


def to_distribution(stats: VocabStats, restrict_to: Iterable[str] | None = None) -> Distribution:
    counts = stats.counts
    if restrict_to is not None:
        keep = set(restrict_to)
        counts = {w: c for w, c in counts.items() if w in keep}
    total = sum(counts.values())
    if total <= 0:
        raise ValueError("distribution over zero tokens")
    return Distribution({w: c / total for w, c in counts.items()})


def _aligned(P: Distribution, Q: Distribution):
    vocab = sorted(set(P.probs) | set(Q.probs))
    p = np.array([P[w] for w in vocab])
    q = np.array([Q[w] for w in vocab])
    return p, q


def _kl(p: np.ndarray, q: np.ndarray) -> float:
    mask = p > 0
    if np.any(q[mask] == 0):
        return math.inf
    return float(np.sum(p[mask] * (np.log(p[mask]) - np.log(q[mask]))))


def kl_divergence(P: Distribution, Q: Distribution) -> float:
    """KL(P || Q) in nats; ``inf`` when P has mass where Q has none."""
    return _kl(*_aligned(P, Q))


def js_divergence(P: Distribution, Q: Distribution) -> float:
    """Jensen-Shannon divergence in nats, in [0, ln 2]."""
    p, q = _aligned(P, Q)
    s = p + q

    def half(a):
        # KL(a || M) with ln(a / M) = ln 2 + ln a - ln(p + q); never forms M,
        # which can underflow to 0 for subnormal inputs
        mask = a > 0
        return float(np.sum(a[mask] * (math.log(2) + np.log(a[mask]) - np.log(s[mask]))))

    return 0.5 * (half(p) + half(q))


def corpus_distribution(corpus) -> Distribution:
    return to_distribution(vocab_stats(corpus))


def distribution_report(
    corpora: Sequence[MonoCorpus],
    reference: MonoCorpus,
    top_n: int = 10000,
    seed: int = 0,
) -> dict:
    """Frequency curves over the reference's top-``top_n`` words and JS to the
    reference.

    Curves use each full corpus. JS values are computed on equal-size samples:
    every corpus and the reference are sampled down to the smallest size among
    them with the same seed.
    """
    ranks = list(vocab_stats(reference).rank_order[:top_n])
    curves = {}
    for c in [reference, *corpora]:
        d = corpus_distribution(c)
        curves[c.name] = [d[w] for w in ranks]
    n = min(len(c) for c in [reference, *corpora])
    ref_d = corpus_distribution(sample_corpus(reference, n, seed))
    js = {
        c.name: js_divergence(corpus_distribution(sample_corpus(c, n, seed)), ref_d)
        for c in corpora
    }
    return {"ranks": ranks, "curves": curves, "js": js, "sample_size": n, "reference": reference.name}


class DomainClassifier:
    """Multinomial naive Bayes over two classes with Laplace ``alpha``.

    Words outside the training vocabulary are ignored at prediction time.
    """

    classes = (IN_DOMAIN, GENERAL)

    def __init__(self, log_prior: dict, log_lik: dict):
        self.log_prior = log_prior
        self.log_lik = log_lik

    def scores(self, sentence: Sequence[str]) -> dict:
        out = {}
        for c in self.classes:
            s = self.log_prior[c]
            ll = self.log_lik[c]
            for w in sentence:
                if w in ll:
                    s += ll[w]
            out[c] = s
        return out

    def posterior_in_domain(self, sentence: Sequence[str]) -> float:
        s = self.scores(sentence)
        d = s[GENERAL] - s[IN_DOMAIN]
        return 1.0 / (1.0 + math.exp(d)) if d < 700 else 0.0

    def predict(self, sentence: Sequence[str]) -> str:
        s = self.scores(sentence)
        # ties go to the general class
        return IN_DOMAIN if s[IN_DOMAIN] > s[GENERAL] else GENERAL


def train_domain_classifier(in_corpus: MonoCorpus, gen_corpus: MonoCorpus, alpha: float = 1.0) -> DomainClassifier:
    n = min(len(in_corpus), len(gen_corpus))
    if n == 0:
        raise ValueError("both classes need at least one sentence")
    data = {IN_DOMAIN: in_corpus.sentences[:n], GENERAL: gen_corpus.sentences[:n]}
    counts = {c: Counter(w for s in sents for w in s) for c, sents in data.items()}
    vocab = set(counts[IN_DOMAIN]) | set(counts[GENERAL])
    V = len(vocab)
    log_prior = {c: math.log(len(data[c]) / (2 * n)) for c in data}
    log_lik = {}
    for c, cnt in counts.items():
        denom = math.log(sum(cnt.values()) + alpha * V)
        log_lik[c] = {w: math.log(cnt[w] + alpha) - denom if cnt[w] + alpha > 0 else -math.inf
                      for w in vocab}
    return DomainClassifier(log_prior, log_lik)


def classify_corpus(clf: DomainClassifier, corpus: Iterable[Sequence[str]]) -> dict:
    labels = Counter(clf.predict(s) for s in corpus)
    total = sum(labels.values())
    if not total:
        raise ValueError("empty corpus")
    return {c: labels[c] / total for c in DomainClassifier.classes}
