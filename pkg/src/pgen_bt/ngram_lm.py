"""Interpolated count-based n-gram language model.

Conditional probability of ``w`` after ``context`` is a fixed-weight mixture

    P(w | ctx) = sum_i lambdas[i] * P_i(w | last i-1 tokens of ctx)

where ``P_1`` is the add-k (Laplace, k=1 by default) unigram and ``P_i`` for
i >= 2 is the maximum-likelihood estimate. Orders whose context was never seen
in training have no ML estimate; their weight is redistributed proportionally
over the remaining orders so every conditional distribution stays normalized.

All log-probabilities are natural logs.
"""
from __future__ import annotations

import json
import math
from collections import Counter, defaultdict
from typing import Iterable, Sequence

import numpy as np

from .corpus import BOS, EOS, RESERVED, SEP, UNK

CTX_JOIN = "\u0001"
DEFAULT_ORDER = 3
DEFAULT_LAMBDAS = (0.1, 0.3, 0.6)


class NGramModel:
    """Trained model. Treat as immutable; the only mutable state is a lookup cache."""

    def __init__(self, order, lambdas, vocab, counts, smoothing=1.0):
        self.order = int(order)
        self.lambdas = tuple(float(x) for x in lambdas)
        _check_lambdas(self.order, self.lambdas)
        self.vocab = tuple(sorted(set(vocab) | RESERVED))
        self.index = {w: i for i, w in enumerate(self.vocab)}
        self.smoothing = float(smoothing)
        # counts[i] holds order-(i+1) statistics: context tuple of length i -> {token: count}
        self.counts = [{tuple(c): dict(nxt) for c, nxt in level.items()} for level in counts]
        self._totals = [{c: sum(nxt.values()) for c, nxt in level.items()} for level in self.counts]

        uni = self.counts[0].get((), {})
        self.n_tokens = sum(uni.values())
        V = len(self.vocab)
        vec = np.full(V, self.smoothing, dtype=np.float64)
        for w, c in uni.items():
            vec[self.index[w]] += c
        denom = self.n_tokens + self.smoothing * V
        self._unigram = vec / denom if denom > 0 else np.full(V, 1.0 / V)
        self._ml_cache = {}

    def __eq__(self, other):
        return (
            isinstance(other, NGramModel)
            and self.order == other.order
            and self.lambdas == other.lambdas
            and self.vocab == other.vocab
            and self.smoothing == other.smoothing
            and self.counts == other.counts
        )

    def __repr__(self):
        return f"NGramModel(order={self.order}, vocab={len(self.vocab)}, tokens={self.n_tokens})"

    @property
    def vocab_size(self) -> int:
        return len(self.vocab)

    def map_token(self, tok: str) -> str:
        return tok if tok in self.index else UNK

    def _context(self, history: Sequence[str]) -> tuple:
        if self.order == 1:
            return ()
        pad = [BOS] * (self.order - 1)
        hist = pad + [self.map_token(t) for t in history[-(self.order - 1):]]
        return tuple(hist[-(self.order - 1):])

    def _active_weights(self, ctx: tuple):
        """(level, weight) pairs with renormalized weights for seen contexts."""
        active = [(0, self.lambdas[0])]
        for i in range(1, self.order):
            sub = ctx[len(ctx) - i:]
            if self._totals[i].get(sub):
                active.append((i, self.lambdas[i]))
        total = sum(w for _, w in active)
        if total <= 0:
            return [(0, 1.0)]
        return [(i, w / total) for i, w in active]

    def _ml_arrays(self, level: int, sub: tuple):
        key = (level, sub)
        hit = self._ml_cache.get(key)
        if hit is None:
            nxt = self.counts[level][sub]
            tot = self._totals[level][sub]
            idx = np.fromiter((self.index[w] for w in nxt), dtype=np.int64, count=len(nxt))
            val = np.fromiter((c / tot for c in nxt.values()), dtype=np.float64, count=len(nxt))
            hit = (idx, val)
            self._ml_cache[key] = hit
        return hit

    def distribution(self, history: Sequence[str]) -> np.ndarray:
        """Conditional distribution over ``self.vocab`` given preceding tokens."""
        ctx = self._context(list(history))
        p = np.zeros(len(self.vocab))
        for level, w in self._active_weights(ctx):
            if level == 0:
                p += w * self._unigram
            else:
                idx, val = self._ml_arrays(level, ctx[len(ctx) - level:])
                p[idx] += w * val
        return p

    def prob(self, token: str, history: Sequence[str]) -> float:
        tok = self.map_token(token)
        ctx = self._context(list(history))
        p = 0.0
        for level, w in self._active_weights(ctx):
            if level == 0:
                p += w * self._unigram[self.index[tok]]
            else:
                sub = ctx[len(ctx) - level:]
                p += w * self.counts[level][sub].get(tok, 0) / self._totals[level][sub]
        return p

    def logprob(self, token: str, history: Sequence[str]) -> float:
        p = self.prob(token, history)
        return math.log(p) if p > 0 else -math.inf

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "lambdas": list(self.lambdas),
            "smoothing": self.smoothing,
            "vocab": list(self.vocab),
            "counts": [
                {CTX_JOIN.join(c): dict(sorted(nxt.items())) for c, nxt in sorted(level.items())}
                for level in self.counts
            ],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "NGramModel":
        counts = []
        for level, raw in enumerate(obj["counts"]):
            counts.append({
                (tuple(k.split(CTX_JOIN)) if level else ()): v for k, v in raw.items()
            })
        return cls(obj["order"], obj["lambdas"], obj["vocab"], counts, obj.get("smoothing", 1.0))

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.to_json(), f, ensure_ascii=False, sort_keys=True)
            f.write("\n")

    @classmethod
    def load(cls, path) -> "NGramModel":
        with open(path, encoding="utf-8") as f:
            return cls.from_json(json.load(f))


def _check_lambdas(order, lambdas):
    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")
    if len(lambdas) != order:
        raise ValueError(f"need {order} interpolation weights, got {len(lambdas)}")
    if any(x < 0 for x in lambdas) or abs(sum(lambdas) - 1.0) > 1e-9:
        raise ValueError(f"interpolation weights must be >= 0 and sum to 1: {lambdas}")


def default_lambdas(order: int) -> tuple:
    if order == DEFAULT_ORDER:
        return DEFAULT_LAMBDAS
    # linearly increasing weights toward the highest order
    raw = np.arange(1, order + 1, dtype=float)
    return tuple(raw / raw.sum())


def train_lm(
    samples: Iterable[Sequence[str]],
    order: int = DEFAULT_ORDER,
    lambdas: Sequence[float] | None = None,
    unk_threshold: int = 1,
    smoothing: float = 1.0,
) -> NGramModel:
    """Count n-grams over ``samples``.

    Tokens seen at most ``unk_threshold`` times become ``[UNK]`` (reserved
    tokens are never mapped). Each sample is left-padded with ``order - 1``
    ``[BOS]`` tokens; ``[BOS]`` itself is never counted as a prediction.
    """
    samples = [tuple(s) for s in samples]
    if not samples:
        raise ValueError("cannot train on an empty sample set")
    if unk_threshold < 0:
        raise ValueError("unk_threshold must be >= 0")
    lambdas = tuple(lambdas) if lambdas is not None else default_lambdas(order)
    _check_lambdas(order, lambdas)

    freq = Counter(t for s in samples for t in s)
    keep = {w for w, c in freq.items() if c > unk_threshold or w in RESERVED}

    counts = [defaultdict(Counter) for _ in range(order)]
    pad = (BOS,) * (order - 1)
    for s in samples:
        seq = pad + tuple(t if t in keep else UNK for t in s)
        for pos in range(order - 1, len(seq)):
            tok = seq[pos]
            for level in range(order):
                counts[level][seq[pos - level:pos]][tok] += 1
    return NGramModel(order, lambdas, keep, [dict(c) for c in counts], smoothing)


def cross_entropy(model: NGramModel, sentence: Sequence[str]) -> float:
    """Per-token cross-entropy in nats."""
    sentence = list(sentence)
    if not sentence:
        raise ValueError("cross-entropy of an empty sentence is undefined")
    total = 0.0
    for i, tok in enumerate(sentence):
        total += model.logprob(tok, sentence[:i])
    return -total / len(sentence)


def perplexity(model: NGramModel, sentence: Sequence[str]) -> float:
    return math.exp(cross_entropy(model, sentence))


def next_token_distribution(model: NGramModel, history: Sequence[str], temperature: float = 1.0) -> np.ndarray:
    """The exact distribution ``sample_continuation`` draws from.

    ``[BOS]`` is masked out. ``temperature == 0`` gives a one-hot argmax with
    ties going to the lexicographically smallest token.
    """
    p = model.distribution(history)
    p[model.index[BOS]] = 0.0
    if temperature <= 0:
        out = np.zeros_like(p)
        out[int(np.argmax(p))] = 1.0
        return out
    if temperature == 1.0:
        return p / p.sum()
    with np.errstate(divide="ignore"):
        logits = np.log(p) / temperature
    logits -= logits.max()
    q = np.exp(logits)
    return q / q.sum()


def sample_continuation(
    model: NGramModel,
    prompt: Sequence[str],
    max_new: int = 64,
    temperature: float = 1.0,
    rng_seed=0,
) -> list:
    """Draw tokens after ``prompt`` until ``[EOS]`` (included) or ``max_new`` tokens.

    ``rng_seed`` may be an int or a sequence of ints (e.g. ``(seed, index)``).
    """
    if max_new < 1:
        raise ValueError("max_new must be >= 1")
    if temperature < 0:
        raise ValueError("temperature must be > 0 (or 0 for argmax)")
    rng = np.random.default_rng(rng_seed)
    history = list(prompt)
    out = []
    for _ in range(max_new):
        q = next_token_distribution(model, history, temperature)
        cdf = np.cumsum(q)
        i = int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))
        tok = model.vocab[min(i, len(q) - 1)]
        out.append(tok)
        history.append(tok)
        if tok == EOS:
            break
    return out


__all__ = [
    "NGramModel", "train_lm", "cross_entropy", "perplexity", "sample_continuation",
    "next_token_distribution", "default_lambdas", "SEP", "EOS",
]
