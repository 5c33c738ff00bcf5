"""Prompt-based in-domain text generation.

Tuning samples are ``k`` corpus sentences joined by ``[SEP]`` and closed with
``[EOS]``; generation prompts are ``k - 1`` sentences each followed by
``[SEP]``. A backend continues the prompt; every complete sentence in the
continuation becomes a candidate for the generated corpus.
"""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from .backends import NGramBackend
from .corpus import EOS, RESERVED, SEP, MonoCorpus
from .ngram_lm import DEFAULT_ORDER, train_lm

logger = logging.getLogger(__name__)

# tuning samples and generation prompts draw from separate seed streams
_TUNING_STREAM = 0
_PROMPT_STREAM = 1


@dataclass(frozen=True)
class PromptConfig:
    k: int = 20
    target_size: int = 1000
    max_new_tokens: int = 128
    temperature: float = 1.0
    min_len: int = 3
    max_len: int = 60
    dedup_within: bool = True
    dedup_against_authentic: bool = True
    seed: int = 0
    attempt_budget: int | None = None  # default: 20 * target_size

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.target_size < 1:
            raise ValueError("target_size must be >= 1")
        if self.min_len > self.max_len:
            raise ValueError("min_len must not exceed max_len")
        if self.temperature < 0:
            raise ValueError("temperature must be > 0")
        if self.attempt_budget is None:
            object.__setattr__(self, "attempt_budget", 20 * self.target_size)
        if self.attempt_budget < self.target_size:
            raise ValueError("attempt_budget must be >= target_size")


@dataclass
class GenerationStats:
    prompts: int = 0
    candidates: int = 0
    accepted: int = 0
    truncated_tails: int = 0
    rejected_length: int = 0
    rejected_reserved: int = 0
    rejected_dup_within: int = 0
    rejected_dup_authentic: int = 0

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.candidates if self.candidates else 0.0

    def to_json(self) -> dict:
        d = asdict(self)
        d["acceptance_rate"] = round(self.acceptance_rate, 6)
        return d


@dataclass(frozen=True)
class GenerationResult:
    corpus: MonoCorpus
    stats: GenerationStats = field(default_factory=GenerationStats)


class GenerationBudgetExceeded(RuntimeError):
    def __init__(self, partial: MonoCorpus | None, stats: GenerationStats, target: int):
        self.partial = partial
        self.stats = stats
        super().__init__(
            f"attempt budget exhausted after {stats.prompts} prompts: "
            f"accepted {stats.accepted} of {target} sentences"
        )


def _draw(rng, n: int, k: int) -> np.ndarray:
    return rng.choice(n, size=k, replace=False)


def build_tuning_samples(corpus: MonoCorpus, k: int, count: int, seed: int) -> list:
    """``count`` samples ``y1 [SEP] y2 [SEP] ... yk [EOS]``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if count < 1:
        raise ValueError("count must be >= 1")
    if len(corpus) < k:
        raise ValueError(f"corpus has {len(corpus)} sentences, fewer than k={k}")
    rng = np.random.default_rng([seed, _TUNING_STREAM])
    samples = []
    for _ in range(count):
        toks = []
        for j, i in enumerate(_draw(rng, len(corpus), k)):
            if j:
                toks.append(SEP)
            toks.extend(corpus[i])
        toks.append(EOS)
        samples.append(tuple(toks))
    return samples


def build_generation_prompt(corpus: MonoCorpus, k: int, seed: int, index: int) -> tuple:
    """Prompt ``index``: ``k - 1`` sentences, each followed by ``[SEP]``.

    A pure function of ``(seed, index)``; ``k == 1`` gives the empty prompt.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if len(corpus) < k - 1:
        raise ValueError(f"corpus has {len(corpus)} sentences, fewer than k-1={k - 1}")
    if k == 1:
        return ()
    rng = np.random.default_rng([seed, _PROMPT_STREAM, index])
    toks = []
    for i in _draw(rng, len(corpus), k - 1):
        toks.extend(corpus[i])
        toks.append(SEP)
    return tuple(toks)


def permutation_count(N: int, k: int) -> int:
    """Number of ordered selections of ``k - 1`` sentences out of ``N``: N!/(N-k+1)!"""
    if k < 1 or N < 0:
        raise ValueError("need N >= 0 and k >= 1")
    if k - 1 > N:
        raise ValueError(f"cannot choose k-1={k - 1} of N={N} sentences")
    out = 1
    for f in range(N, N - k + 1, -1):
        out *= f
    return out


def split_candidates(continuation: Sequence[str], may_truncate: bool = True):
    """Cut a continuation into candidate sentences.

    Returns ``(candidates, truncated)``. A trailing segment not closed by
    ``[SEP]``/``[EOS]`` is dropped when ``may_truncate`` (it was cut off by the
    token budget).
    """
    toks = list(continuation)
    closed = bool(toks) and toks[-1] in (SEP, EOS)
    if toks and toks[-1] == EOS:
        toks.pop()
    segments = [[]]
    for t in toks:
        if t == SEP:
            segments.append([])
        else:
            segments[-1].append(t)
    truncated = False
    if not closed and may_truncate and segments[-1]:
        segments.pop()
        truncated = True
    return [tuple(s) for s in segments if s], truncated


def generate_corpus(
    backend: Callable,
    source: MonoCorpus,
    authentic: MonoCorpus,
    cfg: PromptConfig,
    workers: int = 1,
    name: str = "pgen",
) -> GenerationResult:
    """Run prompts 0, 1, 2, ... through ``backend`` until ``cfg.target_size``
    sentences are accepted or ``cfg.attempt_budget`` prompts are spent.

    With ``workers > 1`` prompts are dispatched to a thread pool in chunks;
    results are consumed in prompt-index order so the output is identical for
    any worker count.
    """
    stats = GenerationStats()
    accepted = []
    seen = set()
    authentic_set = set(authentic.sentences) if cfg.dedup_against_authentic else set()
    may_truncate = getattr(backend, "may_truncate", True)

    def request(i):
        return backend(build_generation_prompt(source, cfg.k, cfg.seed, i), i)

    def consume(continuation):
        cands, truncated = split_candidates(continuation, may_truncate)
        stats.truncated_tails += truncated
        for c in cands:
            stats.candidates += 1
            if any(t in RESERVED for t in c):
                stats.rejected_reserved += 1
            elif not cfg.min_len <= len(c) <= cfg.max_len:
                stats.rejected_length += 1
            elif c in authentic_set:
                stats.rejected_dup_authentic += 1
            elif cfg.dedup_within and c in seen:
                stats.rejected_dup_within += 1
            else:
                seen.add(c)
                accepted.append(c)
                stats.accepted += 1
                if len(accepted) == cfg.target_size:
                    return True
        return False

    chunk = max(1, workers) * 16
    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        start = 0
        done = False
        while not done and start < cfg.attempt_budget:
            idx = range(start, min(start + chunk, cfg.attempt_budget))
            results = pool.map(request, idx) if pool else map(request, idx)
            for cont in results:
                stats.prompts += 1
                if consume(cont):
                    done = True
                    break
            start = idx.stop
    finally:
        if pool:
            pool.shutdown(wait=True, cancel_futures=True)

    logger.info("generation: %d prompts, %d/%d candidates accepted",
                stats.prompts, stats.accepted, stats.candidates)
    if len(accepted) < cfg.target_size:
        partial = MonoCorpus(accepted, name, "pgen") if accepted else None
        raise GenerationBudgetExceeded(partial, stats, cfg.target_size)
    return GenerationResult(MonoCorpus(accepted, name, "pgen"), stats)


def train_builtin_backend(
    corpus: MonoCorpus,
    cfg: PromptConfig,
    tuning_count: int | None = None,
    order: int = DEFAULT_ORDER,
    lambdas=None,
    unk_threshold: int = 1,
):
    """Build tuning samples from ``corpus``, fit an n-gram model on them and wrap
    it as a generation backend. Returns ``(backend, model, samples)``."""
    count = tuning_count or len(corpus)
    samples = build_tuning_samples(corpus, cfg.k, count, cfg.seed)
    model = train_lm(samples, order=order, lambdas=lambdas, unk_threshold=unk_threshold)
    backend = NGramBackend(model, cfg.max_new_tokens, cfg.temperature, cfg.seed)
    return backend, model, samples
