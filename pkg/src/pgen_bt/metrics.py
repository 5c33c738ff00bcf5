"""Translation metrics: corpus BLEU-1..4, Self-BLEU, ROUGE-L, METEOR-lite, and
compare-mt style bucketed analyses (F1 by training frequency, BLEU by
reference length).

All scores are on a 0-100 scale. Tokens are compared by exact string match.
"""
from __future__ import annotations

import bisect
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

from .corpus import VocabStats


def _check_pair(hyps, refs):
    if len(hyps) != len(refs):
        raise ValueError(f"{len(hyps)} hypotheses vs {len(refs)} references")


def ngram_counts(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


@dataclass(frozen=True)
class BleuResult:
    bleu: tuple  # BLEU-1 .. BLEU-max_n
    precisions: tuple  # clipped n-gram precisions p_1 .. p_max_n, as fractions
    brevity_penalty: float
    hyp_len: int
    ref_len: int


def corpus_bleu(hyps, refs, max_n: int = 4) -> BleuResult:
    """Corpus BLEU with one reference per hypothesis.

    BLEU-k = BP * exp(mean_{n<=k} ln p_n); a zero p_n zeroes every BLEU-k with
    k >= n. Empty hypotheses contribute length 0 and no n-grams. When no
    hypothesis is long enough to hold an n-gram, p_n is taken as 1.
    """
    _check_pair(hyps, refs)
    match = [0] * max_n
    total = [0] * max_n
    hyp_len = ref_len = 0
    for h, r in zip(hyps, refs):
        hyp_len += len(h)
        ref_len += len(r)
        for n in range(1, max_n + 1):
            hc = ngram_counts(h, n)
            rc = ngram_counts(r, n)
            match[n - 1] += sum(min(c, rc[g]) for g, c in hc.items())
            total[n - 1] += max(len(h) - n + 1, 0)
    if hyp_len == 0:
        return BleuResult((0.0,) * max_n, (0.0,) * max_n, 0.0, 0, ref_len)
    bp = min(1.0, math.exp(1 - ref_len / hyp_len))
    # an order with no hypothesis n-grams at all carries no evidence: p_n = 1
    prec = tuple(m / t if t else 1.0 for m, t in zip(match, total))
    scores = []
    log_sum = 0.0
    for k, p in enumerate(prec, 1):
        if p == 0 or log_sum == -math.inf:
            log_sum = -math.inf
            scores.append(0.0)
        else:
            log_sum += math.log(p)
            scores.append(100 * bp * math.exp(log_sum / k))
    return BleuResult(tuple(scores), prec, bp, hyp_len, ref_len)


def _sentence_bleu_multi(hyp, ref_max_counts, ref_len, max_n):
    """Sentence BLEU-max_n against pre-clipped reference n-gram maxima.
    p_1 unsmoothed; p_n for n >= 2 gets +1 on numerator and denominator."""
    if not hyp:
        return 0.0
    log_sum = 0.0
    for n in range(1, max_n + 1):
        hc = ngram_counts(hyp, n)
        m = sum(min(c, ref_max_counts(g)) for g, c in hc.items())
        t = max(len(hyp) - n + 1, 0)
        if n == 1:
            if m == 0:
                return 0.0
            p = m / t
        else:
            p = (m + 1) / (t + 1)
        log_sum += math.log(p)
    bp = min(1.0, math.exp(1 - ref_len / len(hyp)))
    return 100 * bp * math.exp(log_sum / max_n)


def self_bleu(corpus, max_n: int = 4, sample_cap: int | None = 1000) -> float:
    """Mean sentence BLEU of each of the first ``sample_cap`` sentences against
    all *other* sentences of the corpus as references. Lower = more diverse.

    Reference clipping uses the leave-one-out maximum count of every n-gram,
    and the brevity penalty the closest other sentence length (shorter wins ties).
    """
    sents = [tuple(s) for s in corpus]
    if len(sents) < 2:
        raise ValueError("Self-BLEU needs at least two sentences")
    cap = len(sents) if sample_cap is None else min(sample_cap, len(sents))

    # top-two counts per n-gram across the corpus give the leave-one-out maximum
    top = {}
    for j, s in enumerate(sents):
        for n in range(1, max_n + 1):
            for g, c in ngram_counts(s, n).items():
                best = top.get(g)
                if best is None:
                    top[g] = [c, j, 0]
                elif c > best[0]:
                    top[g] = [c, j, best[0]]
                elif c > best[2]:
                    best[2] = c
    lengths = sorted(len(s) for s in sents)

    def closest_other_len(L):
        # remove one occurrence of L from the multiset, then find the nearest
        i = bisect.bisect_left(lengths, L)
        cands = lengths[:i] + lengths[i + 1:]
        k = bisect.bisect_left(cands, L)
        opts = [cands[x] for x in (k - 1, k) if 0 <= x < len(cands)]
        return min(opts, key=lambda r: (abs(r - L), r))

    total = 0.0
    for i in range(cap):
        h = sents[i]

        def ref_max(g, i=i):
            best = top[g]
            return best[2] if best[1] == i else best[0]

        total += _sentence_bleu_multi(h, ref_max, closest_other_len(len(h)), max_n)
    return total / cap


def lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b):
            cur.append(prev[j] + 1 if x == y else max(prev[j + 1], cur[j]))
        prev = cur
    return prev[-1]


def rouge_l(hyps, refs) -> float:
    """Mean sentence ROUGE-L F1 (beta = 1), times 100."""
    _check_pair(hyps, refs)
    if not hyps:
        return 0.0
    total = 0.0
    for h, r in zip(hyps, refs):
        l = lcs_length(h, r)
        if l:
            p, rec = l / len(h), l / len(r)
            total += 2 * p * rec / (p + rec)
    return 100 * total / len(hyps)


def meteor_align(hyp: Sequence[str], ref: Sequence[str]):
    """One-to-one exact alignment built from the longest common runs first.

    Repeatedly aligns the longest contiguous run of still-unaligned tokens shared
    by both sides (ties: leftmost in hyp, then in ref). Every shared token ends up
    aligned, so matches are maximal, and long runs keep the chunk count low.
    Returns ``(matches, chunks)``.
    """
    free_h = [True] * len(hyp)
    free_r = [True] * len(ref)
    matched = []  # (hyp index, ref index)
    while True:
        best = (0, 0, 0)  # length, hyp start, ref start
        for i in range(len(hyp)):
            for j in range(len(ref)):
                L = 0
                while (i + L < len(hyp) and j + L < len(ref) and free_h[i + L] and free_r[j + L]
                       and hyp[i + L] == ref[j + L]):
                    L += 1
                if L > best[0]:
                    best = (L, i, j)
        L, i, j = best
        if L == 0:
            break
        for x in range(L):
            free_h[i + x] = free_r[j + x] = False
            matched.append((i + x, j + x))
    matched.sort()
    chunks = 0
    for k, (i, j) in enumerate(matched):
        if k == 0 or not (i == matched[k - 1][0] + 1 and j == matched[k - 1][1] + 1):
            chunks += 1
    return len(matched), chunks


def meteor_sentence(hyp, ref) -> float:
    m, chunks = meteor_align(hyp, ref)
    if m == 0:
        return 0.0
    p, r = m / len(hyp), m / len(ref)
    fmean = 10 * p * r / (r + 9 * p)
    penalty = 0.5 * (chunks / m) ** 3
    return fmean * (1 - penalty)


def meteor_lite(hyps, refs) -> float:
    """Exact-match METEOR (alpha 0.9, gamma 0.5, beta 3), mean over sentences, times 100."""
    _check_pair(hyps, refs)
    if not hyps:
        return 0.0
    return 100 * sum(meteor_sentence(h, r) for h, r in zip(hyps, refs)) / len(hyps)


@dataclass(frozen=True)
class BucketSpec:
    """Cut points for the frequency buckets (left-closed: [c_i, c_i+1)) and the
    length buckets (right-closed: (c_i, c_i+1])."""

    frequency: tuple = (100, 2000)
    length: tuple = (10, 20)
    frequency_names: tuple = ("low", "medium", "high")
    length_names: tuple = ("short", "medium", "long")

    def __post_init__(self):
        for cuts, names in ((self.frequency, self.frequency_names), (self.length, self.length_names)):
            if any(b <= a for a, b in zip(cuts, cuts[1:])):
                raise ValueError(f"cut points must be strictly increasing: {cuts}")
            if len(names) != len(cuts) + 1:
                raise ValueError(f"need {len(cuts) + 1} bucket names, got {names}")

    def frequency_bucket(self, freq: int) -> str:
        # freq 0 (unseen in training) falls in the lowest bucket
        return self.frequency_names[bisect.bisect_right(self.frequency, freq)]

    def length_bucket(self, length: int) -> str:
        return self.length_names[bisect.bisect_left(self.length, length)]


def f1_by_frequency(hyps, refs, train_stats: VocabStats, spec: BucketSpec = BucketSpec()) -> dict:
    """Micro F1 (x100) of word predictions, bucketed by training frequency.

    A bucket that contains no word in either hyps or refs maps to ``None``.
    """
    _check_pair(hyps, refs)
    match = Counter()
    n_hyp = Counter()
    n_ref = Counter()
    bucket = lambda w: spec.frequency_bucket(train_stats.counts.get(w, 0))
    for h, r in zip(hyps, refs):
        hc, rc = Counter(h), Counter(r)
        for w, c in hc.items():
            n_hyp[bucket(w)] += c
            match[bucket(w)] += min(c, rc[w])
        for w, c in rc.items():
            n_ref[bucket(w)] += c
    out = {}
    for name in spec.frequency_names:
        if not n_hyp[name] and not n_ref[name]:
            out[name] = None
            continue
        p = match[name] / n_hyp[name] if n_hyp[name] else 0.0
        r = match[name] / n_ref[name] if n_ref[name] else 0.0
        out[name] = 100 * 2 * p * r / (p + r) if p + r else 0.0
    return out


def bleu_by_length(hyps, refs, spec: BucketSpec = BucketSpec()) -> dict:
    """Corpus BLEU-4 within each reference-length bucket (``None`` if empty)."""
    _check_pair(hyps, refs)
    groups = {name: ([], []) for name in spec.length_names}
    for h, r in zip(hyps, refs):
        hs, rs = groups[spec.length_bucket(len(r))]
        hs.append(h)
        rs.append(r)
    return {
        name: (corpus_bleu(hs, rs).bleu[3] if hs else None)
        for name, (hs, rs) in groups.items()
    }


@dataclass
class EvalReport:
    bleu: tuple
    rouge_l: float
    meteor: float
    brevity_penalty: float
    sentence_count: int
    buckets: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "bleu": list(self.bleu),
            "rouge_l": self.rouge_l,
            "meteor": self.meteor,
            "bp": self.brevity_penalty,
            "sentence_count": self.sentence_count,
            "buckets": self.buckets,
        }


def evaluate(hyps, refs, train_stats: VocabStats | None = None, spec: BucketSpec = BucketSpec()) -> EvalReport:
    """Full report. Frequency buckets need the training-side ``train_stats``."""
    b = corpus_bleu(hyps, refs)
    buckets = {"length": bleu_by_length(hyps, refs, spec)}
    if train_stats is not None:
        buckets["frequency"] = f1_by_frequency(hyps, refs, train_stats, spec)
    return EvalReport(b.bleu, rouge_l(hyps, refs), meteor_lite(hyps, refs),
                      b.brevity_penalty, len(hyps), buckets)
