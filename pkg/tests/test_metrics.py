import math
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from pgen_bt.corpus import VocabStats, vocab_stats
from pgen_bt.metrics import (
    BucketSpec, bleu_by_length, corpus_bleu, evaluate, f1_by_frequency, lcs_length, meteor_align,
    meteor_lite, rouge_l, self_bleu,
)


def S(text):
    return tuple(text.split())


def test_bleu_identity():
    hyps = [S("the cat sat on the mat"), S("a b c d e")]
    res = corpus_bleu(hyps, hyps)
    assert res.bleu == pytest.approx((100.0,) * 4)
    assert res.brevity_penalty == 1.0


def test_bleu_brevity_hand_value():
    res = corpus_bleu([S("the cat")], [S("the cat sat")])
    # oracle: p_1 = 1, BP = exp(1 - 3/2)
    assert res.precisions[0] == 1.0
    assert res.brevity_penalty == pytest.approx(math.exp(-0.5), abs=1e-12)
    assert res.bleu[0] == pytest.approx(100 * math.exp(-0.5), abs=1e-9)
    assert res.bleu[0] == pytest.approx(60.65, abs=1e-2)


def test_bleu_zero_precision_rule():
    res = corpus_bleu([S("a b c d e")], [S("a b c x d e")])
    assert res.bleu[3] == 0.0
    assert res.bleu[0] > 0


def test_bleu_errors_and_empty_hyp():
    with pytest.raises(ValueError):
        corpus_bleu([S("a")], [])
    res = corpus_bleu([()], [S("a b")])
    assert res.bleu == (0.0,) * 4 and res.brevity_penalty == 0.0


def test_self_bleu_identical():
    assert self_bleu([S("a b c d e")] * 4) == pytest.approx(100.0, abs=1e-4)


def test_self_bleu_disjoint():
    corpus = [S("a b c d"), S("e f g h"), S("i j k l")]
    assert self_bleu(corpus) < 5


def test_self_bleu_hand_value():
    # oracle: "a b" vs others {"a c"}: p1 = 1/2, p2 = (0+1)/(1+1), BP 1
    # geometric mean over four orders with p3 = p4 = (0+1)/(0+1)
    corpus = [S("a b"), S("a c")]
    expected = 100 * math.exp((math.log(0.5) + math.log(0.5) + 0 + 0) / 4)
    assert self_bleu(corpus) == pytest.approx(expected, abs=1e-9)


def test_self_bleu_cap():
    corpus = [S("a b c"), S("a b d"), S("x y z"), S("a b c")]
    assert self_bleu(corpus, sample_cap=len(corpus)) == self_bleu(corpus, sample_cap=None)
    assert self_bleu(corpus, sample_cap=10) == self_bleu(corpus, sample_cap=None)
    assert self_bleu(corpus, sample_cap=1) != self_bleu(corpus, sample_cap=None)
    with pytest.raises(ValueError):
        self_bleu([S("a")])


def _self_bleu_brute(corpus, max_n=4):
    # oracle: each sentence clipped against the max count over every other sentence
    total = 0.0
    for i, h in enumerate(corpus):
        others = [r for j, r in enumerate(corpus) if j != i]
        logs = 0.0
        for n in range(1, max_n + 1):
            hc = Counter(tuple(h[k:k + n]) for k in range(len(h) - n + 1))
            m = 0
            for g, c in hc.items():
                m += min(c, max(Counter(tuple(r[k:k + n]) for k in range(len(r) - n + 1))[g] for r in others))
            t = max(len(h) - n + 1, 0)
            if n == 1:
                if m == 0:
                    logs = None
                    break
                logs += math.log(m / t)
            else:
                logs += math.log((m + 1) / (t + 1))
        if logs is None:
            continue
        ref_len = min((len(r) for r in others), key=lambda L: (abs(L - len(h)), L))
        bp = min(1.0, math.exp(1 - ref_len / len(h)))
        total += 100 * bp * math.exp(logs / max_n)
    return total / len(corpus)


@settings(max_examples=60)
@given(st.lists(st.lists(st.sampled_from("abcd"), min_size=1, max_size=7).map(tuple), min_size=2, max_size=8))
def test_self_bleu_matches_brute_force(corpus):
    assert self_bleu(corpus) == pytest.approx(_self_bleu_brute(corpus), abs=1e-9)


def test_rouge_hand_values():
    assert rouge_l([S("a c d")], [S("a b c d")]) == pytest.approx(100 * 2 * 0.75 / 1.75, abs=1e-9)
    assert rouge_l([S("a c d")], [S("a b c d")]) == pytest.approx(85.71, abs=1e-2)
    assert rouge_l([S("a b")], [S("a b")]) == 100.0
    assert rouge_l([S("a b")], [S("c d")]) == 0.0
    assert lcs_length(S("a b c b d a b"), S("b d c a b a")) == 4


def test_meteor_hand_values():
    assert meteor_lite([S("a b")], [S("a b")]) == pytest.approx(93.75, abs=1e-9)
    assert meteor_lite([S("a")], [S("a")]) == pytest.approx(50.0, abs=1e-9)
    assert meteor_lite([S("a b")], [S("c d")]) == 0.0


def test_meteor_alignment_prefers_chunk_extension():
    assert meteor_align(S("a b"), S("a x a b")) == (2, 1)
    assert meteor_align(S("b a"), S("a b")) == (2, 2)


def test_f1_identity_all_buckets():
    stats = VocabStats({"lo": 5, "mid": 100, "hi": 2000}, 2105, ("hi", "mid", "lo"))
    hyps = [S("lo mid hi"), S("hi hi")]
    out = f1_by_frequency(hyps, hyps, stats)
    assert out == {"low": 100.0, "medium": 100.0, "high": 100.0}


def test_f1_hand_value():
    stats = VocabStats({"w": 3}, 3, ("w",))
    out = f1_by_frequency([S("w")], [S("w w")], stats)
    assert out["low"] == pytest.approx(200 / 3, abs=1e-9)
    assert out["medium"] is None and out["high"] is None


def test_unseen_word_is_low():
    out = f1_by_frequency([S("zz")], [S("zz")], VocabStats({}, 0, ()))
    assert out["low"] == 100.0


@pytest.mark.parametrize("freq, bucket", [(0, "low"), (99, "low"), (100, "medium"), (1999, "medium"), (2000, "high")])
def test_frequency_boundaries(freq, bucket):
    assert BucketSpec().frequency_bucket(freq) == bucket


@pytest.mark.parametrize("length, bucket", [(1, "short"), (10, "short"), (11, "medium"), (20, "medium"), (21, "long")])
def test_length_boundaries(length, bucket):
    assert BucketSpec().length_bucket(length) == bucket


def test_bucket_spec_validation():
    with pytest.raises(ValueError):
        BucketSpec(frequency=(5, 5))
    with pytest.raises(ValueError):
        BucketSpec(length_names=("a", "b"))


def test_bleu_by_length_single_bucket():
    refs = [S("a b c d e")] * 3
    assert bleu_by_length(refs, refs) == {"short": 100.0, "medium": None, "long": None}


def test_bleu_by_length_manual_split():
    short_r = [S("a b c d e f"), S("x y z w v")]
    short_h = [S("a b c d e g"), S("x y z w")]
    med_r = [tuple(f"t{i}" for i in range(15)), tuple(f"u{i}" for i in range(12))]
    med_h = [tuple(f"t{i}" for i in range(14)), tuple(f"u{i}" for i in range(12) if i != 5)]
    hyps = [short_h[0], med_h[0], short_h[1], med_h[1]]
    refs = [short_r[0], med_r[0], short_r[1], med_r[1]]
    out = bleu_by_length(hyps, refs)
    assert out["short"] == pytest.approx(corpus_bleu(short_h, short_r).bleu[3], abs=1e-9)
    assert out["medium"] == pytest.approx(corpus_bleu(med_h, med_r).bleu[3], abs=1e-9)
    assert out["long"] is None


def test_evaluate_report_shape():
    hyps = [S("a b c"), S("d e")]
    refs = [S("a b c"), S("d f")]
    rep = evaluate(hyps, refs, vocab_stats(refs)).to_json()
    assert set(rep) == {"bleu", "rouge_l", "meteor", "bp", "sentence_count", "buckets"}
    assert len(rep["bleu"]) == 4 and rep["sentence_count"] == 2
    assert set(rep["buckets"]) == {"length", "frequency"}


tokens = st.sampled_from(["a", "b", "c", "d", "e"])
sent = st.lists(tokens, min_size=1, max_size=9).map(tuple)
pairs = st.lists(st.tuples(sent, sent), min_size=1, max_size=6)


@settings(max_examples=80)
@given(pairs, st.permutations(["a", "b", "c", "d", "e"]))
def test_renaming_invariance(data, perm):
    ren = dict(zip("abcde", perm))
    hyps = [h for h, _ in data]
    refs = [r for _, r in data]
    rh = [tuple(ren[w] for w in h) for h in hyps]
    rr = [tuple(ren[w] for w in r) for r in refs]
    assert corpus_bleu(rh, rr).bleu == pytest.approx(corpus_bleu(hyps, refs).bleu, abs=1e-9)
    assert rouge_l(rh, rr) == pytest.approx(rouge_l(hyps, refs), abs=1e-9)
    assert meteor_lite(rh, rr) == pytest.approx(meteor_lite(hyps, refs), abs=1e-9)
    stats = vocab_stats(refs)
    rstats = VocabStats({ren[w]: c for w, c in stats.counts.items()}, stats.total_tokens, ())
    assert f1_by_frequency(rh, rr, rstats) == f1_by_frequency(hyps, refs, stats)


@settings(max_examples=80)
@given(pairs)
def test_ranges_and_reversal(data):
    hyps = [h for h, _ in data]
    refs = [r for _, r in data]
    r = rouge_l(hyps, refs)
    m = meteor_lite(hyps, refs)
    assert 0 <= r <= 100 and 0 <= m <= 100
    assert rouge_l([h[::-1] for h in hyps], [x[::-1] for x in refs]) == pytest.approx(r, abs=1e-9)
    assert corpus_bleu(hyps, hyps).bleu == pytest.approx((100.0,) * 4)


@settings(max_examples=80)
@given(pairs)
def test_single_bucket_equals_micro_f1(data):
    hyps = [h for h, _ in data]
    refs = [r for _, r in data]
    spec = BucketSpec(frequency=(), frequency_names=("all",))
    out = f1_by_frequency(hyps, refs, vocab_stats(refs), spec)["all"]
    # oracle: pooled micro F1 over all words
    m = sum(sum((Counter(h) & Counter(r)).values()) for h, r in data)
    p = m / sum(map(len, hyps))
    rec = m / sum(map(len, refs))
    assert out == pytest.approx(100 * 2 * p * rec / (p + rec) if m else 0.0, abs=1e-9)


@settings(max_examples=100)
@given(sent, sent)
def test_meteor_matches_are_maximal(h, r):
    m, chunks = meteor_align(h, r)
    assert m == sum((Counter(h) & Counter(r)).values())
    assert (m == 0) == (chunks == 0) and chunks <= m
