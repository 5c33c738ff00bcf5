import sys

import pytest
from hypothesis import given, strategies as st

from pgen_bt.analysis import corpus_distribution, js_divergence
from pgen_bt.backends import BackendError, NGramBackend, SubprocessBackend
from pgen_bt.corpus import EOS, RESERVED, SEP, MonoCorpus, sample_corpus
from pgen_bt.pgen import (
    GenerationBudgetExceeded, PromptConfig, build_generation_prompt, build_tuning_samples,
    generate_corpus, permutation_count, split_candidates,
)

PAIRS = MonoCorpus([("a", "b"), ("c", "d"), ("e", "f"), ("g", "h"), ("i", "j")])


def test_tuning_samples_k1_has_no_sep():
    for s in build_tuning_samples(PAIRS, 1, 10, 0):
        assert SEP not in s and s[-1] == EOS and len(s) == 3


def test_tuning_sample_length_arithmetic():
    for s in build_tuning_samples(PAIRS, 3, 20, 1):
        assert len(s) == 2 + 1 + 2 + 1 + 2 + 1
        assert s[2] == s[5] == SEP and s[8] == EOS


def test_tuning_samples_draw_without_replacement():
    for s in build_tuning_samples(PAIRS, 5, 50, 2):
        sents = " ".join(s[:-1]).split(f" {SEP} ")
        assert len(set(sents)) == 5


def test_tuning_samples_deterministic_and_k20(toy_text):
    assert build_tuning_samples(toy_text, 20, 5, 4) == build_tuning_samples(toy_text, 20, 5, 4)
    big = MonoCorpus([(f"w{i}", "x") for i in range(7086)])
    samples = build_tuning_samples(big, 20, 3, 0)
    assert all(s.count(SEP) == 19 for s in samples)


def test_tuning_samples_corpus_too_small():
    with pytest.raises(ValueError):
        build_tuning_samples(PAIRS, 6, 1, 0)


def test_prompt_k1_is_empty():
    assert build_generation_prompt(PAIRS, 1, 0, 0) == ()


def test_prompt_structure():
    p = build_generation_prompt(PAIRS, 3, 0, 4)
    assert len(p) == (2 + 1) * 2
    assert p[2] == SEP and p[-1] == SEP


def test_prompt_depends_only_on_seed_and_index():
    a = [build_generation_prompt(PAIRS, 4, 9, i) for i in range(20)]
    b = [build_generation_prompt(PAIRS, 4, 9, i) for i in reversed(range(20))][::-1]
    assert a == b
    assert len(set(a)) > 1


def test_prompt_corpus_too_small():
    with pytest.raises(ValueError):
        build_generation_prompt(PAIRS, 7, 0, 0)


def test_permutation_count_values():
    assert permutation_count(5, 3) == 5 * 4
    assert permutation_count(5, 1) == 1
    assert permutation_count(0, 1) == 1
    assert permutation_count(5, 6) == 120
    with pytest.raises(ValueError):
        permutation_count(5, 7)


def test_permutation_count_big():
    v = permutation_count(7086, 20)
    # oracle: direct big-integer product, no shared code path
    oracle = 1
    for f in range(7067, 7087):
        if f != 7067:
            oracle *= f
    assert v == oracle
    assert v > 7067 ** 19 > 7086


@given(st.integers(2, 300), st.integers(2, 50))
def test_permutation_count_exceeds_n(N, k):
    if k - 1 <= N:
        assert permutation_count(N, k) >= N


@pytest.mark.parametrize("cont, may_truncate, expected, truncated", [
    (["a", "b", EOS], True, [("a", "b")], False),
    (["a", SEP, "b", "c", EOS], True, [("a",), ("b", "c")], False),
    (["a", SEP, "b", "c"], True, [("a",)], True),
    (["a", SEP, "b", "c"], False, [("a",), ("b", "c")], False),
    (["a", "b", SEP], True, [("a", "b")], False),
    ([], True, [], False),
    ([EOS], True, [], False),
])
def test_split_candidates(cont, may_truncate, expected, truncated):
    assert split_candidates(cont, may_truncate) == (expected, truncated)


def test_constant_backend_saturates_dedup():
    cfg = PromptConfig(k=2, target_size=3, min_len=1, attempt_budget=10, dedup_against_authentic=False)
    with pytest.raises(GenerationBudgetExceeded) as err:
        generate_corpus(lambda p, i: ["x", "y", EOS], PAIRS, PAIRS, cfg)
    e = err.value
    assert e.partial.sentences == (("x", "y"),)
    assert e.stats.accepted == 1 and e.stats.prompts == 10 and e.stats.rejected_dup_within == 9


def test_echo_backend_without_dedup():
    cfg = PromptConfig(k=2, target_size=5, min_len=1, dedup_within=False, dedup_against_authentic=False)
    res = generate_corpus(lambda p, i: ["a", "b", EOS], PAIRS, PAIRS, cfg)
    assert res.corpus.sentences == (("a", "b"),) * 5
    assert res.corpus.domain_label == "pgen"
    assert res.stats.prompts == 5


def test_filters():
    outputs = [
        ["a", "[UNK]", "c", EOS],          # reserved token
        ["x", EOS],                        # too short
        ["a", "b", SEP, "p", "q", "r", EOS],  # authentic copy + valid
        ["s", "t", "u", SEP, "v"],         # valid + truncated tail
    ]
    cfg = PromptConfig(k=1, target_size=2, min_len=2, max_len=3, attempt_budget=4)
    res = generate_corpus(lambda p, i: outputs[i], PAIRS, PAIRS, cfg)
    assert res.corpus.sentences == (("p", "q", "r"), ("s", "t", "u"))
    st_ = res.stats
    assert (st_.rejected_reserved, st_.rejected_length, st_.rejected_dup_authentic, st_.truncated_tails) == (1, 1, 1, 1)


def test_config_validation():
    for kw in (dict(k=0), dict(target_size=0), dict(min_len=5, max_len=4), dict(target_size=10, attempt_budget=5)):
        with pytest.raises(ValueError):
            PromptConfig(**kw)


def test_generated_invariants(toy_text, toy_pgen):
    cfg = PromptConfig()
    assert len(toy_pgen) == 5 * len(toy_text)
    assert len(set(toy_pgen.sentences)) == len(toy_pgen)
    assert not set(toy_pgen.sentences) & set(toy_text.sentences)
    for s in toy_pgen:
        assert cfg.min_len <= len(s) <= cfg.max_len
        assert not RESERVED & set(s)


def test_builtin_backend_closer_than_general(toy_text, toy_pgen, toy_general):
    # oracle: divergences computed on the produced corpora, equal sizes
    n = len(toy_text)
    ref = corpus_distribution(toy_text)
    js_pgen = js_divergence(corpus_distribution(sample_corpus(toy_pgen, n, 0)), ref)
    js_gen = js_divergence(corpus_distribution(sample_corpus(toy_general, n, 0)), ref)
    assert js_pgen < js_gen


@pytest.mark.parametrize("workers", [2, 4])
def test_worker_count_invariance(toy_text, workers):
    from pgen_bt.ngram_lm import train_lm

    cfg = PromptConfig(k=5, target_size=300, seed=3)
    model = train_lm(build_tuning_samples(toy_text, 5, 200, 3))
    backend = NGramBackend(model, 64, 1.0, 3)
    one = generate_corpus(backend, toy_text, toy_text, cfg, workers=1)
    many = generate_corpus(backend, toy_text, toy_text, cfg, workers=workers)
    assert one.corpus == many.corpus
    assert one.stats == many.stats


# ---- external backend protocol ---------------------------------------------

ECHO_CHILD = (
    "import sys\n"
    "for line in sys.stdin:\n"
    "    toks = line.split()\n"
    "    sys.stdout.write(' '.join(toks[:2] + ['[EOS]']) + '\\n')\n"
    "    sys.stdout.flush()\n"
)


def test_subprocess_backend_roundtrip():
    with SubprocessBackend([sys.executable, "-c", ECHO_CHILD]) as be:
        assert be(["a", "b", "c", SEP], 0) == ["a", "b", EOS]
        assert be([], 1) == [EOS]


def test_subprocess_backend_empty_line_is_empty_continuation():
    child = "import sys\nfor line in sys.stdin:\n    print('', flush=True)\n"
    with SubprocessBackend([sys.executable, "-c", child]) as be:
        assert be(["x"]) == []


def test_subprocess_backend_child_exit():
    with SubprocessBackend([sys.executable, "-c", "import sys; sys.exit(0)"]) as be:
        with pytest.raises(BackendError):
            be(["x"])


def test_subprocess_backend_drives_generation():
    cfg = PromptConfig(k=2, target_size=4, min_len=2, dedup_within=False, dedup_against_authentic=False)
    with SubprocessBackend([sys.executable, "-c", ECHO_CHILD]) as be:
        res = generate_corpus(be, PAIRS, PAIRS, cfg, workers=2)
    # the child echoes the first two prompt tokens, i.e. the first prompt sentence
    assert len(res.corpus) == 4
    assert all(s in PAIRS.sentences for s in res.corpus)
