import json

import pytest
from hypothesis import given, settings, strategies as st

from pgen_bt.corpus import (
    CorpusError, MonoCorpus, VocabStats, load_mono, load_parallel, sample_corpus, vocab_stats,
    write_mono, write_vocab_stats,
)

from conftest import DATA


def test_load_mono_skips_blank_lines(tmp_path, caplog):
    p = tmp_path / "m.txt"
    p.write_text("guten tag\n\nregen morgen\n", encoding="utf-8")
    c = load_mono(p)
    assert c.sentences == (("guten", "tag"), ("regen", "morgen"))
    assert "skipped 1 blank" in caplog.text


def test_load_mono_lowercase(tmp_path):
    p = tmp_path / "m.txt"
    p.write_text("A b\n", encoding="utf-8")
    assert load_mono(p, lowercase=True).sentences == (("a", "b"),)
    assert load_mono(p).sentences == (("A", "b"),)


def test_load_mono_errors(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_mono(tmp_path / "missing.txt")
    p = tmp_path / "blank.txt"
    p.write_text("\n  \n", encoding="utf-8")
    with pytest.raises(CorpusError):
        load_mono(p)


def test_load_parallel(tmp_path):
    p = tmp_path / "p.tsv"
    p.write_text("REGEN MORGEN\tmorgen regnet es\n", encoding="utf-8")
    pc = load_parallel(p)
    assert len(pc) == 1
    gloss, text = pc.pairs[0]
    assert len(gloss) == 2 and len(text) == 3


@pytest.mark.parametrize("line, lineno", [
    ("A\tb\tc\n", 1),
    ("A b\n", 1),
    ("\tb\n", 1),
])
def test_load_parallel_malformed(tmp_path, line, lineno):
    p = tmp_path / "p.tsv"
    p.write_text(line, encoding="utf-8")
    with pytest.raises(CorpusError, match=f":{lineno}:"):
        load_parallel(p)


def test_load_parallel_names_bad_line(tmp_path):
    p = tmp_path / "p.tsv"
    p.write_text("A\ta\nB\tb\tc\n", encoding="utf-8")
    with pytest.raises(CorpusError, match=r"p\.tsv:2:"):
        load_parallel(p)


def test_vocab_stats_hand_counts():
    s = vocab_stats([("a", "b", "a")])
    assert s.counts == {"a": 2, "b": 1}
    assert s.total_tokens == 3
    assert s.rank_order == ("a", "b")


def test_vocab_stats_tie_is_lexicographic():
    assert vocab_stats([("b", "a"), ("a", "b")]).rank_order == ("a", "b")


def test_vocab_stats_matches_independent_recount(toy_text):
    # oracle: count straight off the file, no toolkit code involved
    counts = {}
    with open(DATA / "toy_authentic.tsv", encoding="utf-8") as f:
        for line in f:
            for w in line.rstrip("\n").split("\t")[1].split():
                counts[w] = counts.get(w, 0) + 1
    s = vocab_stats(toy_text)
    assert s.counts == counts
    assert s.total_tokens == sum(counts.values())


def test_vocab_stats_json_roundtrip(tmp_path):
    s = vocab_stats([("x", "y", "x"), ("z",)])
    p = tmp_path / "v.json"
    write_vocab_stats(s, p)
    obj = json.loads(p.read_text(encoding="utf-8"))
    assert obj["_total"] == 4
    assert VocabStats.from_json(obj) == s


def test_sample_corpus_full_and_deterministic(toy_text):
    assert sample_corpus(toy_text, len(toy_text), 1).sentences == toy_text.sentences
    assert sample_corpus(toy_text, 50, 7) == sample_corpus(toy_text, 50, 7)
    assert sample_corpus(toy_text, 50, 7) != sample_corpus(toy_text, 50, 8)


def test_sample_corpus_test_set_sized():
    pool = MonoCorpus([(f"w{i}",) for i in range(5000)])
    s = sample_corpus(pool, 642, 0)
    assert len(s) == 642 and len(set(s.sentences)) == 642


@pytest.mark.parametrize("n", [0, 501])
def test_sample_corpus_range(toy_text, n):
    with pytest.raises(CorpusError):
        sample_corpus(toy_text, n, 0)


words = st.text(alphabet="abcdefgXYZäöü", min_size=1, max_size=5)
sentences = st.lists(st.lists(words, min_size=1, max_size=8).map(tuple), min_size=1, max_size=30)


@given(sentences)
def test_total_tokens_is_sum_of_lengths(sents):
    s = vocab_stats(sents)
    assert s.total_tokens == sum(map(len, sents)) == sum(s.counts.values())
    assert sorted(s.rank_order) == sorted(s.counts)


@given(sentences, st.data())
def test_sample_is_subsequence(sents, data):
    c = MonoCorpus(sents)
    n = data.draw(st.integers(1, len(c)))
    seed = data.draw(st.integers(0, 2**32 - 1))
    out = sample_corpus(c, n, seed).sentences
    assert len(out) == n
    it = iter(enumerate(c.sentences))
    # positions strictly increase: walk the original once
    for s in out:
        assert any(s == t for _, t in it)


@settings(max_examples=30)
@given(sentences)
def test_serialize_roundtrip(tmp_path_factory, sents):
    p = tmp_path_factory.mktemp("rt") / "c.txt"
    write_mono(sents, p)
    assert load_mono(p).sentences == tuple(sents)
