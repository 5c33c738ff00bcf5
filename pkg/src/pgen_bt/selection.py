"""Cross-entropy-difference (Moore-Lewis) data selection."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .corpus import MonoCorpus, detokenize
from .ngram_lm import NGramModel, cross_entropy


@dataclass(frozen=True)
class SelectionResult:
    scored: tuple  # ((sentence, score), ...) ascending by score, ties by pool order
    selected: MonoCorpus

    def write_scored(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            for sent, score in self.scored:
                f.write(f"{score:.10f}\t{detokenize(sent)}\n")


def moore_lewis_score(sentence: Sequence[str], lm_in: NGramModel, lm_gen: NGramModel) -> float:
    """H_in(s) - H_gen(s) in nats/token; lower means more in-domain."""
    return cross_entropy(lm_in, sentence) - cross_entropy(lm_gen, sentence)


def select_top(pool: MonoCorpus, lm_in: NGramModel, lm_gen: NGramModel, n: int) -> SelectionResult:
    if not 1 <= n <= len(pool):
        raise ValueError(f"selection size {n} outside [1, {len(pool)}]")
    scores = [moore_lewis_score(s, lm_in, lm_gen) for s in pool]
    order = sorted(range(len(pool)), key=lambda i: (scores[i], i))
    chosen = sorted(order[:n])
    return SelectionResult(
        scored=tuple((pool[i], scores[i]) for i in order),
        selected=MonoCorpus([pool[i] for i in chosen], f"{pool.name}.selected", "selected"),
    )
