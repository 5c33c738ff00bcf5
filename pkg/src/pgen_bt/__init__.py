"""Prompt-based in-domain text generation and back-translation for gloss-to-text
translation, at desk scale."""
from .corpus import (
    BOS, EOS, SEP, UNK, MonoCorpus, ParallelCorpus, VocabStats, load_mono, load_parallel,
    sample_corpus, vocab_stats,
)
from .ngram_lm import NGramModel, cross_entropy, perplexity, sample_continuation, train_lm
from .pgen import (
    PromptConfig, build_generation_prompt, build_tuning_samples, generate_corpus,
    permutation_count,
)
from .selection import moore_lewis_score, select_top
from .translator import SynthesisPlan, back_translate, synthesize, train_ibm1, translate_greedy
from .metrics import bleu_by_length, corpus_bleu, f1_by_frequency, meteor_lite, rouge_l, self_bleu
from .analysis import (
    classify_corpus, distribution_report, js_divergence, kl_divergence, to_distribution,
    train_domain_classifier,
)
from .pipeline import PipelineConfig, run_pipeline, run_sweep, toy_config_path

__version__ = "0.1.0"
