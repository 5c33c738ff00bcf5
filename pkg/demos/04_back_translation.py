"""
Back-translation with IBM Model 1
=================================

Glosses are close to a monotone reduction of the text, so a word-level model
goes a long way: train P(gloss | text) by EM, map each text word to its best
gloss, drop words whose best gloss is too unlikely. We check it on the held-out
test pairs and then build the mixed training set.
"""

from pgen_bt.corpus import ParallelCorpus, load_parallel, vocab_stats
from pgen_bt.metrics import evaluate
from pgen_bt.translator import SynthesisPlan, TableTranslator, back_translate, synthesize, train_ibm1
from pgen_bt.pipeline import toy_config_path

data = toy_config_path().parent
authentic = load_parallel(data / "toy_authentic.tsv")
test = load_parallel(data / "toy_test.tsv")

table = train_ibm1(authentic, iterations=20)
print("log-likelihood by iteration:")
print("  " + " ".join("%.0f" % v for v in table.log_likelihoods[::4]))

for w in ("regnet", "morgen", "es", "im"):
    tgt, p = table.best(w)
    print("  %-8s -> %-8s %.3f" % (w, tgt, p))

bt = TableTranslator(table, drop_threshold=0.3)
gloss, text = test.pairs[0]
print("\ntext:      ", " ".join(text))
print("reference: ", " ".join(gloss))
print("output:    ", " ".join(bt(text)))

hyps = [bt(t) for _, t in test]
refs = [g for g, _ in test]
rep = evaluate(hyps, refs, vocab_stats(authentic.glosses))
print("\nBLEU-1..4 " + " ".join("%.2f" % b for b in rep.bleu))
print("ROUGE-L %.2f  METEOR %.2f" % (rep.rouge_l, rep.meteor))
print("F1 by gloss frequency:", rep.buckets["frequency"])
print("BLEU-4 by reference length:", rep.buckets["length"])

# pseudo pairs from text we never had glosses for; the test side stands in
# here, mixed at ratio 1 with the same number of authentic pairs
pseudo = back_translate(bt, test.texts())
few = ParallelCorpus(authentic.pairs[:len(pseudo)], "authentic")
train, finetune = synthesize(few, pseudo, SynthesisPlan(ratio=1, shuffle_seed=0))
print("\ntrain pairs %d, finetune pairs %d" % (len(train), len(finetune)))
