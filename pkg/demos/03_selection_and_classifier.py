"""
Cross-entropy difference selection and a domain classifier
==========================================================

The classic alternative to generating text is to select it from a large
general pool: score each sentence by H_in - H_gen and keep the lowest. Here we
do that on the toy pool, then train a naive Bayes domain classifier and ask it
what it thinks of each corpus.
"""

from pgen_bt.analysis import classify_corpus, train_domain_classifier
from pgen_bt.corpus import MonoCorpus, load_mono, load_parallel
from pgen_bt.ngram_lm import train_lm
from pgen_bt.selection import select_top
from pgen_bt.pipeline import toy_config_path

data = toy_config_path().parent
text = load_parallel(data / "toy_authentic.tsv").texts("authentic")
pool = load_mono(data / "toy_general.txt", name="general", domain_label="general")

lm_in = train_lm(text)
lm_gen = train_lm(pool)
res = select_top(pool, lm_in, lm_gen, n=150)

# the pool is template-made and repeats itself; show distinct sentences only
seen = []
for sent, score in res.scored:
    if sent not in [s for s, _ in seen]:
        seen.append((sent, score))
print("lowest scores (most in-domain):")
for sent, score in seen[:5]:
    print("  %+.3f  %s" % (score, " ".join(sent)))
print("highest scores:")
for sent, score in seen[-3:]:
    print("  %+.3f  %s" % (score, " ".join(sent)))

# the toy pool borrows weather words in some sentences; selection finds them,
# but the rest of each sentence still reads like general text

n = 400
clf = train_domain_classifier(MonoCorpus(text.sentences[:n]), MonoCorpus(pool.sentences[:n]))
held_in = text.sentences[n:]
held_gen = pool.sentences[n:]
print("\nheld-out authentic classified in-domain: %.3f" % classify_corpus(clf, held_in)["in_domain"])
print("held-out general classified general:    %.3f" % classify_corpus(clf, held_gen)["general"])
print("selected sentences classified in-domain: %.3f" % classify_corpus(clf, res.selected)["in_domain"])

s = "morgen regnet es im norden".split()
print("\nP(in-domain | %r) = %.4f" % (" ".join(s), clf.posterior_in_domain(s)))
