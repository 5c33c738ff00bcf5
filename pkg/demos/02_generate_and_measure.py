"""
Generating in-domain text and measuring how in-domain it is
============================================================

Generate five times the authentic data with k = 20, then compare the word
distribution of the output with the authentic text and with a general pool.
Self-BLEU tells us how repetitive the generated corpus is.
"""

from pgen_bt.pgen import PromptConfig, generate_corpus, train_builtin_backend
from pgen_bt.analysis import distribution_report
from pgen_bt.corpus import load_mono, load_parallel
from pgen_bt.metrics import self_bleu
from pgen_bt.pipeline import toy_config_path

data = toy_config_path().parent
text = load_parallel(data / "toy_authentic.tsv").texts("authentic").relabel(name="authentic")
general = load_mono(data / "toy_general.txt", name="general", domain_label="general")

cfg = PromptConfig(k=20, target_size=5 * len(text), seed=13)
backend, model, _ = train_builtin_backend(text, cfg)
result = generate_corpus(backend, text, text, cfg, workers=4)
pgen = result.corpus.relabel(name="pgen")

st = result.stats
print("prompts used: %d, accepted %d of %d candidates (%.0f%%)"
      % (st.prompts, st.accepted, st.candidates, 100 * st.acceptance_rate))
print("rejected as copies of authentic text:", st.rejected_dup_authentic)
print("rejected as repeats:", st.rejected_dup_within)
for s in pgen.sentences[:5]:
    print("  ", " ".join(s))

rep = distribution_report([pgen, general], text, top_n=20, seed=13)
print("\nJS divergence to the authentic text (nats, equal-size samples of %d):" % rep["sample_size"])
for name, v in rep["js"].items():
    print("  %-8s %.4f" % (name, v))

# frequency of the five most common authentic words in each corpus
print("\n%-12s" % "word" + "".join("%10s" % n for n in rep["curves"]))
for i, w in enumerate(rep["ranks"][:5]):
    print("%-12s" % w + "".join("%10.4f" % rep["curves"][n][i] for n in rep["curves"]))

print("\nSelf-BLEU authentic %.2f" % self_bleu(text))
print("Self-BLEU pgen      %.2f" % self_bleu(pgen, sample_cap=500))
