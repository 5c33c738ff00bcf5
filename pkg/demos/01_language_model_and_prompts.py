"""
Tuning samples, prompts and the builtin generator
=================================================

A k-sentence tuning sample is k authentic sentences joined by [SEP] and closed
by [EOS]. The generator is an interpolated trigram model fit on those samples.
A prompt is k-1 sentences, each followed by [SEP]; whatever the model writes
up to the next [SEP] or [EOS] is a candidate sentence.
"""

from pgen_bt import build_generation_prompt, build_tuning_samples, permutation_count, train_lm
from pgen_bt.corpus import load_parallel
from pgen_bt.ngram_lm import cross_entropy, next_token_distribution, sample_continuation
from pgen_bt.pipeline import toy_config_path

data = toy_config_path().parent
text = load_parallel(data / "toy_authentic.tsv").texts("authentic")
print(len(text), "authentic sentences, e.g.:", " ".join(text[0]))

k = 4
samples = build_tuning_samples(text, k, count=len(text), seed=0)
print("\none tuning sample:\n ", " ".join(samples[0]))

model = train_lm(samples)  # order 3, lambdas 0.1 / 0.3 / 0.6
print("\n", model)

# how many distinct ordered prompts could we build?
print("\ndistinct prompts for k=%d: %d" % (k, permutation_count(len(text), k)))

prompt = build_generation_prompt(text, k, seed=0, index=0)
print("\nprompt:", " ".join(prompt))
cont = sample_continuation(model, prompt, max_new=40, temperature=1.0, rng_seed=(0, 0))
print("continuation:", " ".join(cont))

# cross-entropy in nats per token: low on in-domain text, high elsewhere
print("\nH(authentic sentence) = %.3f" % cross_entropy(model, text[1]))
print("H(off-domain sentence) = %.3f" % cross_entropy(model, "der film war lang und laut".split()))

# temperature reshapes p into p^(1/T); below 1 the top token takes more mass
for T in (0.3, 1.0, 1.5):
    d = next_token_distribution(model, prompt, T)
    top = model.vocab[int(d.argmax())]
    print("T=%.1f: next token %r with p=%.3f" % (T, top, d.max()))
