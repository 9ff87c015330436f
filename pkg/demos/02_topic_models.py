"""
Bengali text preparation and topic modelling
============================================

Tokenizes the sample corpus, picks a topic count by coherence, fits the
collapsed Gibbs sampler, and prints what each topic is about.
"""

from pathlib import Path

from newsmonitor.corpus import default_gazetteer, load_corpus
from newsmonitor.textprep import load_prep_config, prepare_corpus
from newsmonitor.topics import (LdaConfig, fit_lda, sweep_k, top_words,
                                umass_coherence)

SAMPLE = Path(__file__).resolve().parents[1] / "src" / "newsmonitor" / \
    "resources" / "mini_corpus.jsonl"

corpus = load_corpus(SAMPLE)

# Preparation: strip markup and digits, normalize Bengali codepoints, drop
# stopwords, peel common suffixes, and keep words with enough letters.
# The bundled resource files drive all of it; pass resource_dir to swap in
# your own lists.
config = load_prep_config(min_letters=3)
prepared = prepare_corpus(corpus, config, gazetteer=default_gazetteer())
vocab = prepared.vocab
print(f"{len(prepared.docs)} documents, vocabulary of {len(vocab)} words")

sample_doc = prepared.docs[0]
print(f"first document tokens: "
      f"{[vocab.id_to_word[i] for i in sample_doc.token_ids[:8]]} ...")

# Which K fits best? Fit a few and compare UMass coherence on the corpus
# itself (higher is better). Perplexity is reported alongside as a sanity
# check; the chooser goes by coherence alone.
template = LdaConfig(n_topics=2, iterations=150, burn_in=50, seed=11)
report = sweep_k(prepared.docs, [3, 5, 7], template)
for k, coh, perp in zip(report.ks, report.coherences,
                        report.log_perplexities):
    marker = " <- chosen" if k == report.chosen_k else ""
    print(f"  K={k}: coherence {coh:7.3f}, log perplexity {perp:6.3f}{marker}")

# Fit the final model at the chosen K. Same seed -> same model, bit for bit.
lda_cfg = LdaConfig(n_topics=report.chosen_k, iterations=300, burn_in=100,
                    seed=11)
model = fit_lda(prepared.docs, lda_cfg, n_words=len(vocab),
                vocab_hash=vocab.content_hash())

per_topic, mean_coh = umass_coherence(model, prepared.docs, top_m=8)
print(f"\nfitted K={model.n_topics}, mean coherence {mean_coh:.3f}")
for t, ranked in enumerate(top_words(model, m=8)):
    words = ", ".join(vocab.id_to_word[w] for w, _ in ranked)
    share = model.n_k[t] / model.n_k.sum()
    print(f"  topic {t} ({share:5.1%} of tokens, "
          f"coherence {per_topic[t]:6.2f}): {words}")

# theta rows are per-document topic mixtures; useful for routing articles.
import numpy as np
doc0 = model.theta[0]
print(f"\nfirst document mixture: {np.round(doc0, 3)} "
      f"(top topic {int(doc0.argmax())})")
