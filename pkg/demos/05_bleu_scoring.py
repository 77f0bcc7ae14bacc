"""Sentence and corpus BLEU with the 13a tokenizer, plus a paired bootstrap.

The point of carrying a scorer inside a corpus-QC toolkit: when a reference
translation is wrong, the metric punishes a good hypothesis. Swapping in a
corrected reference shows how much score the noise was hiding.

Run: python demos/05_bleu_scoring.py
"""

from alignqc import bootstrap_ci, corpus_bleu, sentence_bleu, tokenize_13a

hypothesis = "Der Redner sagte, dass wir heute in einer sehr ruhigen Zeit leben."
sloppy_ref = "Der Sprecher meinte, es sei gerade ziemlich ruhig."
better_ref = "Der Redner sagte, dass wir heute in einer sehr ruhigen Zeit leben würden."

for name, ref in (("sloppy reference", sloppy_ref), ("corrected reference", better_ref)):
    score = sentence_bleu(hypothesis, ref)
    precisions = "/".join(f"{p:.1f}" for p in score.precisions)
    print(f"{name:20s} BLEU = {score.score:5.1f}   "
          f"(precisions {precisions}, BP {score.brevity_penalty:.3f})")

print("\n13a tokenization keeps decimal numbers together and splits punctuation:")
print("  ", tokenize_13a('Es kostet 3.5 Euro, nicht "4"!'))

hyps = [
    "Die Katze sitzt auf der Matte .",
    "Ein Hund läuft durch den Park .",
    "Wir essen heute Abend zusammen .",
    "Das Wetter ist heute sehr schön .",
]
refs = [
    "Die Katze sitzt auf der Matte .",
    "Ein Hund rennt durch den Park .",
    "Wir essen heute Abend gemeinsam .",
    "Das Wetter ist heute wirklich schön .",
]
corpus = corpus_bleu(hyps, refs)
print(f"\ncorpus BLEU over {len(hyps)} segments: {corpus.score:.1f}")
print(f"signature: {corpus.signature}")

mean, ci95 = bootstrap_ci(hyps, refs, resamples=1000, seed=12345)
print(f"paired bootstrap (1000 resamples, seed 12345): "
      f"mean {mean:.1f} +- {ci95:.1f}")
