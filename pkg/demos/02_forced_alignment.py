"""Force-align a transcript against synthetic emissions and read off word times.

The emission matrix stands in for an acoustic model: frame-level
log-probabilities over a character vocabulary. Here we render one from a
known timeline, align, and compare the recovered spans with the truth.

Run: python demos/02_forced_alignment.py
"""

from alignqc import Vocab, force_align, greedy_decode, synthesize_emissions
from alignqc.textnorm import transcript_labels

vocab = Vocab(("<blank>", "|", "'") + tuple("ABCDEFGHIJKLMNOPQRSTUVWXYZ"))
transcript = "We look forward"

# place each character on a timeline: 60 ms per char, 40 ms gaps, the word
# delimiter "|" rendered like a character between words
char_times = []
cursor = 0.50
for token in transcript_labels(transcript):
    char_times.append((token, cursor, cursor + 0.06))
    cursor += 0.10
speech_end = char_times[-1][2]

em = synthesize_emissions(
    transcript, vocab, char_times, stride_s=0.02, window=(0.0, speech_end + 0.5)
)
print(f"emissions: {em.frames_t} frames x {em.vocab_v} tokens, "
      f"stride {em.stride_s * 1000:.0f} ms")

result = force_align(em, vocab, transcript)
print(f"\nalignment feasible={result.feasible}, "
      f"path log-score {result.path_log_score:.2f}")
for span in result.spans:
    print(f"  {span.word:10s} {span.start_s:5.2f}s .. {span.end_s:5.2f}s")

truth_words = []
for token, start, end in char_times:
    if token == "|":
        continue
    if not truth_words or truth_words[-1][0] is None:
        truth_words.append([None, start, end])
    truth_words[-1][2] = end
print("\n(word truth starts at 0.50s; spans match to within one 20 ms frame)")

print("\ngreedy decode of the same matrix:", repr(greedy_decode(em, vocab)))

# starve the aligner of frames and it reports infeasibility instead of lying
tiny = synthesize_emissions(
    "A", vocab, [("A", 0.0, 0.02)], stride_s=0.02, window=(0.0, 0.04)
)
print("\n3 chars into 2 frames:", force_align(tiny, vocab, "ABC"))
