"""The core loop: plant misalignment in a corpus, detect it, filter and fix.

A synthetic corpus gives us ground truth: we know where every word really
sits in its virtual audio file. Corruption shifts some declared windows by
0.5 to 1.0 seconds; the detector has to find exactly those utterances from
the emissions alone.

Run: python demos/03_detect_and_filter.py
"""

from alignqc import (
    DetectorConfig,
    SyntheticEmissionProvider,
    Verdict,
    build_synthetic_corpus,
    corrupt_corpus,
    detect_corpus,
    filter_corpus,
    fix_boundaries,
    force_align,
)
from alignqc.providers import DEFAULT_VOCAB

manifest, truths = build_synthetic_corpus(120, seed=42)
durations = {u.audio_path: truths[u.id].file_duration_s for u in manifest}

corrupted, labels = corrupt_corpus(
    manifest, fraction=0.1, shift_range_s=(0.5, 1.0), seed=7, file_durations=durations
)
planted = {uid for uid, bad in labels.items() if bad}
print(f"corpus: {len(corrupted)} utterances, {len(planted)} windows shifted")

provider = SyntheticEmissionProvider(truths, noise_eps=0.0)
verdicts = detect_corpus(corrupted, provider, DEFAULT_VOCAB, DetectorConfig(), workers=4)

flagged = {v.utterance_id for v in verdicts if isinstance(v, Verdict) and v.flagged}
print(f"detector flagged {len(flagged)}; "
      f"exact match with planted set: {flagged == planted}")

for v in verdicts:
    if isinstance(v, Verdict) and v.flagged:
        print(f"  {v.utterance_id:10s} reasons={','.join(v.reasons)} "
              f"overrun=({v.overrun_start_s:.2f}, {v.overrun_end_s:.2f})s "
              f"edit_ratio={v.edit_ratio_observed:.2f}")

clean, removed = filter_corpus(corrupted, verdicts)
print(f"\nfiltered: kept {len(clean)}, removed {len(removed)}")

# instead of dropping, test sets get their time ranges repaired
print("\nboundary fixes (first three flagged):")
shown = 0
for utt in corrupted:
    if utt.id not in flagged or shown >= 3:
        continue
    shown += 1
    truth = truths[utt.id]
    _, em_exp = provider.emissions_for(utt)
    alignment = force_align(em_exp, DEFAULT_VOCAB, utt.transcript)
    fixed = fix_boundaries(utt, alignment, pad_s=0.15,
                           file_duration_s=truth.file_duration_s)
    print(f"  {utt.id}: declared {utt.offset_s:.2f}s, "
          f"true {truth.true_offset_s:.2f}s, fixed {fixed.offset_s:.2f}s")
