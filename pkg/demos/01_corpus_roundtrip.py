"""Build a tiny corpus on disk, parse it back, sample a subset, patch a line.

Run from the repo root: python demos/01_corpus_roundtrip.py
"""

import tempfile
from pathlib import Path

from alignqc import Patch, apply_patch, parse_mustc, sample_subset, write_manifest

work = Path(tempfile.mkdtemp(prefix="alignqc-demo-"))
txt = work / "txt"
txt.mkdir()

# the on-disk shape: a yaml segment list parallel to two text files
(txt / "dev.yaml").write_text(
    "- {duration: 3.5, offset: 17.2, wav: ted_1.wav, speaker_id: spk.1}\n"
    "- {duration: 2.8, offset: 21.1, wav: ted_1.wav, speaker_id: spk.1}\n"
    "- {duration: 4.1, offset: 25.0, wav: ted_1.wav, speaker_id: spk.1}\n"
    "- {duration: 3.0, offset: 30.2, wav: ted_2.wav, speaker_id: spk.2}\n",
    encoding="utf-8",
)
(txt / "dev.en").write_text(
    "That's what we were looking forward to.\n"
    "This union, this convergence.\n"
    "And so one of the consequences of that.\n"
    "They will share more and more in common.\n",
    encoding="utf-8",
)
(txt / "dev.de").write_text(
    "Danach sehnen wir uns.\n"
    "Diese Einheit, diese Konvergenz.\n"
    "Eine Konsequenz davon ist.\n"
    "Sie werden mehr und mehr gemeinsam haben.\n",
    encoding="utf-8",
)

manifest = parse_mustc(work, "dev")
print(f"parsed {len(manifest)} utterances:")
for utt in manifest:
    print(f"  {utt.id:10s} [{utt.offset_s:5.1f}s +{utt.duration_s:.1f}s] {utt.transcript}")

# ids are synthesized from the wav stem and line index, and written back out
# explicitly so they survive sampling
subset = sample_subset(manifest, n=2, seed=12345)
print(f"\nseeded 2-of-{len(manifest)} sample: {subset.ids()}")
print("same seed again:               ", sample_subset(manifest, 2, 12345).ids())

# fix one translation without touching anything else
patch = Patch({manifest.ids()[0]: {"translation": "Darauf haben wir uns gefreut."}})
patched = apply_patch(manifest, patch)
print(f"\npatched translation: {patched.utterances[0].translation}")

out = work / "patched"
write_manifest(patched, out)
again = parse_mustc(out, "dev")
print(f"write -> parse round-trip identical: {again == patched}")
print(f"\nfiles under {out}/txt/")
