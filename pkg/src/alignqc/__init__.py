"""Quality control for speech-translation corpora.

The toolkit detects audio-text misalignment with CTC forced alignment and
ASR-decode discrepancy, filters or re-times corpora accordingly, manages
fixed test-set variants, and scores translations with a signature-compatible
BLEU implementation.
"""

__version__ = "0.1.0"

from .corpus import CorpusManifest, Patch, Utterance, apply_patch, parse_mustc, sample_subset, write_manifest
from .ctc import AlignmentResult, WordSpan, force_align, greedy_decode, normalize_text
from .curation import (
    CalibrationReport,
    CalibrationRow,
    calibrate,
    corrupt_corpus,
    filter_corpus,
    fix_boundaries,
)
from .detector import (
    DetectorConfig,
    Verdict,
    VerdictError,
    detect_corpus,
    detect_speaker_name,
    detect_utterance,
    speaker_name_rate,
)
from .emission import EmissionMatrix, Vocab, load_emission, save_emission, synthesize_emissions
from .metrics import BleuScore, bootstrap_ci, corpus_bleu, levenshtein, sentence_bleu, tokenize_13a
from .providers import (
    DirectoryEmissionProvider,
    SyntheticEmissionProvider,
    build_synthetic_corpus,
)

__all__ = [
    "AlignmentResult",
    "BleuScore",
    "CalibrationReport",
    "CalibrationRow",
    "CorpusManifest",
    "DetectorConfig",
    "DirectoryEmissionProvider",
    "EmissionMatrix",
    "Patch",
    "SyntheticEmissionProvider",
    "Utterance",
    "Verdict",
    "VerdictError",
    "Vocab",
    "WordSpan",
    "apply_patch",
    "bootstrap_ci",
    "build_synthetic_corpus",
    "calibrate",
    "corpus_bleu",
    "corrupt_corpus",
    "detect_corpus",
    "detect_speaker_name",
    "detect_utterance",
    "filter_corpus",
    "fix_boundaries",
    "force_align",
    "greedy_decode",
    "levenshtein",
    "load_emission",
    "normalize_text",
    "parse_mustc",
    "sample_subset",
    "save_emission",
    "sentence_bleu",
    "speaker_name_rate",
    "synthesize_emissions",
    "tokenize_13a",
    "write_manifest",
]
