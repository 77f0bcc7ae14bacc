"""Exception hierarchy shared across the toolkit.

Every data-level failure raises a subclass of :class:`AlignQcError` so callers
(and the CLI) can distinguish bad data (exit code 2) from usage errors.
"""


class AlignQcError(Exception):
    """Base class for all toolkit errors."""


# corpus parsing / writing

class MissingFile(AlignQcError):
    """A required corpus file does not exist."""


class LineCountMismatch(AlignQcError):
    """Segment list and parallel text files disagree on entry count."""


class MalformedEntry(AlignQcError):
    """A segment entry is missing a key or has an unparseable value."""


class IoFailure(AlignQcError):
    """Writing a corpus to disk failed."""


class NTooLarge(AlignQcError):
    """Requested sample size exceeds the corpus size."""


class UnknownId(AlignQcError):
    """A patch refers to an utterance id not present in the manifest."""


# audio

class UnsupportedFormat(AlignQcError):
    """WAV file is not mono PCM16 / IEEE-float32."""


class CorruptHeader(AlignQcError):
    """WAV file is not a well-formed RIFF/WAVE container."""


class EmptyWindow(AlignQcError):
    """Requested cut window lies entirely outside the audio file."""


# emission files

class BadMagic(AlignQcError):
    """Emission file does not start with the expected magic bytes."""


class DimensionOverflow(AlignQcError):
    """Emission header declares dimensions outside the supported range."""


class TruncatedFile(AlignQcError):
    """Emission file is shorter than its header claims."""


class CharNotInVocab(AlignQcError):
    """A transcript character has no token in the vocabulary."""


# detection

class EmptyNormalizedTranscript(AlignQcError):
    """Transcript normalizes to the empty string and cannot be checked."""


# curation

class VerdictCoverageMismatch(AlignQcError):
    """Verdicts do not cover the manifest ids exactly once."""


class LabelCoverageMismatch(AlignQcError):
    """Ground-truth labels do not cover the manifest ids."""


class InfeasibleAlignment(AlignQcError):
    """Boundary fixing requires a feasible, non-empty alignment."""


# metrics

class LengthMismatch(AlignQcError):
    """Hypothesis and reference streams have different lengths."""
