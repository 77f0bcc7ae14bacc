class ExportError(Exception):
    """Base class for exporter failures."""


class ModelLoadFailure(ExportError):
    """The acoustic model could not be loaded."""


class AudioMissing(ExportError):
    """An utterance's audio file is absent (skipped, not fatal)."""
