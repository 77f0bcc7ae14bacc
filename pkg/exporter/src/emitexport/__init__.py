"""Run a pretrained character-level ASR model over a segment corpus and write
frame-level log-probability matrices in the "EMIT" file format, one pair of
files (original window, expanded window) per utterance plus a shared
vocabulary sidecar. The consumer side of that format lives in the alignqc
package; the two only meet at the files.
"""

__version__ = "0.1.0"

from .errors import AudioMissing, ModelLoadFailure
from .export import ExportJob, export

__all__ = ["AudioMissing", "ExportJob", "ModelLoadFailure", "export"]
