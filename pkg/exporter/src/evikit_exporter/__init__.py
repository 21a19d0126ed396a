"""Attribution exporter: checkpoint inference to evikit exchange records."""

from .export import ExportSummary, export, load_checkpoint, new_checkpoint, save_checkpoint
from .model import CoderConfig, TinyCoder, pool_to_words
from .tokenizer import AlignmentError, HashPieceTokenizer

__all__ = [
    "AlignmentError",
    "CoderConfig",
    "ExportSummary",
    "HashPieceTokenizer",
    "TinyCoder",
    "export",
    "load_checkpoint",
    "new_checkpoint",
    "pool_to_words",
    "save_checkpoint",
]
