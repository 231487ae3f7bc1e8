"""Extract per-head transformer attention into ATND files."""

from .extract import ExtractedSentence, Extractor
from .writer import write_atnd

__all__ = ["ExtractedSentence", "Extractor", "write_atnd"]
__version__ = "0.1.0"
