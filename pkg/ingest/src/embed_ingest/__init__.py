"""Convert text corpora and fvecs files into the nn-meaning native vector format."""

from .ingest import IngestConfig, convert_fvecs_to_native, encode_corpus
from .models import HashingEncoder, ModelLoadError, resolve_model
from .native import FormatError, read_fvecs, write_native

__version__ = "0.1.0"
