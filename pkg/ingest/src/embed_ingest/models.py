"""Encoder resolution.

A model identifier is a free string resolved by this environment:

* ``hash:<dim>`` selects the built-in deterministic feature-hashing encoder.
  It needs no downloads, which makes it the offline smoke-test model; it is
  not a semantic embedding.
* anything else is treated as a sentence-transformers model name and loaded
  lazily, so nothing here depends on that library unless such a model is
  actually requested.
"""

from __future__ import annotations

import hashlib
import logging
import re

import numpy as np

log = logging.getLogger("embed_ingest")

_HASH_ID = re.compile(r"^hash:(\d+)$")
_TOKEN = re.compile(r"[a-z0-9]+")


class ModelLoadError(RuntimeError):
    pass


class HashingEncoder:
    """Deterministic bag-of-tokens feature hashing; one vector per text."""

    def __init__(self, dim: int):
        if dim < 1:
            raise ValueError("hash encoder dimension must be positive")
        self.dim = dim
        self.max_input_tokens = None  # unbounded, nothing gets truncated

    def encode(self, texts: list[str]) -> np.ndarray:
        out = np.zeros((len(texts), self.dim), dtype=np.float32)
        for row, text in enumerate(texts):
            tokens = _TOKEN.findall(text.lower()) or [text.strip()]
            for tok in tokens:
                digest = hashlib.blake2b(tok.encode("utf-8"), digest_size=8).digest()
                value = int.from_bytes(digest, "little")
                bucket = value % self.dim
                sign = 1.0 if (value >> 63) & 1 else -1.0
                out[row, bucket] += sign
        return out


class SentenceTransformerEncoder:
    """Wrapper over a sentence-transformers model in deterministic eval mode."""

    def __init__(self, model_id: str):
        try:
            from sentence_transformers import SentenceTransformer
        except ImportError as e:
            raise ModelLoadError(
                f"model {model_id!r} needs the sentence-transformers package "
                f"(pip install 'embed-ingest[models]')"
            ) from e
        try:
            self.model = SentenceTransformer(model_id)
        except Exception as e:
            raise ModelLoadError(f"could not load model {model_id!r}: {e}") from e
        self.dim = int(self.model.get_sentence_embedding_dimension())
        self.max_input_tokens = getattr(self.model, "max_seq_length", None)

    def count_truncated(self, texts: list[str]) -> int:
        limit = self.max_input_tokens
        tokenizer = getattr(self.model, "tokenizer", None)
        if not limit or tokenizer is None:
            return 0
        over = 0
        for text in texts:
            try:
                n_tokens = len(tokenizer(text, truncation=False)["input_ids"])
            except Exception:
                return 0
            if n_tokens > limit:
                over += 1
        return over

    def encode(self, texts: list[str]) -> np.ndarray:
        vecs = self.model.encode(
            texts, convert_to_numpy=True, normalize_embeddings=False, show_progress_bar=False
        )
        return np.asarray(vecs, dtype=np.float32)


def resolve_model(model_id: str):
    """Encoder for the identifier; output dimension is taken from the model."""
    match = _HASH_ID.match(model_id)
    if match:
        return HashingEncoder(int(match.group(1)))
    return SentenceTransformerEncoder(model_id)
