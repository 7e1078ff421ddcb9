"""Corpus encoding and fvecs conversion into the profiler's native format."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .models import resolve_model
from .native import FormatError, read_fvecs, write_native

log = logging.getLogger("embed_ingest")


@dataclass(frozen=True)
class IngestConfig:
    corpus: str | Path
    model: str
    out: str | Path
    batch_size: int = 64
    max_records: int | None = None
    normalize: bool = False

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError("batch size must be at least 1")
        if self.max_records is not None and self.max_records < 1:
            raise ValueError("max_records must be at least 1")


def _read_corpus(path: str | Path, max_records: int | None) -> list[str]:
    with open(path, encoding="utf-8") as f:
        lines = f.read().splitlines()
    if max_records is not None:
        lines = lines[:max_records]
    if not lines:
        raise ValueError(f"{path}: corpus is empty")
    for i, line in enumerate(lines):
        if not line.strip():
            raise ValueError(f"{path}: record {i} is empty after trimming")
    return lines


def encode_corpus(cfg: IngestConfig) -> Path:
    """Encode one vector per corpus line, in corpus order; returns the output prefix.

    Emits ``<prefix>.json``, ``<prefix>.f32`` and a ``<prefix>.payload`` sidecar
    whose line i is exactly input record i.
    """
    records = _read_corpus(cfg.corpus, cfg.max_records)
    encoder = resolve_model(cfg.model)
    batches = []
    for start in range(0, len(records), cfg.batch_size):
        batch = encoder.encode(records[start : start + cfg.batch_size])
        if batch.ndim != 2 or batch.shape[0] != len(records[start : start + cfg.batch_size]):
            raise FormatError(f"encoder returned shape {batch.shape} for batch at {start}")
        if batch.shape[1] != encoder.dim:
            raise FormatError(
                f"dimension changed mid-run: batch at {start} has dim {batch.shape[1]}, "
                f"model declares {encoder.dim}"
            )
        batches.append(np.asarray(batch, dtype=np.float32))
    vectors = np.vstack(batches)
    if cfg.normalize:
        norms = np.linalg.norm(vectors, axis=1, keepdims=True)
        zero = np.nonzero(norms.ravel() == 0.0)[0]
        if zero.size:
            raise ValueError(f"cannot normalize zero vector for record {int(zero[0])}")
        vectors = vectors / norms
    truncated = 0
    if hasattr(encoder, "count_truncated"):
        truncated = encoder.count_truncated(records)
    if truncated:
        log.warning("%d records exceed the model's max input tokens and were truncated", truncated)
    meta = {
        "model": cfg.model,
        "normalize": cfg.normalize,
        "truncated_records": truncated,
    }
    prefix = write_native(
        vectors,
        cfg.out,
        name=Path(cfg.corpus).stem,
        source="ingested",
        payloads=records,
        meta=meta,
    )
    log.info("encoded %d records at dim %d -> %s", len(records), encoder.dim, prefix)
    return prefix


def convert_fvecs_to_native(path_in: str | Path, path_out: str | Path) -> Path:
    """Re-encode an fvecs file as a native dataset with identical values."""
    vectors = read_fvecs(path_in)
    return write_native(
        vectors,
        path_out,
        name=Path(path_in).stem,
        source="ingested",
        meta={"converted_from": str(path_in)},
    )
