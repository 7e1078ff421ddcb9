"""Writers and readers for the profiler's on-disk formats.

Implemented against the documented schemas, not against the profiler's code:
``<prefix>.json`` header with {name, dim, count, dtype:"f32", source,
checksum: crc32 hex of the blob}, ``<prefix>.f32`` raw little-endian float32
row-major blob, ``<prefix>.payload`` UTF-8 line-delimited records aligned to
rows. fvecs input: per record an int32 dimension then that many float32s,
all little-endian.
"""

from __future__ import annotations

import json
import zlib
from pathlib import Path

import numpy as np


class FormatError(ValueError):
    pass


def _crc32_hex(blob: bytes) -> str:
    return f"{zlib.crc32(blob) & 0xFFFFFFFF:08x}"


def write_native(
    vectors: np.ndarray,
    prefix: str | Path,
    name: str,
    source: str = "ingested",
    payloads: list[str] | None = None,
    meta: dict | None = None,
) -> Path:
    """Write header + blob (+ payload sidecar) for an (n, dim) float32 matrix."""
    arr = np.ascontiguousarray(vectors, dtype="<f4")
    if arr.ndim != 2 or arr.shape[0] < 1:
        raise FormatError(f"expected a non-empty (n, dim) matrix, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise FormatError("vectors contain NaN or Inf")
    prefix = Path(prefix)
    if prefix.suffix in (".json", ".f32", ".payload"):
        prefix = prefix.with_suffix("")
    prefix.parent.mkdir(parents=True, exist_ok=True)
    blob = arr.tobytes()
    header = {
        "name": name,
        "dim": arr.shape[1],
        "count": arr.shape[0],
        "dtype": "f32",
        "source": source,
        "checksum": _crc32_hex(blob),
    }
    if meta:
        header["meta"] = meta
    prefix.with_suffix(".f32").write_bytes(blob)
    prefix.with_suffix(".json").write_text(json.dumps(header, indent=2) + "\n", encoding="utf-8")
    if payloads is not None:
        if len(payloads) != arr.shape[0]:
            raise FormatError(f"{len(payloads)} payload records for {arr.shape[0]} vectors")
        with open(prefix.with_suffix(".payload"), "w", encoding="utf-8") as f:
            for record in payloads:
                f.write(record.replace("\n", " ") + "\n")
    return prefix


def read_fvecs(path: str | Path) -> np.ndarray:
    path = Path(path)
    raw = np.fromfile(path, dtype=np.uint8)
    if raw.size < 4:
        raise FormatError(f"{path}: file too short for a record header")
    dim = int(raw[:4].copy().view("<i4")[0])
    if dim < 1:
        raise FormatError(f"{path}: implausible record dimension {dim}")
    rec = 4 + 4 * dim
    if raw.size % rec != 0:
        raise FormatError(f"{path}: size {raw.size} is not a multiple of {rec}-byte records")
    table = raw.reshape(-1, rec)
    dims = table[:, :4].copy().view("<i4").ravel()
    if not np.all(dims == dim):
        bad = int(np.nonzero(dims != dim)[0][0])
        raise FormatError(f"{path}: record {bad} declares dim {int(dims[bad])}, expected {dim}")
    return table[:, 4:].copy().view("<f4").reshape(-1, dim)
