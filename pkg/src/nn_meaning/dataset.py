"""Vector dataset container, binary vector file I/O, query sampling, payload sidecars.

On-disk native format: ``<prefix>.json`` header + ``<prefix>.f32`` raw
little-endian float32 blob (row-major), plus an optional ``<prefix>.payload``
UTF-8 line-delimited sidecar aligned by position to dataset rows.
"""

from __future__ import annotations

import json
import zlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DatasetFormatError

SOURCES = ("synthetic", "fvecs", "native", "ingested")

# sanity bound on the per-record dimension prefix of fvecs/bvecs files;
# a corrupt prefix otherwise triggers absurd allocations
_MAX_DIM = 1_000_000


@dataclass(frozen=True, eq=False)
class VectorDataset:
    """Immutable row-major matrix of float32 vectors plus header metadata."""

    name: str
    data: np.ndarray
    source: str = "native"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        arr = np.ascontiguousarray(self.data, dtype=np.float32)
        if arr.ndim != 2:
            raise ValueError(f"data must be a 2-d (count, dim) array, got ndim={arr.ndim}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"dataset must be non-empty, got shape {arr.shape}")
        if self.source not in SOURCES:
            raise ValueError(f"unknown source {self.source!r}, expected one of {SOURCES}")
        if not np.isfinite(arr).all():
            raise DatasetFormatError(f"dataset {self.name!r} contains NaN or Inf values")
        if arr is self.data:
            arr = arr.view()
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)

    @property
    def count(self) -> int:
        return self.data.shape[0]

    @property
    def dim(self) -> int:
        return self.data.shape[1]

    def __repr__(self) -> str:
        return (
            f"VectorDataset(name={self.name!r}, count={self.count}, dim={self.dim}, "
            f"source={self.source!r})"
        )


@dataclass(frozen=True)
class QuerySet:
    """Queries for a scan: either sampled dataset row ids or external vectors."""

    mode: str  # "sampled_indices" | "external_vectors"
    m: int
    seed: int = 0
    indices: np.ndarray | None = None
    vectors: np.ndarray | None = None
    exclude_self: bool = False

    def __post_init__(self):
        if self.mode not in ("sampled_indices", "external_vectors"):
            raise ValueError(f"unknown query mode {self.mode!r}")
        if self.m < 1:
            raise ValueError("query set must contain at least one query")
        if self.mode == "sampled_indices":
            if self.indices is None or len(self.indices) != self.m:
                raise ValueError("sampled query set needs m row indices")
        elif self.vectors is None or self.vectors.shape[0] != self.m:
            raise ValueError("external query set needs an (m, dim) vector matrix")


@dataclass(frozen=True)
class PayloadStore:
    """Original-space records aligned by position to dataset rows (line i <-> row i)."""

    entries: list[str]

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class DatasetHeader:
    """Native-format header; must match the accompanying data blob exactly."""

    name: str
    dim: int
    count: int
    source: str
    checksum: str
    dtype: str = "f32"
    meta: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {
            "name": self.name,
            "dim": self.dim,
            "count": self.count,
            "dtype": self.dtype,
            "source": self.source,
            "checksum": self.checksum,
        }
        if self.meta:
            out["meta"] = self.meta
        return out

    @classmethod
    def from_json(cls, obj: dict, path: str) -> "DatasetHeader":
        required = ("name", "dim", "count", "dtype", "source", "checksum")
        missing = [k for k in required if k not in obj]
        if missing:
            raise DatasetFormatError(f"{path}: header missing keys {missing}")
        if obj["dtype"] != "f32":
            raise DatasetFormatError(f"{path}: unsupported dtype {obj['dtype']!r}")
        return cls(
            name=obj["name"],
            dim=int(obj["dim"]),
            count=int(obj["count"]),
            source=obj["source"],
            checksum=obj["checksum"],
            meta=obj.get("meta", {}),
        )


def _crc32_hex(blob: bytes) -> str:
    return f"{zlib.crc32(blob) & 0xFFFFFFFF:08x}"


def _native_prefix(path: str | Path) -> Path:
    p = Path(path)
    if p.suffix in (".json", ".f32", ".payload"):
        return p.with_suffix("")
    return p


def _decode_prefixed_records(raw: np.ndarray, value_bytes: int, path: str):
    """Split a (int32 dim, dim * value_bytes payload) record stream into rows.

    Returns (n, dim, payload bytes as an (n, dim*value_bytes) uint8 matrix).
    """
    if raw.size < 4:
        raise DatasetFormatError(f"{path}: file too short for a record header")
    dim = int(raw[:4].copy().view("<i4")[0])
    if dim < 1 or dim > _MAX_DIM:
        raise DatasetFormatError(f"{path}: implausible record dimension {dim}")
    rec = 4 + dim * value_bytes
    if raw.size % rec != 0:
        raise DatasetFormatError(
            f"{path}: file size {raw.size} is not a multiple of the {rec}-byte record"
        )
    table = raw.reshape(-1, rec)
    dims = table[:, :4].copy().view("<i4").ravel()
    bad = np.nonzero(dims != dim)[0]
    if bad.size:
        i = int(bad[0])
        raise DatasetFormatError(
            f"{path}: record {i} declares dim {int(dims[i])}, expected {dim}"
        )
    return table.shape[0], dim, table[:, 4:]


def load_fvecs(path: str | Path) -> VectorDataset:
    """Load a .fvecs file: per record a little-endian int32 dim then dim float32 values."""
    p = Path(path)
    raw = np.fromfile(p, dtype=np.uint8)
    if raw.size == 0:
        raise DatasetFormatError(f"{p}: empty file")
    n, dim, payload = _decode_prefixed_records(raw, 4, str(p))
    data = payload.copy().view("<f4").reshape(n, dim)
    return VectorDataset(name=p.stem, data=data, source="fvecs")


def load_bvecs(path: str | Path) -> VectorDataset:
    """Load a .bvecs file (int32 dim then dim uint8 values); values widened to float32."""
    p = Path(path)
    raw = np.fromfile(p, dtype=np.uint8)
    if raw.size == 0:
        raise DatasetFormatError(f"{p}: empty file")
    n, dim, payload = _decode_prefixed_records(raw, 1, str(p))
    return VectorDataset(name=p.stem, data=payload.astype(np.float32), source="fvecs")


def save_native(ds: VectorDataset, path: str | Path) -> Path:
    """Write ``<prefix>.json`` + ``<prefix>.f32``; returns the prefix path."""
    prefix = _native_prefix(path)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    blob = np.ascontiguousarray(ds.data, dtype="<f4").tobytes()
    header = DatasetHeader(
        name=ds.name,
        dim=ds.dim,
        count=ds.count,
        source=ds.source,
        checksum=_crc32_hex(blob),
        meta=ds.meta,
    )
    prefix.with_suffix(".f32").write_bytes(blob)
    prefix.with_suffix(".json").write_text(
        json.dumps(header.to_json(), indent=2) + "\n", encoding="utf-8"
    )
    return prefix


def load_native(path: str | Path) -> VectorDataset:
    """Load a native dataset; verifies blob length and CRC32 against the header."""
    prefix = _native_prefix(path)
    header_path = prefix.with_suffix(".json")
    blob_path = prefix.with_suffix(".f32")
    if not header_path.exists():
        raise DatasetFormatError(f"{header_path}: header file not found")
    header = DatasetHeader.from_json(
        json.loads(header_path.read_text(encoding="utf-8")), str(header_path)
    )
    blob = blob_path.read_bytes()
    expected = header.count * header.dim * 4
    if len(blob) != expected:
        raise DatasetFormatError(
            f"{blob_path}: blob is {len(blob)} bytes, header implies {expected}"
        )
    if _crc32_hex(blob) != header.checksum:
        raise DatasetFormatError(f"{blob_path}: checksum mismatch against header")
    data = np.frombuffer(blob, dtype="<f4").reshape(header.count, header.dim)
    return VectorDataset(name=header.name, data=data, source=header.source, meta=header.meta)


def load_dataset(path: str | Path) -> VectorDataset:
    """Dispatch on extension: .fvecs / .bvecs, anything else is a native prefix."""
    p = Path(path)
    if p.suffix == ".fvecs":
        return load_fvecs(p)
    if p.suffix == ".bvecs":
        return load_bvecs(p)
    return load_native(p)


def sample_queries(ds: VectorDataset, m: int, seed: int) -> QuerySet:
    """Draw m distinct row ids uniformly without replacement, deterministic per seed.

    Sampled queries carry self-exclusion: downstream scans skip the query's own row.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    if m > ds.count:
        raise ValueError(f"cannot sample {m} queries from {ds.count} rows")
    rng = np.random.default_rng(seed)
    indices = rng.choice(ds.count, size=m, replace=False).astype(np.int64)
    return QuerySet(
        mode="sampled_indices", m=m, seed=seed, indices=indices, exclude_self=True
    )


def external_queries(vectors: np.ndarray, seed: int = 0) -> QuerySet:
    arr = np.ascontiguousarray(vectors, dtype=np.float32)
    if arr.ndim != 2:
        raise ValueError("external queries must be an (m, dim) matrix")
    return QuerySet(mode="external_vectors", m=arr.shape[0], seed=seed, vectors=arr)


def save_payloads(ps: PayloadStore, path: str | Path) -> Path:
    p = _native_prefix(path).with_suffix(".payload")
    with open(p, "w", encoding="utf-8") as f:
        for entry in ps.entries:
            f.write(entry.replace("\n", " ") + "\n")
    return p


def load_payloads(path: str | Path, expected_count: int | None = None) -> PayloadStore:
    p = Path(path)
    if p.suffix != ".payload":
        p = _native_prefix(p).with_suffix(".payload")
    with open(p, encoding="utf-8") as f:
        entries = f.read().splitlines()
    if expected_count is not None and len(entries) != expected_count:
        raise DatasetFormatError(
            f"{p}: {len(entries)} payload lines for {expected_count} dataset rows"
        )
    return PayloadStore(entries=entries)


def retrieve_payloads(ps: PayloadStore, ids) -> list[str]:
    """Fetch original-space records for row ids, in the order given."""
    out = []
    for i in ids:
        i = int(i)
        if i < 0 or i >= len(ps.entries):
            raise IndexError(f"payload id {i} out of range for {len(ps.entries)} entries")
        out.append(ps.entries[i])
    return out
