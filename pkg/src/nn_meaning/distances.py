"""The three distance functions under study and their batch scan kernel.

All kernels accumulate in float64 even though storage is float32: mean
distances over 10^6 terms need the headroom. Vectorized reductions may
reassociate sums within a row, so batch results are guaranteed to match the
scalar ``distance()`` reference only to 1e-6 relative; entries in the
cancellation-prone near-zero band are recomputed with the scalar formula so
exact duplicates still come out as exactly 0.
"""

from __future__ import annotations

from enum import Enum
from typing import Iterator

import numpy as np

from .dataset import VectorDataset
from .errors import ZeroNormError


class DistanceKind(str, Enum):
    L1 = "l1"
    L2 = "l2"
    ANGULAR = "angular"

    def __str__(self) -> str:  # serialized form in flags and report rows
        return self.value


def parse_kind(value) -> DistanceKind:
    if isinstance(value, DistanceKind):
        return value
    try:
        return DistanceKind(str(value).lower())
    except ValueError:
        raise ValueError(
            f"unknown distance kind {value!r}, expected l1 | l2 | angular"
        ) from None


# squared distances below BAND * (|x|^2 + |q|^2) are recomputed with the scalar
# formula; the norm-expansion trick loses all precision in that band
_L2_BAND = 1e-4
# 1 - cos below this is recomputed for the same reason
_ANGULAR_BAND = 1e-8


def distance(kind: DistanceKind, u, v) -> float:
    """Scalar reference distance between two vectors."""
    kind = parse_kind(kind)
    u = np.asarray(u, dtype=np.float64).ravel()
    v = np.asarray(v, dtype=np.float64).ravel()
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape[0]} vs {v.shape[0]}")
    if kind is DistanceKind.L1:
        return float(np.abs(u - v).sum())
    if kind is DistanceKind.L2:
        d = u - v
        return float(np.sqrt(np.dot(d, d)))
    su = float(np.dot(u, u))
    sv = float(np.dot(v, v))
    if su == 0.0:
        raise ZeroNormError("vector")
    if sv == 0.0:
        raise ZeroNormError("vector")
    cos = float(np.dot(u, v)) / float(np.sqrt(su * sv))
    cos = min(1.0, max(-1.0, cos))
    return 1.0 - cos


def _angular_pair(x64: np.ndarray, q64: np.ndarray, sx: float, sq: float) -> float:
    cos = float(np.dot(x64, q64)) / float(np.sqrt(sx * sq))
    cos = min(1.0, max(-1.0, cos))
    return 1.0 - cos


def _row_chunk(dim: int, kind: DistanceKind) -> int:
    # fixed function of (dim, kind) only, so scans are reproducible regardless
    # of worker count; L1 streams row chunks once per query and wants them
    # cache-resident, the GEMM paths want larger panels
    target = 4 * 2**20 if kind is DistanceKind.L1 else 64 * 2**20
    return max(256, target // (8 * dim))


class ScanKernel:
    """Chunked exact-distance computation between a dataset and query blocks.

    Instances are immutable after construction and safe to use from multiple
    threads; every method is a pure function of its arguments.
    """

    def __init__(self, ds: VectorDataset, kind: DistanceKind):
        self.kind = parse_kind(kind)
        self.X = ds.data
        self.n, self.dim = ds.data.shape
        self.row_chunk = _row_chunk(self.dim, self.kind)
        if self.kind is DistanceKind.L1:
            self.sqnorms = None
        else:
            sq = np.empty(self.n, dtype=np.float64)
            for s in range(0, self.n, self.row_chunk):
                c = self.X[s : s + self.row_chunk].astype(np.float64)
                sq[s : s + c.shape[0]] = np.einsum("ij,ij->i", c, c)
            self.sqnorms = sq
            if self.kind is DistanceKind.ANGULAR:
                zero = np.nonzero(sq == 0.0)[0]
                if zero.size:
                    raise ZeroNormError("dataset row", int(zero[0]))

    def query_sqnorms(self, q64: np.ndarray) -> np.ndarray:
        sq = np.einsum("ij,ij->i", q64, q64)
        if self.kind is DistanceKind.ANGULAR:
            zero = np.nonzero(sq == 0.0)[0]
            if zero.size:
                raise ZeroNormError("query", int(zero[0]))
        return sq

    def chunks(self, Q: np.ndarray) -> Iterator[tuple[int, np.ndarray]]:
        """Yield (row offset, distances) with distances shaped (chunk rows, len(Q)).

        Q is an (b, dim) query block; chunks cover rows 0..n-1 in ascending order.
        """
        if Q.ndim != 2 or Q.shape[1] != self.dim:
            raise ValueError(f"query block must be (b, {self.dim}), got {Q.shape}")
        q64 = Q.astype(np.float64)
        qsq = None if self.kind is DistanceKind.L1 else self.query_sqnorms(q64)
        for s in range(0, self.n, self.row_chunk):
            c64 = self.X[s : s + self.row_chunk].astype(np.float64)
            if self.kind is DistanceKind.L1:
                D = self._l1_chunk(c64, q64)
            elif self.kind is DistanceKind.L2:
                D = self._l2_chunk(c64, q64, self.sqnorms[s : s + c64.shape[0]], qsq)
            else:
                D = self._angular_chunk(c64, q64, self.sqnorms[s : s + c64.shape[0]], qsq)
            yield s, D

    def _l1_chunk(self, c64, q64):
        D = np.empty((c64.shape[0], q64.shape[0]), dtype=np.float64)
        buf = np.empty_like(c64)
        for j in range(q64.shape[0]):
            np.subtract(c64, q64[j], out=buf)
            np.abs(buf, out=buf)
            D[:, j] = buf.sum(axis=1)
        return D

    def _l2_chunk(self, c64, q64, csq, qsq):
        D2 = csq[:, None] + qsq[None, :]
        scale = D2.copy()
        D2 -= 2.0 * (c64 @ q64.T)
        np.maximum(D2, 0.0, out=D2)
        near = np.argwhere(D2 <= _L2_BAND * scale)
        for i, j in near:
            diff = c64[i] - q64[j]
            D2[i, j] = float(np.dot(diff, diff))
        return np.sqrt(D2, out=D2)

    def _angular_chunk(self, c64, q64, csq, qsq):
        cos = c64 @ q64.T
        cos /= np.sqrt(csq[:, None] * qsq[None, :])
        np.clip(cos, -1.0, 1.0, out=cos)
        D = 1.0 - cos
        near = np.argwhere(D <= _ANGULAR_BAND)
        for i, j in near:
            D[i, j] = _angular_pair(c64[i], q64[j], csq[i], qsq[j])
        return D


def scan_distances(
    kind: DistanceKind,
    ds: VectorDataset,
    q,
    exclude: int | None = None,
) -> Iterator[tuple[int, float]]:
    """Stream (row id, distance) for one query over all rows, ascending by id.

    Yields n pairs, or n-1 when ``exclude`` names the query's own row.
    """
    q = np.asarray(q, dtype=np.float32).ravel()
    if q.shape[0] != ds.dim:
        raise ValueError(f"query dim {q.shape[0]} does not match dataset dim {ds.dim}")
    kernel = ScanKernel(ds, kind)
    Q = q.reshape(1, -1)
    for s, D in kernel.chunks(Q):
        col = D[:, 0]
        for i in range(col.shape[0]):
            row = s + i
            if exclude is not None and row == exclude:
                continue
            yield row, float(col[i])
