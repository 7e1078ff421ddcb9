"""Exact k-nearest-neighbor search and one-pass per-query distance statistics.

Work is partitioned across queries only; each query's scan is a single
sequential pass over fixed-size row chunks, so distance sums have a fixed
association order and results are bitwise identical for any worker count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .dataset import QuerySet, VectorDataset
from .distances import DistanceKind, ScanKernel, parse_kind
from .errors import ZeroNormError

QUERY_BLOCK = 64

WORKERS_ENV = "NN_MEANING_THREADS"


def resolve_workers(workers: int | None = None) -> int:
    """Requested worker count, capped by the NN_MEANING_THREADS environment variable."""
    base = workers if workers is not None else (os.cpu_count() or 1)
    cap = os.environ.get(WORKERS_ENV)
    if cap:
        try:
            base = min(base, int(cap))
        except ValueError:
            raise ValueError(f"{WORKERS_ENV} must be an integer, got {cap!r}") from None
    return max(1, base)


@dataclass(frozen=True)
class KnnResult:
    """Exact top-k neighbors of one query, distances non-decreasing, ties by row id."""

    query: int
    neighbors: list[tuple[int, float]]


@dataclass(frozen=True)
class QueryStats:
    d_min: float
    d_mean: float
    knn: KnnResult
    scanned: int


def _scan_block(
    kernel: ScanKernel,
    Qb: np.ndarray,
    k: int,
    exclude_rows: np.ndarray | None,
    query_ids: list[int],
    scanned: int,
) -> list[QueryStats]:
    b = Qb.shape[0]
    d_sum = np.zeros(b, dtype=np.float64)
    cand_ids: list[list[np.ndarray]] = [[] for _ in range(b)]
    cand_dists: list[list[np.ndarray]] = [[] for _ in range(b)]

    for off, D in kernel.chunks(Qb):
        rows = D.shape[0]
        if exclude_rows is not None:
            local = exclude_rows - off
            inside = np.nonzero((local >= 0) & (local < rows))[0]
        else:
            inside = ()
        col_sums = D.sum(axis=0)
        for j in inside:
            col_sums[j] -= D[local[j], j]
        d_sum += col_sums
        for j in inside:
            D[local[j], j] = np.inf
        if rows > k:
            kth = np.partition(D, k - 1, axis=0)[k - 1, :]
            for j in range(b):
                sel = np.nonzero(D[:, j] <= kth[j])[0]
                cand_ids[j].append(sel + off)
                cand_dists[j].append(D[sel, j])
        else:
            ids = np.arange(off, off + rows)
            for j in range(b):
                cand_ids[j].append(ids)
                cand_dists[j].append(D[:, j])

    out = []
    for j in range(b):
        ids = np.concatenate(cand_ids[j])
        dists = np.concatenate(cand_dists[j])
        order = np.lexsort((ids, dists))[:k]
        neighbors = [(int(ids[o]), float(dists[o])) for o in order]
        knn = KnnResult(query=query_ids[j], neighbors=neighbors)
        out.append(
            QueryStats(
                d_min=neighbors[0][1],
                d_mean=float(d_sum[j]) / scanned,
                knn=knn,
                scanned=scanned,
            )
        )
    return out


def knn_search(
    ds: VectorDataset,
    q,
    k: int,
    kind: DistanceKind,
    exclude: int | None = None,
    query_id: int = -1,
) -> KnnResult:
    """Exact top-k rows by distance to q; ties broken by smaller row id."""
    kind = parse_kind(kind)
    q = np.ascontiguousarray(q, dtype=np.float32).ravel()
    if q.shape[0] != ds.dim:
        raise ValueError(f"query dim {q.shape[0]} does not match dataset dim {ds.dim}")
    scanned = ds.count - (1 if exclude is not None else 0)
    if not 1 <= k <= scanned:
        raise ValueError(f"k={k} out of range for {scanned} candidates")
    kernel = ScanKernel(ds, kind)
    excl = None if exclude is None else np.asarray([exclude], dtype=np.int64)
    qid = query_id if query_id >= 0 else (exclude if exclude is not None else -1)
    stats = _scan_block(kernel, q.reshape(1, -1), k, excl, [qid], scanned)
    return stats[0].knn


def query_scan_stats(
    ds: VectorDataset,
    qs: QuerySet,
    k: int,
    kind: DistanceKind,
    workers: int | None = None,
) -> list[QueryStats]:
    """One QueryStats per query, in query-set order.

    Sampled queries exclude their own row from the candidates; d_mean averages
    over exactly the scanned candidates. Deterministic for fixed inputs
    regardless of worker count.
    """
    kind = parse_kind(kind)
    if qs.mode == "sampled_indices":
        Q = ds.data[qs.indices]
        excludes = qs.indices if qs.exclude_self else None
        query_ids = [int(i) for i in qs.indices]
    else:
        Q = qs.vectors
        excludes = None
        query_ids = list(range(qs.m))
    if Q.shape[1] != ds.dim:
        raise ValueError(f"query dim {Q.shape[1]} does not match dataset dim {ds.dim}")
    scanned = ds.count - (1 if excludes is not None else 0)
    if not 1 <= k <= scanned:
        raise ValueError(f"k={k} out of range for {scanned} candidates")

    kernel = ScanKernel(ds, kind)
    if kind is DistanceKind.ANGULAR:
        qsq = np.einsum("ij,ij->i", Q.astype(np.float64), Q.astype(np.float64))
        zero = np.nonzero(qsq == 0.0)[0]
        if zero.size:
            raise ZeroNormError("query", int(zero[0]))

    spans = [(s, min(s + QUERY_BLOCK, qs.m)) for s in range(0, qs.m, QUERY_BLOCK)]

    def run_span(span):
        s, e = span
        excl = None if excludes is None else np.asarray(excludes[s:e], dtype=np.int64)
        return _scan_block(kernel, Q[s:e], k, excl, query_ids[s:e], scanned)

    n_workers = resolve_workers(workers)
    if n_workers == 1 or len(spans) == 1:
        blocks = [run_span(span) for span in spans]
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            blocks = list(pool.map(run_span, spans))
    return [st for block in blocks for st in block]
