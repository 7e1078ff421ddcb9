"""Relative contrast and local intrinsic dimensionality.

Relative contrast of a dataset is the ratio of expectations over queries,
mean-of-d_mean over mean-of-d_min, not the mean of per-query ratios; the two
differ and the headline ``rc`` is always the former. Per-query ratios are
exposed for diagnostics only.

LID is estimated from each query's k nearest distances with the
maximum-likelihood estimator  lid = -1 / mean(ln(r_i / r_k)),  and validated
against the analytic form  x * f(x) / F(x)  on synthetic distance laws.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import stats as sps

from .dataset import QuerySet, VectorDataset
from .distances import DistanceKind, parse_kind
from .errors import DegenerateDataError, UndefinedRcError
from .knn import QueryStats, query_scan_stats


@dataclass(frozen=True)
class RcReport:
    rc: float
    e_dmean: float
    e_dmin: float
    per_query_rc: list[float]
    m: int
    n: int
    dim: int
    kind: str
    seed: int
    zero_min_count: int

    def to_dict(self) -> dict:
        return {
            "rc": self.rc,
            "e_dmean": self.e_dmean,
            "e_dmin": self.e_dmin,
            "per_query_rc": self.per_query_rc,
            "m": self.m,
            "n": self.n,
            "dim": self.dim,
            "kind": self.kind,
            "seed": self.seed,
            "zero_min_count": self.zero_min_count,
        }


@dataclass(frozen=True)
class LidReport:
    per_query_lid: list[float]
    mean: float
    median: float
    p10: float
    p90: float
    k_used: int
    skipped: int
    m: int
    n: int
    dim: int
    kind: str
    seed: int

    def to_dict(self) -> dict:
        return {
            "per_query_lid": self.per_query_lid,
            "mean": self.mean,
            "median": self.median,
            "p10": self.p10,
            "p90": self.p90,
            "k_used": self.k_used,
            "skipped": self.skipped,
            "m": self.m,
            "n": self.n,
            "dim": self.dim,
            "kind": self.kind,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class HomogeneityResult:
    spearman: float
    kendall: float
    constant_input: bool = False
    labels: list[str] = field(default_factory=list)


def relative_contrast(
    stats: Sequence[QueryStats],
    *,
    n: int = 0,
    dim: int = 0,
    kind: str = "",
    seed: int = 0,
) -> RcReport:
    """Aggregate per-query stats into the dataset-level relative contrast."""
    if not stats:
        raise ValueError("no query stats to aggregate")
    d_min = np.asarray([s.d_min for s in stats], dtype=np.float64)
    d_mean = np.asarray([s.d_mean for s in stats], dtype=np.float64)
    if not (np.isfinite(d_min).all() and np.isfinite(d_mean).all()):
        raise ValueError("query stats contain non-finite values")
    zero_min_count = int(np.count_nonzero(d_min == 0.0))
    # sorted before summing so aggregates are exactly invariant to query order
    e_dmin = float(np.sort(d_min).mean())
    e_dmean = float(np.sort(d_mean).mean())
    if e_dmin == 0.0:
        raise UndefinedRcError(zero_min_count)
    pos = d_min > 0.0
    per_query = (d_mean[pos] / d_min[pos]).tolist()
    return RcReport(
        rc=e_dmean / e_dmin,
        e_dmean=e_dmean,
        e_dmin=e_dmin,
        per_query_rc=per_query,
        m=len(stats),
        n=n,
        dim=dim,
        kind=str(kind),
        seed=seed,
        zero_min_count=zero_min_count,
    )


def lid_mle(knn_distances: Sequence[float]) -> float:
    """Maximum-likelihood LID estimate from sorted positive neighbor distances.

    Returns inf when all distances equal the k-th (degenerate neighborhood);
    callers are expected to filter zero distances before calling.
    """
    r = np.asarray(knn_distances, dtype=np.float64)
    k = r.shape[0]
    if k < 2:
        raise ValueError("lid_mle needs at least 2 neighbor distances")
    if np.any(r <= 0.0):
        raise ValueError("lid_mle requires strictly positive distances")
    if np.any(np.diff(r) < 0.0):
        raise ValueError("neighbor distances must be sorted non-decreasing")
    s = float(np.log(r / r[-1]).mean())
    if s == 0.0:
        return math.inf
    return -1.0 / s


def lid_closed_form(cdf: Callable[[float], float], pdf: Callable[[float], float], x: float) -> float:
    """Analytic LID of a distance law at x:  x * f(x) / F(x)."""
    if x <= 0.0:
        raise ValueError("x must be positive")
    F = float(cdf(x))
    if F <= 0.0:
        raise ValueError(f"cdf must be positive at x={x}, got {F}")
    return x * float(pdf(x)) / F


def default_lid_k(n: int) -> int:
    """Neighborhood size used when the caller does not pin one."""
    if n >= 10_000:
        return 100
    return max(2, n // 100)


def lid_from_stats(
    stats: Sequence[QueryStats],
    k: int,
    *,
    n: int = 0,
    dim: int = 0,
    kind: str = "",
    seed: int = 0,
) -> LidReport:
    """Per-query MLE over already-computed k-NN lists, robust aggregates on top.

    Zero distances are dropped per query (the neighborhood shrinks, minimum 2);
    queries whose neighborhood collapses are skipped and counted, never imputed.
    """
    estimates = []
    skipped = 0
    for s in stats:
        dists = np.asarray([d for _, d in s.knn.neighbors], dtype=np.float64)
        dists = dists[dists > 0.0]
        if dists.shape[0] < 2:
            skipped += 1
            continue
        est = lid_mle(dists)
        if not math.isfinite(est):
            skipped += 1
            continue
        estimates.append(est)
    if not estimates:
        raise DegenerateDataError(
            f"all {len(stats)} queries had degenerate neighborhoods; no LID estimates"
        )
    arr = np.asarray(estimates, dtype=np.float64)
    return LidReport(
        per_query_lid=list(map(float, arr)),
        mean=float(np.sort(arr).mean()),
        median=float(np.median(arr)),
        p10=float(np.percentile(arr, 10)),
        p90=float(np.percentile(arr, 90)),
        k_used=k,
        skipped=skipped,
        m=len(stats),
        n=n,
        dim=dim,
        kind=str(kind),
        seed=seed,
    )


def lid_profile(
    ds: VectorDataset,
    qs: QuerySet,
    k: int,
    kind: DistanceKind,
    workers: int | None = None,
) -> LidReport:
    """Scan the dataset and estimate LID around each query."""
    if k < 2:
        raise ValueError("LID estimation needs k >= 2")
    kind = parse_kind(kind)
    stats = query_scan_stats(ds, qs, k, kind, workers=workers)
    return lid_from_stats(
        stats, k, n=ds.count, dim=ds.dim, kind=kind.value, seed=qs.seed
    )


def kendall_tau_b(x: Sequence[float], y: Sequence[float]) -> float:
    """Kendall rank correlation with tie handling (tau-b), exact at +-1.

    Integer concordance counts keep perfectly concordant rankings at exactly
    1.0 where a floating formulation drifts by an ulp. Returns nan when either
    ranking is fully tied. O(n^2), intended for dataset-suite sizes.
    """
    if len(x) != len(y):
        raise ValueError("rankings must have equal length")
    n = len(x)
    if n < 2:
        raise ValueError("need at least 2 observations")
    concordant = discordant = ties_x = ties_y = 0
    for i in range(n):
        for j in range(i + 1, n):
            dx = (x[i] > x[j]) - (x[i] < x[j])
            dy = (y[i] > y[j]) - (y[i] < y[j])
            if dx == 0:
                ties_x += 1
            if dy == 0:
                ties_y += 1
            if dx * dy > 0:
                concordant += 1
            elif dx * dy < 0:
                discordant += 1
    n0 = n * (n - 1) // 2
    if ties_x == n0 or ties_y == n0:
        return math.nan
    denom = math.sqrt((n0 - ties_x) * (n0 - ties_y))
    return (concordant - discordant) / denom


def rc_lid_homogeneity(rows: Sequence[tuple[str, float, float]]) -> HomogeneityResult:
    """Rank agreement between per-dataset rc and lid_median.

    High relative contrast and low LID both call a dataset meaningful, so the
    expected correlation across a mixed suite is strongly negative.
    """
    if len(rows) < 3:
        raise ValueError("need at least 3 datasets to rank")
    labels = [r[0] for r in rows]
    rc = np.asarray([r[1] for r in rows], dtype=np.float64)
    lid = np.asarray([r[2] for r in rows], dtype=np.float64)
    if not (np.isfinite(rc).all() and np.isfinite(lid).all()):
        raise ValueError("rc / lid values must be finite")
    if np.ptp(rc) == 0.0 or np.ptp(lid) == 0.0:
        return HomogeneityResult(
            spearman=math.nan, kendall=math.nan, constant_input=True, labels=labels
        )
    spearman = float(sps.spearmanr(rc, lid).statistic)
    kendall = kendall_tau_b(rc.tolist(), lid.tolist())
    return HomogeneityResult(spearman=spearman, kendall=kendall, labels=labels)
