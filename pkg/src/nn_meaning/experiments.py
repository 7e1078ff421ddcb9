"""Experiment orchestration: dataset profiles, dimensionality sweeps, metric
comparisons, RC/LID homogeneity, and CSV emission.

Every report row records the full protocol (n, m, k, kind, seed) so results
are self-describing. Defaults: m = 500 queries, LID k = 100 for n >= 1e4.
"""

from __future__ import annotations

import csv
import time
from contextlib import contextmanager
from dataclasses import dataclass, fields
from itertools import combinations
from pathlib import Path
from typing import Sequence

from .dataset import VectorDataset, load_dataset, sample_queries
from .distances import DistanceKind, parse_kind
from .errors import DegenerateDataError
from .knn import query_scan_stats
from .metrics import (
    HomogeneityResult,
    LidReport,
    RcReport,
    default_lid_k,
    kendall_tau_b,
    lid_from_stats,
    rc_lid_homogeneity,
    relative_contrast,
)
from .synth import SynthSpec, generate

DEFAULT_M = 500

CSV_COLUMNS = (
    "label",
    "dim",
    "n",
    "kind",
    "m",
    "k",
    "rc",
    "e_dmean",
    "e_dmin",
    "lid_median",
    "lid_mean",
    "zero_min_count",
    "seed",
    "wall_time_ms",
)


@dataclass(frozen=True)
class ReportRow:
    label: str
    dim: int
    n: int
    kind: str
    m: int
    k: int
    rc: float
    e_dmean: float
    e_dmin: float
    lid_median: float
    lid_mean: float
    zero_min_count: int
    seed: int
    wall_time_ms: int


@dataclass(frozen=True)
class ProfileResult:
    row: ReportRow
    rc_report: RcReport
    lid_report: LidReport


@dataclass(frozen=True)
class SweepConfig:
    dims: tuple[int, ...]
    n: int
    m: int = DEFAULT_M
    k: int | None = None
    kinds: tuple[DistanceKind, ...] = (DistanceKind.L2,)
    seed: int = 0
    generator: str = "gaussian"
    dataset_paths: dict[int, str] | None = None

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims:
            raise ValueError("sweep needs at least one dimension")
        if any(b <= a for a, b in zip(dims, dims[1:])):
            raise ValueError(f"dims must be strictly increasing, got {dims}")
        if self.m > self.n:
            raise ValueError(f"m={self.m} exceeds n={self.n}")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "kinds", tuple(parse_kind(k) for k in self.kinds))


@contextmanager
def _stage(name: str):
    # DegenerateDataError subclasses pass through untouched: they carry data
    # (zero_min_count) that callers inspect
    try:
        yield
    except DegenerateDataError:
        raise
    except ValueError as e:
        raise ValueError(f"[{name}] {e}") from e


def _resolve(source) -> VectorDataset:
    if isinstance(source, VectorDataset):
        return source
    if isinstance(source, SynthSpec):
        return generate(source)
    return load_dataset(source)


def profile_dataset(
    source,
    kind: DistanceKind,
    m: int = DEFAULT_M,
    k: int | None = None,
    seed: int = 0,
    workers: int | None = None,
) -> ProfileResult:
    """Sample queries, scan once, aggregate both RC and LID from the same pass."""
    kind = parse_kind(kind)
    with _stage("load"):
        ds = _resolve(source)
    if k is None:
        k = min(default_lid_k(ds.count), ds.count - 1)
    with _stage("sample_queries"):
        qs = sample_queries(ds, m, seed)
    t0 = time.perf_counter()
    with _stage("scan"):
        stats = query_scan_stats(ds, qs, k, kind, workers=workers)
    wall_ms = int((time.perf_counter() - t0) * 1000)
    with _stage("relative_contrast"):
        rc_report = relative_contrast(
            stats, n=ds.count, dim=ds.dim, kind=kind.value, seed=seed
        )
    with _stage("lid"):
        lid_report = lid_from_stats(
            stats, k, n=ds.count, dim=ds.dim, kind=kind.value, seed=seed
        )
    row = ReportRow(
        label=ds.name,
        dim=ds.dim,
        n=ds.count,
        kind=kind.value,
        m=m,
        k=k,
        rc=rc_report.rc,
        e_dmean=rc_report.e_dmean,
        e_dmin=rc_report.e_dmin,
        lid_median=lid_report.median,
        lid_mean=lid_report.mean,
        zero_min_count=rc_report.zero_min_count,
        seed=seed,
        wall_time_ms=wall_ms,
    )
    return ProfileResult(row=row, rc_report=rc_report, lid_report=lid_report)


def run_profile(source, kind, m=DEFAULT_M, k=None, seed=0, workers=None) -> ReportRow:
    return profile_dataset(source, kind, m=m, k=k, seed=seed, workers=workers).row


def run_dim_sweep(cfg: SweepConfig, workers: int | None = None) -> list[ReportRow]:
    """One row per (dim, kind), ordered by dim then kind."""
    rows = []
    for dim in cfg.dims:
        if cfg.dataset_paths is not None:
            if dim not in cfg.dataset_paths:
                raise ValueError(f"no dataset path for dim {dim}")
            source = _resolve(cfg.dataset_paths[dim])
        else:
            source = generate(SynthSpec(kind=cfg.generator, n=cfg.n, d=dim, seed=cfg.seed))
        for kind in cfg.kinds:
            try:
                rows.append(
                    run_profile(source, kind, m=cfg.m, k=cfg.k, seed=cfg.seed, workers=workers)
                )
            except DegenerateDataError as e:
                raise DegenerateDataError(f"sweep cell (dim={dim}, kind={kind}): {e}") from e
            except ValueError as e:
                raise ValueError(f"sweep cell (dim={dim}, kind={kind}): {e}") from e
            except Exception as e:
                raise RuntimeError(f"sweep cell (dim={dim}, kind={kind}): {e}") from e
    return rows


def run_metric_comparison(
    sources: Sequence,
    kinds: Sequence[DistanceKind] = (DistanceKind.L1, DistanceKind.L2, DistanceKind.ANGULAR),
    m: int = DEFAULT_M,
    k: int | None = None,
    seed: int = 0,
    workers: int | None = None,
) -> tuple[list[ReportRow], dict[tuple[str, str], float]]:
    """RC per (dataset, kind) plus Kendall tau-b between the dataset rankings
    induced by each pair of distance kinds."""
    if len(sources) < 3:
        raise ValueError("metric comparison needs at least 3 datasets to rank")
    kinds = [parse_kind(kd) for kd in kinds]
    rows = []
    rc_by_kind: dict[str, list[float]] = {kd.value: [] for kd in kinds}
    for source in sources:
        ds = _resolve(source)
        for kd in kinds:
            row = run_profile(ds, kd, m=m, k=k, seed=seed, workers=workers)
            rows.append(row)
            rc_by_kind[kd.value].append(row.rc)
    taus: dict[tuple[str, str], float] = {}
    for a, b in combinations([kd.value for kd in kinds], 2):
        taus[(a, b)] = kendall_tau_b(rc_by_kind[a], rc_by_kind[b])
    return rows, taus


def run_homogeneity(
    sources: Sequence,
    kind: DistanceKind = DistanceKind.L2,
    m: int = DEFAULT_M,
    k: int | None = None,
    seed: int = 0,
    workers: int | None = None,
) -> tuple[list[ReportRow], HomogeneityResult]:
    """Profile each dataset, then rank-correlate rc against lid_median."""
    if len(sources) < 3:
        raise ValueError("homogeneity needs at least 3 datasets to rank")
    rows = [run_profile(s, kind, m=m, k=k, seed=seed, workers=workers) for s in sources]
    result = rc_lid_homogeneity([(r.label, r.rc, r.lid_median) for r in rows])
    return rows, result


def emit_csv(rows: Sequence[ReportRow], path: str | Path, timing: bool = True) -> None:
    """Write rows with the documented column order and a header line.

    ``timing=False`` drops the wall_time_ms column so byte-level comparisons
    of otherwise identical runs succeed.
    """
    if not rows:
        raise ValueError("no rows to emit")
    columns = CSV_COLUMNS if timing else CSV_COLUMNS[:-1]
    with open(path, "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f)
        w.writerow(columns)
        for row in rows:
            w.writerow([getattr(row, c) for c in columns])


def load_report_csv(path: str | Path) -> list[ReportRow]:
    """Parse a CSV produced by emit_csv back into rows (missing timing -> 0)."""
    types = {f.name: f.type for f in fields(ReportRow)}
    out = []
    with open(path, encoding="utf-8", newline="") as f:
        for rec in csv.DictReader(f):
            kwargs = {}
            for name in CSV_COLUMNS:
                raw = rec.get(name)
                if raw is None:
                    kwargs[name] = 0
                elif types[name] == "int":
                    kwargs[name] = int(raw)
                elif types[name] == "float":
                    kwargs[name] = float(raw)
                else:
                    kwargs[name] = raw
            out.append(ReportRow(**kwargs))
    return out
