"""Command-line interface.

Exit codes: 0 success, 2 configuration error (bad flags, bad files, bad
ranges), 3 degenerate-data error (undefined RC, collapsed neighborhoods,
zero vectors under the angular metric). The NN_MEANING_THREADS environment
variable caps the scan worker count.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .dataset import (
    external_queries,
    load_dataset,
    load_fvecs,
    load_payloads,
    retrieve_payloads,
    sample_queries,
    save_native,
)
from .distances import parse_kind
from .errors import DatasetFormatError, DegenerateDataError
from .experiments import (
    SweepConfig,
    emit_csv,
    profile_dataset,
    run_dim_sweep,
    run_homogeneity,
    run_metric_comparison,
)
from .knn import query_scan_stats
from .pca import pca_fit, pca_project
from .svg import emit_svg
from .synth import SynthSpec, generate

_SYNTH_KINDS = {"gaussian": "gaussian", "subspace": "subspace_gaussian", "ball": "uniform_ball"}


def _int_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _kind_list(text: str):
    return [parse_kind(tok) for tok in text.split(",") if tok.strip()]


def _clamped_m(m: int | None, n: int) -> int:
    # explicit --m must hold as given; the default shrinks to fit small datasets
    if m is not None:
        return m
    from .experiments import DEFAULT_M

    return min(DEFAULT_M, n)


def _add_common(p: argparse.ArgumentParser, svg: bool = False):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, default=None)
    if svg:
        p.add_argument("--svg", type=Path, default=None)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="nn-meaning",
        description="Profile the meaningfulness of nearest-neighbor search over vector datasets",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a seeded synthetic dataset")
    p.add_argument("--kind", choices=sorted(_SYNTH_KINDS), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--intrinsic", type=int, default=None)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, required=True, help="native dataset prefix")

    p = sub.add_parser("profile", help="RC and LID reports for one dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--metric", type=parse_kind, default="l2")
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--k", type=int, default=None)
    _add_common(p)

    p = sub.add_parser("knn", help="exact k-nearest-neighbor search")
    p.add_argument("--dataset", required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--query-file", type=Path, help="fvecs file of query vectors")
    g.add_argument("--sample", type=int, help="sample this many in-dataset queries")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--metric", type=parse_kind, default="l2")
    p.add_argument("--payloads", action="store_true", help="attach original-space records")
    _add_common(p)

    p = sub.add_parser("sweep", help="dimensionality sweep over synthetic data")
    p.add_argument("--dims", type=_int_list, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--metrics", type=_kind_list, default=[parse_kind("l2")])
    p.add_argument("--no-timing", action="store_true")
    _add_common(p, svg=True)

    p = sub.add_parser("compare-metrics", help="RC ranking stability across distance functions")
    p.add_argument("--dataset", action="append", default=[], help="repeatable dataset path")
    p.add_argument("--gaussian-dims", type=_int_list, default=None)
    p.add_argument("--n", type=int, default=None, help="n for --gaussian-dims")
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--no-timing", action="store_true")
    _add_common(p, svg=True)

    p = sub.add_parser("homogeneity", help="rank agreement between RC and LID across datasets")
    p.add_argument("--dataset", action="append", default=[], help="repeatable dataset path")
    p.add_argument("--gaussian-dims", type=_int_list, default=None)
    p.add_argument("--n", type=int, default=None, help="n for --gaussian-dims")
    p.add_argument("--metric", type=parse_kind, default="l2")
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--no-timing", action="store_true")
    _add_common(p, svg=True)

    p = sub.add_parser("pca", help="fit PCA and project a dataset down")
    p.add_argument("--dataset", required=True)
    p.add_argument("--out-dim", type=int, required=True)
    p.add_argument("--save-model", type=Path, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, required=True, help="native dataset prefix")

    return ap


def _cmd_synth(args) -> int:
    spec = SynthSpec(
        kind=_SYNTH_KINDS[args.kind],
        n=args.n,
        d=args.d,
        seed=args.seed,
        intrinsic_dim=args.intrinsic,
        noise_sigma=args.noise,
    )
    ds = generate(spec)
    prefix = save_native(ds, args.out)
    print(f"wrote {ds.name}: n={ds.count} d={ds.dim} -> {prefix}.json / {prefix}.f32")
    return 0


def _cmd_profile(args) -> int:
    ds = load_dataset(args.dataset)
    m = _clamped_m(args.m, ds.count)
    result = profile_dataset(ds, args.metric, m=m, k=args.k, seed=args.seed)
    rc, lid = result.rc_report, result.lid_report
    print(f"dataset  {ds.name}  n={ds.count} d={ds.dim} metric={args.metric} m={m} k={result.row.k}")
    print(f"rc       {rc.rc:.6f}  (e_dmean={rc.e_dmean:.6f} e_dmin={rc.e_dmin:.6f} "
          f"zero_min={rc.zero_min_count})")
    print(f"lid      median={lid.median:.4f} mean={lid.mean:.4f} "
          f"p10={lid.p10:.4f} p90={lid.p90:.4f} skipped={lid.skipped}")
    if args.out:
        payload = {"rc_report": rc.to_dict(), "lid_report": lid.to_dict()}
        args.out.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
        print(f"wrote {args.out}")
    return 0


def _cmd_knn(args) -> int:
    ds = load_dataset(args.dataset)
    if args.query_file is not None:
        queries = load_fvecs(args.query_file)
        if queries.dim != ds.dim:
            raise ValueError(f"query dim {queries.dim} does not match dataset dim {ds.dim}")
        qs = external_queries(queries.data, seed=args.seed)
    else:
        qs = sample_queries(ds, args.sample, args.seed)
    stats = query_scan_stats(ds, qs, args.k, args.metric)
    store = None
    if args.payloads:
        store = load_payloads(Path(args.dataset), expected_count=ds.count)
    results = []
    for s in stats:
        ids = [i for i, _ in s.knn.neighbors]
        entry = {
            "query": s.knn.query,
            "ids": ids,
            "dists": [d for _, d in s.knn.neighbors],
        }
        if store is not None:
            entry["payloads"] = retrieve_payloads(store, ids)
        results.append(entry)
    text = json.dumps(results, indent=2)
    if args.out:
        args.out.write_text(text + "\n", encoding="utf-8")
        print(f"wrote {len(results)} results to {args.out}")
    else:
        print(text)
    return 0


def _cmd_sweep(args) -> int:
    cfg = SweepConfig(
        dims=tuple(args.dims),
        n=args.n,
        m=_clamped_m(args.m, args.n),
        k=args.k,
        kinds=tuple(args.metrics),
        seed=args.seed,
    )
    rows = run_dim_sweep(cfg)
    _emit_rows(rows, args)
    for row in rows:
        print(f"dim={row.dim:<6} kind={row.kind:<8} rc={row.rc:.4f} lid_median={row.lid_median:.2f}")
    return 0


def _gather_sources(args) -> list:
    sources: list = list(args.dataset)
    if args.gaussian_dims:
        if args.n is None:
            raise ValueError("--gaussian-dims requires --n")
        sources += [
            SynthSpec(kind="gaussian", n=args.n, d=d, seed=args.seed)
            for d in args.gaussian_dims
        ]
    if not sources:
        raise ValueError("give at least one --dataset or --gaussian-dims")
    return sources


def _source_count(source) -> int:
    return source.n if isinstance(source, SynthSpec) else load_dataset(source).count


def _emit_rows(rows, args) -> None:
    if args.out:
        emit_csv(rows, args.out, timing=not getattr(args, "no_timing", False))
        print(f"wrote {len(rows)} rows to {args.out}")
    if getattr(args, "svg", None):
        emit_svg(rows, x="dim", y="rc", series="kind", path=args.svg)
        print(f"wrote chart to {args.svg}")


def _cmd_compare_metrics(args) -> int:
    sources = _gather_sources(args)
    m = _clamped_m(args.m, min(_source_count(s) for s in sources))
    rows, taus = run_metric_comparison(sources, m=m, k=args.k, seed=args.seed)
    _emit_rows(rows, args)
    for (a, b), tau in taus.items():
        print(f"kendall tau-b  {a} vs {b}: {tau:.4f}")
    return 0


def _cmd_homogeneity(args) -> int:
    sources = _gather_sources(args)
    m = _clamped_m(args.m, min(_source_count(s) for s in sources))
    rows, result = run_homogeneity(sources, kind=args.metric, m=m, k=args.k, seed=args.seed)
    _emit_rows(rows, args)
    if result.constant_input:
        print("rank correlation undefined: constant rc or lid across datasets")
    else:
        print(f"spearman={result.spearman:.4f} kendall={result.kendall:.4f}")
    return 0


def _cmd_pca(args) -> int:
    ds = load_dataset(args.dataset)
    model = pca_fit(ds, args.out_dim, sample_seed=args.seed)
    projected = pca_project(model, ds)
    prefix = save_native(projected, args.out)
    if args.save_model:
        model.save(args.save_model)
        print(f"wrote model to {args.save_model}")
    print(f"projected {ds.name}: {ds.dim} -> {projected.dim} dims, saved to {prefix}.json")
    return 0


_COMMANDS = {
    "synth": _cmd_synth,
    "profile": _cmd_profile,
    "knn": _cmd_knn,
    "sweep": _cmd_sweep,
    "compare-metrics": _cmd_compare_metrics,
    "homogeneity": _cmd_homogeneity,
    "pca": _cmd_pca,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except DegenerateDataError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except (ValueError, DatasetFormatError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
