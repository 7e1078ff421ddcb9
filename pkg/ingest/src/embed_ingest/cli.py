"""embed-ingest command line: corpus encoding and fvecs conversion."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .ingest import IngestConfig, convert_fvecs_to_native, encode_corpus
from .models import ModelLoadError
from .native import FormatError


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="embed-ingest",
        description="Encode a line-delimited text corpus into the nn-meaning native format",
    )
    ap.add_argument("--corpus", type=Path, help="line-delimited text records")
    ap.add_argument("--model", default=None,
                    help="model identifier (sentence-transformers name, or hash:<dim>)")
    ap.add_argument("--out", type=Path, required=True, help="output prefix")
    ap.add_argument("--batch", type=int, default=64)
    ap.add_argument("--normalize", action="store_true")
    ap.add_argument("--max-records", type=int, default=None)
    ap.add_argument("--from-fvecs", type=Path, default=None,
                    help="convert this fvecs file instead of encoding a corpus")
    return ap


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    try:
        if args.from_fvecs is not None:
            prefix = convert_fvecs_to_native(args.from_fvecs, args.out)
            print(f"converted {args.from_fvecs} -> {prefix}.json / {prefix}.f32")
            return 0
        if args.corpus is None or args.model is None:
            print("error: --corpus and --model are required unless --from-fvecs is given",
                  file=sys.stderr)
            return 2
        cfg = IngestConfig(
            corpus=args.corpus,
            model=args.model,
            out=args.out,
            batch_size=args.batch,
            max_records=args.max_records,
            normalize=args.normalize,
        )
        prefix = encode_corpus(cfg)
        print(f"wrote {prefix}.json / {prefix}.f32 / {prefix}.payload")
        return 0
    except ModelLoadError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except (ValueError, FormatError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
