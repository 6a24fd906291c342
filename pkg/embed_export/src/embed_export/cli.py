"""Command-line entry point for embedding export."""

import argparse
import sys

from .export import ExportSpec, export_embeddings
from .registry import BACKBONES, DATASETS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="embed-export",
        description="export frozen transformer embeddings as EMB1 files",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("export", help="embed one dataset with one backbone")
    p.add_argument("--backbone", required=True, choices=sorted(BACKBONES))
    p.add_argument("--dataset", required=True, choices=sorted(DATASETS))
    p.add_argument("--limit", type=int, nargs=3, default=None,
                   metavar=("TRAIN", "VAL", "TEST"),
                   help="rows per split (default: everything)")
    p.add_argument("--max-length", type=int, default=512)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=".", help="output directory")
    p.set_defaults(func=cmd_export)
    return parser


def cmd_export(args) -> int:
    limits = tuple(args.limit) if args.limit else (None, None, None)
    spec = ExportSpec(
        backbone=args.backbone, dataset=args.dataset, limits=limits,
        max_length=args.max_length, batch_size=args.batch_size,
        seed=args.seed, out_dir=args.out,
    )
    paths = export_embeddings(spec)
    for split, path in paths.items():
        print(f"{split}: {path}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, ImportError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
