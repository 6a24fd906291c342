"""Command-line front end: train, ablate, fourier-scan, synth.

Reports are written as JSON with sorted keys and a fixed layout, so a rerun
with identical flags on the same installation produces byte-identical
output.  Every failure path exits non-zero with a one-line diagnostic on
stderr.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import backend
from . import fourier as F
from . import heads as H
from . import metrics as M
from . import training as T
from .data import (
    EmbeddingSet,
    load_csv,
    load_emb,
    save_emb,
    stratified_split,
    synth_gaussian_clusters,
    synth_periodic,
)

DEFAULT_GRID = {"frkan": 5, "kan": 1}


def _load_any(path) -> EmbeddingSet:
    if str(path).endswith(".csv"):
        return load_csv(path)
    return load_emb(path)


def _parse_fractions(text: str):
    try:
        parts = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise ValueError(f"cannot parse fractions {text!r}") from None
    return parts


def _parse_grids(text: str):
    try:
        grids = tuple(int(v) for v in text.split(","))
    except ValueError:
        raise ValueError(f"cannot parse grid list {text!r}") from None
    if not grids:
        raise ValueError("empty grid list")
    return grids


def _resolve_head_size(args) -> int | None:
    """Enforce that exactly the right one of --grid/--hidden is set per kind."""
    kind = args.head
    if kind in ("frkan", "kan"):
        if args.hidden is not None:
            raise ValueError(f"--hidden does not apply to head kind {kind!r}")
        return args.grid if args.grid is not None else DEFAULT_GRID[kind]
    if kind == "mlp2":
        if args.grid is not None:
            raise ValueError("--grid does not apply to head kind 'mlp2'")
        if args.hidden is None:
            raise ValueError("head kind 'mlp2' requires --hidden")
        return args.hidden
    if args.grid is not None or args.hidden is not None:
        raise ValueError("head kind 'mlp1' takes neither --grid nor --hidden")
    return None


def _train_cfg(args) -> T.TrainConfig:
    return T.TrainConfig(
        learning_rate=args.lr,
        batch_size=args.batch,
        epochs=args.epochs,
        seed=args.seed,
        shuffle=not args.no_shuffle,
        precision=args.precision,
    )


def _load_three(args):
    train_set = _load_any(args.train)
    val_set = _load_any(args.val)
    test_set = _load_any(args.test)
    for name, ds in (("val", val_set), ("test", test_set)):
        if ds.n_classes != train_set.n_classes:
            raise ValueError(
                f"{name} set has n_classes {ds.n_classes}, train set has "
                f"{train_set.n_classes}"
            )
    return train_set, val_set, test_set


def _evaluate(head, test_set: EmbeddingSet) -> M.MetricsReport:
    preds = T.predict_batch(head, test_set.x)
    return M.evaluate(preds, test_set.y, test_set.n_classes)


def cmd_train(args) -> int:
    train_set, val_set, test_set = _load_three(args)
    size = _resolve_head_size(args)
    head = H.init_head(args.head, train_set.dim, train_set.n_classes, size, seed=args.seed)
    cfg = _train_cfg(args)
    trained, history = T.train(head, train_set, val_set, cfg)
    report = {
        "backend": backend.active(),
        "config": cfg.to_dict(),
        "data": {
            "train": str(args.train),
            "val": str(args.val),
            "test": str(args.test),
            "n_train": train_set.n,
            "n_val": val_set.n,
            "n_test": test_set.n,
            "in_dim": train_set.dim,
            "n_classes": train_set.n_classes,
        },
        "head": H.describe(trained),
        "param_count": H.param_count(trained),
        "loss_history": history.to_dict(),
        "metrics": _evaluate(trained, test_set).to_dict(),
    }
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_ablate(args) -> int:
    if args.head not in ("frkan", "kan"):
        raise ValueError(f"ablate sweeps KAN grids; head kind {args.head!r} has none")
    train_set, val_set, test_set = _load_three(args)
    grids = _parse_grids(args.grids)
    cfg = _train_cfg(args)
    rows = []
    for grid in grids:
        head = H.init_head(args.head, train_set.dim, train_set.n_classes, grid,
                           seed=args.seed)
        trained, _ = T.train(head, train_set, val_set, cfg)
        rep = _evaluate(trained, test_set)
        rows.append(
            {
                "grid": grid,
                "param_count": H.param_count(trained),
                "accuracy": rep.accuracy,
                "macro_f1": rep.macro_f1,
            }
        )
    if args.format == "json":
        text = json.dumps(rows, indent=2, sort_keys=True) + "\n"
    else:
        lines = ["grid,param_count,accuracy,macro_f1"]
        for r in rows:
            lines.append(f"{r['grid']},{r['param_count']},{r['accuracy']!r},{r['macro_f1']!r}")
        text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_fourier_scan(args) -> int:
    if args.fn not in F.FUNCTIONS:
        raise ValueError(
            f"unknown function {args.fn!r}; registry: {sorted(F.FUNCTIONS)}"
        )
    curve = F.convergence_scan(F.FUNCTIONS[args.fn], args.gmax, norm=args.norm,
                               m=args.samples)
    if args.out:
        curve.to_csv(args.out)
    else:
        sys.stdout.write(curve.to_csv_text())
    return 0


def cmd_synth(args) -> int:
    if args.kind == "clusters":
        data = synth_gaussian_clusters(args.n, args.d, args.classes, args.sep,
                                       seed=args.seed)
    else:
        data = synth_periodic(args.n, args.d, args.freq, seed=args.seed)
    fractions = _parse_fractions(args.fractions)
    splits = stratified_split(data, fractions, seed=args.seed)
    names = ("train", "val", "test")
    if len(splits) != len(names):
        raise ValueError(f"synth expects 3 fractions, got {len(splits)}")
    for name, split in zip(names, splits):
        save_emb(split, f"{args.out_prefix}.{name}.emb")
        print(f"{args.out_prefix}.{name}.emb: n={split.n} d={split.dim} "
              f"classes={split.n_classes}")
    return 0


def _add_train_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--train", required=True, help="training set (.emb or .csv)")
    p.add_argument("--val", required=True, help="validation set")
    p.add_argument("--test", required=True, help="test set")
    p.add_argument("--epochs", type=int, default=5)
    p.add_argument("--lr", type=float, default=2e-5)
    p.add_argument("--batch", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--precision", choices=("f32", "f64"), default="f64")
    p.add_argument("--no-shuffle", action="store_true",
                   help="keep dataset order instead of reshuffling each epoch")
    p.add_argument("--out", default=None, help="write the report here (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kanprobe",
        description="Train and analyze classification heads on frozen embeddings.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train one head and emit a JSON report")
    p.add_argument("--head", choices=H.HEAD_KINDS, required=True)
    p.add_argument("--grid", type=int, default=None,
                   help="harmonics (frkan) or spline intervals (kan)")
    p.add_argument("--hidden", type=int, default=None, help="mlp2 hidden width")
    _add_train_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("ablate", help="sweep KAN grid sizes, report a table")
    p.add_argument("--head", choices=("frkan", "kan"), default="frkan")
    p.add_argument("--grids", default="1,2,3,4,5",
                   help="comma-separated grid sizes (default 1,2,3,4,5)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    _add_train_flags(p)
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser("fourier-scan", help="truncation-error curve for a registry function")
    p.add_argument("--fn", required=True, help=f"one of {sorted(F.FUNCTIONS)}")
    p.add_argument("--gmax", type=int, required=True, help="largest harmonic count")
    p.add_argument("--norm", choices=F.NORMS, default="sup")
    p.add_argument("--samples", type=int, default=4096, help="quadrature points")
    p.add_argument("--out", default=None, help="write CSV here (default stdout)")
    p.set_defaults(func=cmd_fourier_scan)

    p = sub.add_parser("synth", help="generate a synthetic split and save as EMB1")
    p.add_argument("--kind", choices=("clusters", "periodic"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--classes", type=int, default=2, help="clusters only")
    p.add_argument("--sep", type=float, default=6.0, help="clusters only")
    p.add_argument("--freq", type=float, default=3.0, help="periodic only")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--fractions", default="0.7,0.15,0.15")
    p.add_argument("--out-prefix", required=True)
    p.set_defaults(func=cmd_synth)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
