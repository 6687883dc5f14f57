"""``offlang`` command-line entry point.

Exit status: 0 on success, 1 on a domain error (bad data, config or model),
2 on a usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from offlang.corpus import Dataset, load_tsv
from offlang.errors import DataError, OfflangError
from offlang.explain import explain_text
from offlang.metrics import confusion, report
from offlang.pipeline import (
    Pipeline,
    PipelineConfig,
    default_config,
    dump_json,
    load_config,
    train_pipeline,
    write_atomic,
)
from offlang.select import GridSpec, grid_search


def _config(args) -> PipelineConfig:
    return load_config(args.config) if args.config else default_config()


def _load(path, config: PipelineConfig, labeled: bool, header) -> Dataset:
    has_header = config.tsv.has_header if header is None else header
    data = load_tsv(path, config.tsv.schema(labeled), has_header=has_header)
    if len(data) == 0:
        raise DataError(f"{path}: no data rows")
    return data


def cmd_train(args) -> int:
    config = _config(args)
    if args.seed is not None:
        config = replace(config, classifier=replace(config.classifier, random_state=args.seed),
                         oversample=replace(config.oversample, seed=args.seed))
    data = _load(args.data, config, True, args.header)
    pipe, summary = train_pipeline(config, data)
    pipe.save(args.out)
    sys.stdout.write(summary.render())
    sys.stdout.write(f"model written to {args.out}\n")
    return 0


def cmd_evaluate(args) -> int:
    pipe = Pipeline.load(args.model)
    data = _load(args.data, pipe.config, True, args.header)
    cm = confusion(data.labels, pipe.predict(data.texts))
    rep = report(cm)
    if args.format == "flat":
        sys.stdout.write(rep.render_flat())
        for i, t in enumerate(("NOT", "OFF")):
            for j, p in enumerate(("NOT", "OFF")):
                sys.stdout.write(f"confusion.{t}.{p}={cm.counts[i, j]}\n")
    else:
        sys.stdout.write(rep.render())
        sys.stdout.write("\nconfusion matrix (rows true, columns predicted)\n")
        sys.stdout.write(cm.to_csv())
    return 0


def cmd_predict(args) -> int:
    pipe = Pipeline.load(args.model)
    data = _load(args.data, pipe.config, False, args.header)
    labels = pipe.predict(data.texts)
    probs = pipe.predict_proba(data.texts)[:, 1] if pipe.supports_proba else [None] * len(data)
    schema = pipe.config.tsv.schema()
    lines = []
    for ex, label, p in zip(data, labels, probs):
        lines.append(f"{ex.id}\t{schema.format_label(label)}\t{'' if p is None else f'{p:.6f}'}\n")
    write_atomic(args.out, "".join(lines))
    return 0


def cmd_gridsearch(args) -> int:
    config = _config(args)
    grid = GridSpec.load(args.grid)
    data = _load(args.data, config, True, args.header)
    result = grid_search(grid, config, data, k=args.folds, seed=args.seed, n_jobs=args.jobs)
    out = Path(args.out)
    doc = {"grid": grid.to_dict(), "seed": args.seed, **result.to_dict()}
    write_atomic(out, dump_json(doc))
    best_path = Path(args.best_config) if args.best_config else out.with_name(out.stem + ".best_config.json")
    best = config.with_params(result.best_params)
    write_atomic(best_path, dump_json(best.to_dict()))
    sys.stdout.write(result.render())
    sys.stdout.write(f"best mean accuracy {result.best_mean_accuracy:.4f}; config written to {best_path}\n")
    return 0


def cmd_explain(args) -> int:
    pipe = Pipeline.load(args.model)
    if not pipe.supports_proba:
        raise OfflangError("probabilities unavailable: explain needs a modified_huber or log loss model")
    if args.text is not None:
        if not args.text.strip():
            raise DataError("cannot explain an empty text")
        items = [("text", args.text)]
    else:
        items = [(ex.id, ex.text) for ex in _load(args.data, pipe.config, False, args.header)]

    def blackbox(s):
        return tuple(pipe.predict_proba([s])[0])

    out_dir = Path(args.out) if args.out else None
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
    for ident, text in items:
        expl = explain_text(blackbox, text, n_samples=args.n_samples,
                            drop_prob=args.drop_prob, seed=args.seed)
        sys.stdout.write(f"[{ident}]\n{expl.render_table()}\n")
        if out_dir is not None:
            safe = "".join(c if c.isalnum() or c in "-_." else "_" for c in ident)
            write_atomic(out_dir / f"{safe}.html", expl.render_html())
            write_atomic(out_dir / f"{safe}.txt", expl.render_table())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="offlang", description=__doc__.splitlines()[0])
    parser.add_argument("--print-default-config", action="store_true",
                        help="print the default pipeline config (JSON) and exit")
    sub = parser.add_subparsers(dest="command")

    def common(p, config=False, model=False):
        if config:
            p.add_argument("--config", help="pipeline config JSON (defaults if omitted)")
        if model:
            p.add_argument("--model", required=True, help="model file written by 'train'")
        p.add_argument("--header", action=argparse.BooleanOptionalAction, default=None,
                       help="override whether the TSV has a header row")

    p = sub.add_parser("train", help="fit a pipeline and write a model file")
    common(p, config=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, help="override classifier and over-sampling seeds")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="classification report on labeled data")
    common(p, model=True)
    p.add_argument("--data", required=True)
    p.add_argument("--format", choices=("text", "flat"), default="text")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("predict", help="label unlabeled data")
    common(p, model=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("gridsearch", help="k-fold grid search")
    common(p, config=True)
    p.add_argument("--grid", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True, help="report JSON")
    p.add_argument("--best-config", help="where to write the best config (default next to --out)")
    p.set_defaults(func=cmd_gridsearch)

    p = sub.add_parser("explain", help="local surrogate explanation of predictions")
    common(p, model=True)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--text")
    src.add_argument("--data", help="TSV of texts to explain")
    p.add_argument("--out", help="directory for per-text .html and .txt output")
    p.add_argument("--n-samples", type=int, default=500)
    p.add_argument("--drop-prob", type=float, default=0.3)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_explain)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.print_default_config:
        sys.stdout.write(dump_json(default_config().to_dict()))
        return 0
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    try:
        return args.func(args)
    except OfflangError as exc:
        sys.stderr.write(f"offlang: error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
