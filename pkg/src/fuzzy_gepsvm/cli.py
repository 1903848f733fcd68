"""Command-line interface: ``fgepsvm {train,predict,tune,bench,cv,synth}``.

Options can also come from a flat ``key = value`` file passed with
``--config`` (``#`` starts a comment, keys are the long flag names).
Command-line flags override the file.
"""

import argparse
import logging
import os
import sys

import numpy as np

from . import dataio, dsa, gepsvm, harness
from ._atomic import atomic_write_text
from .errors import DimensionMismatch, GepsvmError, ParseError

log = logging.getLogger("fuzzy_gepsvm")

MODE_TOKENS = {"linear": "linear", "fuzzy": "linear_fuzzy", "nonlinear": "nonlinear"}
EXIT_IO = 1
EXIT_TRAIN = 2


class UsageError(Exception):
    pass


def read_config(path):
    """Parse ``key = value`` lines into a dict with underscore keys."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep or not key.strip():
                raise ParseError("expected key=value", line=lineno)
            out[key.strip().lstrip("-").replace("-", "_")] = value.strip()
    return out


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {value}")
    return value


def _csv_list(text):
    return [t.strip() for t in str(text).split(",") if t.strip()]


def _bool(text):
    if isinstance(text, bool):
        return text
    return str(text).strip().lower() in ("1", "true", "yes", "on")


def _add_common(p):
    p.add_argument("--config", help="key=value file with defaults for any flag")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=_positive_int, default=os.cpu_count() or 1)
    p.add_argument("--log-level", default="INFO")


def _add_data(p, required=True):
    p.add_argument("--data", required=required, help="CSV file (comma-separated list for bench)")
    p.add_argument("--delimiter", default=",")
    p.add_argument("--header", type=_bool, default=False)
    p.add_argument("--label-column", default="last",
                   help="label column index, 'last', or 'none' for unlabeled data")
    p.add_argument("--drop-columns", type=_csv_list, default=[],
                   help="comma-separated column indices to ignore (e.g. an id column)")
    p.add_argument("--missing", choices=("error", "drop"), default="error")


def _add_model(p):
    p.add_argument("--mode", choices=sorted(MODE_TOKENS), default="linear")
    p.add_argument("--kernel", choices=("poly", "rbf", "exprbf", "polyrbf"), default=None)
    p.add_argument("--fuzzy", choices=("none", "exp", "ratio", "proposed"), default=None)
    p.add_argument("--f", type=float, default=1.0, help="rate of the exp membership")
    p.add_argument("--s", type=float, default=0.5, help="floor of the ratio/proposed membership")
    p.add_argument("--normalize", choices=("none", "minmax", "zscore"), default="minmax")


def _add_params(p):
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--sigma", type=float, default=None)
    p.add_argument("--degree", type=float, default=None)


def _add_search(p):
    p.add_argument("--k", type=int, default=10, help="number of CV folds")
    p.add_argument("--popsize", type=int, default=30)
    p.add_argument("--maxcycle", type=int, default=20)


def build_parser():
    parser = argparse.ArgumentParser(prog="fgepsvm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="fit a model on a whole dataset")
    _add_common(p), _add_data(p), _add_model(p), _add_params(p)
    p.add_argument("--out", required=True, help="model file to write")

    p = sub.add_parser("predict", help="label a dataset with a saved model")
    _add_common(p), _add_data(p)
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True, help="predictions file, one label per line")

    p = sub.add_parser("cv", help="k-fold cross-validation at fixed parameters")
    _add_common(p), _add_data(p), _add_model(p), _add_params(p)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--out", default=None, help="per-fold TSV")
    p.add_argument("--folds-out", default=None, help="fold plan TSV (sample_index, fold)")

    p = sub.add_parser("tune", help="tune parameters with DSA and report CV accuracy")
    _add_common(p), _add_data(p), _add_model(p), _add_search(p)
    p.add_argument("--out", default="tune.tsv")
    p.add_argument("--history-out", default=None)

    p = sub.add_parser("bench", help="tune every kernel on every dataset")
    _add_common(p), _add_data(p), _add_model(p), _add_search(p)
    p.add_argument("--kernels", type=_csv_list, default=None,
                   help="comma-separated kernels; implies nonlinear mode")
    p.add_argument("--out", default="bench.tsv")
    p.add_argument("--plot-out", default=None, help="kernel/dataset/mean_acc TSV")

    p = sub.add_parser("synth", help="write a synthetic dataset")
    _add_common(p)
    p.add_argument("--kind", choices=("cross_planes", "blobs", "xor"), default="blobs")
    p.add_argument("--points", type=_positive_int, default=50,
                   help="points per class (per quadrant for xor)")
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--out", required=True)
    return parser


def parse_args(argv):
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, rest = pre.parse_known_args(argv)
    commands = parser._subparsers._group_actions[0].choices
    command = next((a for a in rest if a in commands), None)
    if known.config and command is not None:
        # file values become defaults, so explicit flags still win
        cfg = read_config(known.config)
        subparser = commands[command]
        actions = {a.dest: a for a in subparser._actions}
        unknown = sorted(set(cfg) - set(actions))
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(unknown)}")
        for key in cfg:
            actions[key].required = False
        subparser.set_defaults(**cfg)
    return parser.parse_args(argv)


def _load(args, path=None, labeled=True):
    label_column = args.label_column
    if str(label_column).lower() == "none" or not labeled:
        label_column = None
    elif label_column != "last":
        label_column = int(label_column)
    return dataio.load_csv(path or args.data, delimiter=args.delimiter, header=args.header,
                           label_column=label_column,
                           drop_columns=[int(c) for c in args.drop_columns],
                           missing=args.missing, name=os.path.basename(path or args.data))


def _trainer_spec(args, kernel=None):
    mode = MODE_TOKENS[args.mode]
    kernel = kernel or args.kernel
    if mode == "nonlinear" and kernel is None:
        raise UsageError("--mode nonlinear needs --kernel")
    if mode != "nonlinear" and kernel is not None:
        raise UsageError("--kernel applies only to --mode nonlinear")
    fuzzy_method = args.fuzzy or ("proposed" if mode == "linear_fuzzy" else "none")
    if mode != "linear_fuzzy" and fuzzy_method != "none":
        raise UsageError("--fuzzy applies only to --mode fuzzy")
    return harness.TrainerSpec(mode, kernel, fuzzy_method, args.f, args.s, args.normalize)


def _fixed_theta(args, spec):
    theta = []
    for name in spec.param_names:
        value = getattr(args, name)
        if value is None:
            raise UsageError(f"--{name} is required for this mode/kernel")
        theta.append(value)
    return np.array(theta)


def _dsa_config(args):
    try:
        return dsa.DsaConfig(popsize=args.popsize, maxcycle=args.maxcycle, seed=args.seed,
                             target_fitness=0.0)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def cmd_train(args):
    data = _load(args)
    spec = _trainer_spec(args)
    theta = _fixed_theta(args, spec)
    try:
        model, norm = harness.fit(spec, data, theta)
        acc = harness.accuracy(gepsvm.predict(model, norm.apply(data.features)), data.labels)
    except GepsvmError as exc:
        log.error("training failed: %s", exc)
        return EXIT_TRAIN
    gepsvm.save_model(args.out, model, norm)
    print(f"accuracy\t{acc:.4f}")
    return 0


def cmd_predict(args):
    model, norm = gepsvm.load_model(args.model)
    labeled = str(args.label_column).lower() != "none"
    data = _load(args, labeled=labeled)
    try:
        X = norm.apply(data.features) if norm is not None else data.features
        labels = gepsvm.predict(model, X)
    except (DimensionMismatch, ValueError) as exc:
        log.error("cannot apply model: %s", exc)
        return EXIT_TRAIN
    atomic_write_text(args.out, "".join(f"{int(v)}\n" for v in labels))
    if data.labels is not None:
        print(f"accuracy\t{harness.accuracy(labels, data.labels):.4f}")
    return 0


def cmd_cv(args):
    data = _load(args)
    spec = _trainer_spec(args)
    theta = _fixed_theta(args, spec)
    plan = dataio.make_folds(data, args.k, args.seed)
    try:
        res = harness.cross_validate(spec, data, theta, jobs=args.jobs,
                                     folds=harness.prepare_folds(spec, data, plan))
    except GepsvmError as exc:
        log.error("cross-validation failed: %s", exc)
        return EXIT_TRAIN
    lines = ["fold\ttrain_pct\ttest_pct"]
    lines += [f"{i}\t{tr:.4f}\t{te:.4f}" for i, (tr, te) in enumerate(res.per_fold)]
    lines.append(f"mean\t{res.mean_train:.4f}\t{res.mean_test:.4f}")
    text = "\n".join(lines) + "\n"
    if args.out:
        atomic_write_text(args.out, text)
    if args.folds_out:
        atomic_write_text(args.folds_out, plan.to_tsv())
    sys.stdout.write(text)
    return 0


def _history_tsv(history):
    lines = ["cycle\tbest_fitness"] + [f"{c}\t{v!r}" for c, v in history]
    return "\n".join(lines) + "\n"


def cmd_tune(args):
    config = _dsa_config(args)
    data = _load(args)
    spec = _trainer_spec(args)
    try:
        res = harness.tune(spec, data, config, k=args.k, seed=args.seed, jobs=args.jobs)
    except GepsvmError as exc:
        log.error("tuning failed: %s", exc)
        return EXIT_TRAIN
    params = spec.params_dict(res.params)
    row = dict.fromkeys(harness.RESULT_COLUMNS, "-")
    row.update(
        dataset=data.name, mode=spec.mode, kernel=spec.label,
        P1=harness._fmt_param(params, "delta"), P2=harness._fmt_param(params, "sigma"),
        P3=harness._fmt_param(params, "degree"), train_pct=f"{res.mean_train:.4f}",
        test_pct=f"{res.mean_test:.4f}", mean_pct=f"{res.mean_pct:.4f}",
        cycles_used=res.cycles_used, seed=args.seed, error="",
    )
    table = harness.rows_to_tsv([row])
    atomic_write_text(args.out, table)
    atomic_write_text(args.history_out or args.out + ".history.tsv", _history_tsv(res.history))
    sys.stdout.write(table)
    return 0


def cmd_bench(args):
    config = _dsa_config(args)
    paths = _csv_list(args.data)
    datasets = [_load(args, path) for path in paths]
    if args.kernels is not None:
        if args.mode != "nonlinear":
            args.mode = "nonlinear"
        specs = [_trainer_spec(args, kernel) for kernel in args.kernels]
    else:
        specs = [_trainer_spec(args)]
    rows = harness.benchmark(datasets, specs, args.out, config, k=args.k, seed=args.seed,
                             jobs=args.jobs, plot_path=args.plot_out)
    sys.stdout.write(harness.rows_to_tsv(rows))
    return 0


def cmd_synth(args):
    if args.kind == "cross_planes":
        data = dataio.synth_cross_planes(args.points, args.noise, args.seed)
    elif args.kind == "xor":
        data = dataio.synth_xor(args.points, args.noise, args.seed)
    else:
        data = dataio.synth_blobs(args.points, seed=args.seed)
    dataio.save_csv(args.out, data)
    return 0


COMMANDS = {
    "train": cmd_train, "predict": cmd_predict, "cv": cmd_cv,
    "tune": cmd_tune, "bench": cmd_bench, "synth": cmd_synth,
}


def main(argv=None):
    try:
        args = parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except SystemExit as exc:
        return EXIT_IO if exc.code else 0
    except (OSError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO

    logging.basicConfig(level=getattr(logging, str(args.log_level).upper(), logging.INFO),
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    log.info("resolved config: %s",
             " ".join(f"{k}={v}" for k, v in sorted(vars(args).items())))
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        log.error("%s", exc)
        return EXIT_IO
    except (OSError, ParseError, ValueError) as exc:
        log.error("%s", exc)
        return EXIT_IO
    except GepsvmError as exc:
        log.error("%s", exc)
        return EXIT_TRAIN


if __name__ == "__main__":
    sys.exit(main())
