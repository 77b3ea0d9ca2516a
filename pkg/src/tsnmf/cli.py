"""Command-line front end.

Exit codes: 0 on success, 1 on usage errors, 2 on data errors (unreadable or
malformed input files). Experiment-style subcommands accept a ``--config``
file of ``key = value`` lines (``#`` starts a comment); explicit flags
override file values.
"""

import argparse
import sys

import numpy as np

from . import solver
from .data import (
    DatasetFormatError,
    corrupt,
    load_dataset,
    save_bundle,
    synth_clusters,
)
from .experiments import (
    DEFAULT_LAMBDA_GRID,
    DEFAULT_R_GRID,
    EXTENDED_R_GRID,
    ExperimentConfig,
    bench_scaling,
    emit_lambda_surface,
    emit_r_curve,
    run_experiment,
)
from .metrics import clustering_accuracy, nmi, purity


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _parse_int_list(text):
    return tuple(int(v) for v in text.split(",") if v.strip())


def _parse_float_list(text):
    return tuple(float(v) for v in text.split(",") if v.strip())


def _read_config_file(path):
    values = {}
    try:
        lines = open(path).read().splitlines()
    except OSError as exc:
        raise DatasetFormatError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key.replace("-", "_")] = value
    return values


_CONFIG_COERCE = {
    "n_values": _parse_int_list,
    "r_grid": _parse_int_list,
    "lambda_grid": _parse_float_list,
    "subsets_per_n": int,
    "m_neighbors": int,
    "t_max": int,
    "restarts": int,
    "seed": int,
    "dataset": str,
    "format": str,
    "method": str,
}


def _experiment_config(args):
    values = {}
    if args.config:
        for key, raw in _read_config_file(args.config).items():
            if key not in _CONFIG_COERCE:
                raise UsageError(f"unknown config key {key!r}")
            values[key] = _CONFIG_COERCE[key](raw)
    for key in _CONFIG_COERCE:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    if not values.get("dataset"):
        raise UsageError("a dataset path is required (--data or config 'dataset')")
    return ExperimentConfig(**values)


def _add_experiment_flags(p, default_r_grid=None):
    p.add_argument("--config", help="key = value config file")
    p.add_argument("--data", dest="dataset", help="dataset path")
    p.add_argument("--format", choices=["bundle", "csv-dir"], default=None)
    p.add_argument("--method", choices=["tsnmf", "seminmf", "kmeans", "twodpca+kmeans"],
                   default=None)
    p.add_argument("--n-values", dest="n_values", type=_parse_int_list, default=None)
    p.add_argument("--subsets-per-n", dest="subsets_per_n", type=int, default=None)
    p.add_argument("--lambda-grid", dest="lambda_grid", type=_parse_float_list,
                   default=None)
    p.add_argument("--r-grid", dest="r_grid", type=_parse_int_list,
                   default=default_r_grid)
    p.add_argument("--m-neighbors", dest="m_neighbors", type=int, default=None)
    p.add_argument("--t-max", dest="t_max", type=int, default=None)
    p.add_argument("--restarts", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)


def _build_parser():
    parser = _Parser(prog="tsnmf", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit the model and save it")
    p.add_argument("--data", required=True)
    p.add_argument("--format", choices=["bundle", "csv-dir"], default="bundle")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--lambda1", type=float, default=1.0)
    p.add_argument("--lambda2", type=float, default=1.0)
    p.add_argument("--t-max", type=int, default=100)
    p.add_argument("--rel-tol", type=float, default=1e-6)
    p.add_argument("--m-neighbors", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output model file")

    p = sub.add_parser("predict", help="k-means labels from a saved model")
    p.add_argument("--model", required=True)
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output labels file, one per line")

    p = sub.add_parser("eval", help="score predicted labels against ground truth")
    p.add_argument("--pred", required=True, help="labels file, one integer per line")
    p.add_argument("--truth", required=True, help="labels file, one integer per line")

    p = sub.add_parser("experiment", help="subset/grid protocol with CSV reports")
    _add_experiment_flags(p)
    p.add_argument("--raw-out", required=True)
    p.add_argument("--summary-out", required=True)

    p = sub.add_parser("r-curve", help="performance versus projection rank")
    _add_experiment_flags(p, default_r_grid=EXTENDED_R_GRID)
    p.add_argument("--out", required=True)

    p = sub.add_parser("lambda-surface", help="performance over the lambda grid")
    _add_experiment_flags(p)
    p.add_argument("--out", required=True)

    p = sub.add_parser("synth", help="generate a synthetic labeled bundle")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n-per", type=int, required=True)
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--noise-sigma", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("corrupt", help="zero a fraction of entries per sample")
    p.add_argument("--data", required=True)
    p.add_argument("--format", choices=["bundle", "csv-dir"], default="bundle")
    p.add_argument("--fraction", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("bench", help="time one solver iteration across sizes")
    p.add_argument("--sizes", type=_parse_int_list, default=(200, 400, 800))
    p.add_argument("--d", type=int, default=256)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    return parser


def _read_labels_file(path):
    try:
        return np.array([int(v) for v in open(path).read().split()])
    except OSError as exc:
        raise DatasetFormatError(f"cannot read {path}: {exc}") from exc
    except ValueError as exc:
        raise DatasetFormatError(f"{path}: non-integer label") from exc


def _cmd_fit(args):
    ds = load_dataset(args.data, format=args.format)
    model, trace = solver.fit(
        ds.samples, k=args.k, r=args.r, lambda1=args.lambda1, lambda2=args.lambda2,
        t_max=args.t_max, rel_tol=args.rel_tol, m_neighbors=args.m_neighbors,
        seed=args.seed,
    )
    config = {
        "k": args.k, "r": args.r, "lambda1": args.lambda1, "lambda2": args.lambda2,
        "t_max": args.t_max, "rel_tol": args.rel_tol,
        "m_neighbors": args.m_neighbors, "seed": args.seed,
    }
    solver.save_model(model, args.out, config=config)
    print(f"fitted in {len(trace)} iterations, final objective {trace[-1]:.10g}")
    print(f"model written to {args.out}")


def _cmd_predict(args):
    try:
        model, _ = solver.load_model(args.model)
    except (OSError, ValueError) as exc:
        raise DatasetFormatError(str(exc)) from exc
    labels = solver.predict_labels(
        model, model.V.shape[1], restarts=args.restarts, seed=args.seed
    )
    with open(args.out, "w") as fh:
        fh.write("\n".join(str(int(v)) for v in labels) + "\n")
    print(f"labels written to {args.out}")


def _cmd_eval(args):
    pred = _read_labels_file(args.pred)
    truth = _read_labels_file(args.truth)
    if pred.size != truth.size:
        raise DatasetFormatError(
            f"label count mismatch: {pred.size} predictions, {truth.size} truths"
        )
    print(f"acc {clustering_accuracy(pred, truth):.6f}")
    print(f"nmi {nmi(pred, truth):.6f}")
    print(f"purity {purity(pred, truth):.6f}")


def _cmd_experiment(args):
    config = _experiment_config(args)
    ds = load_dataset(config.dataset, format=config.format, want_labels=True)
    run_experiment(config, ds, args.raw_out, args.summary_out)
    print(f"raw rows written to {args.raw_out}")
    print(f"summary written to {args.summary_out}")


def _cmd_r_curve(args):
    config = _experiment_config(args)
    ds = load_dataset(config.dataset, format=config.format, want_labels=True)
    emit_r_curve(config, ds, args.out)
    print(f"r curve written to {args.out}")


def _cmd_lambda_surface(args):
    config = _experiment_config(args)
    ds = load_dataset(config.dataset, format=config.format, want_labels=True)
    emit_lambda_surface(config, ds, args.out)
    print(f"lambda surface written to {args.out}")


def _cmd_synth(args):
    ds = synth_clusters(args.k, args.n_per, args.a, args.b, args.noise_sigma, args.seed)
    save_bundle(ds, args.out)
    print(f"synthetic bundle ({ds.n} samples) written to {args.out}")


def _cmd_corrupt(args):
    ds = load_dataset(args.data, format=args.format)
    save_bundle(corrupt(ds, args.fraction, args.seed), args.out)
    print(f"corrupted bundle written to {args.out}")


def _cmd_bench(args):
    rows = bench_scaling(args.sizes, d=args.d, out_path=args.out, seed=args.seed)
    for n, d, ms in rows:
        print(f"n={n} d={d} {ms} ms/iter")
    print(f"benchmark written to {args.out}")


_COMMANDS = {
    "fit": _cmd_fit,
    "predict": _cmd_predict,
    "eval": _cmd_eval,
    "experiment": _cmd_experiment,
    "r-curve": _cmd_r_curve,
    "lambda-surface": _cmd_lambda_surface,
    "synth": _cmd_synth,
    "corrupt": _cmd_corrupt,
    "bench": _cmd_bench,
}


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except DatasetFormatError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
