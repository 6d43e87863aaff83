"""
Command-line interface, installed as ``hankeldyn``.

Every experiment setting of :class:`hankeldyn.config.ExperimentConfig` is
available as a flag (``n_traj`` as ``--n-traj``); flags override the
values of a ``--config`` JSON file. Exit status is 0 on success, 2 for a
configuration error, 3 for a numerical failure and 1 for anything else.
"""
import argparse
import dataclasses
import logging
import os
import sys
import typing

import numpy as np

from hankeldyn import bestfit, dmd, dynsys, experiment, havok, sindy, storage
from hankeldyn.config import ExperimentConfig, MODELS, SYSTEMS
from hankeldyn.errors import ConfigError, StageError
from hankeldyn.version import __version__

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

# Short spellings kept next to the long flags.
_aliases = {"batch_size": ["--batch"], "n_traj": ["--trajectories"]}


def _parse_list(item_type):
    def parse(text):
        try:
            return tuple(item_type(v) for v in text.split(",") if v.strip())
        except ValueError:
            raise argparse.ArgumentTypeError("expecting comma-separated "
                                             "%s values" % item_type.__name__)
    return parse


def _parse_bool(text):
    if text.lower() in ("1", "true", "yes", "on"):
        return True
    if text.lower() in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError("expecting true or false, got %r" % text)


def _flag_type(field):
    default = field.default
    if isinstance(default, bool):
        return _parse_bool
    if isinstance(default, tuple):
        return _parse_list(type(default[0]) if default else str)
    if default is None:
        args = typing.get_args(field.type)
        return next((a for a in args if a is not type(None)), str)
    return type(default)


def add_config_flags(parser, exclude=()):
    '''Add one flag per configuration setting, plus `--config` and `--full`.'''
    group = parser.add_argument_group("experiment configuration")
    group.add_argument("--config", help="JSON configuration file; flags "
                       "override its values.")
    group.add_argument("--full", action="store_true",
                       help="Use the full-scale protocol (100 trajectories, "
                       "20 epochs) before applying flags.")
    for field in dataclasses.fields(ExperimentConfig):
        if field.name in exclude:
            continue
        flags = ["--" + field.name.replace("_", "-")] + _aliases.get(field.name, [])
        kwargs = dict(dest=field.name, type=_flag_type(field), default=None,
                      help="default: %r" % (field.default,))
        if field.name == "system":
            kwargs["choices"] = SYSTEMS
        group.add_argument(*flags, **kwargs)


def config_from_args(args, **fixed):
    '''Build the configuration: file, then `--full`, then flags.'''
    cfg = ExperimentConfig.from_json(args.config) if args.config else ExperimentConfig()
    if args.full:
        cfg = cfg.full_scale()
    overrides = {f.name: getattr(args, f.name, None)
                 for f in dataclasses.fields(ExperimentConfig)}
    overrides = {k: v for k, v in overrides.items() if v is not None}
    overrides.update(fixed)
    return cfg.replace(**overrides)


def _write_rows(path, header, rows):
    if path:
        storage.write_table(path, header, rows)
        logger.info("Wrote %s", path)
        return
    sys.stdout.write(",".join(header) + "\n")
    for row in rows:
        sys.stdout.write(",".join(storage.format_value(v) for v in row) + "\n")


def cmd_generate(args):
    cfg = config_from_args(args)
    data = experiment.generate(cfg)
    out = args.out_dir
    storage.write_pairs(os.path.join(out, "pairs.csv"), data.train)
    if data.val is not None:
        storage.write_pairs(os.path.join(out, "val_pairs.csv"), data.val)
    for i, traj in enumerate(data.trajectories):
        path = os.path.join(out, "trajectories", "%04d.csv" % i)
        if isinstance(traj, dynsys.Trajectory):
            storage.write_trajectory(path, traj)
        else:
            storage.write_table(path, ["x1", "x2", "t", "env"], traj.tolist())
    storage.write_json(os.path.join(out, "manifest.json"), data.manifest)
    cfg.to_json(os.path.join(out, "config.json"))
    logger.info("Wrote %d training pairs to %s", len(data.train), out)


def cmd_train(args):
    cfg = config_from_args(args, model=args.network)
    data = experiment.generate(cfg)
    forecaster, train_error, report = experiment.fit(cfg, data)
    forecaster.save(args.out)
    storage.write_json(os.path.splitext(args.out)[0] + ".report.json",
                       dict(report.as_trace(), config=cfg.to_dict(),
                            final_train_loss=report.final_train_loss,
                            final_val_loss=report.final_val_loss))
    logger.info("Training objective %.6g, model written to %s", train_error, args.out)


def cmd_fit_hankel(args):
    ds = storage.read_pairs(args.input)
    problem = bestfit.FitProblem(ds.x, ds.xp, alpha=args.alpha)
    result = bestfit.fit_operator(problem, step_rule=args.step_rule,
                                  max_iter=args.max_iter, rel_tol=args.rel_tol,
                                  accelerated=args.accelerated,
                                  project=args.project)
    storage.write_matrix(args.out, result.h_hat)
    report = args.report or os.path.splitext(args.out)[0] + ".json"
    storage.write_json(report, dict(objective_trace=result.objective_trace,
                                    rank=result.rank,
                                    iterations=result.iterations,
                                    converged=result.converged,
                                    alpha=args.alpha))
    logger.info("Fitted operator of rank %d in %d iterations", result.rank,
                result.iterations)


def cmd_fit(args):
    traj = storage.read_trajectory(args.input)
    dt = args.dt if args.dt is not None else float(np.median(np.diff(traj.times)))
    if args.method == "dmd":
        x, xp = traj.pairs()
        model = dmd.dmd_fit(x, xp, rank=args.rank)
    elif args.method == "sindy":
        model = sindy.sindy_fit(traj, dt, threshold=args.threshold,
                                max_stlsq_iter=args.max_stlsq_iter)
        for line in model.equations():
            logger.info("d/dt = %s", line)
    else:
        coordinate = args.coordinate if args.coordinate >= 0 else None
        model = havok.havok_fit(traj.states, q=args.q, r=args.r, coordinate=coordinate)
    experiment.Forecaster(args.method, model, args.system, dt).save(args.out)
    logger.info("%s model with %d parameters written to %s", args.method,
                model.param_count(), args.out)


def cmd_rollout(args):
    forecaster = experiment.Forecaster.load(args.model)
    if args.history:
        history = storage.read_trajectory(args.history).states
    elif args.ic:
        history = np.asarray(args.ic, dtype=np.float64)[None, :]
    else:
        raise ConfigError("rollout needs --ic or --history")
    if history.shape[1] != forecaster.dimension:
        raise ConfigError("Initial state must have %d coordinates, got %d"
                          % (forecaster.dimension, history.shape[1]))
    traj = forecaster.forecast(history, args.steps, t0=args.t0)
    if traj.diverged:
        logger.warning("Forecast diverged at step %d", traj.diverged_at)
    storage.write_trajectory(args.out, traj)
    logger.info("Wrote %d states to %s", len(traj), args.out)


def cmd_bench(args):
    if args.table == "hankel":
        rows = experiment.hankel_table(args.sizes, seed=args.seed)
        header = ["n", "dense", "shift", "fft"]
    else:
        rows = experiment.stnn_table(args.p_values)
        header = experiment.STNN_TABLE_HEADER
    _write_rows(args.out, header, [[r[k] for k in header] for r in rows])


def cmd_compare(args):
    if args.configs:
        configs = [ExperimentConfig.from_json(p) for p in args.configs]
    else:
        base = config_from_args(args)
        configs = [base.replace(model=m) for m in args.models]
    table = experiment.compare(configs, out_dir=args.out_dir, workers=args.workers)
    if args.out_dir is None:
        header = experiment.COMPARISON_HEADER
        _write_rows(None, header, [[r[k] for k in header] for r in table])


def cmd_run(args):
    row = experiment.run(config_from_args(args), out_dir=args.out_dir)
    sys.stdout.write("%s: test MSE %s, train error %s, %d params, %d flops\n"
                     % (row.model, storage.format_value(row.test_mse),
                        storage.format_value(row.train_error), row.params,
                        row.flops))


def build_parser():
    parser = argparse.ArgumentParser(
        prog="hankeldyn",
        description="Structured Hankel networks and classical baselines for "
        "learning dynamical systems.")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="-v for progress, -vv for debugging output.")
    sub = parser.add_subparsers(dest="command")
    sub.required = True

    p = sub.add_parser("generate", help="Generate trajectories and snapshot pairs.")
    add_config_flags(p)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("train", help="Train a network with Levenberg-Marquardt.")
    p.add_argument("network", choices=("stnn", "ffnn"))
    add_config_flags(p, exclude=("model",))
    p.add_argument("--out", default="model.json")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("fit-hankel", help="Fit a best-fit low-rank operator "
                       "to snapshot pairs.")
    p.add_argument("--input", required=True, help="Pairs CSV x1..xn,xp1..xpn.")
    p.add_argument("--alpha", type=float, default=0.0,
                   help="Nuclear-norm weight.")
    p.add_argument("--step-rule", choices=("fixed", "backtracking"), default="fixed")
    p.add_argument("--max-iter", type=int, default=5000)
    p.add_argument("--rel-tol", type=float, default=1e-10)
    p.add_argument("--accelerated", action="store_true")
    p.add_argument("--project", action="store_true",
                   help="Project the result on per-symmetric Hankel matrices.")
    p.add_argument("--out", required=True, help="Output matrix CSV.")
    p.add_argument("--report", help="Output JSON report, next to --out by default.")
    p.set_defaults(func=cmd_fit_hankel)

    p = sub.add_parser("fit", help="Fit a classical baseline to a trajectory.")
    p.add_argument("method", choices=("dmd", "sindy", "havok"))
    p.add_argument("--input", required=True, help="Trajectory CSV t,x1..xn.")
    p.add_argument("--out", required=True)
    p.add_argument("--system", choices=SYSTEMS, default="lorenz")
    p.add_argument("--dt", type=float, help="Sampling interval, from the "
                   "trajectory times by default.")
    p.add_argument("--rank", type=int, help="DMD truncation rank.")
    p.add_argument("--threshold", type=float, default=0.1, help="SINDy threshold.")
    p.add_argument("--max-stlsq-iter", type=int, default=10)
    p.add_argument("--q", type=int, default=100, help="HAVOK delays.")
    p.add_argument("--r", type=int, default=15, help="HAVOK rank.")
    p.add_argument("--coordinate", type=int, default=0,
                   help="State column HAVOK embeds; -1 embeds every column.")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("rollout", help="Forecast autoregressively with a "
                       "saved model.")
    p.add_argument("--model", required=True)
    p.add_argument("--steps", type=int, default=500)
    p.add_argument("--ic", type=_parse_list(float),
                   help="Initial state, e.g. 0,1,20.")
    p.add_argument("--history", help="Trajectory CSV whose rows end at the "
                   "initial state; needed by delay models.")
    p.add_argument("--t0", type=float, default=0.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_rollout)

    p = sub.add_parser("bench", help="Static flop and parameter tables.")
    p.add_argument("table", choices=("hankel", "stnn"))
    p.add_argument("--sizes", type=_parse_list(int), default=(2, 4, 8, 16, 32, 64, 128),
                   help="Operator sizes of the hankel table.")
    p.add_argument("--p-values", "--p", dest="p_values", type=_parse_list(int),
                   default=(1, 2, 4, 6, 8), help="Branch counts of the stnn table.")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="Output CSV, standard output by default.")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("compare", help="Run several models on one split.")
    p.add_argument("configs", nargs="*", help="Configuration files; without "
                   "them --models is applied to the flag configuration.")
    p.add_argument("--models", type=_parse_list(str), default=MODELS)
    add_config_flags(p, exclude=("model",))
    p.add_argument("--out-dir")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("run", help="Run one experiment.")
    add_config_flags(p)
    p.add_argument("--out-dir")
    p.set_defaults(func=cmd_run)
    return parser


def _exit_code(e):
    if isinstance(e, StageError):
        return _exit_code(e.cause)
    if isinstance(e, ConfigError):
        return EXIT_CONFIG
    if isinstance(e, ArithmeticError):
        return EXIT_NUMERICAL
    return EXIT_FAILURE


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    level = (logging.WARNING, logging.INFO, logging.DEBUG)[min(args.verbose, 2)]
    logging.basicConfig(level=level, format="%(asctime)s %(name)s %(levelname)s %(message)s")
    try:
        args.func(args)
    except (ValueError, ArithmeticError, StageError, IOError) as e:
        logger.error("%s", e)
        return _exit_code(e)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
