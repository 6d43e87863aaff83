"""
Experiment pipelines behind the command line: the Lorenz and
Lotka-Volterra protocols, the model comparison table and the static
benchmark tables.

An experiment is a pure function of its
:class:`hankeldyn.config.ExperimentConfig`. The deterministic results are
written to ``metrics.csv``; wall-clock measurements go to ``timing.csv``.
"""
import concurrent.futures
import contextlib
import dataclasses
import logging
import os
import time

import numpy as np

from hankeldyn import dmd, dynsys, ffnn, havok, sindy, stnn, storage
from hankeldyn.errors import ConfigError, StageError
from hankeldyn.hankel import complexity_report
from hankeldyn.lm import LMSettings
from hankeldyn.rollout import (
    DIVERGENCE_LIMIT, ClockAndEnvironment, PaddingReset, autoregressive,
    rollout_mse)

logger = logging.getLogger(__name__)

METRICS_HEADER = ["model", "system", "train_error", "params", "flops", "test_mse"]
TIMING_HEADER = ["model", "train_time", "inference_time"]
COMPARISON_HEADER = METRICS_HEADER + ["param_saving", "flop_saving"]
STNN_TABLE_HEADER = ["p", "params", "flops", "param_saving", "flop_saving",
                     "reported_param_saving", "reported_flop_saving"]

# Savings of the structured network over the dense 3-30-30-30-3 network
# reported for the full-scale Lorenz runs, percent (parameters, flops).
REPORTED_SAVINGS = {1: (96, 96), 2: (94, 92), 4: (87, 84), 6: (81, 76), 8: (74, 70)}
# The inference comparison quotes a different flop saving at p=6.
REPORTED_INFERENCE_FLOP_SAVING = 78

_names = {"lorenz": ("x", "y", "z"), "lotka_volterra": ("x", "y")}


@dataclasses.dataclass
class MetricsRow(object):
    '''Results of one experiment.

    `train_error` is the training objective of a network, or the mean
    squared one-step error on the training data of a classical model.
    `test_mse` is infinite when a rollout diverged.
    '''

    model: str
    system: str
    train_error: float
    params: int
    flops: int
    test_mse: float
    train_time: float = 0.0
    inference_time: float = 0.0

    def metrics_record(self):
        return [getattr(self, k) for k in METRICS_HEADER]

    def timing_record(self):
        return [getattr(self, k) for k in TIMING_HEADER]


@dataclasses.dataclass
class EvalCase(object):
    '''A reference trajectory to forecast.

    Attributes:
        history (numpy.array): Rows up to and including the start state.
        reference (numpy.array): The start state and the states to
            forecast, one per row.
        t0 (float): Time of the start state.
    '''

    history: np.ndarray
    reference: np.ndarray
    t0: float = 0.0

    @property
    def steps(self):
        return len(self.reference) - 1


@dataclasses.dataclass
class ExperimentData(object):
    '''Generated data of one experiment.

    Attributes:
        train (TrajectoryDataset): Training pairs.
        val (TrajectoryDataset): Validation pairs, or None.
        trajectories (list): Source trajectories of the training data.
        cases (list): :class:`EvalCase` objects.
        coords (list): State coordinates entering the errors.
        dt (float): Sampling interval.
        manifest (dict): Dataset description.
        transitions (list): Per trajectory, a boolean array marking the
            transitions that are training pairs.
    '''

    train: dynsys.TrajectoryDataset
    val: object
    trajectories: list
    cases: list
    coords: list
    dt: float
    manifest: dict
    transitions: list = None


def model_label(config):
    if config.model == "stnn":
        return "stnn(p=%d)" % config.p
    if config.model == "ffnn":
        return "ffnn(%s)" % "-".join(str(h) for h in config.hidden)
    return config.model


def evaluation_key(config):
    '''The settings that fix the data and the evaluation trajectories;
    configurations can only be compared when these agree.'''
    shared = ("system", "seed", "rollout_steps", "eval_seed", "eval_noise",
              "n_eval_trajectories", "havok_q", "tol")
    if config.system == "lorenz":
        shared += ("n_traj", "noise_mag", "dt", "T", "method", "train_frac",
                   "split_seed")
    else:
        shared += ("n_envs", "env_seed", "n_train_traj", "n_test_traj",
                   "lv_dt", "lv_points", "train_frac", "split_seed")
    return tuple((k, getattr(config, k)) for k in shared)


class Forecaster(object):
    '''A fitted model together with the state conventions of its system.

    Lorenz states are `(x, y, z)`, zero-padded to width 4 for the
    structured network. Lotka-Volterra rows are `(x, y, t, env)`; every
    model sees the full row and the clock and environment coordinates are
    restored after each step.

    A network maps standardized states to standardized targets: the next
    state, or with `increment` the change over one sampling interval.

    Args:
        kind (str): Model name, one of :data:`hankeldyn.config.MODELS`.
        model: The fitted model, or network parameters.
        system (str): `lorenz` or `lotka_volterra`.
        dt (float): Sampling interval.
        standardizer (hankeldyn.dynsys.Standardizer, optional): Scaling
            of the network inputs.
        target_standardizer (hankeldyn.dynsys.Standardizer, optional):
            Scaling of the network outputs, the input scaling by default.
        increment (bool, optional): Whether the network predicts the
            increment.
    '''

    def __init__(self, kind, model, system, dt, standardizer=None,
                 target_standardizer=None, increment=False):
        if kind in ("stnn", "ffnn") and standardizer is None:
            raise ValueError("A network needs a standardizer")
        self.kind = kind
        self.model = model
        self.system = system
        self.dt = dt
        self.standardizer = standardizer
        self.target_standardizer = target_standardizer or standardizer
        self.increment = increment

    @property
    def dimension(self):
        '''Width of the recorded state rows.'''
        return 3 if self.system == "lorenz" else 4

    @property
    def width(self):
        '''Width of the states the model itself advances.'''
        if self.kind == "stnn":
            return stnn.STATE_WIDTH
        return self.dimension

    def adapter(self):
        if self.system == "lotka_volterra":
            return ClockAndEnvironment(self.dt)
        if self.width > self.dimension:
            return PaddingReset(self.dimension)
        return None

    def step(self, state):
        '''Advance a state of width :attr:`width` by one sampling interval.'''
        if self.kind in ("stnn", "ffnn"):
            net = stnn.forward if self.kind == "stnn" else ffnn.forward
            z = self.standardizer.transform(state)
            out = self.target_standardizer.inverse_transform(net(self.model, z))
            return state + out if self.increment else out
        if self.kind == "dmd":
            return self.model.predict(state)
        if self.kind == "sindy":
            return dynsys.rk4_step(self.model.rhs, state, self.dt)
        raise ValueError("A delay model advances whole windows, use forecast()")

    def forecast(self, history, steps, t0=0.0):
        '''Forecast `steps` samples after the last row of `history`.

        Args:
            history (numpy.array): Rows of width :attr:`dimension`, oldest
                first. A delay model needs at least `q` of them, every
                other model uses the last one only.
            steps (int): Number of forecast steps.
            t0 (float, optional): Time of the last history row.

        Returns:
            hankeldyn.dynsys.Trajectory: `steps + 1` rows starting with the
            last history row, truncated if the forecast diverges.
        '''
        history = np.atleast_2d(np.asarray(history, dtype=np.float64))
        if self.kind == "havok":
            return self._forecast_delay(history, steps, t0)
        x0 = dynsys.pad_states(history[-1], self.width)
        traj = autoregressive(self.step, x0, steps, dt=self.dt, t0=t0,
                              adapter=self.adapter())
        if self.width > self.dimension:
            traj = dynsys.Trajectory(traj.times, traj.states[:, :self.dimension],
                                     traj.diverged_at)
        return traj

    def _forecast_delay(self, history, steps, t0):
        q = self.model.q
        if len(history) < q:
            raise ValueError("A delay model needs %d history rows, got %d"
                             % (q, len(history)))
        with np.errstate(over="ignore", invalid="ignore"):
            predicted = havok.havok_predict(self.model, history[-q:], steps)
        coordinate = self.model.coordinate
        if coordinate is not None:
            # Only the embedded coordinate is forecast.
            rows = np.full((steps, history.shape[1]), np.nan)
            rows[:, coordinate] = predicted
            predicted = rows
        states = np.vstack([history[-1], predicted])
        watched = states if coordinate is None else states[:, [coordinate]]
        norms = np.linalg.norm(watched, axis=1)
        bad = np.flatnonzero(~np.isfinite(norms) | (norms > DIVERGENCE_LIMIT))
        diverged_at = None
        if len(bad):
            diverged_at = int(bad[0])
            states = states[:diverged_at]
            logger.warning("Delay model forecast diverged at step %d", diverged_at)
        times = t0 + self.dt * np.arange(len(states))
        return dynsys.Trajectory(times, states, diverged_at)

    def error_coords(self, coords):
        '''The coordinates among `coords` that the model forecasts.'''
        if self.kind == "havok" and self.model.coordinate is not None:
            return [c for c in coords if c == self.model.coordinate]
        return list(coords)

    def timing_call(self, history):
        '''A zero-argument callable performing one forecast step.'''
        history = np.atleast_2d(history)
        if self.kind == "havok":
            v = self.model.embed(history[-self.model.q:])
            return lambda: self.model.advance(v)
        x = dynsys.pad_states(history[-1], self.width)
        return lambda: self.step(x)

    def param_count(self):
        if self.kind == "stnn":
            return stnn.count_params(self.model)
        if self.kind == "ffnn":
            return ffnn.count_params(self.model)
        return self.model.param_count()

    def flop_count(self):
        if self.kind == "stnn":
            return stnn.count_flops(self.model.config)
        if self.kind == "ffnn":
            return ffnn.count_flops(self.model.config)
        return self.model.flop_count()

    def save(self, path):
        extra = dict(system=self.system, dt=self.dt)
        if self.standardizer is not None:
            extra["standardizer"] = self.standardizer.to_dict()
            extra["target_standardizer"] = self.target_standardizer.to_dict()
            extra["increment"] = self.increment
        storage.save_model(path, self.model, **extra)

    @classmethod
    def load(cls, path):
        model, doc = storage.load_model(path)
        std, target = doc.get("standardizer"), doc.get("target_standardizer")
        return cls(doc["kind"], model, doc.get("system", "lorenz"),
                   doc.get("dt", 0.01),
                   dynsys.Standardizer.from_dict(std) if std else None,
                   dynsys.Standardizer.from_dict(target) if target else None,
                   doc.get("increment", False))


@contextlib.contextmanager
def _stage(name, config_hash):
    logger.info("Stage %s (config %s)", name, config_hash)
    try:
        yield
    except StageError:
        raise
    except Exception as e:
        raise StageError(name, config_hash, e) from e


def generate(config):
    '''Generate the training data and evaluation trajectories.

    Returns:
        ExperimentData: The data.
    '''
    if config.system == "lorenz":
        return _generate_lorenz(config)
    return _generate_lotka_volterra(config)


def _generate_lorenz(config):
    ds = dynsys.generate_lorenz_dataset(
        n_traj=config.n_traj, noise_mag=config.noise_mag, seed=config.seed,
        dt=config.dt, T=config.T, tol=config.tol, method=config.method)
    train_idx, val_idx = dynsys.split_indices(len(ds), config.train_frac,
                                              config.split_seed)
    train, val = ds.subset(train_idx), ds.subset(val_idx)
    transitions = dynsys.transition_masks([len(t) for t in ds.trajectories],
                                          train_idx)
    model = dynsys.OdeModel.lorenz()
    history = config.havok_q
    cases = []
    for i in range(config.n_eval_trajectories):
        traj = dynsys.generate_eval_trajectory(
            model, dynsys.LORENZ_IC, config.eval_noise, config.eval_seed + i,
            config.dt, config.rollout_steps, history=history, tol=config.tol,
            method=config.method)
        cases.append(EvalCase(traj.states[:history + 1], traj.states[history:],
                              float(traj.times[history])))
    manifest = dict(ds.metadata, n_train=len(train), n_val=len(val))
    return ExperimentData(train, val, ds.trajectories, cases, [0, 1, 2],
                          config.dt, manifest, transitions)


def _generate_lotka_volterra(config):
    envs = dynsys.default_environments(config.n_envs, config.env_seed)
    per_env = dynsys.generate_lv_dataset(
        envs, n_train_traj=config.n_train_traj, n_test_traj=config.n_test_traj,
        seed=config.seed, dt=config.lv_dt, n_points=config.lv_points,
        tol=config.tol)
    steps = min(config.rollout_steps, config.lv_points - 1)
    if steps < 1 or config.n_test_traj < 1:
        raise ValueError("Need test trajectories with at least two points")
    cases = []
    for env, (_, test) in zip(envs, per_env):
        for traj in test.trajectories:
            rows = dynsys.lv_rows(traj, env.id)
            cases.append(EvalCase(rows[:1], rows[:steps + 1], float(traj.times[0])))
    manifest = dict(system="lotka_volterra", seed=config.seed,
                    environments=[dict(id=e.id, params=list(e.params)) for e in envs],
                    dt=config.lv_dt, n_points=config.lv_points)
    pairs = dynsys.TrajectoryDataset.concatenate([tr for tr, _ in per_env], manifest)
    train_idx, val_idx = dynsys.split_indices(len(pairs), config.train_frac,
                                              config.split_seed)
    train, val = pairs.subset(train_idx), pairs.subset(val_idx)
    manifest.update(n_train=len(train), n_val=len(val))
    trajectories = [dynsys.lv_rows(t, env.id)
                    for env, (tr, _) in zip(envs, per_env) for t in tr.trajectories]
    transitions = dynsys.transition_masks([len(t) for t in trajectories], train_idx)
    return ExperimentData(train, val, trajectories, cases, [0, 1],
                          config.lv_dt, manifest, transitions)


def _lm_settings(config):
    return LMSettings(damping=config.damping, damping_up=config.damping_up,
                      damping_down=config.damping_down,
                      steps_per_batch=config.steps_per_batch)


def _fit_network(config, data):
    width = stnn.STATE_WIDTH if config.model == "stnn" else data.train.dimension

    def rows(ds):
        x = dynsys.pad_states(ds.x.T, width)
        y = dynsys.pad_states(ds.xp.T, width)
        return x, (y - x) if config.predict_increment else y

    x, y = rows(data.train)
    if config.standardize:
        std = dynsys.Standardizer().fit(x)
        target = dynsys.Standardizer().fit(y) if config.predict_increment else std
    else:
        std = target = dynsys.Standardizer.identity(width)
    train = (std.transform(x).T, target.transform(y).T)
    val = None
    if data.val is not None:
        vx, vy = rows(data.val)
        val = (std.transform(vx).T, target.transform(vy).T)
    batch_size = min(config.batch_size, len(x))
    if config.model == "stnn":
        cfg = stnn.StnnConfig(p=config.p, activations=config.activations,
                              alpha=config.alpha, seed=config.seed)
        params, report = stnn.train_lm(stnn.init(cfg), train, val, config.epochs,
                                       batch_size, _lm_settings(config),
                                       patience=config.patience)
    else:
        cfg = ffnn.FfnnConfig((width,) + tuple(config.hidden) + (width,),
                              config.activations, config.alpha, config.seed)
        params, report = ffnn.train_lm(ffnn.init(cfg), train, val, config.epochs,
                                       batch_size, _lm_settings(config),
                                       patience=config.patience)
    forecaster = Forecaster(config.model, params, config.system, data.dt, std,
                            target, config.predict_increment)
    return forecaster, report.final_train_loss, report


def _one_step_error(forecaster, data):
    x, xp = data.train.x.T, data.train.xp.T
    if forecaster.kind == "dmd":
        predicted = forecaster.model.predict(data.train.x).T
    else:
        predicted = np.array([forecaster.step(row) for row in x])
    return rollout_mse(predicted, xp, data.coords)


def fit(config, data):
    '''Train or fit the configured model.

    Returns:
        tuple: `(forecaster, train_error, report)`; the report is the
        :class:`hankeldyn.lm.TrainReport` of a network and None otherwise.
    '''
    if config.model in ("stnn", "ffnn"):
        return _fit_network(config, data)
    if config.model == "dmd":
        model = dmd.dmd_fit(data.train.x, data.train.xp, rank=config.dmd_rank)
    elif config.model == "sindy":
        masks = None
        if data.transitions is not None:
            # A sample enters the regression when its outgoing transition
            # is a training pair.
            masks = [np.append(t, False) for t in data.transitions]
        model = sindy.sindy_fit(data.trajectories, data.dt,
                                threshold=config.sindy_threshold,
                                max_stlsq_iter=config.sindy_max_iter, masks=masks)
    else:
        series = [t.states for t in data.trajectories]
        model = havok.havok_fit(series, q=config.havok_q, r=config.havok_r,
                                coordinate=config.havok_coordinate,
                                transitions=data.transitions)
        forecaster = Forecaster("havok", model, config.system, data.dt)
        error = havok.one_step_error(model, series, transitions=data.transitions)
        return forecaster, error, None
    forecaster = Forecaster(config.model, model, config.system, data.dt)
    return forecaster, _one_step_error(forecaster, data), None


def evaluate(forecaster, data):
    '''Roll the model out on every evaluation case.

    Returns:
        tuple: `(mse, predictions)`, the mean over the cases of the mean
        squared error over all forecast steps and compared coordinates,
        and one predicted trajectory per case.
    '''
    coords = forecaster.error_coords(data.coords)
    errors, predictions = [], []
    for case in data.cases:
        pred = forecaster.forecast(case.history, case.steps, t0=case.t0)
        errors.append(rollout_mse(pred.states[1:], case.reference[1:], coords))
        predictions.append(pred)
    return float(np.mean(errors)), predictions


def time_inference(fn, calls=1000, warmup=100):
    '''Median wall-clock seconds of `fn()` over `calls` calls, after
    `warmup` untimed calls.'''
    for _ in range(warmup):
        fn()
    samples = np.empty(calls)
    for i in range(calls):
        start = time.perf_counter()
        fn()
        samples[i] = time.perf_counter() - start
    return float(np.median(samples))


def trajectory_table(case, prediction, coords, names, dt):
    '''Header and rows of `t, <name>_true..., <name>_pred...`; forecast
    steps lost to divergence are written as NaN.'''
    n = len(case.reference)
    pred = np.full((n, len(coords)), np.nan)
    pred[:len(prediction.states)] = prediction.states[:n, coords]
    times = case.t0 + dt * np.arange(n)
    header = ["t"] + ["%s_true" % k for k in names] + ["%s_pred" % k for k in names]
    rows = np.column_stack([times, case.reference[:, coords], pred])
    return header, rows.tolist()


def run(config, out_dir=None):
    '''Run one experiment: generate, train or fit, and evaluate by
    autoregressive rollout.

    Args:
        config (hankeldyn.config.ExperimentConfig): The experiment.
        out_dir (str, optional): Directory receiving `config.json`,
            `metrics.csv`, `timing.csv`, `trajectory.csv`, `model.json`
            and `manifest.json`.

    Returns:
        MetricsRow: The results.

    Raises:
        hankeldyn.errors.ConfigError: If the configuration is invalid.
        hankeldyn.errors.StageError: If a stage fails; it names the stage
            and the configuration hash and wraps the original error.
    '''
    config.validate()
    key = config.config_hash()
    logger.info("Running %s on %s (config %s)", model_label(config),
                config.system, key)
    with _stage("generate", key):
        data = generate(config)
    with _stage("train", key):
        start = time.perf_counter()
        forecaster, train_error, report = fit(config, data)
        train_time = time.perf_counter() - start
    with _stage("evaluate", key):
        test_mse, predictions = evaluate(forecaster, data)
        inference_time = time_inference(forecaster.timing_call(data.cases[0].history),
                                        config.timing_calls, config.timing_warmup)
    row = MetricsRow(model_label(config), config.system, float(train_error),
                     int(forecaster.param_count()), int(forecaster.flop_count()),
                     test_mse, train_time, inference_time)
    logger.info("%s: train error %.6g, test MSE %.6g, %d params, %d flops",
                row.model, row.train_error, row.test_mse, row.params, row.flops)
    if out_dir is not None:
        with _stage("write", key):
            _write_artifacts(out_dir, config, data, forecaster, row,
                             predictions[0], report)
    return row


def _write_artifacts(out_dir, config, data, forecaster, row, prediction, report):
    if not os.path.isdir(out_dir):
        os.makedirs(out_dir)
    config.to_json(os.path.join(out_dir, "config.json"))
    storage.write_table(os.path.join(out_dir, "metrics.csv"), METRICS_HEADER,
                        [row.metrics_record()])
    storage.write_table(os.path.join(out_dir, "timing.csv"), TIMING_HEADER,
                        [row.timing_record()])
    header, rows = trajectory_table(data.cases[0], prediction, data.coords,
                                    _names[config.system], data.dt)
    storage.write_table(os.path.join(out_dir, "trajectory.csv"), header, rows)
    forecaster.save(os.path.join(out_dir, "model.json"))
    storage.write_json(os.path.join(out_dir, "manifest.json"), data.manifest)
    if report is not None:
        storage.write_json(os.path.join(out_dir, "training.json"),
                           dict(report.as_trace(),
                                initial_train_loss=report.initial_train_loss,
                                final_train_loss=report.final_train_loss,
                                final_val_loss=report.final_val_loss,
                                epochs=report.epochs,
                                best_epoch=report.best_epoch,
                                stopped_early=report.stopped_early))


def saving(value, reference):
    '''Percent saved by `value` relative to `reference`.'''
    return 100.0 * (1.0 - float(value) / float(reference))


def _run_in(args):
    config, out_dir = args
    return run(config, out_dir)


def compare(configs, out_dir=None, workers=1):
    '''Run several experiments on a shared split and tabulate them.

    Savings are computed against the first dense-network configuration,
    or against the first configuration when there is none.

    Args:
        configs (list): At least two configurations with the same
            :func:`evaluation_key`.
        out_dir (str, optional): Directory receiving `comparison.csv`,
            `comparison_notes.txt` and one sub-directory per run.
        workers (int, optional): Parallel processes; results keep the
            order of `configs`.

    Returns:
        list: One dict per configuration with the columns of
        :data:`COMPARISON_HEADER`.

    Raises:
        hankeldyn.errors.ConfigError: With fewer than two configurations
            or if they do not share the evaluation split.
    '''
    configs = list(configs)
    if len(configs) < 2:
        raise ConfigError("compare needs at least two configurations")
    for c in configs:
        c.validate()
    if len({evaluation_key(c) for c in configs}) > 1:
        raise ConfigError("Configurations do not share the evaluation split; "
                          "dataset and evaluation settings must agree")
    dirs = [None if out_dir is None else
            os.path.join(out_dir, "%02d-%s" % (i, c.config_hash()))
            for i, c in enumerate(configs)]
    if workers > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as ex:
            rows = list(ex.map(_run_in, zip(configs, dirs)))
    else:
        rows = [run(c, d) for c, d in zip(configs, dirs)]
    ref = next((i for i, c in enumerate(configs) if c.model == "ffnn"), 0)
    table = []
    for row in rows:
        record = dict(zip(METRICS_HEADER, row.metrics_record()))
        record["param_saving"] = saving(row.params, rows[ref].params)
        record["flop_saving"] = saving(row.flops, rows[ref].flops)
        table.append(record)
    if out_dir is not None:
        storage.write_records(os.path.join(out_dir, "comparison.csv"), table,
                              COMPARISON_HEADER)
        with open(os.path.join(out_dir, "comparison_notes.txt"), "w") as f:
            f.write("\n".join(comparison_notes(configs, rows[ref].model)) + "\n")
    return table


def comparison_notes(configs, reference):
    '''Footnotes of a comparison table.'''
    notes = ["Savings are 100 (1 - value / reference) against %s." % reference]
    for c in configs:
        if c.model == "stnn" and c.p in REPORTED_SAVINGS:
            params, flops = REPORTED_SAVINGS[c.p]
            note = ("Reported for p=%d against the dense network: parameter "
                    "saving %d%%, flop saving %d%%" % (c.p, params, flops))
            if c.p == 6:
                note += (" in the per-p table and %d%% in the inference "
                         "comparison" % REPORTED_INFERENCE_FLOP_SAVING)
            notes.append(note + ".")
    return notes


def hankel_table(sizes, seed=0):
    '''Flops of the dense, shift and FFT Hankel products per size.'''
    return complexity_report(sizes, seed=seed)


def stnn_table(p_values=(1, 2, 4, 6, 8), sizes=ffnn.DEFAULT_SIZES):
    '''Parameters and measured flops of the structured network for each
    `p`, with savings over the dense network of the given sizes and the
    reported savings where known.'''
    dense = ffnn.FfnnConfig(sizes)
    ref_params = ffnn.count_params(ffnn.init(dense))
    ref_flops = ffnn.count_flops(dense)
    rows = []
    for p in p_values:
        cfg = stnn.StnnConfig(p=p)
        params = stnn.count_params(stnn.init(cfg))
        flops = stnn.count_flops(cfg)
        reported = REPORTED_SAVINGS.get(p, ("", ""))
        rows.append(dict(p=p, params=params, flops=flops,
                         param_saving=saving(params, ref_params),
                         flop_saving=saving(flops, ref_flops),
                         reported_param_saving=reported[0],
                         reported_flop_saving=reported[1]))
    return rows
