"""
Mini-batch Levenberg-Marquardt training shared by the structured and the
dense networks.

A model is any object providing

* ``residuals(theta, x, y)``: the residual vector `r` whose squared norm
  is the training objective,
* ``jacobian(theta, x, y)``: the matrix :math:`\\partial r / \\partial\\theta`,
* ``blocks()``: a list of `(name, slice)` pairs naming the parameter
  blocks of the flat vector `theta`.

Samples are rows of `x` and `y`.
"""
import logging
import time

import numpy as np

from hankeldyn import linalg
from hankeldyn.errors import SingularSystemError, TrainingError

logger = logging.getLogger(__name__)


class LMSettings(object):
    '''Damping schedule of Levenberg-Marquardt.

    Args:
        damping (float, optional): Initial damping :math:`\\lambda_0`.
        damping_up (float, optional): Factor applied after a rejected step.
        damping_down (float, optional): Factor applied after an accepted
            step.
        min_damping (float, optional): Lower clamp of the damping.
        max_damping (float, optional): Damping above which a batch is
            given up.
        steps_per_batch (int, optional): Accepted steps attempted per
            mini-batch.
        gtol (float, optional): A batch is stationary when the infinity
            norm of the gradient falls below this value.
    '''

    def __init__(self, damping=1e-3, damping_up=10.0, damping_down=0.1,
                 min_damping=1e-15, max_damping=1e10, steps_per_batch=1,
                 gtol=1e-15):
        if damping <= 0 or damping_up <= 1 or not 0 < damping_down < 1:
            raise ValueError("Need damping > 0, damping_up > 1 and "
                             "0 < damping_down < 1")
        if steps_per_batch < 1:
            raise ValueError("steps_per_batch must be at least 1")
        self.damping = damping
        self.damping_up = damping_up
        self.damping_down = damping_down
        self.min_damping = min_damping
        self.max_damping = max_damping
        self.steps_per_batch = steps_per_batch
        self.gtol = gtol

    def to_dict(self):
        return dict(damping=self.damping, damping_up=self.damping_up,
                    damping_down=self.damping_down,
                    min_damping=self.min_damping,
                    max_damping=self.max_damping,
                    steps_per_batch=self.steps_per_batch, gtol=self.gtol)


class TrainReport(object):
    '''History of one training run.

    Attributes:
        loss_trace (list): Training objective after every epoch.
        initial_train_loss (float): Training objective before training.
        final_train_loss (float): Training objective after training.
        final_val_loss (float): Validation objective of the returned
            parameters, or None without validation data.
        val_loss_trace (list): Validation objective after every epoch.
        best_epoch (int): Epoch whose parameters are returned.
        stopped_early (bool): Whether training stopped for lack of
            validation progress.
        lm_damping_trace (list): Damping after every mini-batch.
        accepted_steps (list): `(before, after)` mini-batch objectives of
            every accepted step.
        wall_time (float): Training time in seconds.
        epochs (int): Epochs run.
    '''

    def __init__(self):
        self.loss_trace = []
        self.initial_train_loss = None
        self.final_train_loss = None
        self.final_val_loss = None
        self.val_loss_trace = []
        self.best_epoch = 0
        self.stopped_early = False
        self.lm_damping_trace = []
        self.accepted_steps = []
        self.wall_time = 0.0
        self.epochs = 0

    def as_trace(self):
        return {"loss_trace": list(self.loss_trace),
                "val_loss_trace": list(self.val_loss_trace),
                "lm_damping_trace": list(self.lm_damping_trace)}


def states_to_rows(x):
    '''
    Returns:
        tuple: `(rows, single)`, the states of a vector or of a column
        matrix as rows, and whether a single vector was given.
    '''
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        return x[None, :], True
    return x.T, False


def pairs_to_rows(batch):
    '''Accept a dataset with states in columns or an `(X, X')` pair of
    column matrices, and return `(x, y)` with one sample per row.'''
    if hasattr(batch, "x") and hasattr(batch, "xp"):
        x, xp = batch.x, batch.xp
    else:
        x, xp = batch
    return np.asarray(x, dtype=np.float64).T, np.asarray(xp, dtype=np.float64).T


def objective(model, theta, x, y):
    r = model.residuals(theta, x, y)
    return float(r.dot(r))


def _nonfinite_block(model, jac):
    bad = ~np.all(np.isfinite(jac), axis=0)
    for name, block in model.blocks():
        if np.any(bad[block]):
            return name
    return "unknown"


def lm_step(model, theta, x, y, damping, settings, trace=None):
    '''Attempt one Levenberg-Marquardt step on a mini-batch.

    The step :math:`\\delta` solves
    :math:`(J^T J + \\lambda I)\\delta = -J^T r` and is accepted only when
    it decreases the batch objective; every rejection multiplies the
    damping by `damping_up`.

    Returns:
        tuple: `(theta, before, after, damping, status)` where status is
        `accepted`, `stationary` or `overflow`.

    Raises:
        hankeldyn.errors.TrainingError: If the Jacobian has non-finite
            entries; the error names the offending parameter block.
    '''
    r = model.residuals(theta, x, y)
    before = float(r.dot(r))
    jac = model.jacobian(theta, x, y)
    if not np.all(np.isfinite(jac)):
        raise TrainingError("Non-finite Jacobian", trace,
                            _nonfinite_block(model, jac))
    grad = jac.T.dot(r)
    if np.max(np.abs(grad)) <= settings.gtol:
        return theta, before, before, damping, "stationary"
    jtj = jac.T.dot(jac)
    while damping <= settings.max_damping:
        try:
            delta = linalg.solve_damped_normal(jtj, damping, -grad)
        except SingularSystemError:
            damping *= settings.damping_up
            continue
        cand = theta + delta
        after = objective(model, cand, x, y)
        if np.isfinite(after) and after < before:
            damping = max(damping * settings.damping_down, settings.min_damping)
            return cand, before, after, damping, "accepted"
        damping *= settings.damping_up
    return theta, before, before, damping, "overflow"


def train(model, theta, train_xy, val_xy=None, epochs=5, batch_size=1000,
          settings=None, seed=0, patience=None):
    '''Train by mini-batch Levenberg-Marquardt.

    Mini-batches are drawn from a fresh permutation of the training rows
    every epoch. When the damping overflows on a batch, training moves on
    to the next batch with the initial damping; if no step has been
    accepted yet, training is aborted instead.

    With validation data the parameters of the epoch with the lowest
    validation objective are returned, and training stops once `patience`
    epochs pass without a new lowest value.

    Args:
        model: The model, see the module documentation.
        theta (numpy.array): Initial flat parameters.
        train_xy (tuple): Training `(x, y)`, one sample per row.
        val_xy (tuple, optional): Validation `(x, y)`.
        epochs (int, optional): Passes over the training data.
        batch_size (int, optional): Rows per mini-batch.
        settings (LMSettings, optional): Damping schedule.
        seed (int, optional): Seed of the mini-batch order.
        patience (int, optional): Epochs without validation progress
            before stopping. None trains for all `epochs`.

    Returns:
        tuple: `(theta, report)`, the trained parameters and the
        :class:`TrainReport`.

    Raises:
        hankeldyn.errors.TrainingError: On damping overflow before any
            accepted step, or on a non-finite Jacobian.
    '''
    settings = settings or LMSettings()
    x, y = train_xy
    m = len(x)
    if m == 0:
        raise ValueError("Training data is empty")
    if batch_size < 1 or batch_size > m:
        raise ValueError("batch_size must be in [1, %d], got %d" % (m, batch_size))
    if patience is not None and patience < 1:
        raise ValueError("patience must be at least 1")
    validate = val_xy is not None and len(val_xy[0]) > 0
    gen = np.random.RandomState(seed)
    report = TrainReport()
    theta = np.array(theta, dtype=np.float64)
    report.initial_train_loss = objective(model, theta, x, y)
    best_theta = theta.copy()
    best_val = objective(model, theta, val_xy[0], val_xy[1]) if validate else None
    damping = settings.damping
    start = time.perf_counter()
    for epoch in range(epochs):
        perm = gen.permutation(m)
        for offset in range(0, m, batch_size):
            idx = perm[offset:offset + batch_size]
            xb, yb = x[idx], y[idx]
            for _ in range(settings.steps_per_batch):
                theta, before, after, damping, status = lm_step(
                    model, theta, xb, yb, damping, settings,
                    trace=report.as_trace())
                if status == "accepted":
                    report.accepted_steps.append((before, after))
                    continue
                if status == "overflow":
                    if not report.accepted_steps:
                        raise TrainingError(
                            "Damping exceeded %g without an accepted step"
                            % settings.max_damping, report.as_trace())
                    logger.warning("Damping overflow in epoch %d, skipping "
                                   "the batch", epoch + 1)
                    damping = settings.damping
                break
            report.lm_damping_trace.append(damping)
        loss = objective(model, theta, x, y)
        if not np.isfinite(loss):
            raise TrainingError("Training objective is not finite after "
                                "epoch %d" % (epoch + 1), report.as_trace())
        report.loss_trace.append(loss)
        report.epochs = epoch + 1
        logger.info("Epoch %d/%d: loss %.6g, damping %.3g", epoch + 1, epochs,
                    loss, damping)
        if not validate:
            continue
        val = objective(model, theta, val_xy[0], val_xy[1])
        report.val_loss_trace.append(val)
        if np.isfinite(val) and val < best_val:
            best_val, best_theta = val, theta.copy()
            report.best_epoch = epoch + 1
        elif patience is not None and epoch + 1 - report.best_epoch >= patience:
            logger.info("No validation progress since epoch %d, stopping",
                        report.best_epoch)
            report.stopped_early = True
            break
    report.wall_time = time.perf_counter() - start
    if validate:
        theta = best_theta
        report.final_val_loss = best_val
    else:
        report.best_epoch = report.epochs
    report.final_train_loss = objective(model, theta, x, y)
    return theta, report
