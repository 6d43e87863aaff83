"""
Dense feed-forward network baseline, trained with the same
Levenberg-Marquardt driver as the structured network.
"""
import logging

import numpy as np

from hankeldyn import linalg, lm
from hankeldyn.activations import get_activation
from hankeldyn.hankel import FlopCounter
from hankeldyn.rollout import autoregressive
from hankeldyn.stnn import DEFAULT_ACTIVATIONS

logger = logging.getLogger(__name__)

DEFAULT_SIZES = (3, 30, 30, 30, 3)


class FfnnConfig(object):
    '''Architecture of a dense network.

    Args:
        sizes (tuple, optional): Layer widths, input first.
        activations (tuple, optional): One activation name per layer.
        alpha (tuple, optional): Nuclear-norm weight per layer.
        seed (int, optional): Seed of the initialization and of the
            mini-batch order.
    '''

    def __init__(self, sizes=DEFAULT_SIZES, activations=DEFAULT_ACTIVATIONS,
                 alpha=None, seed=0):
        sizes = tuple(int(s) for s in sizes)
        if len(sizes) < 2 or any(s < 1 for s in sizes):
            raise ValueError("Need at least two positive layer sizes")
        n_layers = len(sizes) - 1
        alpha = (0.0,) * n_layers if alpha is None else tuple(float(a) for a in alpha)
        if len(activations) != n_layers or len(alpha) != n_layers:
            raise ValueError("Need one activation and one alpha per layer")
        if any(a < 0 for a in alpha):
            raise ValueError("alpha entries must be non-negative")
        self.sizes = sizes
        self.activations = tuple(get_activation(a).name for a in activations)
        self.alpha = alpha
        self.seed = seed

    @property
    def n_layers(self):
        return len(self.sizes) - 1

    def shapes(self):
        return [(self.sizes[l + 1], self.sizes[l]) for l in range(self.n_layers)]

    def to_dict(self):
        return dict(sizes=list(self.sizes), activations=list(self.activations),
                    alpha=list(self.alpha), seed=self.seed)

    @classmethod
    def from_dict(cls, d):
        return cls(**d)

    def __eq__(self, other):
        return isinstance(other, FfnnConfig) and self.to_dict() == other.to_dict()


def _layout(config):
    # (weight slice, bias slice) per layer, weights row-major.
    out = []
    pos = 0
    for rows, cols in config.shapes():
        w = slice(pos, pos + rows * cols)
        pos += rows * cols
        b = slice(pos, pos + rows)
        pos += rows
        out.append((w, b))
    return out, pos


class FfnnParams(object):
    '''Flat parameters of a dense network: for every layer its weight
    matrix, row-major, followed by its bias.'''

    def __init__(self, config, theta):
        _, size = _layout(config)
        theta = np.array(theta, dtype=np.float64)
        if theta.shape != (size,):
            raise ValueError("Expecting %d parameters, got shape %s"
                             % (size, theta.shape))
        self.config = config
        self.theta = theta

    def weights(self):
        layout, _ = _layout(self.config)
        return [(self.theta[w].reshape(shape), self.theta[b])
                for (w, b), shape in zip(layout, self.config.shapes())]

    def to_dict(self):
        return {"kind": "ffnn", "config": self.config.to_dict(),
                "theta": self.theta.tolist()}

    @classmethod
    def from_dict(cls, d):
        if d.get("kind") != "ffnn":
            raise ValueError("Not a dense network checkpoint")
        return cls(FfnnConfig.from_dict(d["config"]), d["theta"])


def init(cfg):
    gen = np.random.RandomState(cfg.seed)
    layout, size = _layout(cfg)
    theta = np.empty(size)
    for (w, b), (_, fan_in) in zip(layout, cfg.shapes()):
        bound = 1.0 / np.sqrt(fan_in)
        theta[w] = gen.uniform(-bound, bound, w.stop - w.start)
        theta[b] = gen.uniform(-bound, bound, b.stop - b.start)
    return FfnnParams(cfg, theta)


def _forward(weights, acts, x, counter=None):
    m = x.shape[0]
    inputs, zs = [], []
    a = x
    for (w, b), act in zip(weights, acts):
        inputs.append(a)
        z = a.dot(w.T) + b
        if counter is not None:
            for _ in range(m):
                counter.dense(*w.shape)
                counter.bias(w.shape[0])
        zs.append(z)
        a = act(z)
    return a, (inputs, zs)


def forward(params, x, counter=None):
    '''Evaluate the network on a state or on a `(d, m)` array of states in
    columns. Bias additions are charged only by counters that count them.'''
    rows, single = lm.states_to_rows(x)
    if rows.shape[1] != params.config.sizes[0]:
        raise ValueError("Dimension mismatch, expecting states of width %d"
                         % params.config.sizes[0])
    acts = [get_activation(a) for a in params.config.activations]
    out, _ = _forward(params.weights(), acts, rows, counter)
    return out[0] if single else out.T


def param_count(sizes=DEFAULT_SIZES):
    return sum(sizes[l] * sizes[l + 1] + sizes[l + 1] for l in range(len(sizes) - 1))


def flop_count(sizes=DEFAULT_SIZES):
    return sum(2 * sizes[l] * sizes[l + 1] for l in range(len(sizes) - 1))


def layer_param_counts(sizes=DEFAULT_SIZES):
    return [("w%d%d" % (l + 1, l), sizes[l] * sizes[l + 1], sizes[l + 1])
            for l in range(len(sizes) - 1)]


def layer_flop_counts(sizes=DEFAULT_SIZES):
    return [("w%d%d" % (l + 1, l), 2 * sizes[l] * sizes[l + 1])
            for l in range(len(sizes) - 1)]


def count_params(params):
    return int(params.theta.size)


def count_flops(cfg):
    '''Measured flops of one forward pass, bias additions excluded.'''
    counter = FlopCounter(count_bias_adds=False)
    forward(init(cfg), np.zeros(cfg.sizes[0]), counter=counter)
    return counter.total


class FfnnModel(object):
    '''Least-squares view of a dense network for :mod:`hankeldyn.lm`.'''

    def __init__(self, config):
        self.config = config
        self.acts = [get_activation(a) for a in config.activations]
        self.layout, self.size = _layout(config)

    def _weights(self, theta):
        return [(theta[w].reshape(shape), theta[b])
                for (w, b), shape in zip(self.layout, self.config.shapes())]

    def _reg(self, theta):
        out = []
        for l, alpha in enumerate(self.config.alpha):
            if alpha > 0:
                out.append((l, alpha, linalg.svd(self._weights(theta)[l][0])))
        return out

    def residuals(self, theta, x, y):
        out, _ = _forward(self._weights(theta), self.acts, x)
        parts = [((y - out) / np.sqrt(y.size)).ravel()]
        for _, alpha, (_, s, _) in self._reg(theta):
            parts.append(np.sqrt(alpha * s))
        return np.concatenate(parts)

    def jacobian(self, theta, x, y):
        weights = self._weights(theta)
        m, d_out = y.shape
        out, (inputs, zs) = _forward(weights, self.acts, x)
        jac = np.empty((m, d_out, self.size))
        for k in range(d_out):
            g = np.zeros((m, d_out))
            g[:, k] = 1.0
            for l in reversed(range(len(weights))):
                g_z = g * self.acts[l].grad(zs[l])
                w_slice, b_slice = self.layout[l]
                jac[:, k, w_slice] = (g_z[:, :, None] * inputs[l][:, None, :]).reshape(m, -1)
                jac[:, k, b_slice] = g_z
                g = g_z.dot(weights[l][0])
        rows = [-jac.reshape(m * d_out, self.size) / np.sqrt(m * d_out)]
        for l, alpha, (u, s, v) in self._reg(theta):
            reg = np.zeros((len(s), self.size))
            w_slice, _ = self.layout[l]
            for i, sigma in enumerate(s):
                if sigma > 0:
                    reg[i, w_slice] = (alpha / (2.0 * np.sqrt(alpha * sigma))) * \
                        np.outer(u[:, i], v[:, i]).ravel()
            rows.append(reg)
        return np.vstack(rows)

    def blocks(self):
        out = []
        for l, (w, b) in enumerate(self.layout):
            out.append(("layer %d weights" % (l + 1), w))
            out.append(("layer %d bias" % (l + 1), b))
        return out


def loss(params, batch):
    x, y = lm.pairs_to_rows(batch)
    if len(x) == 0:
        raise ValueError("batch is empty")
    return lm.objective(FfnnModel(params.config), params.theta, x, y)


def train_lm(params, train, val=None, epochs=5, batch_size=1000, settings=None,
             seed=None, patience=None):
    '''Train with mini-batch Levenberg-Marquardt; same contract as
    :func:`hankeldyn.stnn.train_lm`.

    Returns:
        tuple: `(FfnnParams, TrainReport)`.
    '''
    cfg = params.config
    val_xy = lm.pairs_to_rows(val) if val is not None else None
    theta, report = lm.train(FfnnModel(cfg), params.theta, lm.pairs_to_rows(train),
                             val_xy, epochs=epochs, batch_size=batch_size,
                             settings=settings,
                             seed=cfg.seed if seed is None else seed,
                             patience=patience)
    logger.info("Trained dense network %s: loss %.6g -> %.6g", cfg.sizes,
                report.initial_train_loss, report.final_train_loss)
    return FfnnParams(cfg, theta), report


def rollout(params, x0, steps, adapter=None, dt=1.0, t0=0.0):
    return autoregressive(lambda x: forward(params, x), x0, steps, dt=dt,
                          t0=t0, adapter=adapter)
