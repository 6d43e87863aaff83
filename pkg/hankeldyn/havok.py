"""
Linear forecasting in the singular coordinates of a delay-embedding
(Hankel) matrix, also known as delay-DMD.
"""
import logging

import numpy as np

from hankeldyn import linalg

logger = logging.getLogger(__name__)

_rank_rel_tol = 1e-10


def _as_channels(series):
    series = np.asarray(series, dtype=np.float64)
    return series[:, None] if series.ndim == 1 else series


def delay_matrix(series, q):
    '''The delay-embedding matrix with `q` delays.

    For a scalar series, entry `(i, j)` is ``series[i + j]``, so every
    anti-diagonal is constant. A multi-channel series, one channel per
    column, stacks one such block per channel.

    Args:
        series (numpy.array): Shape `(N,)` or `(N, c)`.
        q (int): Number of delays (rows per channel).

    Returns:
        numpy.array: Shape `(q c, N - q + 1)`.
    '''
    x = _as_channels(series)
    n_samples = len(x)
    if not 1 <= q <= n_samples:
        raise ValueError("q must be in [1, %d]" % n_samples)
    idx = np.arange(q)[:, None] + np.arange(n_samples - q + 1)[None, :]
    return np.vstack([x[:, c][idx] for c in range(x.shape[1])])


class HavokModel(object):
    '''A linear model on the leading delay coordinates.

    Attributes:
        q (int): Delays per channel.
        r (int): Number of retained delay coordinates.
        channels (int): Number of embedded channels.
        basis (numpy.array): Leading left singular vectors of the delay
            matrix, `(q c) x r`.
        singular_values (numpy.array): All singular values of the delay
            matrix.
        m (numpy.array): One-step regression, `r x r`.
        coordinate (int): Column of the state rows that is embedded, or
            None when rows are embedded whole.
    '''

    def __init__(self, q, r, channels, basis, singular_values, m, coordinate=None):
        self.q = q
        self.r = r
        self.channels = channels
        self.basis = basis
        self.singular_values = singular_values
        self.m = m
        self.coordinate = coordinate

    def param_count(self):
        return self.basis.size + self.m.size

    def flop_count(self):
        '''Flops of one forecast step: the `r x r` regression and the
        reconstruction of the newest sample of every channel.'''
        return 2 * self.r * self.r + 2 * self.r * self.channels

    def newest_rows(self):
        return [c * self.q + self.q - 1 for c in range(self.channels)]

    def select(self, rows):
        '''The embedded part of state rows: column :attr:`coordinate` of a
        2-D array, anything else unchanged.'''
        rows = np.asarray(rows, dtype=np.float64)
        return _select(rows, self.coordinate)

    def embed(self, window):
        '''Delay coordinates of a window of the last `q` samples, oldest
        first, shape `(q,)` or `(q, c)`.'''
        x = _as_channels(self.select(window))
        if x.shape != (self.q, self.channels):
            raise ValueError("window must have shape (%d, %d)" % (self.q, self.channels))
        return self.basis.T.dot(x.T.ravel())

    def advance(self, v):
        '''One forecast step.

        Returns:
            tuple: The next delay coordinates and the newest sample of
            every channel they reconstruct.
        '''
        v = self.m.dot(v)
        return v, self.basis[self.newest_rows()].dot(v)

    def to_dict(self):
        return {"kind": "havok", "q": self.q, "r": self.r, "channels": self.channels,
                "coordinate": self.coordinate,
                "basis": self.basis.tolist(),
                "singular_values": self.singular_values.tolist(),
                "m": self.m.tolist()}

    @classmethod
    def from_dict(cls, d):
        if d.get("kind") != "havok":
            raise ValueError("Not a HAVOK model")
        return cls(d["q"], d["r"], d["channels"], np.asarray(d["basis"]),
                   np.asarray(d["singular_values"]), np.asarray(d["m"]),
                   d.get("coordinate"))


def _select(rows, coordinate):
    if coordinate is not None and rows.ndim == 2:
        if not 0 <= coordinate < rows.shape[1]:
            raise ValueError("coordinate %d out of range for %d columns"
                             % (coordinate, rows.shape[1]))
        return rows[:, coordinate]
    return rows


def _series_parts(series, coordinate):
    items = series if isinstance(series, (list, tuple)) else [series]
    return [_as_channels(_select(np.asarray(s, dtype=np.float64), coordinate))
            for s in items]


def _pair_masks(parts, q, transitions):
    '''Regression pair `k` of a series advances the window ending at
    sample `k + q - 1`, so it is kept when that transition is.'''
    if transitions is None:
        return [np.ones(len(x) - q, dtype=bool) for x in parts]
    if len(transitions) != len(parts):
        raise ValueError("Need one transition mask per series")
    masks = []
    for x, t in zip(parts, transitions):
        t = np.asarray(t, dtype=bool)
        if t.shape != (len(x) - 1,):
            raise ValueError("Transition mask of length %d for %d samples"
                             % (len(t), len(x)))
        masks.append(t[q - 1:])
    return masks


def havok_fit(series, q=100, r=15, coordinate=None, transitions=None):
    '''Fit a linear model in delay coordinates.

    The delay matrix is factorized by SVD; its columns projected on the
    leading `r` left singular vectors give the delay coordinates
    :math:`v_k`, and `M` is the least-squares fit of
    :math:`v_{k+1} \\approx M v_k`. When the delay matrix has fewer than
    `r` significant singular values, `r` is reduced with a warning.

    Several series, e.g. independent trajectories, share one basis: their
    delay matrices are placed side by side and regression pairs never
    straddle two series.

    Args:
        series: A series of shape `(N,)` or `(N, c)` with `N > q + r`, or
            a list of such series with the same number of channels.
        q (int, optional): Delays per channel.
        r (int, optional): Number of delay coordinates, at most `q`.
        coordinate (int, optional): Embed only this column of 2-D series.
        transitions (list, optional): One boolean array of length `N - 1`
            per series selecting the transitions `k -> k + 1` to fit. The
            basis is taken from the windows these transitions advance.

    Returns:
        HavokModel: The fit.
    '''
    parts = _series_parts(series, coordinate)
    if not parts:
        raise ValueError("Need at least one series")
    if r < 1 or r > q:
        raise ValueError("r must be in [1, q=%d], got %d" % (q, r))
    channels = parts[0].shape[1]
    for x in parts:
        if x.shape[1] != channels:
            raise ValueError("All series must have %d channels" % channels)
        if len(x) <= q + r:
            raise ValueError("Series of length %d is too short for q=%d, r=%d"
                             % (len(x), q, r))
    masks = _pair_masks(parts, q, transitions)
    if sum(int(k.sum()) for k in masks) <= r:
        raise ValueError("Need more than r=%d selected transitions" % r)
    blocks = [delay_matrix(x, q) for x in parts]
    current = np.hstack([h[:, :-1][:, k] for h, k in zip(blocks, masks)])
    advanced = np.hstack([h[:, 1:][:, k] for h, k in zip(blocks, masks)])
    u, s, _ = linalg.svd(current)
    significant = int(np.count_nonzero(s > _rank_rel_tol * s[0])) if s[0] > 0 else 1
    if significant < r:
        logger.warning("Delay matrix has %d significant singular values, "
                       "reducing r from %d", significant, r)
        r = max(significant, 1)
    basis = u[:, :r]
    m = basis.T.dot(advanced).dot(linalg.pinv(basis.T.dot(current)))
    return HavokModel(q, r, channels, basis, s, m, coordinate)


def havok_predict(model, window, steps):
    '''Forecast from a seed window of the last `q` samples.

    Args:
        model (HavokModel): The fit.
        window (numpy.array): Shape `(q,)` or `(q, c)`, oldest first; for
            a model of one coordinate, full state rows are accepted too.
        steps (int): Number of samples to forecast.

    Returns:
        numpy.array: The forecast, shape `(steps,)` for a scalar series or
        `(steps, c)`.
    '''
    if steps < 1:
        raise ValueError("steps must be at least 1")
    window = model.select(window)
    v = model.embed(window)
    out = np.empty((steps, model.channels))
    for k in range(steps):
        v, out[k] = model.advance(v)
    return out[:, 0] if np.ndim(window) == 1 else out


def one_step_error(model, series, transitions=None):
    '''Mean squared error of the one-step forecasts of every sample after
    the first full window, over one series or a list of series.

    Args:
        model (HavokModel): The fit.
        series: As for :func:`havok_fit`.
        transitions (list, optional): As for :func:`havok_fit`; only the
            selected transitions are scored.
    '''
    parts = _series_parts(series, model.coordinate)
    masks = _pair_masks(parts, model.q, transitions)
    newest = model.basis[model.newest_rows()]
    errors = []
    for x, k in zip(parts, masks):
        coords = model.basis.T.dot(delay_matrix(x, model.q))
        predicted = newest.dot(model.m.dot(coords[:, :-1]))
        errors.append((predicted - x[model.q:].T)[:, k].ravel())
    diff = np.concatenate(errors)
    if diff.size == 0:
        raise ValueError("No transitions to score")
    return float(np.mean(diff * diff))
