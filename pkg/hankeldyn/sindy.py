"""
Sparse identification of nonlinear dynamics: the state derivatives are
regressed on a library of polynomial terms by sequentially thresholded
least squares (STLSQ).
"""
import itertools
import logging

import numpy as np

from hankeldyn.dynsys import Trajectory, rk4_step
from hankeldyn.errors import SparsityError
from hankeldyn.rollout import autoregressive

logger = logging.getLogger(__name__)

_default_names = ("x", "y", "z", "w")


def library_terms(dimension, degree=2):
    '''Exponent tuples of the polynomial library, in the fixed order
    constant, linear terms, then each degree in lexicographic order.'''
    terms = [()]
    for d in range(1, degree + 1):
        terms.extend(itertools.combinations_with_replacement(range(dimension), d))
    return terms


def library_names(dimension, degree=2, variables=None):
    '''
    Example:

        .. code-block:: python

            >>> library_names(3)
            ['1', 'x', 'y', 'z', 'x^2', 'x y', 'x z', 'y^2', 'y z', 'z^2']
    '''
    if variables is None:
        variables = _default_names[:dimension] if dimension <= len(_default_names) \
            else ["x%d" % (i + 1) for i in range(dimension)]
    names = []
    for term in library_terms(dimension, degree):
        if not term:
            names.append("1")
            continue
        parts = []
        for var, group in itertools.groupby(term):
            power = len(list(group))
            parts.append(variables[var] if power == 1 else "%s^%d" % (variables[var], power))
        names.append(" ".join(parts))
    return names


def polynomial_library(states, degree=2):
    '''Evaluate the library on states given one per row.

    Returns:
        numpy.array: Shape `(m, L)`.
    '''
    states = np.atleast_2d(np.asarray(states, dtype=np.float64))
    cols = []
    for term in library_terms(states.shape[1], degree):
        col = np.ones(len(states))
        for i in term:
            col = col * states[:, i]
        cols.append(col)
    return np.column_stack(cols)


def finite_difference(states, dt):
    '''Fourth-order finite-difference derivatives along the rows.

    Interior samples use the five-point central stencil, the first two
    and the last two samples the five-point one-sided stencils.
    '''
    f = np.asarray(states, dtype=np.float64)
    m = len(f)
    if m < 5:
        raise ValueError("Need at least 5 samples for derivative estimation")
    d = np.empty_like(f)
    d[2:-2] = (-f[4:] + 8 * f[3:-1] - 8 * f[1:-3] + f[:-4]) / (12 * dt)
    for i in (0, 1):
        d[i] = (-25 * f[i] + 48 * f[i + 1] - 36 * f[i + 2] + 16 * f[i + 3]
                - 3 * f[i + 4]) / (12 * dt)
    for i in (m - 2, m - 1):
        d[i] = (25 * f[i] - 48 * f[i - 1] + 36 * f[i - 2] - 16 * f[i - 3]
                + 3 * f[i - 4]) / (12 * dt)
    return d


def stlsq(theta, dxdt, threshold, max_iter=10):
    '''Sequentially thresholded least squares.

    For every state coordinate: solve the least-squares problem on the
    active terms, drop the terms whose coefficient is smaller than
    `threshold` in magnitude, and repeat until the active set no longer
    changes or `max_iter` iterations have run.

    Args:
        theta (numpy.array): Library matrix, shape `(m, L)`.
        dxdt (numpy.array): Derivatives, shape `(m, d)`.
        threshold (float): Sparsity threshold.
        max_iter (int, optional): Iteration cap.

    Returns:
        tuple: `(xi, history)` with the `(L, d)` coefficients and, per
        coordinate, the active-set size after every iteration.

    Raises:
        hankeldyn.errors.SparsityError: If no term survives for some
            coordinate.
    '''
    n_terms = theta.shape[1]
    xi = np.zeros((n_terms, dxdt.shape[1]))
    history = []
    for j in range(dxdt.shape[1]):
        active = np.ones(n_terms, dtype=bool)
        coef = np.linalg.lstsq(theta, dxdt[:, j], rcond=None)[0]
        sizes = [n_terms]
        for _ in range(max_iter):
            keep = active & (np.abs(coef) >= threshold)
            if not np.any(keep):
                raise SparsityError(j, threshold)
            if np.array_equal(keep, active):
                break
            active = keep
            coef = np.zeros(n_terms)
            coef[active] = np.linalg.lstsq(theta[:, active], dxdt[:, j], rcond=None)[0]
            sizes.append(int(np.count_nonzero(active)))
        coef[~active] = 0.0
        xi[:, j] = coef
        history.append(sizes)
    return xi, history


class SindyModel(object):
    '''An identified polynomial ODE :math:`\\dot x = \\Theta(x) \\Xi`.

    Attributes:
        coefficients (numpy.array): :math:`\\Xi`, shape `(L, d)`.
        degree (int): Library degree.
        threshold (float): STLSQ threshold used for the fit.
        history (list): Active-set sizes per coordinate and iteration.
    '''

    def __init__(self, coefficients, degree=2, threshold=0.1, history=None):
        self.coefficients = np.asarray(coefficients, dtype=np.float64)
        self.degree = degree
        self.threshold = threshold
        self.history = history or []

    @property
    def dimension(self):
        return self.coefficients.shape[1]

    @property
    def names(self):
        return library_names(self.dimension, self.degree)

    def rhs(self, x):
        return polynomial_library(x, self.degree)[0].dot(self.coefficients)

    def param_count(self):
        return int(np.count_nonzero(self.coefficients))

    def flop_count(self):
        '''Flops of one right-hand-side evaluation: the monomial products
        plus a multiply-add per non-zero coefficient.'''
        mults = sum(max(len(t) - 1, 0) for t in library_terms(self.dimension, self.degree))
        return mults + 2 * self.param_count()

    def equations(self, precision=4):
        '''Human-readable right-hand sides, one string per coordinate.'''
        out = []
        names = self.names
        for j in range(self.dimension):
            terms = ["%.*g %s" % (precision, c, name) if name != "1" else "%.*g" % (precision, c)
                     for c, name in zip(self.coefficients[:, j], names) if c != 0.0]
            out.append(" + ".join(terms) if terms else "0")
        return out

    def to_dict(self):
        return {"kind": "sindy", "degree": self.degree, "threshold": self.threshold,
                "names": self.names, "coefficients": self.coefficients.tolist()}

    @classmethod
    def from_dict(cls, d):
        if d.get("kind") != "sindy":
            raise ValueError("Not a SINDy model")
        return cls(d["coefficients"], d["degree"], d["threshold"])


def _states(trajectory):
    if isinstance(trajectory, Trajectory):
        return trajectory.states
    return np.atleast_2d(np.asarray(trajectory, dtype=np.float64))


def sindy_fit(trajectory, dt, threshold=0.1, max_stlsq_iter=10, degree=2,
              masks=None):
    '''Identify a polynomial ODE from sampled trajectories.

    Args:
        trajectory: A :class:`hankeldyn.dynsys.Trajectory` or states one
            per row, or a list of either; derivatives are estimated per
            trajectory and the regressions stacked.
        dt (float): Sampling interval.
        threshold (float, optional): STLSQ threshold.
        max_stlsq_iter (int, optional): STLSQ iteration cap.
        degree (int, optional): Polynomial degree of the library.
        masks (list, optional): One boolean array per trajectory selecting
            the samples entering the regression; derivatives are still
            estimated from every sample.

    Returns:
        SindyModel: The identified model.
    '''
    parts = trajectory if isinstance(trajectory, (list, tuple)) else [trajectory]
    if not parts:
        raise ValueError("Need at least one trajectory")
    states = [_states(t) for t in parts]
    if masks is None:
        masks = [np.ones(len(s), dtype=bool) for s in states]
    if len(masks) != len(states):
        raise ValueError("Need one mask per trajectory")
    masks = [np.asarray(k, dtype=bool) for k in masks]
    for s, k in zip(states, masks):
        if k.shape != (len(s),):
            raise ValueError("Mask of length %d for %d samples" % (len(k), len(s)))
    if not any(k.any() for k in masks):
        raise ValueError("Masks select no samples")
    theta = np.vstack([polynomial_library(s, degree)[k] for s, k in zip(states, masks)])
    dxdt = np.vstack([finite_difference(s, dt)[k] for s, k in zip(states, masks)])
    xi, history = stlsq(theta, dxdt, threshold, max_iter=max_stlsq_iter)
    model = SindyModel(xi, degree, threshold, history)
    logger.info("SINDy kept %d of %d coefficients", model.param_count(), xi.size)
    return model


def sindy_simulate(model, x0, steps, dt, t0=0.0):
    '''Integrate the identified ODE with fixed-step RK4, one sample per step.

    Returns:
        hankeldyn.dynsys.Trajectory: `steps + 1` samples, truncated and
        flagged if the solution diverges.
    '''
    return autoregressive(lambda x: rk4_step(model.rhs, x, dt), x0, steps,
                          dt=dt, t0=t0)
