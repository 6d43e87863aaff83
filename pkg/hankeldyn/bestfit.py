"""
Best-fit low-rank linear operator between time-delay snapshots and their
time-advanced counterparts, found by proximal gradient descent on

.. math::

    \\frac{1}{2}\\|X' - H X\\|_F^2 + \\alpha \\|H\\|_*

The iteration runs on :math:`G = H^T`; the proximal operator of the
nuclear norm is singular value soft-thresholding.
"""
import logging

import numpy as np

from hankeldyn import linalg
from hankeldyn.hankel import HankelOperator, reflect_index

logger = logging.getLogger(__name__)

_rank_rel_tol = 1e-10


def svt(a, threshold):
    '''Singular value soft-thresholding,
    :math:`U \\mathrm{diag}(\\max(S - t, 0)) V^T`.

    Args:
        a (numpy.array): Real matrix.
        threshold (float): Non-negative threshold `t`.

    Returns:
        numpy.array: Matrix of the same shape as `a`.
    '''
    if threshold < 0:
        raise ValueError("threshold must be non-negative")
    u, s, v = linalg.svd(a)
    shrunk = np.maximum(s - threshold, 0.0)
    return (u * shrunk).dot(v.T)


class FitProblem(object):
    '''Snapshot pair and nuclear-norm weight of a best-fit problem.

    Args:
        x (numpy.array): Time-delay snapshots, shape `(n, m)`, one sample
            per column.
        xp (numpy.array): Time-advanced snapshots, same shape as `x`.
        alpha (float, optional): Nuclear-norm weight, non-negative.
    '''

    def __init__(self, x, xp, alpha=0.0):
        x = np.asarray(x, dtype=np.float64)
        xp = np.asarray(xp, dtype=np.float64)
        if x.ndim != 2 or x.shape != xp.shape:
            raise ValueError("x and xp must be matrices of the same shape, "
                             "got %s and %s" % (x.shape, xp.shape))
        if alpha < 0:
            raise ValueError("alpha must be non-negative")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(xp))):
            raise ValueError("Snapshots must be finite")
        self.x = x
        self.xp = xp
        self.alpha = float(alpha)

    @property
    def n(self):
        return self.x.shape[0]

    def smooth(self, g):
        '''Value of the least-squares term at :math:`G = H^T`.'''
        resid = self.xp - g.T.dot(self.x)
        return 0.5 * float(np.sum(resid * resid))

    def gradient(self, g):
        return self.x.dot(self.x.T.dot(g) - self.xp.T)

    def objective(self, g):
        value = self.smooth(g)
        if self.alpha > 0:
            value += self.alpha * float(np.sum(linalg.singular_values(g)))
        return value

    def lipschitz(self):
        return linalg.spectral_norm(self.x) ** 2


class FitResult(object):
    '''Outcome of :func:`fit_operator`.

    Attributes:
        h_hat (numpy.array): The fitted `n x n` operator.
        objective_trace (list): Objective at the initial point and after
            every iteration.
        rank (int): Number of singular values of `h_hat` above
            ``1e-10 * S_max``.
        iterations (int): Iterations performed.
        converged (bool): Whether the relative objective change fell
            below the tolerance.
        hankel (HankelOperator): Per-symmetric Hankel projection of
            `h_hat`, only when requested.
    '''

    def __init__(self, h_hat, objective_trace, rank, iterations, converged,
                 hankel=None):
        self.h_hat = h_hat
        self.objective_trace = objective_trace
        self.rank = rank
        self.iterations = iterations
        self.converged = converged
        self.hankel = hankel

    def predict(self, x):
        '''Advance states one step, :math:`x_{k+1} = \\hat H x_k`.

        Args:
            x (numpy.array): A state vector or an `(n, m)` matrix of
                states in columns.
        '''
        return self.h_hat.dot(np.asarray(x, dtype=np.float64))


def numerical_rank(a, rel_tol=_rank_rel_tol):
    s = linalg.singular_values(a)
    if len(s) == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > rel_tol * s[0]))


def _backtrack(problem, g, value, grad, step_l, eta=2.0, max_tries=60):
    # Grow the local Lipschitz estimate until the quadratic upper bound holds.
    for _ in range(max_tries):
        cand = svt(g - grad / step_l, problem.alpha / step_l)
        diff = cand - g
        bound = value + float(np.sum(grad * diff)) + \
            0.5 * step_l * float(np.sum(diff * diff))
        if problem.smooth(cand) <= bound * (1 + 1e-12) + 1e-300:
            return cand, step_l
        step_l *= eta
    return cand, step_l


def fit_operator(problem, step_rule="fixed", max_iter=5000, rel_tol=1e-10,
                 accelerated=False, project=False):
    '''Fit the low-rank operator by proximal gradient descent.

    Starting from :math:`H_0 = 0`, each iteration computes

    .. math::

        H_k^T = \\mathrm{svt}\\left(H_{k-1}^T - \\frac{1}{t_k}
                X (X^T H_{k-1}^T - X'^T), \\frac{\\alpha}{t_k}\\right)

    with :math:`t_k = \\|X\\|_2^2` for the fixed rule. The objective
    trace is non-increasing under the fixed rule.

    Args:
        problem (FitProblem): Snapshots and nuclear-norm weight.
        step_rule (str, optional): `fixed` or `backtracking`.
        max_iter (int, optional): Iteration cap.
        rel_tol (float, optional): Stop when the relative objective change
            falls below this value.
        accelerated (bool, optional): Use FISTA momentum. The trace is
            then no longer guaranteed to be monotone.
        project (bool, optional): Also return the per-symmetric Hankel
            projection of the result.

    Returns:
        FitResult: The fit. A run that hits `max_iter` is returned with
        ``converged=False`` and logged as a warning.
    '''
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    if step_rule not in ("fixed", "backtracking"):
        raise ValueError("Unknown step rule '%s'" % step_rule)
    n = problem.n
    lip = problem.lipschitz()
    if lip == 0.0:
        # Zero snapshots: the smooth term is constant and H = 0 is optimal.
        g = np.zeros((n, n))
        return FitResult(g, [problem.objective(g)], 0, 0, True,
                         project_persymmetric_hankel(g) if project else None)
    step_l = lip if step_rule == "fixed" else lip / 8.0
    g = np.zeros((n, n))
    y = g
    momentum = 1.0
    trace = [problem.objective(g)]
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        point = y if accelerated else g
        grad = problem.gradient(point)
        if step_rule == "fixed":
            g_new = svt(point - grad / step_l, problem.alpha / step_l)
        else:
            g_new, step_l = _backtrack(problem, point, problem.smooth(point),
                                       grad, step_l)
        if accelerated:
            next_momentum = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * momentum ** 2))
            y = g_new + ((momentum - 1.0) / next_momentum) * (g_new - g)
            momentum = next_momentum
        g = g_new
        value = problem.objective(g)
        prev = trace[-1]
        trace.append(value)
        if abs(prev - value) <= rel_tol * max(abs(prev), np.finfo(float).tiny):
            converged = True
            break
    if not converged:
        logger.warning("Proximal fit did not converge in %d iterations, "
                       "last objective %.6g", max_iter, trace[-1])
    else:
        logger.info("Proximal fit converged in %d iterations, objective %.6g",
                    iterations, trace[-1])
    h_hat = g.T.copy()
    return FitResult(h_hat, trace, numerical_rank(h_hat), iterations,
                     converged,
                     project_persymmetric_hankel(h_hat) if project else None)


def project_persymmetric_hankel(a):
    '''Frobenius-nearest per-symmetric Hankel operator.

    Each sample is the mean of the entries of `a` that the Hankel
    structure ties to it.

    Args:
        a (numpy.array): Square matrix.

    Returns:
        HankelOperator: The projection.
    '''
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("Expecting a square matrix, got shape %s" % (a.shape,))
    n = a.shape[0]
    idx = np.arange(n)
    cls = reflect_index(idx[:, None] + idx[None, :], n).ravel()
    sums = np.bincount(cls, weights=a.ravel(), minlength=n)
    counts = np.bincount(cls, minlength=n)
    return HankelOperator(sums / counts)
