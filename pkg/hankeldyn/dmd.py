"""
Exact dynamic mode decomposition: the best-fit linear operator
:math:`A = X' X^+` advancing snapshots one sampling interval.
"""
import numpy as np

from hankeldyn import linalg
from hankeldyn.rollout import autoregressive


class DmdModel(object):
    '''A fitted linear one-step model.

    Attributes:
        a (numpy.array): The `n x n` operator.
        rank (int): Rank of the fit.
        a_tilde (numpy.array): The operator in the coordinates of the
            leading left singular vectors of `X` (`rank x rank`).
        basis (numpy.array): Those singular vectors, `n x rank`.
        eigenvalues (numpy.array): Eigenvalues of `a_tilde`.
        modes (numpy.array): Exact DMD modes, one per column.
    '''

    def __init__(self, a, rank, a_tilde, basis, eigenvalues, modes):
        self.a = a
        self.rank = rank
        self.a_tilde = a_tilde
        self.basis = basis
        self.eigenvalues = eigenvalues
        self.modes = modes

    @property
    def n(self):
        return self.a.shape[0]

    def predict(self, x):
        '''Advance a state, or states in columns, by one step.'''
        return self.a.dot(np.asarray(x, dtype=np.float64))

    def amplitudes(self, x0):
        '''Mode amplitudes `b` with :math:`\\Phi b = x_0` in the least-squares
        sense.'''
        b, _, _, _ = np.linalg.lstsq(self.modes, np.asarray(x0, dtype=np.complex128),
                                     rcond=None)
        return b

    def param_count(self):
        '''Operator entries plus `n` numbers per retained mode.'''
        return self.n * self.n + self.n * self.rank

    def flop_count(self):
        return 2 * self.n * self.n

    def to_dict(self):
        return {"kind": "dmd", "a": self.a.tolist(), "rank": self.rank}

    @classmethod
    def from_dict(cls, d):
        if d.get("kind") != "dmd":
            raise ValueError("Not a DMD model")
        a = np.asarray(d["a"], dtype=np.float64)
        eigenvalues, modes = np.linalg.eig(a)
        return cls(a, int(d["rank"]), a, np.eye(len(a)), eigenvalues, modes)


def dmd_fit(x, xp, rank=None):
    '''Fit exact DMD.

    Without `rank` the operator is :math:`X' X^+`. With `rank`, `X` is
    replaced by its truncated SVD :math:`U_r S_r V_r^T`, the reduced
    operator is :math:`\\tilde A = U_r^T X' V_r S_r^{-1}` and
    :math:`A = U_r \\tilde A U_r^T`.

    Args:
        x (numpy.array): Snapshots, shape `(n, m)` with `m >= n`.
        xp (numpy.array): Advanced snapshots, same shape.
        rank (int, optional): Truncation rank.

    Returns:
        DmdModel: The fit.
    '''
    x = np.asarray(x, dtype=np.float64)
    xp = np.asarray(xp, dtype=np.float64)
    if x.ndim != 2 or x.shape != xp.shape:
        raise ValueError("x and xp must be matrices of the same shape")
    n, m = x.shape
    if m < n:
        raise ValueError("Need at least %d snapshots, got %d" % (n, m))
    if rank is None:
        a = xp.dot(linalg.pinv(x))
        eigenvalues, modes = np.linalg.eig(a)
        return DmdModel(a, n, a, np.eye(n), eigenvalues, modes)
    if not 1 <= rank <= min(n, m):
        raise ValueError("rank must be in [1, %d], got %d" % (min(n, m), rank))
    u, s, v = linalg.svd(x)
    u_r, s_r, v_r = u[:, :rank], s[:rank], v[:, :rank]
    proj = xp.dot(v_r) / s_r
    a_tilde = u_r.T.dot(proj)
    eigenvalues, w = np.linalg.eig(a_tilde)
    modes = proj.dot(w)
    a = u_r.dot(a_tilde).dot(u_r.T)
    return DmdModel(a, rank, a_tilde, u_r, eigenvalues, modes)


def dmd_rollout(model, x0, steps, adapter=None, dt=1.0, t0=0.0):
    return autoregressive(model.predict, x0, steps, dt=dt, t0=t0, adapter=adapter)
