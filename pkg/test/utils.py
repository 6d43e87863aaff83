"""
Test utilities.
"""
import numpy as np


def numerical_jacobian(f, theta, h=1e-6):
    '''Central-difference Jacobian of a vector function.'''
    theta = np.asarray(theta, dtype=np.float64)
    cols = []
    for i in range(len(theta)):
        e = np.zeros_like(theta)
        e[i] = h
        cols.append((f(theta + e) - f(theta - e)) / (2 * h))
    return np.column_stack(cols)


def relative_error(a, b):
    return np.linalg.norm(a - b) / max(np.linalg.norm(b), 1e-300)


def planted_linear_data(a, m, seed=0):
    '''Snapshots `(X, X')` with `X'` = `a X` for random `X`.'''
    x = np.random.RandomState(seed).normal(size=(len(a), m))
    return x, np.asarray(a).dot(x)
