"""
Small dense linear algebra used throughout hankeldyn: a radix-2 FFT,
a one-sided Jacobi SVD, the Moore-Penrose pseudoinverse and the damped
normal-equation solve of Levenberg-Marquardt.

All routines are pure functions over numpy arrays. Functions that accept
a ``counter`` record their floating point work on it; a counter is any
object with ``mul(k)`` and ``add(k)`` methods, normally a
:class:`hankeldyn.hankel.FlopCounter`.
"""
import numpy as np
import scipy.linalg

from hankeldyn.errors import (
    NotPowerOfTwoError, ConvergenceError, SingularSystemError)

# Desk-scale limit on the smaller SVD dimension.
_max_svd_dim = 512


def is_power_of_two(n):
    return n >= 1 and (n & (n - 1)) == 0


def next_power_of_two(n):
    '''
    Returns:
        int: The smallest power of two that is greater than or equal to `n`.
    '''
    if n < 1:
        raise ValueError("n must be positive")
    return 1 << (int(n) - 1).bit_length()


def _bit_reversal(n):
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.int64)
    for _ in range(bits):
        rev = (rev << 1) | (idx & 1)
        idx = idx >> 1
    return rev


def fft(v, inverse=False, counter=None):
    '''Iterative radix-2 decimation-in-time FFT over the last axis.

    The forward transform is the unnormalized sum
    :math:`X_k = \\sum_l v_l w^{kl}` with :math:`w = e^{-2\\pi i/n}`. The
    inverse uses the conjugate root and divides by `n`, so
    ``fft(fft(v), inverse=True)`` returns `v`.

    Args:
        v (numpy.array): Input of length `n` along the last axis. Leading
            axes are transformed independently.
        inverse (bool): Compute the inverse transform.
        counter (optional): Flop counter charged with 4 multiplications
            and 6 additions per butterfly (plus the `1/n` scaling of the
            inverse). Only one transform's worth is charged for batched
            input.

    Returns:
        numpy.array: Complex array of the same shape as `v`.

    Raises:
        hankeldyn.errors.NotPowerOfTwoError: If `n` is not a power of two;
            the error names the length to zero-pad to.
    '''
    a = np.asarray(v, dtype=np.complex128)
    n = a.shape[-1]
    if not is_power_of_two(n):
        raise NotPowerOfTwoError(n)
    lead = a.shape[:-1]
    a = a[..., _bit_reversal(n)]
    sign = 1.0 if inverse else -1.0
    size = 2
    while size <= n:
        half = size // 2
        twiddle = np.exp(sign * 2j * np.pi * np.arange(half) / size)
        blocks = a.reshape(lead + (n // size, size))
        even = blocks[..., :half]
        odd = blocks[..., half:] * twiddle
        a = np.concatenate([even + odd, even - odd], axis=-1).reshape(lead + (n,))
        if counter is not None:
            counter.mul(4 * (n // 2))
            counter.add(6 * (n // 2))
        size *= 2
    if inverse:
        a = a / n
        if counter is not None:
            counter.mul(2 * n)
    return a


def ifft(v, counter=None):
    '''Inverse of :func:`fft`.'''
    return fft(v, inverse=True, counter=counter)


def rfft(x, counter=None):
    '''Forward FFT of real data through one complex FFT of half the length.

    The even and odd samples are packed as the real and imaginary parts
    of a half-length signal, transformed together, and separated with the
    usual split-radix post-processing.

    Args:
        x (numpy.array): Real input of power-of-two length `r` >= 2 on the
            last axis.
        counter (optional): Flop counter.

    Returns:
        numpy.array: The `r/2 + 1` non-redundant bins of the forward DFT.
    '''
    x = np.asarray(x, dtype=np.float64)
    r = x.shape[-1]
    if r < 2 or not is_power_of_two(r):
        raise NotPowerOfTwoError(r)
    m = r // 2
    z = fft(x[..., 0::2] + 1j * x[..., 1::2], counter=counter)
    # Z[m] wraps to Z[0]
    zk = z[..., np.arange(m + 1) % m]
    zc = np.conj(z[..., (m - np.arange(m + 1)) % m])
    xe = 0.5 * (zk + zc)
    xo = -0.5j * (zk - zc)
    w = np.exp(-2j * np.pi * np.arange(m + 1) / r)
    if counter is not None:
        counter.mul(8 * (m + 1))
        counter.add(8 * (m + 1))
    return xe + w * xo


def irfft(y, r, counter=None):
    '''Inverse of :func:`rfft` for a Hermitian spectrum.

    Args:
        y (numpy.array): The `r/2 + 1` non-redundant bins.
        r (int): Output length, a power of two >= 2.
        counter (optional): Flop counter.

    Returns:
        numpy.array: Real signal of length `r`.
    '''
    if r < 2 or not is_power_of_two(r):
        raise NotPowerOfTwoError(r)
    y = np.asarray(y, dtype=np.complex128)
    m = r // 2
    k = np.arange(m)
    yk = y[..., k]
    yc = np.conj(y[..., m - k])
    e = yk + yc
    o = (yk - yc) * np.exp(2j * np.pi * k / r)
    z = 0.5 * (e + 1j * o)
    if counter is not None:
        counter.mul(6 * m)
        counter.add(8 * m)
    zt = fft(z, inverse=True, counter=counter)
    out = np.empty(zt.shape[:-1] + (r,))
    out[..., 0::2] = zt.real
    out[..., 1::2] = zt.imag
    return out


def _complete_basis(u, good):
    # Replace the columns of `u` not flagged `good` with an orthonormal
    # basis of the complement of the good columns.
    m = u.shape[0]
    kept = u[:, good]
    q, _ = np.linalg.qr(np.hstack([kept, np.eye(m)]))
    fill = q[:, kept.shape[1]:kept.shape[1] + int(np.count_nonzero(~good))]
    u = u.copy()
    u[:, ~good] = fill
    return u


def _jacobi(u, tol, max_sweeps):
    # One-sided Jacobi on the columns of a square or tall `u`, in place.
    n = u.shape[1]
    v = np.eye(n)
    converged = n < 2
    for _ in range(max_sweeps):
        if converged:
            break
        rotated = False
        for i in range(n - 1):
            for j in range(i + 1, n):
                ui, uj = u[:, i], u[:, j]
                alpha = ui.dot(ui)
                beta = uj.dot(uj)
                gamma = ui.dot(uj)
                if abs(gamma) <= tol * np.sqrt(alpha * beta) or gamma == 0.0:
                    continue
                rotated = True
                zeta = (beta - alpha) / (2.0 * gamma)
                t = np.copysign(1.0, zeta) / (abs(zeta) + np.sqrt(1.0 + zeta * zeta))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = c * t
                new_i = c * ui - s * uj
                u[:, j] = s * ui + c * uj
                u[:, i] = new_i
                vi = v[:, i].copy()
                v[:, i] = c * vi - s * v[:, j]
                v[:, j] = s * vi + c * v[:, j]
        converged = not rotated
    if not converged:
        raise ConvergenceError("Jacobi SVD did not converge", max_sweeps)
    sigma = np.sqrt(np.einsum('ij,ij->j', u, u))
    order = np.argsort(-sigma, kind='stable')
    sigma = sigma[order]
    u = u[:, order]
    v = v[:, order]
    good = sigma > 1e-14 * sigma[0] if sigma[0] > 0 else np.zeros(n, dtype=bool)
    u[:, good] = u[:, good] / sigma[good]
    if not np.all(good):
        u = _complete_basis(u, good)
    return u, sigma, v


def svd(a, tol=1e-12, max_sweeps=100):
    '''Thin singular value decomposition by one-sided Jacobi rotations.

    A tall matrix is first reduced to its triangular QR factor, so the
    rotations always act on vectors of length `min(m, n)`.

    Args:
        a (numpy.array): Real matrix of shape `(m, n)`, finite, with
            ``min(m, n) <= 512``.
        tol (float): A column pair is rotated while
            :math:`|u_i^T u_j| > tol \\cdot \\|u_i\\| \\|u_j\\|`.
        max_sweeps (int): Cap on the number of full sweeps.

    Returns:
        tuple: `(U, S, V)` with `U` of shape `(m, k)`, `S` of length
        `k = min(m, n)` sorted in descending order and `V` of shape
        `(n, k)`, such that ``A = U @ diag(S) @ V.T``.

    Raises:
        hankeldyn.errors.ConvergenceError: If the rotations have not
            converged after `max_sweeps` sweeps.
    '''
    a = np.array(a, dtype=np.float64, copy=True)
    if a.ndim != 2:
        raise ValueError("Input must have two dimensions")
    if not np.all(np.isfinite(a)):
        raise ValueError("Input contains non-finite entries")
    m, n = a.shape
    if min(m, n) > _max_svd_dim:
        raise ValueError("min(rows, cols)=%d exceeds %d" % (min(m, n), _max_svd_dim))
    if m < n:
        v, s, u = svd(a.T, tol=tol, max_sweeps=max_sweeps)
        return u, s, v
    if m > n:
        q, r = np.linalg.qr(a)
        u, s, v = _jacobi(r, tol, max_sweeps)
        return q.dot(u), s, v
    return _jacobi(a, tol, max_sweeps)


def singular_values(a):
    '''
    Returns:
        numpy.array: Singular values of `a` in descending order.
    '''
    return svd(a)[1]


def nuclear_norm(a):
    return float(np.sum(singular_values(a)))


def spectral_norm(a):
    s = singular_values(a)
    return float(s[0]) if len(s) else 0.0


def pinv(a, rel_tol=1e-12):
    '''Moore-Penrose pseudoinverse through :func:`svd`.

    Singular values below ``rel_tol * S_max`` are treated as zero.

    Args:
        a (numpy.array): Real matrix.
        rel_tol (float): Relative cut-off.

    Returns:
        numpy.array: The pseudoinverse with the transposed shape of `a`.
    '''
    u, s, v = svd(a)
    if len(s) == 0 or s[0] == 0.0:
        return np.zeros(np.shape(a)[::-1])
    keep = s > rel_tol * s[0]
    inv = np.zeros_like(s)
    inv[keep] = 1.0 / s[keep]
    return (v * inv).dot(u.T)


def solve_damped_normal(jtj, damping, rhs):
    '''Solve :math:`(J^T J + \\lambda I)\\delta = b` by Cholesky factorization.

    Args:
        jtj (numpy.array): Symmetric positive semidefinite matrix.
        damping (float): Non-negative damping :math:`\\lambda`.
        rhs (numpy.array): Right-hand side vector.

    Returns:
        numpy.array: The solution :math:`\\delta`.

    Raises:
        hankeldyn.errors.SingularSystemError: If the damped matrix is not
            positive definite, e.g. a singular `jtj` with zero damping.
    '''
    if damping < 0:
        raise ValueError("damping must be non-negative")
    jtj = np.asarray(jtj, dtype=np.float64)
    system = jtj + damping * np.eye(jtj.shape[0])
    try:
        factor = scipy.linalg.cho_factor(system, check_finite=True)
    except np.linalg.LinAlgError:
        raise SingularSystemError(damping)
    delta = scipy.linalg.cho_solve(factor, np.asarray(rhs, dtype=np.float64))
    if not np.all(np.isfinite(delta)):
        raise SingularSystemError(damping)
    return delta
