"""
The per-symmetric Hankel operator built from time-delay samples
:math:`x(\\tau_0), \\ldots, x(\\tau_{n-1})`, with three ways to apply it:
the dense product, the shift decomposition and the circulant embedding
evaluated with real FFTs.
"""
import contextlib

import numpy as np

from hankeldyn import linalg


class FlopCounter(object):
    '''Counts floating point multiplications and additions.

    The counting convention is the one used for every model in this
    package:

    * dense `m x k` matrix-vector product: `2mk`
    * diagonal `k x k` product: `k`
    * vector addition or subtraction of length `k`: `k`
    * permutations, selections and the anti-identity: free
    * bias additions: `k`, only when `count_bias_adds` is set

    Args:
        count_bias_adds (bool, optional): Charge bias additions.
        dense_2mk (bool, optional): Charge `mk` additions for a dense
            product (the `2mk` convention). When False, the exact
            `m(k-1)` additions are charged instead.
    '''

    __slots__ = ('mults', 'adds', 'count_bias_adds', 'dense_2mk')

    def __init__(self, count_bias_adds=False, dense_2mk=True):
        self.count_bias_adds = count_bias_adds
        self.dense_2mk = dense_2mk
        self.mults = 0
        self.adds = 0

    def mul(self, k):
        self.mults += int(k)

    def add(self, k):
        self.adds += int(k)

    def dense(self, m, k):
        self.mults += m * k
        self.adds += m * k if self.dense_2mk else m * (k - 1)

    def diag(self, k):
        self.mults += k

    def vadd(self, k):
        self.adds += k

    def bias(self, k):
        if self.count_bias_adds:
            self.adds += k

    def reset(self):
        self.mults = 0
        self.adds = 0

    @contextlib.contextmanager
    def measure(self):
        '''Reset the counts and yield the counter for one measurement.

        Example:

            .. code-block:: python

                with counter.measure() as c:
                    h.matvec_fft(x, counter=c)
                print(c.total)
        '''
        self.reset()
        yield self

    @property
    def total(self):
        return self.mults + self.adds

    def __repr__(self):
        return "FlopCounter(mults=%d, adds=%d)" % (self.mults, self.adds)


def reflect_index(s, n):
    '''Map an index sum `i + j` to the sample it reads in an `n x n`
    per-symmetric Hankel matrix.'''
    s = np.asarray(s)
    return np.where(s <= n - 1, s, 2 * (n - 1) - s)


def upper_shift(n):
    '''
    Returns:
        numpy.array: The `n x n` upper shift matrix (ones on the
        superdiagonal), so that ``(Z @ v)[i] == v[i + 1]``.
    '''
    return np.eye(n, k=1)


def anti_identity(n):
    return np.fliplr(np.eye(n))


class CirculantEmbedding(object):
    '''Circulant matrix :math:`C_r` whose top-left `n x n` block, with its
    rows reversed, is the Hankel operator.

    The first column follows the notation of the operator factorization
    :math:`H = \\tilde I_n J^T C_r J` exactly when `n` is a power of two:
    ``c = [x(n-1), ..., x(0), x(n-1), x(0), ..., x(n-2)]``. Other lengths
    are embedded in `r = 2 * n_pad` with zeros in the unused middle band,
    `n_pad` being `n` rounded up to a power of two.

    Args:
        samples (numpy.array): The time-delay samples.
    '''

    def __init__(self, samples):
        samples = np.asarray(samples, dtype=np.float64)
        n = len(samples)
        self.n = n
        self.n_pad = linalg.next_power_of_two(n)
        self.r = 2 * self.n_pad
        # First column of the symmetric Toeplitz block: t[k] = x(n-1-k)
        t = samples[::-1]
        c = np.zeros(self.r)
        c[:n] = t
        c[n] = samples[n - 1]
        if n > 1:
            c[self.r - (n - 1):] = t[1:][::-1]
        c.setflags(write=False)
        self.c = c
        self.eigenvalues = linalg.fft(c)
        self.eigenvalues.setflags(write=False)
        self._half = self.eigenvalues[:self.r // 2 + 1]

    def circulant_matvec(self, v):
        '''Apply :math:`C_r` through its diagonalization by the DFT.'''
        v = np.asarray(v, dtype=np.float64)
        if v.shape != (self.r,):
            raise ValueError("Expecting a vector of length %d" % self.r)
        return linalg.ifft(self.eigenvalues * linalg.fft(v)).real

    def dense(self):
        idx = (np.arange(self.r)[:, None] - np.arange(self.r)[None, :]) % self.r
        return self.c[idx]

    def toeplitz_matvec(self, x, counter=None):
        '''Compute :math:`J^T C_r J x` with one real forward FFT, a
        product with the cached eigenvalues and one real inverse FFT.'''
        padded = np.zeros(self.r)
        padded[:self.n] = x
        spectrum = linalg.rfft(padded, counter=counter)
        product = spectrum * self._half
        if counter is not None:
            counter.mul(4 * len(product))
            counter.add(2 * len(product))
        return linalg.irfft(product, self.r, counter=counter)[:self.n]


class HankelOperator(object):
    '''The per-symmetric Hankel operator of a series of time-delay samples.

    Entry `(i, j)` reads sample `i + j` reflected about `n - 1`, so every
    row is the series read forwards and then backwards:

    .. code-block:: none

        x0   x1   ...  x(n-2) x(n-1)
        x1   x2   ...  x(n-1) x(n-2)
        ...
        x(n-1) x(n-2) ... x1   x0

    The operator is immutable; its circulant embedding is computed once
    on first use and shared by all FFT products.

    Args:
        samples (numpy.array or list): The samples :math:`x(\\tau_k)`,
            `k = 0..n-1`, finite.

    Example:

        .. code-block:: python

            from hankeldyn import HankelOperator, FlopCounter
            h = HankelOperator([1.0, 2.0, 3.0, 4.0])
            counter = FlopCounter()
            y = h.matvec_fft([1.0, 0.0, 0.0, 0.0], counter=counter)
    '''

    def __init__(self, samples):
        samples = np.array(samples, dtype=np.float64)
        if samples.ndim != 1 or len(samples) == 0:
            raise ValueError("samples must be a non-empty 1-D sequence")
        if not np.all(np.isfinite(samples)):
            raise ValueError("samples must be finite")
        samples.setflags(write=False)
        self.samples = samples
        self.n = len(samples)
        self._embedding = None

    @property
    def embedding(self):
        if self._embedding is None:
            self._embedding = CirculantEmbedding(self.samples)
        return self._embedding

    def __len__(self):
        return self.n

    def __eq__(self, other):
        return type(self) is type(other) and \
            np.array_equal(self.samples, other.samples)

    def _check_vector(self, x):
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.n,):
            raise ValueError("Dimension mismatch, expecting a vector of "
                             "length %d, got shape %s" % (self.n, x.shape))
        return x

    def entry(self, i, j):
        '''
        Returns:
            float: Entry `(i, j)` of the operator.
        '''
        if not (0 <= i < self.n and 0 <= j < self.n):
            raise IndexError("Index (%d, %d) out of range for n=%d" % (i, j, self.n))
        return float(self.samples[reflect_index(i + j, self.n)])

    def dense(self):
        '''
        Returns:
            numpy.array: The `n x n` matrix.
        '''
        idx = np.arange(self.n)
        return self.samples[reflect_index(idx[:, None] + idx[None, :], self.n)]

    def matvec_dense(self, x, counter=None):
        '''Exact :math:`O(n^2)` product, the reference for the fast paths.'''
        x = self._check_vector(x)
        if counter is not None:
            counter.dense(self.n, self.n)
        return self.dense().dot(x)

    def shift_factors(self):
        '''The factors of the shift decomposition
        :math:`H = H_u + H_l - x(\\tau_{n-1}) \\tilde I_n`.

        Returns:
            tuple: `(H_u, H_l)` where
            :math:`H_u = [\\tilde x, Z \\tilde x, \\ldots, Z^{n-1} \\tilde x]`
            with `Z` the upper shift and
            :math:`H_l = \\tilde I H_u^T \\tilde I`.
        '''
        z = upper_shift(self.n)
        cols = [self.samples.copy()]
        for _ in range(self.n - 1):
            cols.append(z.dot(cols[-1]))
        h_u = np.column_stack(cols)
        flip = anti_identity(self.n)
        h_l = flip.dot(h_u.T).dot(flip)
        return h_u, h_l

    def matvec_shift(self, x, counter=None):
        '''Product through the shift decomposition.

        `H_u` is upper anti-triangular: column `j` is the sample vector
        shifted up by `j`, so only its first `n - j` entries are summed.
        `H_l` contributes the strictly lower anti-triangle; leaving out its
        anti-diagonal is exactly the :math:`-x(\\tau_{n-1})\\tilde I` term.
        Cost is `n^2` multiplications and `n(n-1)` additions.
        '''
        x = self._check_vector(x)
        n = self.n
        xt = self.samples
        out = x[0] * xt
        for j in range(1, n):
            out[:n - j] += x[j] * xt[j:]
        for j in range(1, n):
            out[n - j:] += x[j] * xt[n - 1 - j:n - 1][::-1]
        if counter is not None:
            counter.mul(n * n)
            counter.add(n * (n - 1))
        return out

    def matvec_fft(self, x, counter=None):
        '''Product through the circulant embedding,
        :math:`H x = \\tilde I_n J^T C_r J x`, in :math:`O(n \\log n)`.

        `J` zero-pads to length `r`, :math:`C_r` is applied with a real
        forward FFT, the cached eigenvalues and a real inverse FFT,
        :math:`J^T` keeps the first `n` entries and the anti-identity
        reverses them. Padding, selection and reversal are free.
        '''
        x = self._check_vector(x)
        return self.embedding.toeplitz_matvec(x, counter=counter)[::-1]

    def is_persymmetric(self):
        d = self.dense()
        flip = anti_identity(self.n)
        return np.array_equal(flip.dot(d).dot(flip), d.T)


def complexity_report(n_values, seed=0):
    '''Measure the flops of the three products for each size.

    Args:
        n_values (list): Operator sizes, non-empty.
        seed (int, optional): Seed for the random samples and vectors.

    Returns:
        list: One dict per size with keys `n`, `dense`, `shift`, `fft`.
    '''
    n_values = list(n_values)
    if not n_values:
        raise ValueError("n_values must be non-empty")
    gen = np.random.RandomState(seed)
    rows = []
    for n in n_values:
        h = HankelOperator(gen.uniform(-1, 1, n))
        x = gen.uniform(-1, 1, n)
        row = {'n': int(n)}
        for name, matvec in (('dense', h.matvec_dense),
                             ('shift', h.matvec_shift),
                             ('fft', h.matvec_fft)):
            counter = FlopCounter()
            matvec(x, counter=counter)
            row[name] = counter.total
        rows.append(row)
    return rows
