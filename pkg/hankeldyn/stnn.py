"""
Structured neural network built from the FFT-like factorization of the
Hankel operator.

Every branch of the network applies, on a width-4 state,

.. code-block:: none

    layer 1:  z1 = F8 J x + b1                   a1 = s1(z1)
    layer 2:  z2 = J^T F8' Dhat a1 + b2          a2 = s2(z2)
    layer 3:  z3 = I~ a2 + b3                    a3 = s3(z3)
    layer 4:  out = s4( sum_b D[b] a3[b] + b4[b] )

where `J` zero-pads to width 8, :math:`J^T` keeps the first 4 entries,
`I~` is the anti-identity and every `F8` is the butterfly

.. math::

    F_8 = P_8^T \\mathrm{blkdiag}(F_4^{(1)}, F_4^{(2)}) H_8, \\quad
    F_4^{(i)} = P_4^T \\mathrm{blkdiag}(F_2^{(i)}, F_2^{(i)}) H_4^{(i)}, \\quad
    H_{2k} = \\begin{bmatrix} I_k & I_k \\\\ \\check D_k & -\\check D_k
    \\end{bmatrix}

with :math:`P` the even-odd permutation. Only the `F2` blocks, the
:math:`\\check D` diagonals, `Dhat`, `D` and the biases are trainable;
identities, zeros, permutations and the anti-identity are fixed.

Parameters live in one flat vector, branch-major and layer-minor: the 64
scalars of branch 0 come first, in the order of :data:`BLOCKS`, then
those of branch 1 and so on.
"""
import logging

import numpy as np

from hankeldyn import linalg, lm
from hankeldyn.activations import get_activation
from hankeldyn.hankel import FlopCounter
from hankeldyn.rollout import autoregressive

logger = logging.getLogger(__name__)

STATE_WIDTH = 4

# (name, size, fan-in of the enclosing sub-matrix)
BLOCKS = (
    ("l1.f2a", 4, 2),
    ("l1.f2b", 4, 2),
    ("l1.d8", 4, 1),
    ("l1.d4a", 2, 1),
    ("l1.d4b", 2, 1),
    ("l1.bias", 8, 4),
    ("l2.dhat", 8, 1),
    ("l2.f2a", 4, 2),
    ("l2.f2b", 4, 2),
    ("l2.d8", 4, 1),
    ("l2.d4a", 2, 1),
    ("l2.d4b", 2, 1),
    ("l2.bias", 4, 8),
    ("l3.bias", 4, 4),
    ("l4.dout", 4, 1),
    ("l4.bias", 4, 1),
)

BRANCH_SIZE = sum(size for _, size, _ in BLOCKS)

_offsets = {}
_pos = 0
for _name, _size, _ in BLOCKS:
    _offsets[_name] = (_pos, _pos + _size)
    _pos += _size
del _pos, _name, _size

LAYER_NAMES = ("w10", "w21", "w32", "w43")

# Blocks each materialized layer matrix depends on.
_layer_blocks = {
    "w10": [n for n, _, _ in BLOCKS if n.startswith("l1.") and n != "l1.bias"],
    "w21": [n for n, _, _ in BLOCKS if n.startswith("l2.") and n != "l2.bias"],
    "w32": [],
    "w43": ["l4.dout"],
}

DEFAULT_ACTIVATIONS = ("tanh", "leaky_relu(0.01)", "relu", "identity")
DEFAULT_ALPHA = (0.0, 1e-7, 0.0, 0.0)


class StnnConfig(object):
    '''Architecture and regularization of a structured network.

    Args:
        n (int, optional): State width; the factorization is defined for
            width 4 (embedding width 8).
        p (int, optional): Number of parallel branches.
        activations (tuple, optional): Names of the four layer activations.
        alpha (tuple, optional): Nuclear-norm weights of the four layers.
        seed (int, optional): Seed of the initialization and of the
            mini-batch order.
    '''

    def __init__(self, n=STATE_WIDTH, p=6, activations=DEFAULT_ACTIVATIONS,
                 alpha=DEFAULT_ALPHA, seed=0):
        if n != STATE_WIDTH:
            raise ValueError("Structured layers are defined for state width "
                             "%d, got %d" % (STATE_WIDTH, n))
        if p < 1:
            raise ValueError("p must be at least 1")
        activations = tuple(activations)
        alpha = tuple(float(a) for a in alpha)
        if len(activations) != 4 or len(alpha) != 4:
            raise ValueError("Need exactly four activations and four alphas")
        if any(a < 0 for a in alpha):
            raise ValueError("alpha entries must be non-negative")
        self.n = n
        self.p = int(p)
        self.activations = tuple(get_activation(a).name for a in activations)
        self.alpha = alpha
        self.seed = seed

    def activation_fns(self):
        return [get_activation(a) for a in self.activations]

    def to_dict(self):
        return dict(n=self.n, p=self.p, activations=list(self.activations),
                    alpha=list(self.alpha), seed=self.seed)

    @classmethod
    def from_dict(cls, d):
        return cls(**d)

    def __eq__(self, other):
        return isinstance(other, StnnConfig) and self.to_dict() == other.to_dict()


class StnnParams(object):
    '''Trainable scalars of a structured network, in canonical flat order.

    Args:
        config (StnnConfig): The architecture.
        theta (numpy.array): Flat parameters of length `64 p`.
    '''

    def __init__(self, config, theta):
        theta = np.array(theta, dtype=np.float64)
        if theta.shape != (config.p * BRANCH_SIZE,):
            raise ValueError("Expecting %d parameters, got shape %s"
                             % (config.p * BRANCH_SIZE, theta.shape))
        self.config = config
        self.theta = theta

    def block(self, name):
        '''
        Returns:
            numpy.array: View of shape `(p, size)` on the named block.
        '''
        start, stop = _offsets[name]
        return self.theta.reshape(self.config.p, BRANCH_SIZE)[:, start:stop]

    def copy(self):
        return StnnParams(self.config, self.theta.copy())

    def permute_branches(self, order):
        '''A copy with branch `i` taken from branch `order[i]`.'''
        order = np.asarray(order)
        if sorted(order.tolist()) != list(range(self.config.p)):
            raise ValueError("order must be a permutation of the branches")
        w = self.theta.reshape(self.config.p, BRANCH_SIZE)[order]
        return StnnParams(self.config, w.ravel())

    def to_dict(self):
        return {
            "kind": "stnn",
            "config": self.config.to_dict(),
            "order": "branch-major, layer-minor",
            "blocks": [[name, size] for name, size, _ in BLOCKS],
            "theta": self.theta.tolist(),
        }

    @classmethod
    def from_dict(cls, d):
        if d.get("kind") != "stnn":
            raise ValueError("Not a structured network checkpoint")
        return cls(StnnConfig.from_dict(d["config"]), d["theta"])

    def __eq__(self, other):
        return isinstance(other, StnnParams) and \
            self.config == other.config and np.array_equal(self.theta, other.theta)


def _unpack(theta, p):
    w = np.asarray(theta).reshape(p, BRANCH_SIZE)
    blocks = {}
    for name, size, _ in BLOCKS:
        start, stop = _offsets[name]
        value = w[:, start:stop]
        if ".f2" in name:
            value = value.reshape(p, 2, 2)
        blocks[name] = value
    return blocks


class _NullCounter(object):

    def __getattr__(self, name):
        return lambda *args: None


class _Repeat(object):
    '''Charges every operation `times` times on the wrapped counter.'''

    def __init__(self, counter, times):
        self.counter = counter
        self.times = times

    def __getattr__(self, name):
        method = getattr(self.counter, name)

        def charge(*args):
            for _ in range(self.times):
                method(*args)
        return charge


def _apply_f2(f2, s):
    return np.einsum('pij,pmj->pmi', f2, s)


def _interleave(top, bottom):
    out = np.empty(top.shape[:-1] + (2 * top.shape[-1],))
    out[..., 0::2] = top
    out[..., 1::2] = bottom
    return out


def _f4_forward(v, f2, d2, counter):
    c, e = v[..., :2], v[..., 2:]
    s_top = c + e
    diff = c - e
    s_bot = d2[:, None, :] * diff
    counter.vadd(2)
    counter.vadd(2)
    counter.diag(2)
    counter.dense(2, 2)
    counter.dense(2, 2)
    out = _interleave(_apply_f2(f2, s_top), _apply_f2(f2, s_bot))
    return out, (s_top, s_bot, diff)


def _f4_backward(g, f2, d2, cache):
    s_top, s_bot, diff = cache
    g_t1, g_t2 = g[..., 0::2], g[..., 1::2]
    g_f2 = g_t1[..., :, None] * s_top[..., None, :] + \
        g_t2[..., :, None] * s_bot[..., None, :]
    g_top = np.einsum('pij,pmi->pmj', f2, g_t1)
    g_bot = np.einsum('pij,pmi->pmj', f2, g_t2)
    g_d2 = g_bot * diff
    g_diff = g_bot * d2[:, None, :]
    g_v = np.concatenate([g_top + g_diff, g_top - g_diff], axis=-1)
    return g_v, g_f2.reshape(g_f2.shape[:-2] + (4,)), g_d2


def _f8_forward(v, blocks, layer, counter):
    a, b = v[..., :4], v[..., 4:]
    u_top = a + b
    diff = a - b
    d8 = blocks[layer + ".d8"][:, None, :]
    u_bot = d8 * diff
    counter.vadd(4)
    counter.vadd(4)
    counter.diag(4)
    w0, c0 = _f4_forward(u_top, blocks[layer + ".f2a"], blocks[layer + ".d4a"], counter)
    w1, c1 = _f4_forward(u_bot, blocks[layer + ".f2b"], blocks[layer + ".d4b"], counter)
    return _interleave(w0, w1), (diff, c0, c1)


def _f8_backward(g, blocks, layer, cache, grads):
    diff, c0, c1 = cache
    g_top, grads[layer + ".f2a"], grads[layer + ".d4a"] = _f4_backward(
        g[..., 0::2], blocks[layer + ".f2a"], blocks[layer + ".d4a"], c0)
    g_bot, grads[layer + ".f2b"], grads[layer + ".d4b"] = _f4_backward(
        g[..., 1::2], blocks[layer + ".f2b"], blocks[layer + ".d4b"], c1)
    grads[layer + ".d8"] = g_bot * diff
    g_diff = g_bot * blocks[layer + ".d8"][:, None, :]
    return np.concatenate([g_top + g_diff, g_top - g_diff], axis=-1)


def _forward(blocks, acts, x, counter=None):
    # x has one sample per row; branch tensors are (p, m, width).
    p = blocks["l1.bias"].shape[0]
    m = x.shape[0]
    if counter is None:
        branch_counter = total_counter = _NullCounter()
    else:
        branch_counter = _Repeat(counter, m * p)
        total_counter = _Repeat(counter, m)
    v1 = np.zeros((p, m, 8))
    v1[..., :4] = x
    y1, c1 = _f8_forward(v1, blocks, "l1", branch_counter)
    z1 = y1 + blocks["l1.bias"][:, None, :]
    branch_counter.bias(8)
    a1 = acts[0](z1)
    q = blocks["l2.dhat"][:, None, :] * a1
    branch_counter.diag(8)
    y2, c2 = _f8_forward(q, blocks, "l2", branch_counter)
    z2 = y2[..., :4] + blocks["l2.bias"][:, None, :]
    branch_counter.bias(4)
    a2 = acts[1](z2)
    z3 = a2[..., ::-1] + blocks["l3.bias"][:, None, :]
    branch_counter.bias(4)
    a3 = acts[2](z3)
    o = blocks["l4.dout"][:, None, :] * a3 + blocks["l4.bias"][:, None, :]
    branch_counter.diag(4)
    branch_counter.bias(4)
    s = o.sum(axis=0)
    for _ in range(p - 1):
        total_counter.vadd(4)
    out = acts[3](s)
    cache = dict(z1=z1, a1=a1, z2=z2, z3=z3, a3=a3, s=s, c1=c1, c2=c2)
    return out, cache


def _backward(blocks, acts, cache, g_out):
    '''Per-sample gradients of ``sum(g_out * out)`` for every block,
    each of shape `(p, m, size)`.'''
    grads = {}
    gs = g_out * acts[3].grad(cache["s"])
    p = blocks["l1.bias"].shape[0]
    gs = np.broadcast_to(gs, (p,) + gs.shape)
    grads["l4.bias"] = gs
    grads["l4.dout"] = gs * cache["a3"]
    g_z3 = gs * blocks["l4.dout"][:, None, :] * acts[2].grad(cache["z3"])
    grads["l3.bias"] = g_z3
    g_z2 = g_z3[..., ::-1] * acts[1].grad(cache["z2"])
    grads["l2.bias"] = g_z2
    g_y2 = np.concatenate([g_z2, np.zeros_like(g_z2)], axis=-1)
    g_q = _f8_backward(g_y2, blocks, "l2", cache["c2"], grads)
    grads["l2.dhat"] = g_q * cache["a1"]
    g_z1 = g_q * blocks["l2.dhat"][:, None, :] * acts[0].grad(cache["z1"])
    grads["l1.bias"] = g_z1
    _f8_backward(g_z1, blocks, "l1", cache["c1"], grads)
    return grads


def _assemble(grads, p, m):
    out = np.empty((m, p, BRANCH_SIZE))
    for name, _, _ in BLOCKS:
        start, stop = _offsets[name]
        out[:, :, start:stop] = np.transpose(grads[name], (1, 0, 2))
    return out.reshape(m, p * BRANCH_SIZE)


def _materialize(blocks):
    p = blocks["l1.bias"].shape[0]
    eye = np.broadcast_to(np.eye(8), (p, 8, 8))
    # Rows of the identity map to rows of F8^T.
    f8_1 = np.transpose(_f8_forward(eye, blocks, "l1", _NullCounter())[0], (0, 2, 1))
    f8_2 = np.transpose(_f8_forward(eye, blocks, "l2", _NullCounter())[0], (0, 2, 1))
    flip = np.fliplr(np.eye(4))
    return {
        "w10": f8_1[:, :, :4].copy(),
        "w21": f8_2[:, :4, :] * blocks["l2.dhat"][:, None, :],
        "w32": np.broadcast_to(flip, (p, 4, 4)).copy(),
        "w43": np.einsum('pi,ij->pij', blocks["l4.dout"], np.eye(4)),
    }


def init(cfg):
    '''Random initial parameters.

    Every trainable scalar is drawn from
    :math:`U(-1/\\sqrt{k}, 1/\\sqrt{k})`, `k` being the fan-in of the
    sub-matrix it belongs to. Draws follow the canonical flat order.

    Args:
        cfg (StnnConfig): The architecture.

    Returns:
        StnnParams: The parameters.
    '''
    gen = np.random.RandomState(cfg.seed)
    theta = np.empty(cfg.p * BRANCH_SIZE)
    pos = 0
    for _ in range(cfg.p):
        for _, size, fan_in in BLOCKS:
            bound = 1.0 / np.sqrt(fan_in)
            theta[pos:pos + size] = gen.uniform(-bound, bound, size)
            pos += size
    return StnnParams(cfg, theta)


def forward(params, x, counter=None):
    '''Evaluate the network.

    Args:
        params (StnnParams): The parameters.
        x (numpy.array): A state of width 4, or a `(4, m)` array of states
            in columns.
        counter (FlopCounter, optional): Charged per evaluated state.
            Structured layers charge their bias additions only if the
            counter counts bias additions.

    Returns:
        numpy.array: Output of the same shape as `x`.
    '''
    rows, single = lm.states_to_rows(x)
    if rows.shape[1] != params.config.n:
        raise ValueError("Dimension mismatch, expecting states of width %d, "
                         "got %d" % (params.config.n, rows.shape[1]))
    blocks = _unpack(params.theta, params.config.p)
    out, _ = _forward(blocks, params.config.activation_fns(), rows, counter)
    return out[0] if single else out.T


def param_count(p):
    '''Closed-form number of trainable scalars, `64 p`.'''
    return sum(w + b for _, w, b in layer_param_counts(p))


def flop_count(p):
    '''Closed-form flops of one forward pass, `148 p - 4`.'''
    return sum(f for _, f in layer_flop_counts(p))


def layer_param_counts(p):
    '''
    Returns:
        list: `(layer, weights, biases)` per layer matrix.
    '''
    return [("w10", 16 * p, 8 * p), ("w21", 24 * p, 4 * p),
            ("w32", 0, 4 * p), ("w43", 4 * p, 4 * p)]


def layer_flop_counts(p):
    '''
    Returns:
        list: `(layer, flops)` per layer matrix, bias additions included.
    '''
    return [("w10", 64 * p), ("w21", 68 * p), ("w32", 4 * p),
            ("w43", 12 * p - 4)]


def count_params(params):
    return int(params.theta.size)


def count_flops(cfg):
    '''Flops of one forward pass, measured by running the network with a
    counter that includes bias additions.'''
    counter = FlopCounter(count_bias_adds=True)
    forward(init(cfg), np.zeros(cfg.n), counter=counter)
    return counter.total


def materialize(params):
    '''Dense per-branch layer matrices.

    Returns:
        dict: `w10` of shape `(p, 8, 4)` (:math:`F_8 J`), `w21` of shape
        `(p, 4, 8)` (:math:`J^T F_8 \\hat D`), `w32` of shape `(p, 4, 4)`
        (the anti-identity) and `w43` of shape `(p, 4, 4)` (`diag(D)`).
    '''
    return _materialize(_unpack(params.theta, params.config.p))


def f8_factors(params, layer, branch):
    '''The dense factors of one butterfly, for inspection.

    Args:
        params (StnnParams): The parameters.
        layer (int): 1 or 2.
        branch (int): Branch index.

    Returns:
        dict: `p8`, `blocks` (block diagonal of the two `F4`), `h8`, the
        product `f8`, and for both `F4` their factors `p4`, `f2_blocks_a`,
        `h4a`, `f2_blocks_b`, `h4b`.
    '''
    key = "l%d" % layer
    b = {name: params.block(name)[branch] for name, _, _ in BLOCKS
         if name.startswith(key + ".")}
    perm4 = np.eye(4)[[0, 2, 1, 3]]
    perm8 = np.eye(8)[[0, 2, 4, 6, 1, 3, 5, 7]]

    def h(d):
        k = len(d)
        return np.block([[np.eye(k), np.eye(k)], [np.diag(d), -np.diag(d)]])

    def f4(f2, d):
        f2 = f2.reshape(2, 2)
        blk = np.block([[f2, np.zeros((2, 2))], [np.zeros((2, 2)), f2]])
        return perm4.T.dot(blk).dot(h(d)), blk

    f4a, blk_a = f4(b[key + ".f2a"], b[key + ".d4a"])
    f4b, blk_b = f4(b[key + ".f2b"], b[key + ".d4b"])
    blocks = np.block([[f4a, np.zeros((4, 4))], [np.zeros((4, 4)), f4b]])
    h8 = h(b[key + ".d8"])
    return dict(p8=perm8, blocks=blocks, h8=h8, f8=perm8.T.dot(blocks).dot(h8),
                p4=perm4, f2_blocks_a=blk_a, h4a=h(b[key + ".d4a"]),
                f2_blocks_b=blk_b, h4b=h(b[key + ".d4b"]))


class StnnModel(object):
    '''Least-squares view of a structured network for
    :mod:`hankeldyn.lm`.

    The residual vector stacks the scaled prediction errors, sample-major,
    and the square roots of the weighted singular values of every
    regularized layer matrix, so its squared norm is the regularized
    mean squared error.

    Singular values are differentiated through their vectors,
    :math:`\\partial\\sigma_i = u_i^T \\, \\partial W \\, v_i`, which holds
    while the singular values are distinct; a zero singular value gets a
    zero row.

    Args:
        config (StnnConfig): The architecture.
    '''

    def __init__(self, config):
        self.config = config
        self.acts = config.activation_fns()

    def _reg_layers(self):
        return [(LAYER_NAMES[l], a) for l, a in enumerate(self.config.alpha) if a > 0]

    def reg_residuals(self, theta):
        mats = _materialize(_unpack(theta, self.config.p))
        parts = []
        for name, alpha in self._reg_layers():
            for b in range(self.config.p):
                parts.append(np.sqrt(alpha * linalg.singular_values(mats[name][b])))
        return np.concatenate(parts) if parts else np.zeros(0)

    def data_residuals(self, theta, x, y):
        blocks = _unpack(theta, self.config.p)
        out, _ = _forward(blocks, self.acts, x)
        return ((y - out) / np.sqrt(y.size)).ravel()

    def residuals(self, theta, x, y):
        return np.concatenate([self.data_residuals(theta, x, y),
                               self.reg_residuals(theta)])

    def data_jacobian(self, theta, x, y):
        p = self.config.p
        blocks = _unpack(theta, p)
        m, n = x.shape[0], self.config.n
        _, cache = _forward(blocks, self.acts, x)
        jac = np.empty((m, n, p * BRANCH_SIZE))
        for k in range(n):
            g = np.zeros((m, n))
            g[:, k] = 1.0
            jac[:, k, :] = _assemble(_backward(blocks, self.acts, cache, g), p, m)
        return -jac.reshape(m * n, p * BRANCH_SIZE) / np.sqrt(m * n)

    def _layer_derivatives(self, w, name, cols):
        '''Partial derivatives of one branch's layer matrix, one matrix
        per flat parameter index in `cols`.'''
        shifted = np.tile(w, (len(cols), 1))
        shifted[np.arange(len(cols)), cols] += 1.0
        base = _materialize(_unpack(w, 1))[name][0]
        # Each matrix is affine in every single parameter, so a unit
        # difference is the exact partial derivative.
        return _materialize(_unpack(shifted, len(cols)))[name] - base

    def reg_jacobian(self, theta):
        p = self.config.p
        layers = self._reg_layers()
        jac = np.zeros((len(layers) * p * 4, p * BRANCH_SIZE))
        mats = _materialize(_unpack(theta, p))
        w = np.asarray(theta).reshape(p, BRANCH_SIZE)
        row = 0
        for name, alpha in layers:
            for b in range(p):
                cols = [j for block in _layer_blocks[name]
                        for j in range(*_offsets[block])]
                if cols:
                    u, s, v = linalg.svd(mats[name][b])
                    dmats = self._layer_derivatives(w[b], name, cols)
                    # d sigma_i = u_i^T dW v_i
                    dsigma = np.einsum('ri,jrc,ci->ij', u, dmats, v)
                    scale = np.zeros_like(s)
                    scale[s > 0] = alpha / (2.0 * np.sqrt(alpha * s[s > 0]))
                    jac[row:row + 4, b * BRANCH_SIZE + np.array(cols)] = \
                        scale[:, None] * dsigma
                row += 4
        return jac

    def jacobian(self, theta, x, y):
        return np.vstack([self.data_jacobian(theta, x, y),
                          self.reg_jacobian(theta)])

    def blocks(self):
        out = []
        for b in range(self.config.p):
            for name, _, _ in BLOCKS:
                start, stop = _offsets[name]
                out.append(("branch %d %s" % (b, name),
                            slice(b * BRANCH_SIZE + start, b * BRANCH_SIZE + stop)))
        return out


def loss(params, batch, alpha=None):
    '''Regularized mean squared error

    .. math::

        \\frac{1}{m n} \\sum_j \\|x'_j - f(x_j)\\|^2
        + \\sum_l \\alpha_l \\sum_b \\|W_{l,l-1}[b]\\|_*

    Args:
        params (StnnParams): The parameters.
        batch: A :class:`hankeldyn.dynsys.TrajectoryDataset` or an
            `(X, X')` pair with states in columns.
        alpha (tuple, optional): Layer weights, defaulting to the
            configured ones.

    Returns:
        float: The objective.
    '''
    cfg = params.config
    if alpha is not None:
        cfg = StnnConfig(cfg.n, cfg.p, cfg.activations, alpha, cfg.seed)
    x, y = lm.pairs_to_rows(batch)
    if len(x) == 0:
        raise ValueError("batch is empty")
    return lm.objective(StnnModel(cfg), params.theta, x, y)


def train_lm(params, train, val=None, epochs=5, batch_size=1000, settings=None,
             seed=None, patience=None):
    '''Train with mini-batch Levenberg-Marquardt.

    Args:
        params (StnnParams): Initial parameters, left unchanged.
        train: Training data, a dataset or an `(X, X')` column pair.
        val (optional): Validation data in the same form.
        epochs (int, optional): Passes over the training data.
        batch_size (int, optional): Samples per mini-batch.
        settings (hankeldyn.lm.LMSettings, optional): Damping schedule.
        seed (int, optional): Seed of the mini-batch order, defaulting to
            the configured seed.
        patience (int, optional): Epochs without validation progress
            before stopping, see :func:`hankeldyn.lm.train`.

    Returns:
        tuple: `(StnnParams, TrainReport)`.
    '''
    cfg = params.config
    train_xy = lm.pairs_to_rows(train)
    val_xy = lm.pairs_to_rows(val) if val is not None else None
    theta, report = lm.train(StnnModel(cfg), params.theta, train_xy, val_xy,
                             epochs=epochs, batch_size=batch_size,
                             settings=settings,
                             seed=cfg.seed if seed is None else seed,
                             patience=patience)
    logger.info("Trained structured network p=%d: loss %.6g -> %.6g",
                cfg.p, report.initial_train_loss, report.final_train_loss)
    return StnnParams(cfg, theta), report


def rollout(params, x0, steps, adapter=None, dt=1.0, t0=0.0):
    '''Autoregressive forecast, feeding each output back as the next input.

    Args:
        params (StnnParams): The parameters.
        x0 (numpy.array): Initial state of width 4.
        steps (int): Number of forecast steps.
        adapter (callable, optional): Adjusts every new state, see
            :mod:`hankeldyn.rollout`.
        dt (float, optional): Time between states.
        t0 (float, optional): Time of `x0`.

    Returns:
        hankeldyn.dynsys.Trajectory: `steps + 1` states starting at `x0`.
    '''
    return autoregressive(lambda x: forward(params, x), x0, steps, dt=dt,
                          t0=t0, adapter=adapter)
