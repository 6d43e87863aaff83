"""
Dynamical systems, their numerical integration and the snapshot
datasets built from sampled trajectories.

Snapshot matrices follow the operator-fitting convention: each column
of `X` is a state at sample time :math:`\\tau_k`, and the matching column
of `X'` is the state one sampling interval later.
"""
import functools
import logging

import numpy as np
from scipy.integrate import solve_ivp

from hankeldyn.errors import IntegrationError

logger = logging.getLogger(__name__)

LORENZ_PARAMS = (10.0, 28.0, 8.0 / 3.0)
LORENZ_IC = (0.0, 1.0, 20.0)

# Seed of the default Lotka-Volterra environments.
DEFAULT_ENVIRONMENT_SEED = 1


def lorenz_rhs(state, params=LORENZ_PARAMS):
    '''
    Args:
        state: `(x, y, z)`.
        params: `(sigma, rho, beta)`.

    Returns:
        numpy.array: :math:`(\\sigma(y-x), x(\\rho-z)-y, xy-\\beta z)`.
    '''
    x, y, z = state
    sigma, rho, beta = params
    return np.array([sigma * (y - x), x * (rho - z) - y, x * y - beta * z])


def lotka_volterra_rhs(state, params):
    '''
    Args:
        state: `(x, y)`, prey and predator.
        params: `(alpha, beta, gamma, delta)`.

    Returns:
        numpy.array: :math:`(\\alpha x - \\beta xy, -\\gamma y + \\delta xy)`.
    '''
    x, y = state
    alpha, beta, gamma, delta = params
    return np.array([alpha * x - beta * x * y, -gamma * y + delta * x * y])


def lotka_volterra_invariant(state, params):
    '''The conserved quantity
    :math:`\\delta x - \\gamma \\ln x + \\beta y - \\alpha \\ln y`.'''
    x, y = np.asarray(state, dtype=np.float64).T
    alpha, beta, gamma, delta = params
    return delta * x - gamma * np.log(x) + beta * y - alpha * np.log(y)


class OdeModel(object):
    '''An autonomous or time-dependent ODE :math:`\\dot x = f(x, t)`.

    Args:
        name (str): Identifier, e.g. `lorenz`.
        dimension (int): State dimension.
        parameters (dict): Named, finite system parameters.
        rhs (callable): `rhs(state, t)` returning the derivative.
    '''

    def __init__(self, name, dimension, parameters, rhs):
        if dimension < 1:
            raise ValueError("dimension must be at least 1")
        for key, value in parameters.items():
            if not np.isfinite(value):
                raise ValueError("Parameter %s must be finite" % key)
        self.name = name
        self.dimension = dimension
        self.parameters = dict(parameters)
        self.rhs = rhs

    def __call__(self, state, t=0.0):
        out = np.asarray(self.rhs(state, t), dtype=np.float64)
        if out.shape != (self.dimension,):
            raise ValueError("rhs of %s returned shape %s, expecting (%d,)"
                             % (self.name, out.shape, self.dimension))
        return out

    @classmethod
    def lorenz(cls, sigma=10.0, rho=28.0, beta=8.0 / 3.0):
        params = (sigma, rho, beta)
        return cls("lorenz", 3, dict(sigma=sigma, rho=rho, beta=beta),
                   lambda s, t: lorenz_rhs(s, params))

    @classmethod
    def lotka_volterra(cls, alpha, beta, gamma, delta):
        params = (alpha, beta, gamma, delta)
        return cls("lotka_volterra", 2,
                   dict(alpha=alpha, beta=beta, gamma=gamma, delta=delta),
                   lambda s, t: lotka_volterra_rhs(s, params))

    @classmethod
    def linear(cls, a, name="linear"):
        '''The linear system :math:`\\dot x = A x`.'''
        a = np.atleast_2d(np.asarray(a, dtype=np.float64))
        return cls(name, a.shape[0], {}, lambda s, t: a.dot(s))


class Trajectory(object):
    '''Sampled states of one solution.

    Args:
        times (numpy.array): Strictly increasing sample times.
        states (numpy.array): Array of shape `(len(times), d)`.
        diverged_at (int, optional): Step at which a model rollout left
            the finite range and was truncated.
    '''

    def __init__(self, times, states, diverged_at=None):
        times = np.asarray(times, dtype=np.float64)
        states = np.atleast_2d(np.asarray(states, dtype=np.float64))
        if len(times) != len(states):
            raise ValueError("times and states have different lengths "
                             "(%d and %d)" % (len(times), len(states)))
        if len(times) > 1 and not np.all(np.diff(times) > 0):
            raise ValueError("times must be strictly increasing")
        self.times = times
        self.states = states
        self.diverged_at = diverged_at

    @property
    def initial_condition(self):
        return self.states[0]

    @property
    def diverged(self):
        return self.diverged_at is not None

    def __len__(self):
        return len(self.times)

    def pairs(self):
        '''Consecutive snapshot pairs as `(X, X')` with states in columns.'''
        return self.states[:-1].T.copy(), self.states[1:].T.copy()


class Environment(object):
    '''One Lotka-Volterra parameter set.

    Args:
        id (int): Environment index, also used as an input feature.
        params (tuple): `(alpha, beta, gamma, delta)`, all positive.
    '''

    def __init__(self, id, params):
        params = tuple(float(v) for v in params)
        if len(params) != 4 or not all(v > 0 for v in params):
            raise ValueError("Environment parameters must be four positive "
                             "reals, got %s" % (params,))
        self.id = int(id)
        self.params = params

    def model(self):
        return OdeModel.lotka_volterra(*self.params)

    def __repr__(self):
        return "Environment(id=%d, params=%s)" % (self.id, self.params)

    def __eq__(self, other):
        return isinstance(other, Environment) and \
            self.id == other.id and self.params == other.params


class TrajectoryDataset(object):
    '''Snapshot pairs `(X, X')`, one sample per column.

    Args:
        x (numpy.array): States at :math:`\\tau_k`, shape `(d, m)`.
        xp (numpy.array): States at :math:`\\tau_k + \\Delta t`, same shape.
        delta_t (float): The sampling interval.
        metadata (dict, optional): Generating configuration and seed.
        trajectories (list, optional): The source trajectories.
    '''

    def __init__(self, x, xp, delta_t, metadata=None, trajectories=None):
        x = np.asarray(x, dtype=np.float64)
        xp = np.asarray(xp, dtype=np.float64)
        if x.ndim != 2 or x.shape != xp.shape:
            raise ValueError("x and xp must have the same 2-D shape, got %s "
                             "and %s" % (x.shape, xp.shape))
        self.x = x
        self.xp = xp
        self.delta_t = float(delta_t)
        self.metadata = dict(metadata) if metadata else {}
        self.trajectories = list(trajectories) if trajectories else []

    @property
    def dimension(self):
        return self.x.shape[0]

    def __len__(self):
        return self.x.shape[1]

    def subset(self, indices):
        indices = np.asarray(indices, dtype=np.int64)
        return TrajectoryDataset(self.x[:, indices], self.xp[:, indices],
                                 self.delta_t, self.metadata)

    @classmethod
    def concatenate(cls, datasets, metadata=None):
        '''Join datasets of the same dimension and sampling interval.'''
        datasets = list(datasets)
        if not datasets:
            raise ValueError("Need at least one dataset")
        delta_t = datasets[0].delta_t
        if any(ds.delta_t != delta_t for ds in datasets):
            raise ValueError("Datasets have different sampling intervals")
        trajectories = [t for ds in datasets for t in ds.trajectories]
        return cls(np.hstack([ds.x for ds in datasets]),
                   np.hstack([ds.xp for ds in datasets]), delta_t,
                   metadata, trajectories)

    @classmethod
    def from_trajectories(cls, trajectories, delta_t, metadata=None,
                          features=None):
        '''Pair consecutive samples of each trajectory, never across two.

        Args:
            trajectories (list): :class:`Trajectory` objects.
            delta_t (float): Sampling interval.
            metadata (dict, optional): Dataset metadata.
            features (callable, optional): Maps a trajectory to its
                feature rows, shape `(len, d)`. Defaults to the states.
        '''
        xs, xps = [], []
        for traj in trajectories:
            rows = traj.states if features is None else features(traj)
            xs.append(rows[:-1])
            xps.append(rows[1:])
        return cls(np.vstack(xs).T, np.vstack(xps).T, delta_t, metadata,
                   trajectories)


def sample_times(t0, t1, dt_sample, include_end=False):
    '''The sampling grid `t0, t0 + dt, ...` over `[t0, t1)`.

    `t0` is always sampled. A grid point within a relative `1e-9` of `t1`
    counts as `t1`, so `T / dt` samples are taken when `dt` divides `T`.
    '''
    span = (t1 - t0) / dt_sample
    count = max(int(np.ceil(span - 1e-9 * max(span, 1.0))), 1)
    times = t0 + dt_sample * np.arange(count)
    times = times[times < t1]
    if include_end:
        times = np.append(times, t1)
    return times


def integrate(model, x0, t_span, dt_sample, tol=1e-12, method="RK45",
              include_end=False):
    '''Integrate an ODE with an adaptive Runge-Kutta method and sample the
    solution on a fixed grid.

    The sampling interval is unrelated to the internal step size, which
    is chosen by the error controller.

    Args:
        model (OdeModel): The system.
        x0 (numpy.array): Initial state.
        t_span (tuple): `(t0, t1)` with `t1 > t0`.
        dt_sample (float): Sampling interval; samples are taken at
            `t0, t0 + dt_sample, ...` strictly before `t1`.
        tol (float, optional): Relative and absolute local error tolerance.
        method (str, optional): `RK45` (Dormand-Prince 5(4)) or any other
            :func:`scipy.integrate.solve_ivp` explicit method, e.g. `DOP853`.
        include_end (bool, optional): Also sample `t1`.

    Returns:
        Trajectory: The sampled solution.

    Raises:
        hankeldyn.errors.IntegrationError: If the step size underflows.
    '''
    t0, t1 = float(t_span[0]), float(t_span[1])
    if not t1 > t0:
        raise ValueError("t1 must be greater than t0")
    if dt_sample <= 0 or tol <= 0:
        raise ValueError("dt_sample and tol must be positive")
    x0 = np.asarray(x0, dtype=np.float64)
    if x0.shape != (model.dimension,):
        raise ValueError("x0 must have length %d" % model.dimension)
    times = sample_times(t0, t1, dt_sample, include_end=include_end)
    sol = solve_ivp(lambda t, y: model(y, t), (t0, t1), x0, method=method,
                    t_eval=times, rtol=tol, atol=tol)
    if sol.status < 0:
        failed_at = float(sol.t[-1]) if len(sol.t) else t0
        raise IntegrationError(sol.message, failed_at)
    return Trajectory(sol.t, sol.y.T)


def rk4_step(f, x, dt):
    '''One classical fourth-order Runge-Kutta step of an autonomous `f`.'''
    k1 = f(x)
    k2 = f(x + 0.5 * dt * k1)
    k3 = f(x + 0.5 * dt * k2)
    k4 = f(x + dt * k3)
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _perturbed_ic(nominal, noise_mag, gen):
    nominal = np.asarray(nominal, dtype=np.float64)
    return nominal + gen.uniform(-noise_mag, noise_mag, len(nominal))


def generate_lorenz_dataset(n_traj=100, noise_mag=1.0, seed=0, dt=0.01,
                            T=8.0, tol=1e-12, method="RK45", ic=LORENZ_IC,
                            params=LORENZ_PARAMS):
    '''Snapshot pairs from Lorenz trajectories started near a nominal state.

    Trajectory `i` starts at ``ic + U(-noise_mag, noise_mag)^3`` drawn
    from its own random stream seeded with `(seed, i)`, so the output
    does not depend on generation order.

    Args:
        n_traj (int, optional): Number of trajectories.
        noise_mag (float, optional): Magnitude of the uniform perturbation.
        seed (int, optional): Random seed.
        dt (float, optional): Sampling interval.
        T (float, optional): Duration of every trajectory.
        tol (float, optional): Integrator tolerance.
        method (str, optional): Integrator method.
        ic (tuple, optional): Nominal initial state.
        params (tuple, optional): `(sigma, rho, beta)`.

    Returns:
        TrajectoryDataset: `n_traj * (round(T / dt) - 1)` pairs.
    '''
    if n_traj < 1:
        raise ValueError("n_traj must be at least 1")
    model = OdeModel.lorenz(*params)
    trajectories = []
    for i in range(n_traj):
        gen = np.random.RandomState([seed, i])
        x0 = _perturbed_ic(ic, noise_mag, gen)
        trajectories.append(integrate(model, x0, (0.0, T), dt, tol=tol,
                                      method=method))
    metadata = dict(system="lorenz", seed=seed, n_traj=n_traj,
                    noise_mag=noise_mag, dt=dt, T=T, tol=tol,
                    params=list(params), ic=list(ic))
    ds = TrajectoryDataset.from_trajectories(trajectories, dt, metadata)
    ds.metadata["n_pairs"] = len(ds)
    logger.info("Generated %d Lorenz trajectories, %d pairs", n_traj, len(ds))
    return ds


def default_environments(n=10, seed=DEFAULT_ENVIRONMENT_SEED, low=0.25,
                         high=1.25):
    '''Lotka-Volterra environments with parameters drawn uniformly from
    `[low, high]`.

    Returns:
        list: `n` :class:`Environment` objects with ids `0..n-1`.
    '''
    gen = np.random.RandomState(seed)
    return [Environment(i, gen.uniform(low, high, 4)) for i in range(n)]


def lv_rows(traj, env_id):
    '''Feature rows `(x, y, t, env_id)` of a Lotka-Volterra trajectory.'''
    return np.column_stack([traj.states, traj.times,
                            np.full(len(traj), float(env_id))])


def generate_lv_dataset(environments, n_train_traj=8, n_test_traj=32, seed=0,
                        dt=0.5, n_points=20, tol=1e-10, ic_range=(1.0, 3.0)):
    '''Per-environment Lotka-Volterra datasets.

    Every trajectory is sampled at `0, dt, ..., (n_points - 1) dt` from an
    initial state drawn uniformly from `ic_range` squared. Sample rows are
    `(x, y, t, env_id)`; the advanced rows keep the same layout, with the
    time advanced by `dt` and the environment id unchanged.

    Args:
        environments (list): :class:`Environment` objects, non-empty.
        n_train_traj (int, optional): Training trajectories per environment.
        n_test_traj (int, optional): Test trajectories per environment.
        seed (int, optional): Random seed.
        dt (float, optional): Sampling interval.
        n_points (int, optional): Samples per trajectory.
        tol (float, optional): Integrator tolerance.
        ic_range (tuple, optional): Range of both initial populations.

    Returns:
        list: One `(train, test)` pair of :class:`TrajectoryDataset` per
        environment, in the order given.
    '''
    if not environments:
        raise ValueError("environments must be non-empty")
    if n_train_traj < 1 or n_test_traj < 0:
        raise ValueError("Need at least one training trajectory")
    t1 = dt * n_points
    out = []
    for env in environments:
        model = env.model()
        trajectories = []
        for i in range(n_train_traj + n_test_traj):
            gen = np.random.RandomState([seed, env.id, i])
            x0 = gen.uniform(ic_range[0], ic_range[1], 2)
            trajectories.append(integrate(model, x0, (0.0, t1), dt, tol=tol))
        metadata = dict(system="lotka_volterra", seed=seed, env_id=env.id,
                        params=list(env.params), dt=dt, n_points=n_points)
        features = functools.partial(lv_rows, env_id=env.id)
        train = TrajectoryDataset.from_trajectories(
            trajectories[:n_train_traj], dt, metadata, features)
        test = None
        if n_test_traj > 0:
            test = TrajectoryDataset.from_trajectories(
                trajectories[n_train_traj:], dt, metadata, features)
        out.append((train, test))
    logger.info("Generated Lotka-Volterra data for %d environments",
                len(environments))
    return out


def split_indices(m, train_frac=0.8, seed=0):
    '''Random partition of `m` pair indices.

    Returns:
        tuple: `(train, validation)` sorted index arrays.
    '''
    if not 0 < train_frac < 1:
        raise ValueError("train_frac must be in (0, 1)")
    n_train = int(round(train_frac * m))
    if n_train == 0 or n_train == m:
        raise ValueError("Split of %d pairs with train_frac=%g leaves an "
                         "empty half" % (m, train_frac))
    perm = np.random.RandomState(seed).permutation(m)
    return np.sort(perm[:n_train]), np.sort(perm[n_train:])


def train_validation_split(ds, train_frac=0.8, seed=0):
    '''Random split of the snapshot pairs.

    Args:
        ds (TrajectoryDataset): Dataset to split.
        train_frac (float, optional): Fraction of pairs used for training.
        seed (int, optional): Seed of the permutation.

    Returns:
        tuple: `(train, validation)` datasets.
    '''
    train, val = split_indices(len(ds), train_frac, seed)
    return ds.subset(train), ds.subset(val)


def transition_masks(lengths, indices):
    '''Per-trajectory masks of the pair indices in `indices`.

    Pairs are numbered as :meth:`TrajectoryDataset.from_trajectories`
    numbers them, trajectory by trajectory.

    Args:
        lengths (list): Sample counts of the trajectories.
        indices (numpy.array): Selected pair indices.

    Returns:
        list: One boolean array of length `len - 1` per trajectory.
    '''
    selected = np.zeros(sum(max(n - 1, 0) for n in lengths), dtype=bool)
    selected[np.asarray(indices, dtype=int)] = True
    masks, start = [], 0
    for n in lengths:
        stop = start + max(n - 1, 0)
        masks.append(selected[start:stop])
        start = stop
    return masks


def generate_eval_trajectory(model, nominal_ic, noise_mag, seed, dt, steps,
                             history=0, tol=1e-12, method="RK45"):
    '''A reference trajectory for autoregressive evaluation.

    The initial state is the nominal one perturbed by
    ``U(-noise_mag, noise_mag)``. With `history > 0`, the first `history`
    samples precede the evaluation start, which is then at index
    `history`; delay-embedding models use them as their seed window.

    Returns:
        Trajectory: `history + steps + 1` samples.
    '''
    gen = np.random.RandomState(seed)
    x0 = _perturbed_ic(nominal_ic, noise_mag, gen)
    count = history + steps + 1
    return integrate(model, x0, (0.0, count * dt), dt, tol=tol, method=method)


def pad_states(states, width):
    '''Zero-pad the last axis of `states` to `width` coordinates.'''
    states = np.asarray(states, dtype=np.float64)
    d = states.shape[-1]
    if d > width:
        raise ValueError("Cannot pad %d coordinates to %d" % (d, width))
    pad = [(0, 0)] * (states.ndim - 1) + [(0, width - d)]
    return np.pad(states, pad, mode="constant")


class Standardizer(object):
    '''Per-coordinate affine standardization, fitted on training inputs.

    Coordinates with zero spread keep unit scale, so constant (e.g.
    padding) coordinates pass through shifted by their mean only.

    Args:
        mean (numpy.array, optional): Coordinate means.
        scale (numpy.array, optional): Coordinate scales.
    '''

    def __init__(self, mean=None, scale=None):
        self.mean = None if mean is None else np.asarray(mean, dtype=np.float64)
        self.scale = None if scale is None else np.asarray(scale, dtype=np.float64)

    def fit(self, rows):
        '''Fit on an array with one sample per row.'''
        rows = np.asarray(rows, dtype=np.float64)
        self.mean = rows.mean(axis=0)
        scale = rows.std(axis=0)
        scale[scale == 0] = 1.0
        self.scale = scale
        return self

    def transform(self, rows):
        return (np.asarray(rows, dtype=np.float64) - self.mean) / self.scale

    def inverse_transform(self, rows):
        return np.asarray(rows, dtype=np.float64) * self.scale + self.mean

    def to_dict(self):
        return {"mean": self.mean.tolist(), "scale": self.scale.tolist()}

    @classmethod
    def from_dict(cls, d):
        return cls(d["mean"], d["scale"])

    @classmethod
    def identity(cls, width):
        return cls(np.zeros(width), np.ones(width))
