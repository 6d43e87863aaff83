"""
Autoregressive forecasting shared by every model: each prediction is fed
back as the next input.

Adapters fix up the coordinates a model is not meant to predict; they are
called as ``adapter(previous_state, predicted_state)`` and return the
state that is recorded and fed back.
"""
import logging

import numpy as np

from hankeldyn.dynsys import Trajectory

logger = logging.getLogger(__name__)

DIVERGENCE_LIMIT = 1e6


class PaddingReset(object):
    '''Reset the padding coordinates of a zero-padded state to zero.

    Args:
        dimension (int): Number of physical coordinates; the rest are
            padding.
    '''

    def __init__(self, dimension=3):
        self.dimension = dimension

    def __call__(self, previous, state):
        state = np.array(state, dtype=np.float64)
        state[self.dimension:] = 0.0
        return state


class ClockAndEnvironment(object):
    '''Advance a time coordinate by `dt` and hold an environment
    coordinate fixed, as in rows `(x, y, t, env)`.

    Args:
        dt (float): Sampling interval.
        time_index (int, optional): Index of the time coordinate.
        env_index (int, optional): Index of the environment coordinate.
    '''

    def __init__(self, dt, time_index=2, env_index=3):
        self.dt = dt
        self.time_index = time_index
        self.env_index = env_index

    def __call__(self, previous, state):
        state = np.array(state, dtype=np.float64)
        state[self.time_index] = previous[self.time_index] + self.dt
        state[self.env_index] = previous[self.env_index]
        return state


def autoregressive(step, x0, steps, dt=1.0, t0=0.0, adapter=None,
                   limit=DIVERGENCE_LIMIT):
    '''Iterate :math:`x_{k+1} = f(x_k)`.

    Args:
        step (callable): One-step model `f`.
        x0 (numpy.array): Initial state.
        steps (int): Number of steps, at least 1.
        dt (float, optional): Time between states.
        t0 (float, optional): Time of `x0`.
        adapter (callable, optional): Applied to every predicted state.
        limit (float, optional): A state with a larger norm, or a
            non-finite one, ends the rollout.

    Returns:
        hankeldyn.dynsys.Trajectory: The states from `x0` on. A diverged
        rollout is truncated before the offending state and flagged with
        the step at which it diverged.
    '''
    if steps < 1:
        raise ValueError("steps must be at least 1")
    x = np.array(x0, dtype=np.float64)
    states = [x]
    diverged_at = None
    for k in range(1, steps + 1):
        nxt = np.asarray(step(x), dtype=np.float64)
        if adapter is not None:
            nxt = adapter(x, nxt)
        if not np.all(np.isfinite(nxt)) or np.linalg.norm(nxt) > limit:
            diverged_at = k
            logger.warning("Rollout diverged at step %d", k)
            break
        states.append(nxt)
        x = nxt
    times = t0 + dt * np.arange(len(states))
    return Trajectory(times, np.vstack(states), diverged_at=diverged_at)


def rollout_mse(predicted, reference, coords=None):
    '''Mean squared error over all common steps and the selected
    coordinates.

    Args:
        predicted (numpy.array): Predicted states, one per row.
        reference (numpy.array): Reference states, one per row.
        coords (list, optional): Coordinates to compare, all by default.

    Returns:
        float: The error, infinite when the prediction is shorter than the
        reference (a diverged rollout).
    '''
    predicted = np.atleast_2d(predicted)
    reference = np.atleast_2d(reference)
    if len(predicted) < len(reference):
        return float("inf")
    if coords is not None:
        predicted = predicted[:, coords]
        reference = reference[:, coords]
    diff = predicted[:len(reference)] - reference
    return float(np.mean(diff * diff))
