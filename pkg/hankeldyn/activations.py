"""
Element-wise activation functions and their derivatives, shared by the
structured and the dense networks.

Activations are named by strings so that configurations and model
checkpoints stay plain JSON: `tanh`, `sigmoid`, `relu`, `identity` and
`leaky_relu(slope)` (`leaky_relu` alone uses slope 0.01).
"""
import re

import numpy as np

_leaky_pattern = re.compile(r"^leaky_relu(?:\(\s*([-+0-9.eE]+)\s*\))?$")


class Activation(object):
    '''An activation function with its derivative.

    Args:
        name (str): Canonical name, as accepted by :func:`get_activation`.
        fn (callable): The function, applied element-wise.
        grad (callable): Its derivative, as a function of the
            pre-activation.
        zero_preserving (bool): Whether `fn(0) == 0`.
    '''

    __slots__ = ('name', 'fn', 'grad', 'zero_preserving')

    def __init__(self, name, fn, grad, zero_preserving):
        self.name = name
        self.fn = fn
        self.grad = grad
        self.zero_preserving = zero_preserving

    def __call__(self, z):
        return self.fn(z)

    def __repr__(self):
        return "Activation(%s)" % self.name

    def __eq__(self, other):
        return isinstance(other, Activation) and self.name == other.name

    def __hash__(self):
        return hash(self.name)


def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def _sigmoid_grad(z):
    s = _sigmoid(z)
    return s * (1.0 - s)


def _leaky(slope):
    return Activation(
        "leaky_relu(%r)" % slope,
        lambda z: np.where(z > 0, z, slope * z),
        lambda z: np.where(z > 0, 1.0, slope),
        True)


_registry = {
    "tanh": Activation("tanh", np.tanh, lambda z: 1.0 - np.tanh(z) ** 2, True),
    "sigmoid": Activation("sigmoid", _sigmoid, _sigmoid_grad, False),
    "relu": Activation("relu", lambda z: np.maximum(z, 0.0),
                       lambda z: (z > 0).astype(np.float64), True),
    "identity": Activation("identity", lambda z: np.asarray(z, dtype=np.float64),
                           lambda z: np.ones_like(z, dtype=np.float64), True),
}


def get_activation(spec):
    '''Look up an activation by name.

    Args:
        spec (str or Activation): Name such as `tanh` or
            `leaky_relu(0.01)`, or an :class:`Activation`, returned as is.

    Returns:
        Activation: The activation.
    '''
    if isinstance(spec, Activation):
        return spec
    if not isinstance(spec, str):
        raise TypeError("Activation must be given by name, got %r" % (spec,))
    name = spec.strip()
    if name in _registry:
        return _registry[name]
    match = _leaky_pattern.match(name)
    if match is None:
        raise ValueError("Unknown activation '%s'" % spec)
    slope = float(match.group(1)) if match.group(1) else 0.01
    return _leaky(slope)
