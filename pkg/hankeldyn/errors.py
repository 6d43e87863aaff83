"""
Exceptions raised by hankeldyn.

Every error subclasses the built-in exception a caller would naturally
catch (``ValueError`` for bad input, ``ArithmeticError`` for numerical
failure), so code written against the built-ins keeps working.
"""


class HankelDynError(Exception):
    '''Base class mixed into every hankeldyn exception.'''


class NotPowerOfTwoError(HankelDynError, ValueError):
    '''Raised when a transform needs a power-of-two length.

    Args:
        length (int): The offending length.
    '''

    def __init__(self, length):
        self.length = length
        self.required_length = 1 << max(int(length) - 1, 0).bit_length()
        super(NotPowerOfTwoError, self).__init__(
            "Length %d is not a power of two, zero-pad the input to "
            "length %d" % (length, self.required_length))


class ConvergenceError(HankelDynError, ArithmeticError):
    '''Raised when an iterative method hits its iteration cap.'''

    def __init__(self, message, iterations):
        self.iterations = iterations
        super(ConvergenceError, self).__init__(
            "%s (after %d iterations)" % (message, iterations))


class SingularSystemError(HankelDynError, ArithmeticError):
    '''Raised when a damped normal system cannot be factorized.'''

    def __init__(self, damping):
        self.damping = damping
        super(SingularSystemError, self).__init__(
            "Normal system is singular at damping=%g, increase the "
            "damping to regularize it" % damping)


class IntegrationError(HankelDynError, ArithmeticError):
    '''Raised when the ODE integrator fails, e.g. step-size underflow.'''

    def __init__(self, message, time):
        self.time = time
        super(IntegrationError, self).__init__(
            "Integration failed at t=%.10g: %s" % (time, message))


class TrainingError(HankelDynError, ArithmeticError):
    '''Raised when Levenberg-Marquardt training cannot continue.

    Args:
        message (str): What went wrong.
        trace (dict): Loss and damping history recorded so far.
        block (str, optional): Name of the parameter block involved.
    '''

    def __init__(self, message, trace=None, block=None):
        self.trace = trace if trace is not None else {}
        self.block = block
        if block is not None:
            message = "%s (parameter block '%s')" % (message, block)
        super(TrainingError, self).__init__(message)


class SparsityError(HankelDynError, ValueError):
    '''Raised when sparse regression removes every candidate term.'''

    def __init__(self, state_index, threshold):
        self.state_index = state_index
        self.threshold = threshold
        super(SparsityError, self).__init__(
            "No library term survives threshold %g for state %d, "
            "use a smaller threshold" % (threshold, state_index))


class ConfigError(HankelDynError, ValueError):
    '''Raised for an invalid experiment configuration.'''


class StageError(HankelDynError, RuntimeError):
    '''Raised when a stage of an experiment fails.

    Args:
        stage (str): Name of the failed stage.
        config_hash (str): Hash of the experiment configuration.
        cause (Exception): The original error.
    '''

    def __init__(self, stage, config_hash, cause):
        self.stage = stage
        self.config_hash = config_hash
        self.cause = cause
        super(StageError, self).__init__(
            "Stage '%s' failed for config %s: %s" % (stage, config_hash, cause))
