"""
otlab.utils.exceptions
######################

Error taxonomy of the laboratory. Every error carries the pipeline stage that
raised it so that the command line can report ``[stage] message``.
"""


class LabError(Exception):
    r"""Base class of all errors raised by otlab.

    Args:
        message (str): human readable description.
        stage (str, optional): pipeline stage tag. Defaults to the class default.
    """
    stage = 'lab'

    def __init__(self, message, stage=None, **details):
        super().__init__(message)
        if stage is not None:
            self.stage = stage
        self.details = details

    def __str__(self):
        return f'[{self.stage}] {super().__str__()}'


class ConfigurationError(LabError, ValueError):
    stage = 'config'


class ChartRangeError(LabError, ValueError):
    stage = 'geometry'


class NormalizationError(LabError, ValueError):
    stage = 'geometry'


class ResolutionError(LabError, ValueError):
    stage = 'geometry'


class NotNearlyTangentError(LabError, ValueError):
    stage = 'geometry'


class ImbalanceError(LabError, ValueError):
    stage = 'transport'


class SizeError(LabError, ValueError):
    stage = 'transport'


class ConvergenceError(LabError, RuntimeError):
    r"""Raised when an iterative transport solver stops before reaching its tolerance.

    The final marginal residual is kept in ``residual``.
    """
    stage = 'transport'

    def __init__(self, message, residual=None, stage=None, **details):
        super().__init__(message, stage=stage, **details)
        self.residual = residual


class CoverageError(LabError, ValueError):
    stage = 'transport'


class MatrixError(LabError, ValueError):
    stage = 'transport'


class PreconditionError(LabError, ValueError):
    r"""A precondition of a construction does not hold.

    ``reason`` is a short machine readable tag such as ``topological``, ``tangency``,
    ``smallness`` or ``width``.
    """
    stage = 'campanato'

    def __init__(self, message, reason='precondition', stage=None, **details):
        super().__init__(message, stage=stage, **details)
        self.reason = reason


class FluxSplitError(LabError, RuntimeError):
    stage = 'eulerian'


class MassBalanceError(LabError, ValueError):
    stage = 'eulerian'


class SymmetryError(LabError, RuntimeError):
    stage = 'campanato'


class OutOfRegimeError(LabError, RuntimeError):
    stage = 'campanato'


class SolverError(LabError, RuntimeError):
    stage = 'harmonic'

    def __init__(self, message, residual=None, stage=None, **details):
        super().__init__(message, stage=stage, **details)
        self.residual = residual
