from otlab.utils.logger import init_logger, set_color
from otlab.utils.utils import get_local_time, ensure_dir, get_family, init_seed, ball_volume, \
    sub_cell_offsets, ball_quadrature
from otlab.utils.enum_type import *
from otlab.utils.argument_list import *
from otlab.utils.exceptions import *

__all__ = [
    'init_logger', 'get_local_time', 'ensure_dir', 'get_family', 'init_seed', 'set_color',
    'ball_volume', 'sub_cell_offsets', 'ball_quadrature', 'Enum', 'Backend', 'AssignmentBackend', 'PlanMode',
    'ReportStatus', 'LabError', 'ConfigurationError', 'ChartRangeError', 'NormalizationError', 'ResolutionError',
    'NotNearlyTangentError', 'ImbalanceError', 'SizeError', 'ConvergenceError', 'CoverageError', 'MatrixError',
    'PreconditionError', 'FluxSplitError', 'MassBalanceError', 'SymmetryError', 'OutOfRegimeError', 'SolverError',
]
