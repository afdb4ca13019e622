# -*- coding: utf-8 -*-

"""
otlab.utils.enum_type
#######################
"""

from enum import Enum


class Backend(Enum):
    """Transport solver used to compute a plan.

    - ``EXACT``: assignment / network simplex, the ground-truth solver.
    - ``ENTROPIC``: log-domain Sinkhorn with regularization annealing.
    - ``LOCAL``: exact linear program on short pairs, certified by its dual potentials.
    """

    EXACT = 'exact'
    ENTROPIC = 'entropic'
    LOCAL = 'local'


class AssignmentBackend(Enum):
    """Linear assignment implementation for equal-mass samples.

    - ``SCIPY``: ``scipy.optimize.linear_sum_assignment``.
    - ``LAPJV``: Jonker-Volgenant solver from the ``lapjv`` package.
    """

    SCIPY = 'scipy'
    LAPJV = 'lapjv'


class PlanMode(Enum):
    """How an instance obtains its transport plan.

    - ``SOLVE``: sample both domains and run the configured backend.
    - ``SYNTHETIC``: push the source samples through the family's explicit optimal map.
    """

    SOLVE = 'solve'
    SYNTHETIC = 'synthetic'


class ReportStatus(Enum):
    """Outcome of a theorem verification run.

    - ``PASS``: every acceptance clause holds.
    - ``FAIL``: a clause is violated although all preconditions hold.
    - ``PRECONDITION_FAILED``: tangency, topological or smallness precondition violated.
    """

    PASS = 'pass'
    FAIL = 'fail'
    PRECONDITION_FAILED = 'precondition-failed'
