# -*- coding: utf-8 -*-

"""
otlab.transport.exact
#####################

Exact discrete transport: linear assignment for equal-mass samples, mass splitting
for unequal sample counts, network simplex otherwise.
"""

import logging
import math

import numpy as np
import ot
from scipy.optimize import linear_sum_assignment

from otlab.transport.plan import TransportPlan
from otlab.utils.enum_type import AssignmentBackend
from otlab.utils.exceptions import ImbalanceError, SizeError

MAX_PAIRS = 4_000_000
MASS_TOL = 1e-9
EMD_MAX_ITER = 10_000_000


def _assign(cost, backend):
    logger = logging.getLogger()
    if AssignmentBackend(backend) == AssignmentBackend.LAPJV:
        try:
            from lapjv import lapjv
        except ImportError:
            logger.warning('lapjv is not installed, falling back to scipy assignment')
        else:
            rows, _, _ = lapjv(cost)
            return np.arange(len(cost)), np.asarray(rows, dtype=np.int64)
    return linear_sum_assignment(cost)


def solve_exact(src, tgt, max_pairs=MAX_PAIRS, assignment_backend='scipy', lam0=1.0, lam1=1.0):
    r"""Optimal plan between two weighted point clouds for the quadratic cost.

    Args:
        src (WeightedPoints): source samples.
        tgt (WeightedPoints): target samples with the same total mass.
        max_pairs (int): cap on ``N_src * N_tgt``.
        assignment_backend (str): ``scipy`` or ``lapjv`` for equal-mass samples.
        lam0 (float): source density value stored on the plan.
        lam1 (float): target density value stored on the plan.

    Returns:
        TransportPlan: plan with its support pairs and sample indices.

    Raises:
        ImbalanceError: if the totals differ by more than ``1e-9`` relative.
        SizeError: if the pair count exceeds ``max_pairs``.
    """
    logger = logging.getLogger()
    n, m = len(src), len(tgt)
    m0, m1 = src.total(), tgt.total()
    if abs(m0 - m1) > MASS_TOL * max(m0, m1):
        raise ImbalanceError(f'total masses differ: source {m0:.12g}, target {m1:.12g}.')
    if n * m > max_pairs:
        raise SizeError(f'{n} x {m} pairs exceed the cap of {int(max_pairs)}.')

    cost = ot.dist(src.points, tgt.points, metric='sqeuclidean')
    if src.is_uniform() and tgt.is_uniform():
        lcm = n * m // math.gcd(n, m)
        if n == m:
            rows, cols = _assign(cost, assignment_backend)
            logger.debug(f'assignment on {n} equal-mass points')
            return TransportPlan(src.points[rows], tgt.points[cols], src.weights[rows], src, tgt, rows, cols,
                                 lam0, lam1)
        if lcm * lcm <= max_pairs:
            return _split_assignment(src, tgt, cost, lcm, assignment_backend, lam0, lam1)

    a = src.weights
    b = tgt.weights * (a.sum() / tgt.weights.sum())
    coupling = ot.emd(a, b, cost, numItermax=EMD_MAX_ITER)
    rows, cols = np.nonzero(coupling > 0)
    logger.debug(f'network simplex on {n} x {m} points, {len(rows)} support pairs')
    return TransportPlan(src.points[rows], tgt.points[cols], coupling[rows, cols], src, tgt, rows, cols, lam0, lam1)


def _split_assignment(src, tgt, cost, lcm, backend, lam0, lam1):
    r"""Split each source point into ``lcm / n`` and each target point into ``lcm / m`` equal atoms."""
    n, m = len(src), len(tgt)
    src_of = np.repeat(np.arange(n), lcm // n)
    tgt_of = np.repeat(np.arange(m), lcm // m)
    rows, cols = _assign(cost[np.ix_(src_of, tgt_of)], backend)
    unit = src.total() / lcm
    pairs = src_of[rows] * m + tgt_of[cols]
    keys, counts = np.unique(pairs, return_counts=True)
    si, ti = keys // m, keys % m
    return TransportPlan(src.points[si], tgt.points[ti], counts * unit, src, tgt, si, ti, lam0, lam1)
