# -*- coding: utf-8 -*-

"""
otlab.campanato.ladder
######################
"""

import logging

import numpy as np
import pandas as pd
from tqdm import tqdm

from otlab.campanato.one_step import one_step, SMALLNESS
from otlab.geometry.graph import deviation_D
from otlab.quantities.energy import energy_E
from otlab.utils import set_color
from otlab.utils.exceptions import PreconditionError, LabError

RESOLUTION_FACTOR = 16


class LadderLevel(object):
    r"""Level ``k`` of the ladder: scale ``theta^k R`` with the accumulated affine frame.

    ``A_bar = A_k^{-1} A_k^{-T}`` and ``a_bar = A_k^{-1} a_k`` describe the affine map
    ``x -> A_bar x + a_bar`` that approximates ``T`` at this scale in the original coordinates.
    """

    def __init__(self, k, radius, E, D, A, a, step=None):
        self.k = k
        self.radius = radius
        self.E = E
        self.D = D
        self.A = A
        self.a = a
        self.step = step
        inv = np.linalg.inv(A)
        self.A_bar = inv @ inv.T
        self.a_bar = inv @ a

    def frame_deviation(self, theta):
        r"""``|A_bar - Id|^2 + theta^{-2k} |a_bar|^2``."""
        d = len(self.a)
        return float(np.linalg.norm(self.A_bar - np.eye(d)) ** 2 + theta ** (-2 * self.k) * np.sum(self.a_bar ** 2))

    def to_row(self, theta):
        row = {'k': self.k, 'radius': self.radius, 'E': self.E, 'D': self.D,
               'frame_deviation': self.frame_deviation(theta)}
        d = len(self.a)
        for i in range(d):
            row[f'a_bar_{i + 1}'] = float(self.a_bar[i])
            for j in range(d):
                row[f'A_bar_{i + 1}{j + 1}'] = float(self.A_bar[i, j])
        return row


class CampanatoLadder(object):
    r"""Sequence of affine approximations over the scales ``theta^k R``.

    Attributes:
        levels (list): :class:`LadderLevel` from ``k = 0``; empty when the preconditions fail at the start.
        alpha (float), beta (float), theta (float): exponents and contraction.
        status (str): ``complete``, ``truncated: <why>`` or ``precondition-failed: <reason>``.
    """

    def __init__(self, levels, alpha, theta, status='complete', diagnostic=None):
        self.levels = levels
        self.alpha = alpha
        self.beta = 0.5 * (alpha + 1.0)
        self.theta = theta
        self.status = status
        self.diagnostic = diagnostic or {}

    def __len__(self):
        return len(self.levels)

    @property
    def depth(self):
        return max(len(self.levels) - 1, 0)

    def decay_constant(self):
        r"""Fitted ``C'`` in ``E_k + D_k <= C' theta^{2 alpha k} (E_0 + D_0)``."""
        if not self.levels:
            return float('nan')
        base = self.levels[0].E + self.levels[0].D
        if base == 0.0:
            return 0.0
        return float(max((lv.E + lv.D) / (self.theta ** (2 * self.alpha * lv.k) * base) for lv in self.levels))

    def contraction_constant(self):
        r"""Fitted ``C_beta`` in ``E_{k+1} <= theta^{2 beta} E_k + C_beta D_k``; ``nan`` without boundary deviation."""
        values = []
        for lo, hi in zip(self.levels[:-1], self.levels[1:]):
            excess = hi.E - self.theta ** (2 * self.beta) * lo.E
            if lo.D > 0:
                values.append(max(excess, 0.0) / lo.D)
            elif excess > 1e-14:
                values.append(float('inf'))
        return float(max(values)) if values else float('nan')

    def frame_bound(self):
        r"""``sup_k |A_bar_k - Id|^2 + theta^{-2k} |a_bar_k|^2``."""
        return float(max((lv.frame_deviation(self.theta) for lv in self.levels), default=0.0))

    def to_dataframe(self):
        return pd.DataFrame([lv.to_row(self.theta) for lv in self.levels])

    def __repr__(self):
        return f'CampanatoLadder(levels={len(self.levels)}, status={self.status}, theta={self.theta}, alpha={self.alpha})'


def iterate(field, plan, dom0, dom1, R=1.0, depth=3, theta=0.5, alpha=0.5, min_cells=RESOLUTION_FACTOR,
            smallness=SMALLNESS, show_progress=False, **step_kwargs):
    r"""Iterate :func:`one_step` down the scales ``theta^k R``.

    ``A_k = B_k A_{k-1}`` and ``a_k = B_k (a_{k-1} + b_k)`` accumulate the affine changes.
    The ladder stops early, without failing, when ``theta^k R`` drops below ``min_cells`` map cells
    or when a later level leaves the well-prepared regime.

    Returns:
        CampanatoLadder: empty with ``precondition-failed: <reason>`` when level 0 is not well prepared.
    """
    logger = logging.getLogger()
    d = field.dimension
    E0 = energy_E(field, dom0, R)
    D0 = deviation_D(dom0.chart, dom1.chart, R) if d > 1 else 0.0
    A = np.eye(d)
    a = np.zeros(d)
    levels = [LadderLevel(0, R, E0, D0, A, a)]
    status = 'complete'
    diagnostic = {}
    h = field.h
    steps = range(1, depth + 1)
    iterator = tqdm(steps, desc=set_color('ladder', 'pink'), total=depth) if show_progress else steps
    for k in iterator:
        radius = theta ** k * R
        if radius < min_cells * h:
            status = f'truncated: resolution at level {k}'
            logger.warning(set_color('ladder truncated', 'yellow') + f' at level {k}: scale {radius:.4g} < '
                                                                      f'{min_cells} cells of size {h:.4g}')
            break
        try:
            result = one_step(field, plan, dom0, dom1, R=theta ** (k - 1) * R, theta=theta, smallness=smallness,
                              **step_kwargs)
        except PreconditionError as e:
            if k == 1:
                logger.warning(f'ladder not started: {e}')
                return CampanatoLadder([], alpha, theta, f'precondition-failed: {e.reason}',
                                       {'message': str(e), **e.details})
            status = f'truncated: {e.reason} at level {k}'
            diagnostic = {'message': str(e)}
            logger.warning(f'ladder truncated at level {k}: {e}')
            break
        except LabError as e:
            if k == 1:
                raise
            status = f'truncated: {e.stage} at level {k}'
            diagnostic = {'message': str(e)}
            logger.warning(f'ladder truncated at level {k}: {e}')
            break
        B, b = result.step.B, result.step.b
        A = B @ A
        a = B @ (a + b)
        levels.append(LadderLevel(k, radius, result.E_hat, result.D_hat, A, a, result.step))
        field, plan, dom0, dom1 = result.field, result.plan, result.dom0, result.dom1
    ladder = CampanatoLadder(levels, alpha, theta, status, diagnostic)
    logger.info(f'{ladder}: C\' = {ladder.decay_constant():.4g}')
    return ladder
