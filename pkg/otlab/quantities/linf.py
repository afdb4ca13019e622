# -*- coding: utf-8 -*-

"""
otlab.quantities.linf
#####################
"""

import logging

import numpy as np

from otlab.quantities.checks import check_topological
from otlab.utils.exceptions import CoverageError, PreconditionError


class LinfStatistics(object):
    r"""Sup statistics of the support pairs anchored in ``B_{R/2}``.

    Attributes:
        sup (float): ``max |x1 - x0|``.
        p95 (float): 95th percentile of ``|x1 - x0|``.
        directional (dict): ``max (x1 - x0) . e`` for ``e = +-e_i``, keyed ``'+1'``, ``'-1'``, ...
        ratio (float): ``sup / (E^{1/(d+2)} + D^{1/2})``, ``nan`` when the topological condition fails.
        pairs (int): number of anchored pairs.
        topological (bool): whether the plan satisfies the topological condition in ``B_R``.
    """

    def __init__(self, sup, p95, directional, ratio, pairs, topological=True):
        self.sup = sup
        self.p95 = p95
        self.directional = directional
        self.ratio = ratio
        self.pairs = pairs
        self.topological = topological

    def to_row(self):
        row = {'sup': self.sup, 'p95': self.p95, 'ratio': self.ratio, 'pairs': self.pairs,
               'topological': self.topological}
        row.update({f'dir{k}': v for k, v in self.directional.items()})
        return row

    def __repr__(self):
        return f'LinfStatistics(sup={self.sup:.4e}, ratio={self.ratio:.4g}, pairs={self.pairs})'


def linf_ratio(sup, E, D, d):
    r"""``sup / (E^{1/(d+2)} + D^{1/2})``; ``0`` for a resting map, ``inf`` for motion without energy."""
    scale = E ** (1.0 / (d + 2)) + np.sqrt(D)
    if scale == 0.0:
        return 0.0 if sup == 0.0 else float('inf')
    return sup / scale


def linf_statistics(plan, report, center=None, require_topological=True):
    r"""Displacement statistics over support pairs with ``x0`` or ``x1`` in ``B_{R/2}(center)``.

    The sup bound only holds under the topological condition, which is checked first.

    Args:
        plan (TransportPlan): the coupling.
        report (EnergyReport): supplies ``R``, ``E`` and ``D``.
        require_topological (bool): raise when the condition fails; otherwise the statistics are
            returned with ``topological=False`` and a ``nan`` ratio.

    Raises:
        PreconditionError: with reason ``topological`` if the condition fails and is required.
        CoverageError: if no support pair is anchored in the ball.
    """
    d = plan.dimension
    center = np.zeros(d) if center is None else np.asarray(center, dtype=float)
    topological = check_topological(plan, p=center, R=report.R)
    if not topological and require_topological:
        raise PreconditionError(f'topological condition fails in the ball of radius [{report.R}]: '
                                f'{topological.forward_violations} forward, '
                                f'{topological.backward_violations} backward violations.',
                                reason='topological', stage='quantities')
    half = 0.5 * report.R
    anchored = (np.linalg.norm(plan.x0 - center, axis=1) < half) | (np.linalg.norm(plan.x1 - center, axis=1) < half)
    if not np.any(anchored):
        raise CoverageError(f'no support pair anchored in the ball of radius [{half}].', stage='quantities')
    disp = plan.displacement[anchored]
    lengths = np.linalg.norm(disp, axis=1)
    directional = {}
    for i in range(d):
        directional[f'+{i + 1}'] = float(disp[:, i].max())
        directional[f'-{i + 1}'] = float((-disp[:, i]).max())
    sup = float(lengths.max())
    if topological:
        ratio = linf_ratio(sup, report.E, report.D, d)
    else:
        logging.getLogger().info('L-infinity ratio left undefined: the topological condition fails')
        ratio = float('nan')
    return LinfStatistics(sup, float(np.percentile(lengths, 95)), directional, ratio, int(anchored.sum()),
                          bool(topological))
