# -*- coding: utf-8 -*-

"""
otlab.quantities.energy
#######################

The localized, nondimensionalized transport energy ``E_R`` and the report
bundling it with the boundary quantities at one scale.
"""

import logging

import numpy as np

from otlab.geometry.graph import deviation_D, width_delta
from otlab.utils import ball_volume, set_color, sub_cell_offsets
from otlab.utils.exceptions import CoverageError

COVERAGE_LIMIT = 0.02
CAUCHY_TOL = 0.05


class EnergyReport(object):
    r"""Scalar diagnostics of one instance at one scale.

    Attributes:
        R (float): radius.
        E (float): ``E_R`` at the run resolution.
        E_coarse (float): ``E_R`` at half resolution, ``nan`` when not computed.
        D (float): boundary deviation ``D_R``.
        lam0 (float), lam1 (float): density values.
        M (float): largest displacement over support pairs anchored in ``B_R``.
        delta (float): boundary layer width ``|g_0| + |g_1|`` over ``|x'| <= R``.
        flags (list): anomalies recorded along the way.
    """

    def __init__(self, R, E, D, lam0=1.0, lam1=1.0, M=0.0, delta=0.0, E_coarse=float('nan'), center=None):
        self.R = float(R)
        self.E = float(E)
        self.D = float(D)
        self.lam0 = float(lam0)
        self.lam1 = float(lam1)
        self.M = float(M)
        self.delta = float(delta)
        self.E_coarse = float(E_coarse)
        self.center = center
        self.flags = []

    @property
    def lam(self):
        return self.lam1 / self.lam0

    @property
    def width_constant(self):
        r"""Fitted ``C`` in ``delta^2 <= C D``."""
        if self.delta == 0.0:
            return 0.0
        return self.delta ** 2 / self.D if self.D > 0 else float('inf')

    @property
    def resolution_change(self):
        if not np.isfinite(self.E_coarse):
            return float('nan')
        scale = max(self.E, self.E_coarse)
        return abs(self.E - self.E_coarse) / scale if scale > 0 else 0.0

    def to_row(self):
        return {
            'R': self.R, 'E': self.E, 'E_coarse': self.E_coarse, 'D': self.D, 'lam0': self.lam0, 'lam1': self.lam1,
            'M': self.M, 'delta': self.delta, 'width_constant': self.width_constant,
            'resolution_change': self.resolution_change, 'flags': ';'.join(self.flags),
        }

    def __repr__(self):
        return f'EnergyReport(R={self.R:.4g}, E={self.E:.4e}, D={self.D:.4e}, delta={self.delta:.3e})'


def ball_cell_weights(lattice, region, R, center=None, supersample=4):
    r"""Volume of ``cell ∩ B_R(center) ∩ region`` for each lattice cell, by supersampling.

    A missing region stands for the whole space.

    Returns:
        numpy.ndarray: weights of shape ``lattice.shape``.
    """
    d = lattice.dimension
    center = np.zeros(d) if center is None else np.asarray(center, dtype=float)
    idx = lattice.index_grid()
    centers = lattice.to_physical(idx + 0.5)
    near = np.linalg.norm(centers - center, axis=1) <= R + lattice.spacing * np.sqrt(d)
    fractions = np.zeros(len(idx))
    offsets = sub_cell_offsets(d, supersample)
    sub = idx[near] + 0.5
    hits = np.zeros(len(sub))
    for off in offsets:
        points = lattice.to_physical(sub + off)
        inside = np.linalg.norm(points - center, axis=1) < R
        hits += inside & region.contains(points) if region is not None else inside
    fractions[near] = hits / len(offsets)
    return (fractions * lattice.cell_volume).reshape(lattice.shape)


def energy_E(field, dom0, R, center=None, supersample=4, coverage_limit=COVERAGE_LIMIT):
    r"""``E_R = R^{-2} |B_R|^{-1} int_{B_R ∩ Omega_0} |T - x|^2``.

    Args:
        field (MapField): the forward map.
        dom0 (Domain): source domain.
        R (float): radius.
        center (numpy.ndarray, optional): ball center, the origin by default.

    Raises:
        CoverageError: if more than ``coverage_limit`` of the required weight sits on invalid cells.
    """
    d = field.dimension
    weights = ball_cell_weights(field.lattice, dom0.region, R, center, supersample)
    total = weights.sum()
    if total == 0.0:
        raise CoverageError(f'the ball of radius [{R}] does not meet {dom0.name} on the map lattice.',
                            stage='quantities')
    invalid = weights[~field.mask].sum() / total
    if invalid > coverage_limit:
        raise CoverageError(f'{invalid:.2%} of B_R ∩ {dom0.name} lies on cells without map values.',
                            stage='quantities')
    sq = np.sum(field.displacement ** 2, axis=-1)
    integral = float(np.sum(weights[field.mask] * sq[field.mask]))
    return integral / (ball_volume(R, d) * R ** 2)


def energy_two_resolutions(field, dom0, R, center=None, tol=CAUCHY_TOL, coverage_limit=COVERAGE_LIMIT):
    r"""``E_R`` at the run resolution and on the twice coarser map; warns on non-Cauchy behaviour.

    Returns:
        tuple: ``(E, E_coarse, relative_change)``.
    """
    logger = logging.getLogger()
    fine = energy_E(field, dom0, R, center, coverage_limit=coverage_limit)
    coarse = energy_E(field.coarsen(2), dom0, R, center, coverage_limit=coverage_limit)
    scale = max(fine, coarse)
    change = abs(fine - coarse) / scale if scale > 0 else 0.0
    if change > tol:
        logger.warning(set_color('E_R', 'yellow') + f' changes by {change:.2%} under refinement at R = {R:.4g}')
    return fine, coarse, change


def sup_displacement(plan, R, center=None):
    r"""Largest ``|x1 - x0|`` over support pairs with ``x0`` or ``x1`` in ``B_R(center)``."""
    center = np.zeros(plan.dimension) if center is None else np.asarray(center, dtype=float)
    anchored = (np.linalg.norm(plan.x0 - center, axis=1) < R) | (np.linalg.norm(plan.x1 - center, axis=1) < R)
    if not np.any(anchored):
        return 0.0
    return float(np.linalg.norm(plan.displacement[anchored], axis=1).max())


def energy_report(field, plan, dom0, dom1, R, center=None, two_resolutions=True, tol=CAUCHY_TOL,
                  coverage_limit=COVERAGE_LIMIT):
    r"""Build the :class:`EnergyReport` of an instance at scale ``R``.

    The charts of both domains are taken as normalized at ``center`` (the origin).
    """
    if two_resolutions:
        E, E_coarse, change = energy_two_resolutions(field, dom0, R, center, tol, coverage_limit)
    else:
        E, E_coarse, change = energy_E(field, dom0, R, center, coverage_limit=coverage_limit), float('nan'), 0.0
    D = deviation_D(dom0.chart, dom1.chart, R) if dom0.dimension > 1 else 0.0
    delta = width_delta(dom0.chart, dom1.chart, R)
    report = EnergyReport(R, E, D, plan.lam0, plan.lam1, sup_displacement(plan, R, center), delta, E_coarse, center)
    if change > tol:
        report.flags.append('non-cauchy-E')
    return report


def control_lambda(plan, report):
    r"""``|lam - 1|^2 / E_R`` with ``lam = lam_1 / lam_0``.

    ``0/0`` counts as 0. ``E = 0`` with ``lam != 1`` is contradictory: it is logged, flagged on
    the report and returned as ``inf``.
    """
    logger = logging.getLogger()
    numerator = (plan.lam - 1.0) ** 2
    if numerator == 0.0:
        return 0.0
    if report.E == 0.0:
        logger.warning(f'E_R vanishes while lam = {plan.lam:.6g}: transport plan is inconsistent')
        report.flags.append('lambda-contradiction')
        return float('inf')
    return numerator / report.E
