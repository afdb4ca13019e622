# -*- coding: utf-8 -*-

"""
otlab.harmonic.approximation
############################

From a transport plan to the reflected harmonic gradient approximating ``T - x``, and
the measured quality of that approximation on a ball.
"""

import logging

import numpy as np

from otlab.eulerian.competitor import competitor_main_smooth
from otlab.eulerian.flux import select_good_slice
from otlab.eulerian.trajectory import TrajectorySet, unit_value_reduction
from otlab.harmonic.neumann import flux_neumann_data, solve_neumann, tilde_neumann_data
from otlab.quantities.energy import ball_cell_weights
from otlab.utils import ball_quadrature
from otlab.utils.exceptions import CoverageError

DEFAULT_RADIUS = 0.25


class HarmonicSolution(object):
    r"""Outcome of :func:`harmonic_potential`.

    Attributes:
        potential (PotentialField): ``phi`` in the coordinates of the plan.
        tilde (PotentialField): the reflected solution of the unit-value problem at scale 1.
        R (float): half-side of the chosen slice, at scale 1.
        fslice (FluxSlice): the chosen slice.
        diagnostics (pandas.DataFrame): the good-slice scan.
    """

    def __init__(self, potential, tilde, R, fslice, diagnostics, scale):
        self.potential = potential
        self.tilde = tilde
        self.R = R
        self.fslice = fslice
        self.diagnostics = diagnostics
        self.scale = scale

    def __repr__(self):
        return f'HarmonicSolution(R={self.R:.4g}, scale={self.scale:.4g}, c={self.tilde.constant:.4g})'


def harmonic_potential(plan, tau=0.1, delta=0.0, scale=1.0, h=None, n=64, n_radii=32):
    r"""Harmonic gradient approximating the displacement of ``plan`` on ``B_scale``.

    The trajectories are dilated by ``1 / scale``, replaced by the unit-value map
    ``lam^{1/d} T``, a good slice ``Q_R`` with ``R in (1, 2)`` is selected, and the Neumann
    problem with the removed flux as data is solved on the half-cube and reflected. The result is
    ``phi = lam^{-1/d} phi~ + (lam^{-1/d} - 1) |x|^2 / 2`` dilated back to the plan's scale.

    Args:
        plan (TransportPlan): the coupling.
        tau (float): early/late time window.
        delta (float): boundary layer width in the plan's coordinates.
        scale (float): the radius ``R_0`` of the study ball.
        h (float, optional): spacing of the Poisson grid at scale 1.
        n (int): intervals along ``x_1`` of the half-cube when ``h`` is not given.

    Returns:
        HarmonicSolution: the potential with the intermediate objects.
    """
    logger = logging.getLogger()
    d = plan.dimension
    traj = TrajectorySet.from_plan(plan).scaled(1.0 / scale)
    lam = plan.lam
    unit = unit_value_reduction(traj, lam, d)
    R, fslice, diagnostics = select_good_slice(unit, tau, delta / scale, n_radii=n_radii)
    record = flux_neumann_data(fslice, lam0=plan.lam0)
    tilde = solve_neumann(record, h=h, n=n).reflect()
    factor = lam ** (-1.0 / d)
    potential = tilde.scaled_with_quadratic(factor, factor - 1.0).dilate(scale)
    logger.info(f'harmonic potential at scale {scale:.4g}: slice R = {R:.4f}, c = {tilde.constant:.6g}')
    return HarmonicSolution(potential, tilde, R, fslice, diagnostics, scale)


def harmonic_approximation(field, potential, r=DEFAULT_RADIUS, center=None, supersample=4, n_quad=48):
    r"""``(int_{B_r} |T - x - grad phi|^2 chi_{Omega_0}, int_{B_r} |grad phi|^2)``.

    The first integral runs over the map's cells with the volume of ``cell ∩ B_r`` times the
    share of the cell covered by ``Omega_0`` (its mass over ``lam_0`` times its volume); the
    second is a ball quadrature of the interpolated gradient.

    Raises:
        CoverageError: if ``B_r`` carries no map value.
    """
    d = field.dimension
    center = np.zeros(d) if center is None else np.asarray(center, dtype=float)
    lattice = field.lattice
    ball = ball_cell_weights(lattice, None, r, center, supersample)
    share = np.minimum(field.mass / (field.lam0 * lattice.cell_volume), 1.0)
    weights = np.where(field.mask, ball * share, 0.0)
    if weights.sum() <= 0.0:
        raise CoverageError(f'the ball of radius [{r}] carries no map value.', stage='harmonic')
    nodes = field.nodes()[field.mask]
    grad = potential.gradient_at(nodes)
    error = float(np.sum(weights[field.mask] * np.sum((field.displacement[field.mask] - grad) ** 2, axis=1)))
    points, w = ball_quadrature(r, d, n=n_quad, supersample=supersample, center=center)
    dirichlet = float(np.sum(w * np.sum(potential.gradient_at(points) ** 2, axis=1)))
    return error, dirichlet


def main_competitor(fslice, chart0=None, chart1=None, lam0=1.0, h=None, n=64):
    r"""Smooth main part of the competitor on a slice with a boundary layer.

    Solves the problem of ``phi~`` on ``Q_R ∩ {x_1 > delta}`` built by :func:`tilde_neumann_data`
    and prices it between the densities ``c_0`` and ``c_1`` of the slice.

    Returns:
        MainSmoothCompetitor: with the potential attached.

    Raises:
        MassBalanceError: if ``c~`` and ``c_0 - c_1`` disagree beyond ``1e-8``.
    """
    logger = logging.getLogger()
    record = tilde_neumann_data(fslice, chart0, chart1, lam0)
    potential = solve_neumann(record, h=h, n=n)
    c0, c1 = fslice.main_densities(lam0)
    logger.debug(f'main competitor: c0 = {c0:.6g}, c1 = {c1:.6g}, c~ = {potential.constant:.6g}, '
                 f'kept balance defect = {fslice.kept_balance_defect():.3e}')
    return competitor_main_smooth(potential, c0, c1, fslice.tau)
