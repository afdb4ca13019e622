# -*- coding: utf-8 -*-

"""
otlab.eulerian.competitor
#########################

Implementable pieces of the competitor for the Benamou-Brenier problem on the cube:
the boundary shear layer, the singular density parked on the faces and the smooth
main part driven by a harmonic potential.
"""

import logging

import numpy as np
from scipy import integrate

from otlab.eulerian.trajectory import EulerianField, weak_continuity_residual
from otlab.transport.sampling import Lattice
from otlab.utils.exceptions import FluxSplitError, MassBalanceError, PreconditionError, ConfigurationError

SIGN_TOL = 1e-9


def _check_tau(tau):
    if not 0.0 < tau < 0.25:
        raise ConfigurationError(f'tau [{tau}] must lie in (0, 1/4).', stage='eulerian')


def _middle_parameter(t, tau):
    return np.clip((np.asarray(t, dtype=float) - tau) / (1.0 - 2.0 * tau), 0.0, 1.0)


class BoundaryCompetitor(object):
    r"""Shear layer between the two boundary graphs.

    The density is ``1`` on ``{G(t, x') < x_1 < delta}`` with
    ``G = (1 - s) g_0 + s g_1``, ``s = (t - tau) / (1 - 2 tau)`` clipped to ``[0, 1]``, and the
    momentum is ``-gbar / (1 - 2 tau) rho e_1`` on ``(tau, 1 - tau)``.

    Attributes:
        field (EulerianField): cell averages on the strip.
        cost (float): ``int int |j|^2 / rho`` by quadrature.
        closed_form (float): ``(1 / (1 - 2 tau)) int_{Q'} (delta - (g_0 + g_1) / 2) gbar^2``.
    """

    def __init__(self, field, cost, closed_form, delta, tau):
        self.field = field
        self.cost = float(cost)
        self.closed_form = float(closed_form)
        self.delta = float(delta)
        self.tau = float(tau)

    @property
    def relative_gap(self):
        scale = max(abs(self.cost), abs(self.closed_form))
        return abs(self.cost - self.closed_form) / scale if scale > 0 else 0.0

    def continuity_residual(self):
        f = self.field
        return weak_continuity_residual(f.rho, f.j, f.lattice, f.times)

    def __repr__(self):
        return f'BoundaryCompetitor(delta={self.delta:.3g}, cost={self.cost:.4e}, closed_form={self.closed_form:.4e})'


def _tangential_cells(dimension, R, n_x):
    k = dimension - 1
    if k == 0:
        return np.zeros((1, 0)), 1.0
    h = 2.0 * R / n_x
    ticks = -R + (np.arange(n_x) + 0.5) * h
    grids = np.meshgrid(*([ticks] * k), indexing='ij')
    return np.stack([g.ravel() for g in grids], axis=-1), h ** k


def _closed_form_integral(g0, g1, delta, R):
    r"""``int_{Q'} (delta - (g_0 + g_1) / 2) (g_0 - g_1)^2`` by adaptive quadrature."""
    k = g0.dimension - 1

    def integrand(*xp):
        point = np.array(xp, dtype=float).reshape(1, -1)
        a = float(g0.value(point)[0])
        b = float(g1.value(point)[0])
        return (delta - 0.5 * (a + b)) * (a - b) ** 2

    if k == 0:
        return integrand()
    if k == 1:
        return integrate.quad(integrand, -R, R, limit=200)[0]
    return integrate.nquad(integrand, [(-R, R)] * k, opts={'limit': 100})[0]


def competitor_boundary(g0, g1, delta, tau, n_x=64, n_t=32, R=1.0):
    r"""Boundary competitor on ``(0, 1) x (Q' x (lo, delta))``.

    Args:
        g0 (BoundaryGraph): source chart.
        g1 (BoundaryGraph): target chart.
        delta (float): layer width, at least ``||g_0|| + ||g_1||`` on ``Q'``.
        tau (float): in ``(0, 1/4)``.
        n_x (int): cells per tangential axis of ``Q' = (-R, R)^{d-1}``.
        n_t (int): time slices.

    Returns:
        BoundaryCompetitor: the construction with its quadrature and closed-form costs.

    Raises:
        PreconditionError: if ``delta`` is smaller than the sup norms of the charts.
    """
    _check_tau(tau)
    logger = logging.getLogger()
    d = g0.dimension
    xp, area = _tangential_cells(d, R, n_x)
    a = np.asarray(g0.value(xp), dtype=float).reshape(-1)
    b = np.asarray(g1.value(xp), dtype=float).reshape(-1)
    width = float(np.abs(a).max() + np.abs(b).max())
    if delta < width - 1e-12:
        raise PreconditionError(f'layer width [{delta:.4g}] is below ||g_0|| + ||g_1|| = [{width:.4g}].',
                                reason='width', stage='eulerian')
    gbar = a - b
    speed = 1.0 / (1.0 - 2.0 * tau)

    h = 2.0 * R / n_x
    bottom = min(a.min(), b.min())
    layers = int(np.ceil((delta - bottom) / h - 1e-12)) + 1
    origin = np.concatenate([[delta - layers * h], np.full(d - 1, -R)])
    lattice = Lattice(origin, h, (layers,) + (n_x,) * (d - 1))
    upper = origin[0] + (np.arange(layers) + 1.0) * h

    times = (np.arange(n_t) + 0.5) / n_t
    rho = np.zeros((n_t,) + lattice.shape)
    j = np.zeros((n_t,) + lattice.shape + (d,))
    shape_x = (n_x,) * (d - 1)

    def layer_density(s):
        G = (1.0 - s) * a + s * b
        frac = np.clip((upper[:, None] - G[None, :]) / h, 0.0, 1.0)
        return frac.reshape((layers,) + shape_x)

    for k, t in enumerate(times):
        rho[k] = layer_density(_middle_parameter(t, tau))
        if tau < t < 1.0 - tau:
            j[k, ..., 0] = -speed * gbar.reshape(shape_x)[None, ...] * rho[k]

    # cost on the exact middle interval: the integrand is linear in G, so the bin midpoints are exact
    edges = np.linspace(0.0, 1.0, n_t + 1)
    cost = 0.0
    for lo_t, hi_t in zip(edges[:-1], edges[1:]):
        lo_c, hi_c = max(lo_t, tau), min(hi_t, 1.0 - tau)
        if hi_c <= lo_c:
            continue
        column = layer_density(_middle_parameter(0.5 * (lo_c + hi_c), tau)).reshape(layers, -1).sum(axis=0) * h
        cost += (hi_c - lo_c) * speed ** 2 * float(np.sum(column * gbar ** 2)) * area
    closed_form = speed * _closed_form_integral(g0, g1, delta, R)

    field = EulerianField(lattice, times, rho, j, layer_density(0.0), layer_density(1.0))
    result = BoundaryCompetitor(field, cost, closed_form, delta, tau)
    logger.debug(f'boundary competitor: {result}')
    return result


class SingularDensity(object):
    r"""Density ``rho^sing`` on ``(0, 1) x dQ_R`` at the time nodes ``k / n_t``.

    Attributes:
        nodes (numpy.ndarray): time nodes, shape ``(n_t + 1,)``.
        density (numpy.ndarray): shape ``(faces, n_t + 1, face bins)``, mass per face area.
        early (numpy.ndarray): ``A = int_0^tau (f - f')`` per face bin.
        late (numpy.ndarray): ``B = int_{1-tau}^1 (f - f')`` per face bin.
    """

    def __init__(self, fslice, nodes, density, early, late):
        self.fslice = fslice
        self.nodes = nodes
        self.density = density
        self.early = early
        self.late = late

    @property
    def cost(self):
        return 0.0

    def main_flux(self):
        r"""``f^main`` per time bin: ``f - f' + (A + B) / (1 - 2 tau)`` on the middle interval, 0 outside."""
        fs = self.fslice
        removed, _ = fs.binned('removed')
        out = np.zeros_like(removed)
        edges = self.nodes
        middle = (edges[:-1] >= fs.tau) & (edges[1:] <= 1.0 - fs.tau)
        boost = (self.early + self.late) / (1.0 - 2.0 * fs.tau)
        out[:, middle, :] = removed[:, middle, :] + boost[:, None, :]
        return out

    def derivative_defect(self):
        r"""``max |d_t rho^sing - (f^main - (f - f'))|`` over bins not straddling ``tau`` or ``1 - tau``."""
        fs = self.fslice
        edges = self.nodes
        removed, _ = fs.binned('removed')
        dt = edges[1] - edges[0]
        rate = np.diff(self.density, axis=1) / dt
        straddles = ((edges[:-1] < fs.tau) & (edges[1:] > fs.tau)) | \
                    ((edges[:-1] < 1.0 - fs.tau) & (edges[1:] > 1.0 - fs.tau))
        defect = rate - (self.main_flux() - removed)
        return float(np.abs(defect[:, ~straddles, :]).max()) if np.any(~straddles) else 0.0

    def __repr__(self):
        return f'SingularDensity(R={self.fslice.R:.4g}, max={float(self.density.max()):.4e})'


def competitor_singular(fslice):
    r"""``rho^sing`` from the removed flux ``f - f'`` of a slice, evaluated exactly from its atoms.

    ``rho^sing = -int_0^t (f - f')`` on ``(0, tau)``, ``int_t^1 (f - f')`` on ``(1 - tau, 1)`` and
    the linear interpolation ``((t + tau - 1) A + (t - tau) B) / (1 - 2 tau)`` in between; it
    vanishes at ``t = 0`` and ``t = 1`` and carries no momentum.

    Raises:
        FluxSplitError: if the density is negative beyond round-off, which means the kept/removed
            split of the slice is inconsistent.
    """
    _check_tau(fslice.tau)
    tau = fslice.tau
    faces = 2 * fslice.dimension
    nodes = np.linspace(0.0, 1.0, fslice.n_t + 1)
    area = fslice.face_bin_area()

    def cumulative_at(t):
        # F(t) = int_0^t (f - f') per face bin, atoms counted for t_a < t
        out = np.zeros((faces, fslice.face_bins))
        for atoms, sign in ((fslice.exits, 1.0), (fslice.entries, -1.0)):
            removed = atoms.select(~atoms.kept)
            before = removed.time < t
            if np.any(before):
                bins = fslice.face_bin_index(removed.point[before], removed.face[before])
                np.add.at(out, (removed.face[before], bins), sign * removed.mass[before])
        return out / area

    cumulative = np.stack([cumulative_at(t) for t in nodes], axis=1)
    F_end = cumulative_at(1.0 + 1e-12)
    A = cumulative_at(tau)
    B = F_end - cumulative_at(1.0 - tau)

    density = np.empty_like(cumulative)
    for k, t in enumerate(nodes):
        if t < tau:
            density[:, k, :] = -cumulative[:, k, :]
        elif t > 1.0 - tau:
            density[:, k, :] = F_end - cumulative[:, k, :]
        else:
            density[:, k, :] = ((t + tau - 1.0) * A + (t - tau) * B) / (1.0 - 2.0 * tau)
    density[:, 0, :] = 0.0
    density[:, -1, :] = 0.0

    worst = float(density.min())
    if worst < -SIGN_TOL:
        raise FluxSplitError(f'singular density reaches [{worst:.3e}] < 0: the removed flux has the wrong sign.')
    return SingularDensity(fslice, nodes, density, A, B)


def time_factor(c0, c1):
    r"""``int_0^1 dt / (t c_1 + (1 - t) c_0) = log(c_0 / c_1) / (c_0 - c_1)``, and ``1 / c_0`` when equal."""
    if abs(c0 - c1) < 1e-14:
        return 1.0 / c0
    return float(np.log(c0 / c1) / (c0 - c1))


class MainSmoothCompetitor(object):
    r"""Smooth main part ``(s~, q~)`` of the competitor.

    ``s~`` interpolates linearly from ``c_0`` at ``t = tau`` to ``c_1`` at ``t = 1 - tau`` and
    ``q~ = grad phi~ / (1 - 2 tau)``.
    """

    def __init__(self, c0, c1, tau, dirichlet, cost, quadrature_cost, potential=None):
        self.c0 = float(c0)
        self.c1 = float(c1)
        self.tau = float(tau)
        self.dirichlet = float(dirichlet)
        self.cost = float(cost)
        self.quadrature_cost = float(quadrature_cost)
        self.potential = potential

    def density(self, t):
        s = (np.asarray(t, dtype=float) - self.tau) / (1.0 - 2.0 * self.tau)
        return s * self.c1 + (1.0 - s) * self.c0

    def momentum(self):
        r"""``q~`` on the potential's nodes, shape ``(*shape, d)``."""
        if self.potential is None:
            raise ConfigurationError('the main competitor was built from a Dirichlet energy only.', stage='eulerian')
        return self.potential.gradient() / (1.0 - 2.0 * self.tau)

    @property
    def relative_gap(self):
        scale = max(abs(self.cost), abs(self.quadrature_cost))
        return abs(self.cost - self.quadrature_cost) / scale if scale > 0 else 0.0

    def __repr__(self):
        return f'MainSmoothCompetitor(c0={self.c0}, c1={self.c1}, tau={self.tau}, cost={self.cost:.4e})'


def competitor_main_smooth(potential, c0, c1, tau, c_tilde=None, tol=1e-8, n_quad=2048):
    r"""Cost of the smooth main part driven by ``phi~``.

    Args:
        potential (PotentialField or float): the tilde potential, or directly ``int |grad phi~|^2``.
        c0 (float): density at ``t = tau``, in ``[1/2, 2]``.
        c1 (float): density at ``t = 1 - tau``, in ``[1/2, 2]``.
        tau (float): in ``(0, 1/4)``.
        c_tilde (float, optional): solvability constant of ``phi~``; read from the potential when omitted.
        tol (float): tolerance of ``c~ = c_0 - c_1``.
        n_quad (int): midpoint nodes of the time quadrature.

    Returns:
        MainSmoothCompetitor: with the closed-form cost
        ``log(c_0 / c_1) / (c_0 - c_1) * int |grad phi~|^2 / (1 - 2 tau)`` and its quadrature.

    Raises:
        MassBalanceError: if ``c~`` differs from ``c_0 - c_1``.
    """
    _check_tau(tau)
    for name, c in (('c0', c0), ('c1', c1)):
        if not 0.5 <= c <= 2.0:
            raise ConfigurationError(f'{name} [{c}] must lie in [1/2, 2].', stage='eulerian')
    field = None
    if np.isscalar(potential):
        dirichlet = float(potential)
    else:
        field = potential
        dirichlet = potential.dirichlet_energy()
        if c_tilde is None:
            c_tilde = potential.constant
    if c_tilde is not None and abs(c_tilde - (c0 - c1)) > tol:
        raise MassBalanceError(f'solvability constant [{c_tilde:.6g}] differs from c0 - c1 = [{c0 - c1:.6g}]: '
                               f'the mass balance of the full and of the kept flux is violated.')
    scale = 1.0 - 2.0 * tau
    cost = time_factor(c0, c1) * dirichlet / scale
    t = tau + (np.arange(n_quad) + 0.5) / n_quad * scale
    s = ((t - tau) * c1 + (1.0 - tau - t) * c0) / scale
    quadrature = dirichlet / scale ** 2 * float(np.sum(1.0 / s)) * scale / n_quad
    return MainSmoothCompetitor(c0, c1, tau, dirichlet, cost, quadrature, field)
