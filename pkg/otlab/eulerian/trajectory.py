# -*- coding: utf-8 -*-

"""
otlab.eulerian.trajectory
#########################

Straight-line trajectories of a plan and their space-time density and momentum.
"""

import numpy as np

from otlab.transport.sampling import Lattice


class TrajectorySet(object):
    r"""Trajectories ``X(t) = (1 - t) x0 + t x1`` carrying the masses of a plan, sorted by index."""

    def __init__(self, x0, x1, mass):
        self.x0 = np.atleast_2d(np.asarray(x0, dtype=float))
        self.x1 = np.atleast_2d(np.asarray(x1, dtype=float))
        self.mass = np.asarray(mass, dtype=float).reshape(-1)

    @classmethod
    def from_plan(cls, plan):
        return cls(plan.x0, plan.x1, plan.mass)

    def __len__(self):
        return len(self.mass)

    @property
    def dimension(self):
        return self.x0.shape[1]

    @property
    def velocity(self):
        return self.x1 - self.x0

    def position(self, t):
        return (1.0 - t) * self.x0 + t * self.x1

    def cost(self):
        return float(np.sum(self.mass * np.sum(self.velocity ** 2, axis=1)))

    def scaled(self, factor):
        r"""Trajectories of the dilated problem ``x -> s x``, masses times ``s^d``."""
        return TrajectorySet(self.x0 * factor, self.x1 * factor, self.mass * factor ** self.dimension)

    def restrict(self, keep):
        return TrajectorySet(self.x0[keep], self.x1[keep], self.mass[keep])


def unit_value_reduction(traj, lam, dimension=None):
    r"""Replace ``T`` by ``lam^{1/d} T``, the optimal map onto the dilated target of unit value.

    Masses are unchanged, so the target density becomes the source value.
    """
    d = dimension or traj.dimension
    return TrajectorySet(traj.x0, traj.x1 * lam ** (1.0 / d), traj.mass)


class EulerianField(object):
    r"""Cell averages of ``(rho, j)`` on ``(0, 1) x box``.

    Attributes:
        lattice (Lattice): axis-aligned spatial raster.
        times (numpy.ndarray): slice midpoints ``(k + 1/2) dt``.
        rho (numpy.ndarray): shape ``(n_t, *shape)``.
        j (numpy.ndarray): shape ``(n_t, *shape, d)``.
        rho0 (numpy.ndarray), rho1 (numpy.ndarray): slices at ``t = 0`` and ``t = 1``.
    """

    def __init__(self, lattice, times, rho, j, rho0, rho1):
        self.lattice = lattice
        self.times = np.asarray(times, dtype=float)
        self.rho = rho
        self.j = j
        self.rho0 = rho0
        self.rho1 = rho1

    @property
    def dt(self):
        return 1.0 / len(self.times)

    @property
    def h(self):
        return self.lattice.h

    @property
    def lo(self):
        return self.lattice.origin

    def total_momentum(self):
        r"""``int j`` per time slice, shape ``(n_t, d)``."""
        axes = tuple(range(1, self.rho.ndim))
        return self.j.sum(axis=axes) * self.lattice.cell_volume

    def total_mass(self):
        axes = tuple(range(1, self.rho.ndim))
        return self.rho.sum(axis=axes) * self.lattice.cell_volume

    def max_density(self):
        return float(max(self.rho.max(), self.rho0.max(), self.rho1.max()))

    def __repr__(self):
        return f'EulerianField(slices={len(self.times)}, {self.lattice})'


def box_deposit(points, weights, lattice, side):
    r"""Spread each weight uniformly over an axis-aligned box of the given side centered at its point.

    The side must not exceed the raster spacing, so every box meets at most ``2^d`` cells.

    Args:
        points (numpy.ndarray): shape ``(N, d)``.
        weights (numpy.ndarray): shape ``(N,)`` or ``(N, k)``.

    Returns:
        numpy.ndarray: deposited totals per cell, shape ``(*shape)`` or ``(*shape, k)``.
    """
    d = lattice.dimension
    h = lattice.h
    weights = np.asarray(weights, dtype=float)
    out = np.zeros(lattice.shape + weights.shape[1:])
    start = (points - 0.5 * side - lattice.origin) / h
    first = np.floor(start).astype(np.int64)
    # share of each box in its first cell along every axis
    share = np.clip((first + 1 - start) * h / side, 0.0, 1.0)
    for corner in range(2 ** d):
        bits = [(corner >> i) & 1 for i in range(d)]
        idx = first + np.array(bits)
        frac = np.ones(len(points))
        for i, bit in enumerate(bits):
            frac = frac * (1.0 - share[:, i] if bit else share[:, i])
        ok = np.all((idx >= 0) & (idx < np.array(lattice.shape)), axis=1) & (frac > 0)
        if not np.any(ok):
            continue
        w = weights[ok] * (frac[ok] if weights.ndim == 1 else frac[ok][:, None])
        np.add.at(out, tuple(idx[ok].T), w)
    return out


def rasterize_eulerian(traj, lo, hi, h, n_times=32, particle_side=None, lam=1.0):
    r"""Time-sliced binning of the trajectories into cell averages of ``rho`` and ``j``.

    Every particle is a box of side ``particle_side`` (its own volume ``(m / lam)^{1/d}`` for the
    heaviest particle by default, capped at ``h``) evaluated at the slice midpoints.

    Args:
        traj (TrajectorySet): trajectories, sorted deterministically.
        lo (numpy.ndarray): lower corner of the raster box.
        hi (numpy.ndarray): upper corner of the raster box.
        h (float): raster spacing.
        n_times (int): number of time slices.
        lam (float): density value fixing the default particle side.

    Returns:
        EulerianField: the rasterized pair with its ``t = 0`` and ``t = 1`` slices.
    """
    d = traj.dimension
    lattice = Lattice.from_bbox(lo, hi, h)
    if particle_side is None:
        particle_side = (traj.mass.max() / lam) ** (1.0 / d) if len(traj) else h
    particle_side = min(particle_side, h)
    vol = lattice.cell_volume
    times = (np.arange(n_times) + 0.5) / n_times
    rho = np.zeros((n_times,) + lattice.shape)
    j = np.zeros((n_times,) + lattice.shape + (d,))
    momentum = traj.mass[:, None] * traj.velocity
    for k, t in enumerate(times):
        x = traj.position(t)
        rho[k] = box_deposit(x, traj.mass, lattice, particle_side) / vol
        j[k] = box_deposit(x, momentum, lattice, particle_side) / vol
    rho0 = box_deposit(traj.x0, traj.mass, lattice, particle_side) / vol
    rho1 = box_deposit(traj.x1, traj.mass, lattice, particle_side) / vol
    return EulerianField(lattice, times, rho, j, rho0, rho1)


def bump_boxes(lo, hi, dimension):
    r"""Default supports of the test functions: the ``2^d`` half-size sub-boxes and the centered one."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    mid = 0.5 * (lo + hi)
    quarter = 0.25 * (hi - lo)
    boxes = [(mid - quarter, mid + quarter)]
    for corner in range(2 ** dimension):
        bits = np.array([(corner >> i) & 1 for i in range(dimension)])
        a = np.where(bits, mid, lo)
        b = np.where(bits, hi, mid)
        boxes.append((a, b))
    return boxes


def weak_continuity_residual(rho, j, lattice, times, boxes=None, time_window=(0.0, 1.0)):
    r"""Relative weak residual of ``d_t rho + div j = 0`` against ``sin^2`` bumps.

    For each box ``[a, b]`` the test function is
    ``zeta = sin^2(pi (t - t_a) / (t_b - t_a)) prod_i sin^2(pi (x_i - a_i) / (b_i - a_i))``,
    compactly supported in the open space-time box, and the residual is
    ``|sum (rho d_t zeta + j . grad zeta)| / sum (|rho d_t zeta| + |j . grad zeta|)``.

    Returns:
        float: the largest relative residual over the boxes (0 when the field vanishes there).
    """
    d = lattice.dimension
    centers = lattice.centers().reshape(lattice.shape + (d,))
    lo = lattice.origin
    hi = lattice.to_physical(np.array(lattice.shape, dtype=float))
    boxes = boxes if boxes is not None else bump_boxes(lo, hi, d)
    ta, tb = time_window
    worst = 0.0
    for a, b in boxes:
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        phase = np.pi * (centers - a) / (b - a)
        inside = np.all((centers > a) & (centers < b), axis=-1)
        s = np.where(inside[..., None], np.sin(phase) ** 2, 0.0)
        ds = np.where(inside[..., None], np.pi / (b - a) * np.sin(2.0 * phase), 0.0)
        space = np.prod(s, axis=-1)
        grad = np.empty(lattice.shape + (d,))
        for i in range(d):
            grad[..., i] = ds[..., i] * np.prod(np.delete(s, i, axis=-1), axis=-1)
        total = 0.0
        scale = 0.0
        for k, t in enumerate(times):
            if not ta < t < tb:
                continue
            tp = np.pi * (t - ta) / (tb - ta)
            zt = np.pi / (tb - ta) * np.sin(2.0 * tp)
            z = np.sin(tp) ** 2
            term_t = rho[k] * space * zt
            term_x = np.sum(j[k] * grad, axis=-1) * z
            total += float(np.sum(term_t + term_x))
            scale += float(np.sum(np.abs(term_t) + np.abs(term_x)))
        if scale > 0:
            worst = max(worst, abs(total) / scale)
    return worst
