# -*- coding: utf-8 -*-

"""
otlab.eulerian.flux
###################

Boundary fluxes of the trajectories across the open cube ``Q_R = (-R, R)^d``: exit and
entry atoms, the kept flux, the kept densities and the good-slice scan over ``R``.
"""

import logging

import numpy as np
import pandas as pd

from otlab.utils.exceptions import ConfigurationError

N_RADII = 32


def face_id(axis, positive):
    r"""Faces are numbered ``2 * axis`` (at ``x_axis = -R``) and ``2 * axis + 1`` (at ``+R``)."""
    return 2 * axis + (1 if positive else 0)


def cube_crossings(x0, x1, R):
    r"""Exit and entry times of the segments ``[x0, x1]`` through the open cube ``(-R, R)^d``.

    Slab method: along each axis the segment lies strictly inside for ``t`` in ``(lo_i, hi_i)``;
    the segment meets the cube iff ``max(t_a, 0) < min(t_b, 1)`` with ``t_a = max lo_i``,
    ``t_b = min hi_i``. It exits at ``t_b`` when ``t_b <= 1`` and enters at ``t_a`` when ``t_a >= 0``.
    Ties between faces go to the lowest axis; points on the boundary count as outside.

    Returns:
        dict: boolean ``exits``/``enters``, times ``t_exit``/``t_enter`` and face ids
        ``face_exit``/``face_enter`` (``-1`` where not applicable).
    """
    x0 = np.atleast_2d(x0)
    v = np.atleast_2d(x1) - x0
    with np.errstate(divide='ignore', invalid='ignore'):
        ta_axis = (-R - x0) / v
        tb_axis = (R - x0) / v
    lo = np.minimum(ta_axis, tb_axis)
    hi = np.maximum(ta_axis, tb_axis)
    still = v == 0
    inside_axis = np.abs(x0) < R
    lo = np.where(still, np.where(inside_axis, -np.inf, np.inf), lo)
    hi = np.where(still, np.where(inside_axis, np.inf, -np.inf), hi)
    t_a = lo.max(axis=1)
    t_b = hi.min(axis=1)
    meets = np.maximum(t_a, 0.0) < np.minimum(t_b, 1.0)
    exits = meets & (t_b <= 1.0)
    enters = meets & (t_a >= 0.0)
    rows = np.arange(len(x0))
    exit_axis = np.argmin(hi, axis=1)
    enter_axis = np.argmax(lo, axis=1)
    face_exit = np.where(exits, 2 * exit_axis + (v[rows, exit_axis] > 0), -1)
    face_enter = np.where(enters, 2 * enter_axis + (v[rows, enter_axis] < 0), -1)
    return {
        'exits': exits, 'enters': enters,
        't_exit': np.where(exits, t_b, np.nan), 't_enter': np.where(enters, t_a, np.nan),
        'face_exit': face_exit.astype(np.int64), 'face_enter': face_enter.astype(np.int64),
    }


def distance_to_cube(points, R):
    r"""Euclidean distance of each point to the boundary of ``(-R, R)^d``."""
    q = np.abs(np.atleast_2d(points)) - R
    outside = np.linalg.norm(np.maximum(q, 0.0), axis=1)
    inside = -q.max(axis=1)
    return np.where(q.max(axis=1) > 0, outside, inside)


class FluxAtoms(object):
    r"""Crossing atoms of one kind (exits or entries)."""

    def __init__(self, index, time, point, face, mass, kept, early):
        self.index = index
        self.time = time
        self.point = point
        self.face = face
        self.mass = mass
        self.kept = kept
        self.early = early

    def __len__(self):
        return len(self.mass)

    def select(self, keep):
        return FluxAtoms(self.index[keep], self.time[keep], self.point[keep], self.face[keep], self.mass[keep],
                         self.kept[keep], self.early[keep])


class FluxSlice(object):
    r"""Normal fluxes across ``(0, 1) x dQ_R`` and the kept-trajectory data at half-side ``R``.

    Exits carry the sign ``+`` (``f_+``), entries ``-`` (``f_-``); the kept flux ``f'`` keeps the
    exits with ``X_1 < delta`` or ``t_+ < tau`` and the entries with ``X_1 < delta`` or
    ``t_- > 1 - tau``. Atoms are stored exactly; densities are binned on demand on ``n_t`` time
    bins and ``n_f`` bins per tangential axis of every face.

    Attributes:
        exits (FluxAtoms): exit atoms, ``early`` marking ``t_+ < tau``.
        entries (FluxAtoms): entry atoms, ``early`` marking the late entries ``t_- > 1 - tau``.
        x0 (numpy.ndarray), x1 (numpy.ndarray): trajectory end points, for the kept densities.
    """

    def __init__(self, R, tau, delta, exits, entries, x0, x1, mass, n_t=32, n_f=32):
        self.R = float(R)
        self.tau = float(tau)
        self.delta = float(delta)
        self.exits = exits
        self.entries = entries
        self.x0 = x0
        self.x1 = x1
        self.traj_mass = mass
        self.n_t = int(n_t)
        self.n_f = int(n_f) + int(n_f) % 2
        self.dimension = x0.shape[1]

    # ------------------------------------------------------------ totals

    def net_flux(self):
        r"""``int f`` over ``(0, 1) x dQ``: exiting minus entering mass."""
        return float(self.exits.mass.sum() - self.entries.mass.sum())

    def kept_net_flux(self):
        return float(self.exits.mass[self.exits.kept].sum() - self.entries.mass[self.entries.kept].sum())

    def kept_trajectories(self):
        r"""Indices of the trajectories with a kept exit or a kept entry."""
        return np.union1d(self.exits.index[self.exits.kept], self.entries.index[self.entries.kept])

    def mass_balance_defect(self):
        r"""``m(x0 in Q) - m(x1 in Q) - int f``, zero at particle level."""
        inside0 = np.all(np.abs(self.x0) < self.R, axis=1)
        inside1 = np.all(np.abs(self.x1) < self.R, axis=1)
        return float(self.traj_mass[inside0].sum() - self.traj_mass[inside1].sum() - self.net_flux())

    def kept_boundary_masses(self):
        r"""``(int_Q rho_0, int_Q rho_1)``: starts in ``Q`` of the kept exits, ends in ``Q`` of the kept entries."""
        ex, en = self.exits.kept, self.entries.kept
        start = self.x0[self.exits.index[ex]]
        end = self.x1[self.entries.index[en]]
        rho0 = self.exits.mass[ex][np.all(np.abs(start) < self.R, axis=1)].sum()
        rho1 = self.entries.mass[en][np.all(np.abs(end) < self.R, axis=1)].sum()
        return float(rho0), float(rho1)

    def kept_balance_defect(self):
        r"""``int_Q rho_0 - int_Q rho_1 - int f'``, nonzero only for crossing trajectories keeping one atom."""
        rho0, rho1 = self.kept_boundary_masses()
        return rho0 - rho1 - self.kept_net_flux()

    def layer_masses(self):
        r"""Masses of ``x0`` and of ``x1`` in ``Q ∩ {x_1 < delta}`` and in ``Q ∩ {x_1 >= delta}``."""
        out = {}
        for key, points in (('0', self.x0), ('1', self.x1)):
            inside = np.all(np.abs(points) < self.R, axis=1)
            low = points[:, 0] < self.delta
            out['layer' + key] = float(self.traj_mass[inside & low].sum())
            out['main' + key] = float(self.traj_mass[inside & ~low].sum())
        return out

    def main_densities(self, lam0=1.0):
        r"""Densities ``(c_0, c_1)`` left in ``Q ∩ {x_1 > delta}`` once the kept trajectories are removed.

        ``c_i |Q ∩ {x_1 > delta}|`` is the mass of ``x_i`` above the layer minus ``int_Q rho_i``,
        in units of the source value ``lam0``.
        """
        volume = self.main_volume()
        rho0, rho1 = self.kept_boundary_masses()
        masses = self.layer_masses()
        return (masses['main0'] - rho0) / (lam0 * volume), (masses['main1'] - rho1) / (lam0 * volume)

    def main_volume(self):
        r"""``|Q_R ∩ {x_1 > delta}|``."""
        return (self.R - self.delta) * (2.0 * self.R) ** (self.dimension - 1)

    # --------------------------------------------------------- functionals

    def kept_cost(self):
        r"""``sum m |x1 - x0|^2`` over kept trajectories, the bound on the kept construction's cost."""
        idx = self.kept_trajectories()
        return float(np.sum(self.traj_mass[idx] * np.sum((self.x1[idx] - self.x0[idx]) ** 2, axis=1)))

    def kept_density_distance(self):
        r"""``int dist(., dQ) (rho_0 + rho_1)`` from the kept exits' starts and kept entries' ends."""
        ex = self.exits.kept
        en = self.entries.kept
        return float(np.sum(self.exits.mass[ex] * distance_to_cube(self.x0[self.exits.index[ex]], self.R))
                     + np.sum(self.entries.mass[en] * distance_to_cube(self.x1[self.entries.index[en]], self.R)))

    def early_density_distance(self):
        r"""``int dist(., dQ) (rho'_0 + rho'_1)`` from early exits' starts and late entries' ends."""
        ex = self.exits.early
        en = self.entries.early
        return float(np.sum(self.exits.mass[ex] * distance_to_cube(self.x0[self.exits.index[ex]], self.R))
                     + np.sum(self.entries.mass[en] * distance_to_cube(self.x1[self.entries.index[en]], self.R)))

    def flux_square(self):
        r"""``int f^2`` over ``(0, 1) x dQ`` of the binned flux density."""
        f, area = self.binned('all')
        return float(np.sum(f ** 2) * area / self.n_t)

    def functionals(self):
        return {
            'flux_square': self.flux_square(),
            'kept_cost': self.kept_cost(),
            'kept_distance': self.kept_density_distance(),
            'early_distance': self.early_density_distance(),
        }

    # ------------------------------------------------------------ binning

    @property
    def face_bins(self):
        return self.n_f ** (self.dimension - 1)

    def face_bin_area(self):
        return (2.0 * self.R / self.n_f) ** (self.dimension - 1)

    def face_bin_index(self, points, faces):
        r"""Flat tangential bin of each crossing point on its face."""
        d = self.dimension
        flat = np.zeros(len(points), dtype=np.int64)
        if d == 1:
            return flat
        axes = faces // 2
        for axis in range(d):
            rows = axes == axis
            if not np.any(rows):
                continue
            tangential = np.delete(points[rows], axis, axis=1)
            idx = np.clip(np.floor((tangential + self.R) / (2.0 * self.R) * self.n_f).astype(np.int64), 0,
                          self.n_f - 1)
            flat[rows] = np.ravel_multi_index(tuple(idx.T), (self.n_f,) * (d - 1))
        return flat

    def face_bin_centers(self, face):
        r"""Physical centers of the bins of one face, shape ``(face_bins, d)``."""
        d = self.dimension
        axis, positive = face // 2, face % 2 == 1
        ticks = -self.R + (np.arange(self.n_f) + 0.5) * 2.0 * self.R / self.n_f
        if d == 1:
            tangential = np.zeros((1, 0))
        else:
            grids = np.meshgrid(*([ticks] * (d - 1)), indexing='ij')
            tangential = np.stack([g.ravel() for g in grids], axis=-1)
        normal = np.full((len(tangential), 1), self.R if positive else -self.R)
        return np.insert(tangential, axis, normal[:, 0], axis=1)

    def _bin(self, atoms, sign, time_binned=True):
        faces = 2 * self.dimension
        out = np.zeros((faces, self.n_t if time_binned else 1, self.face_bins))
        if len(atoms) == 0:
            return out
        tb = np.clip(np.floor(atoms.time * self.n_t).astype(np.int64), 0, self.n_t - 1) if time_binned \
            else np.zeros(len(atoms), dtype=np.int64)
        np.add.at(out, (atoms.face, tb, self.face_bin_index(atoms.point, atoms.face)), sign * atoms.mass)
        return out

    def binned(self, which='all', time_binned=True):
        r"""Flux density on ``(faces, time bins, face bins)``.

        Args:
            which (str): ``all`` for ``f``, ``kept`` for ``f'``, ``removed`` for ``f - f'``,
                ``plus`` / ``minus`` for ``f_+`` / ``f_-``.
            time_binned (bool): integrate over time instead when false.

        Returns:
            tuple: ``(density, face bin area)``.
        """
        ex, en = self.exits, self.entries
        none = np.zeros(0, dtype=np.int64)
        if which == 'kept':
            ex, en = ex.select(ex.kept), en.select(en.kept)
        elif which == 'removed':
            ex, en = ex.select(~ex.kept), en.select(~en.kept)
        elif which == 'plus':
            en = en.select(none)
        elif which == 'minus':
            # f_- is the nonnegative entering part
            total = self._bin(en, 1.0, time_binned)
            return total / self._density_scale(time_binned), self.face_bin_area()
        elif which != 'all':
            raise ConfigurationError(f'unknown flux selection [{which}].', stage='eulerian')
        total = self._bin(ex, 1.0, time_binned) + self._bin(en, -1.0, time_binned)
        return total / self._density_scale(time_binned), self.face_bin_area()

    def _density_scale(self, time_binned):
        return self.face_bin_area() * (1.0 / self.n_t if time_binned else 1.0)

    def to_dataframe(self):
        rows = []
        for kind, atoms in (('exit', self.exits), ('entry', self.entries)):
            for k in range(len(atoms)):
                row = {'kind': kind, 'trajectory': int(atoms.index[k]), 'face': int(atoms.face[k]),
                       't': float(atoms.time[k]), 'mass': float(atoms.mass[k]), 'kept': bool(atoms.kept[k])}
                row.update({f'x_{i + 1}': float(atoms.point[k, i]) for i in range(self.dimension)})
                rows.append(row)
        return pd.DataFrame(rows)

    def __repr__(self):
        return (f'FluxSlice(R={self.R:.4g}, tau={self.tau}, delta={self.delta:.3g}, exits={len(self.exits)}, '
                f'entries={len(self.entries)})')


def flux_slice(traj, R, tau, delta, n_t=32, n_f=32):
    r"""Crossings of the trajectories through ``dQ_R`` with the kept/early classification.

    Args:
        traj (TrajectorySet): trajectories.
        R (float): half-side of the cube.
        tau (float): in ``(0, 1/4)``.
        delta (float): boundary layer width, ``>= 0``.

    Returns:
        FluxSlice: the slice.
    """
    if not 0.0 < tau < 0.25:
        raise ConfigurationError(f'tau [{tau}] must lie in (0, 1/4).', stage='eulerian')
    if delta < 0:
        raise ConfigurationError(f'delta [{delta}] must be nonnegative.', stage='eulerian')
    cross = cube_crossings(traj.x0, traj.x1, R)
    v = traj.velocity

    ie = np.flatnonzero(cross['exits'])
    te = cross['t_exit'][ie]
    pe = traj.x0[ie] + te[:, None] * v[ie]
    early_exit = te < tau
    exits = FluxAtoms(ie, te, pe, cross['face_exit'][ie], traj.mass[ie], (pe[:, 0] < delta) | early_exit, early_exit)

    ii = np.flatnonzero(cross['enters'])
    ti = cross['t_enter'][ii]
    pi = traj.x0[ii] + ti[:, None] * v[ii]
    late_entry = ti > 1.0 - tau
    entries = FluxAtoms(ii, ti, pi, cross['face_enter'][ii], traj.mass[ii], (pi[:, 0] < delta) | late_entry,
                        late_entry)
    return FluxSlice(R, tau, delta, exits, entries, traj.x0, traj.x1, traj.mass, n_t, n_f)


def slice_radii(n_radii=N_RADII, lo=1.0, hi=2.0):
    r"""``R_k = lo + (k + 1/2)(hi - lo) / n`` for ``k < n``."""
    return lo + (np.arange(n_radii) + 0.5) * (hi - lo) / n_radii


def select_good_slice(traj, tau, delta=0.0, n_radii=N_RADII, n_t=32, n_f=32):
    r"""Scan ``R`` over ``(1, 2)`` and return the slice minimizing the normalized functionals.

    The four functionals ``int f^2``, kept cost, ``int dist (rho_0 + rho_1)`` and
    ``int dist (rho'_0 + rho'_1)`` are divided by ``E``, ``M E``, ``E`` and ``tau^2 E``, where
    ``E`` and ``M`` are the cost and the largest displacement of the trajectories meeting ``Q_2``.

    Returns:
        tuple: ``(R, FluxSlice, diagnostics)``; diagnostics is a DataFrame with one row per radius.
    """
    logger = logging.getLogger()
    touches = np.any(np.all(np.abs(traj.position(np.linspace(0, 1, 9)[:, None, None])) < 2.0, axis=-1), axis=0)
    near = traj.restrict(touches)
    E = near.cost()
    M = float(np.linalg.norm(near.velocity, axis=1).max()) if len(near) else 0.0
    bounds = {'flux_square': E, 'kept_cost': M * E, 'kept_distance': E, 'early_distance': tau ** 2 * E}
    rows = []
    slices = []
    for R in slice_radii(n_radii):
        fs = flux_slice(traj, R, tau, delta, n_t, n_f)
        values = fs.functionals()
        row = {'R': R}
        row.update(values)
        normalized = 0.0
        for key, value in values.items():
            ratio = value / bounds[key] if bounds[key] > 0 else 0.0
            row[key + '_ratio'] = ratio
            normalized += ratio
        row['normalized'] = normalized
        rows.append(row)
        slices.append(fs)
    diagnostics = pd.DataFrame(rows)
    best = int(np.argmin(diagnostics['normalized'].to_numpy()))
    logger.info(f'good slice: R = {diagnostics["R"][best]:.4f}, normalized functionals = '
                f'{diagnostics["normalized"][best]:.4g}')
    return float(diagnostics['R'][best]), slices[best], diagnostics
