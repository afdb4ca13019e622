# -*- coding: utf-8 -*-

"""
otlab.transport.mapfield
########################

Grid-sampled displacement ``T - id`` obtained by barycentric projection of a plan.
"""

import logging

import numpy as np
import pandas as pd
from scipy.spatial import cKDTree

from otlab.transport.sampling import Lattice, cell_fractions
from otlab.utils.exceptions import CoverageError


class MapField(object):
    r"""Displacement field on the cells of a lattice.

    Args:
        lattice (Lattice): the grid; values live at cell centers.
        displacement (numpy.ndarray): shape ``(*lattice.shape, d)``, zero where invalid.
        mask (numpy.ndarray): validity, shape ``lattice.shape``.
        mass (numpy.ndarray): plan mass binned per cell, shape ``lattice.shape``.
        lam0 (float): density value of the domain the map starts from.
    """

    def __init__(self, lattice, displacement, mask, mass, lam0=1.0):
        self.lattice = lattice
        self.displacement = np.asarray(displacement, dtype=float)
        self.mask = np.asarray(mask, dtype=bool)
        self.mass = np.asarray(mass, dtype=float)
        self.lam0 = float(lam0)

    @property
    def dimension(self):
        return self.lattice.dimension

    @property
    def h(self):
        return self.lattice.spacing

    def nodes(self):
        return self.lattice.centers().reshape(*self.lattice.shape, self.dimension)

    def valid_nodes(self):
        return self.nodes()[self.mask], self.displacement[self.mask]

    def evaluate(self, points):
        r"""Displacement at the nearest valid node of each point."""
        nodes, disp = self.valid_nodes()
        _, idx = cKDTree(nodes).query(np.atleast_2d(points))
        return disp[idx]

    def apply(self, points):
        r"""``T(x) = x + displacement``, nearest-node evaluation."""
        points = np.atleast_2d(points)
        return points + self.evaluate(points)

    # ---------------------------------------------------------- derivatives

    def displacement_jacobian(self):
        r"""``grad (T - x)`` per node in physical coordinates, ``nan`` where no stencil is available.

        Central differences where both neighbours are valid, one-sided where only one is.

        Returns:
            numpy.ndarray: shape ``(*shape, d, d)`` with entry ``[..., k, i] = d disp_k / d x_i``.
        """
        d = self.dimension
        disp = self.displacement
        mask = self.mask
        jac = np.full(self.lattice.shape + (d, d), np.nan)
        for i in range(d):
            fwd = np.zeros_like(mask)
            bwd = np.zeros_like(mask)
            sl_lo = [slice(None)] * d
            sl_hi = [slice(None)] * d
            sl_lo[i] = slice(0, -1)
            sl_hi[i] = slice(1, None)
            sl_lo, sl_hi = tuple(sl_lo), tuple(sl_hi)
            fwd[sl_lo] = mask[sl_lo] & mask[sl_hi]
            bwd[sl_hi] = mask[sl_hi] & mask[sl_lo]
            up = np.zeros_like(disp)
            down = np.zeros_like(disp)
            up[sl_lo] = disp[sl_hi]
            down[sl_hi] = disp[sl_lo]
            central = fwd & bwd
            only_fwd = fwd & ~bwd
            only_bwd = bwd & ~fwd
            deriv = np.full(disp.shape, np.nan)
            deriv[central] = 0.5 * (up[central] - down[central])
            deriv[only_fwd] = up[only_fwd] - disp[only_fwd]
            deriv[only_bwd] = disp[only_bwd] - down[only_bwd]
            jac[..., :, i] = deriv
        # lattice-coordinate derivatives to physical ones
        return jac @ self.lattice.frame_inverse / self.lattice.h

    def jacobian(self):
        r"""``grad T = Id + grad (T - x)``."""
        return self.displacement_jacobian() + np.eye(self.dimension)

    def curl_defect(self):
        r"""Largest antisymmetric part ``|grad T - grad T^T| / 2`` over nodes with a full stencil."""
        jac = self.displacement_jacobian()
        anti = 0.5 * (jac - np.swapaxes(jac, -1, -2))
        norms = np.linalg.norm(anti, axis=(-2, -1))
        finite = np.isfinite(norms)
        return float(norms[finite].max()) if np.any(finite) else 0.0

    # ------------------------------------------------------------ transforms

    def coarsen(self, factor=2):
        r"""Mass-weighted block average onto a lattice with ``factor`` times larger cells."""
        d = self.dimension
        coarse = self.lattice.coarsen(factor)
        cut = tuple(slice(0, s * factor) for s in coarse.shape)
        split = []
        for s in coarse.shape:
            split.extend([s, factor])
        mass = self.mass[cut].reshape(split)
        moment = (self.displacement[cut] * self.mass[cut][..., None]).reshape(split + [d])
        axes = tuple(range(1, 2 * d, 2))
        mass = mass.sum(axis=axes)
        moment = moment.sum(axis=axes)
        mask = mass > 0
        disp = np.zeros(coarse.shape + (d,))
        disp[mask] = moment[mask] / mass[mask][:, None]
        return MapField(coarse, disp, mask, mass, self.lam0)

    def dilate(self, factor):
        r"""Field of ``x -> s T(x / s)``."""
        return MapField(self.lattice.dilate(factor), self.displacement * factor, self.mask,
                        self.mass * factor ** self.dimension, self.lam0)

    def to_dataframe(self):
        d = self.dimension
        nodes = self.nodes().reshape(-1, d)
        disp = self.displacement.reshape(-1, d)
        columns = {f'x_{i + 1}': nodes[:, i] for i in range(d)}
        columns.update({f'disp_{i + 1}': disp[:, i] for i in range(d)})
        columns['valid'] = self.mask.reshape(-1)
        return pd.DataFrame(columns)

    def to_csv(self, path):
        self.to_dataframe().to_csv(path, index=False, float_format='%.17g')

    def __repr__(self):
        return f'MapField({self.lattice}, valid={int(self.mask.sum())}/{self.mask.size})'


def required_cells(lattice, domain, supersample=4):
    r"""Cells of ``lattice`` meeting ``domain``, as a boolean array of shape ``lattice.shape``."""
    return (cell_fractions(domain.region, lattice, supersample) > 0).reshape(lattice.shape)


def extract_map(plan, lattice=None, domain=None, coverage_limit=0.02, h=None):
    r"""Barycentric projection of ``plan`` onto the cells of ``lattice``.

    Each cell receives the mass-weighted mean of ``x1 - x0`` over the support pairs whose
    ``x0`` falls in it.

    Args:
        plan (TransportPlan): the coupling.
        lattice (Lattice, optional): the grid, by default the source sample lattice, else an
            axis-aligned lattice of side ``h`` over the support.
        domain (Domain, optional): when given, cells meeting it are required to carry mass.
        coverage_limit (float): largest tolerated fraction of required cells without mass.

    Returns:
        MapField: the forward map.

    Raises:
        CoverageError: if the uncovered fraction exceeds ``coverage_limit``.
    """
    logger = logging.getLogger()
    if lattice is None:
        if plan.src is not None and plan.src.lattice is not None:
            lattice = plan.src.lattice
        else:
            lattice = Lattice.from_bbox(plan.x0.min(axis=0), plan.x0.max(axis=0) + 1e-12, h)
    d = lattice.dimension
    flat, inside = lattice.locate(plan.x0)
    mass = np.bincount(flat[inside], weights=plan.mass[inside], minlength=lattice.size)
    moment = np.stack([np.bincount(flat[inside], weights=plan.mass[inside] * plan.displacement[inside, k],
                                   minlength=lattice.size) for k in range(d)], axis=-1)
    mask = mass > 0
    disp = np.zeros((lattice.size, d))
    disp[mask] = moment[mask] / mass[mask][:, None]
    field = MapField(lattice, disp.reshape(lattice.shape + (d,)), mask.reshape(lattice.shape),
                     mass.reshape(lattice.shape), plan.lam0)
    if domain is not None:
        required = required_cells(lattice, domain)
        missing = float(np.sum(required & ~field.mask)) / max(int(required.sum()), 1)
        if missing > coverage_limit:
            raise CoverageError(f'{missing:.2%} of the cells meeting {domain.name} carry no plan mass.')
        if missing > 0:
            logger.debug(f'map extraction leaves {missing:.2%} of the required cells empty')
    return field


def inverse_map(plan, lattice=None, domain=None, coverage_limit=0.02, h=None):
    r"""Map of ``T^{-1}``: :func:`extract_map` on the swapped plan."""
    return extract_map(plan.swapped(), lattice, domain, coverage_limit, h)
