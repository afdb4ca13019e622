# -*- coding: utf-8 -*-

"""
otlab.eulerian.orthogonality
############################
"""

import logging

import numpy as np


class OrthogonalityDefect(object):
    r"""``int int |j - rho grad phi|^2 / rho - (int int |j|^2 / rho - int_{Q ∩ {x_1 > -delta}} |grad phi|^2)``.

    Attributes:
        value (float): the defect from the direct evaluation.
        expanded (float): the same quantity from ``int int (-2 j . grad phi + rho |grad phi|^2) + C``.
        relative_gap (float): ``|direct - expanded| / (|A| + |B| + |C|)``.
        terms (dict): ``A``, ``B`` and ``C``.
        infinite (bool): some cell carries momentum without density.
    """

    def __init__(self, value, expanded, relative_gap, terms, infinite=False):
        self.value = value
        self.expanded = expanded
        self.relative_gap = relative_gap
        self.terms = terms
        self.infinite = infinite

    def __float__(self):
        return float(self.value)

    def __repr__(self):
        return f'OrthogonalityDefect(value={self.value:.6e}, gap={self.relative_gap:.2e}, infinite={self.infinite})'


def orthogonality_defect(field, potential, delta=0.0):
    r"""Orthogonality defect of the Eulerian pair against ``grad phi`` on the field's raster.

    Space-time integrals are midpoint sums over the raster cells; the static term is weighted by
    the fraction of each cell above ``x_1 = -delta``.

    Args:
        field (EulerianField): the pair ``(rho, j)``.
        potential: any object with ``gradient_at(points)``, typically a reflected :class:`PotentialField`.
        delta (float): layer width.

    Returns:
        OrthogonalityDefect: the defect, ``inf`` with the flag set if ``rho = 0`` and ``j != 0`` in a cell.
    """
    lattice = field.lattice
    d = lattice.dimension
    centers = lattice.centers()
    grad = potential.gradient_at(centers).reshape(lattice.shape + (d,))
    grad_sq = np.sum(grad ** 2, axis=-1)
    vol = lattice.cell_volume
    dt = field.dt

    lower = lattice.origin[0] + np.arange(lattice.shape[0]) * lattice.h
    above = np.clip((lower + lattice.h + delta) / lattice.h, 0.0, 1.0)
    above = above.reshape((-1,) + (1,) * (d - 1))
    C = float(np.sum(above * grad_sq) * vol)

    rho = field.rho
    j = field.j
    j_sq = np.sum(j ** 2, axis=-1)
    empty = rho <= 0.0
    starved = empty & (j_sq > 0.0)
    if np.any(starved):
        logging.getLogger().warning(f'{int(starved.sum())} cells carry momentum without density')
        return OrthogonalityDefect(float('inf'), float('inf'), 0.0, {'A': float('inf'), 'B': float('inf'), 'C': C},
                                   infinite=True)
    safe = np.where(empty, 1.0, rho)
    shifted = j - rho[..., None] * grad[None, ...]
    A = float(np.sum(np.where(empty, 0.0, np.sum(shifted ** 2, axis=-1) / safe)) * vol * dt)
    B = float(np.sum(np.where(empty, 0.0, j_sq / safe)) * vol * dt)
    cross = np.sum(j * grad[None, ...], axis=-1)
    expanded_core = float(np.sum(np.where(empty, 0.0, -2.0 * cross + rho * grad_sq[None, ...])) * vol * dt)

    direct = A - B + C
    expanded = expanded_core + C
    scale = abs(A) + abs(B) + abs(C)
    gap = abs(direct - expanded) / scale if scale > 0 else 0.0
    return OrthogonalityDefect(direct, expanded, gap, {'A': A, 'B': B, 'C': C})
