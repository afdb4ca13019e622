# -*- coding: utf-8 -*-

"""
otlab.transport.sampling
########################

Uniform (possibly affinely framed) lattices and the stratified sampling of
``lam * chi_Omega`` on them.
"""

import logging

import numpy as np

from otlab.utils import sub_cell_offsets
from otlab.utils.exceptions import ImbalanceError, MatrixError


class Lattice(object):
    r"""Cells ``o + F (h * (idx + [0, 1)^d))`` for integer ``idx`` in ``[0, shape)``.

    Args:
        origin (numpy.ndarray): corner of cell ``0``.
        h (float): cell side in lattice coordinates.
        shape (tuple): cells per axis.
        frame (numpy.ndarray, optional): invertible frame matrix ``F``, the identity by default.
    """

    def __init__(self, origin, h, shape, frame=None):
        self.origin = np.asarray(origin, dtype=float)
        self.dimension = len(self.origin)
        self.h = float(h)
        self.shape = tuple(int(s) for s in shape)
        self.frame = np.eye(self.dimension) if frame is None else np.asarray(frame, dtype=float)
        det = np.linalg.det(self.frame)
        if abs(det) < 1e-14:
            raise MatrixError('singular lattice frame.')
        self.frame_inverse = np.linalg.inv(self.frame)
        self.cell_volume = self.h ** self.dimension * abs(det)

    @classmethod
    def from_bbox(cls, lo, hi, h):
        r"""Axis-aligned lattice covering ``[lo, hi]`` whose origin is snapped to multiples of ``h``."""
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        origin = np.floor(lo / h + 1e-9) * h
        shape = np.maximum(np.ceil((hi - origin) / h - 1e-9), 1).astype(int)
        return cls(origin, h, shape)

    @property
    def size(self):
        return int(np.prod(self.shape))

    @property
    def spacing(self):
        r"""Largest physical cell side."""
        return self.h * float(np.linalg.norm(self.frame, 2))

    def index_grid(self):
        grids = np.meshgrid(*[np.arange(s) for s in self.shape], indexing='ij')
        return np.stack([g.ravel() for g in grids], axis=-1)

    def to_physical(self, coords):
        r"""Map lattice coordinates (in cell units) to physical points."""
        return self.origin + (np.asarray(coords, dtype=float) * self.h) @ self.frame.T

    def centers(self):
        r"""Cell centers, shape ``(size, d)`` in C order of ``shape``."""
        return self.to_physical(self.index_grid() + 0.5)

    def locate(self, points):
        r"""Cell index of each point.

        Returns:
            tuple: ``(flat_index, inside)``; ``flat_index`` is -1 for points outside the lattice.
        """
        points = np.atleast_2d(points)
        coords = ((points - self.origin) @ self.frame_inverse.T) / self.h
        idx = np.floor(coords + 1e-9).astype(np.int64)
        inside = np.all((idx >= 0) & (idx < np.array(self.shape)), axis=1)
        flat = np.full(len(points), -1, dtype=np.int64)
        if np.any(inside):
            flat[inside] = np.ravel_multi_index(tuple(idx[inside].T), self.shape)
        return flat, inside

    def transform(self, matrix, shift):
        r"""Image lattice under ``x -> M x + s``."""
        matrix = np.asarray(matrix, dtype=float)
        return Lattice(matrix @ self.origin + shift, self.h, self.shape, matrix @ self.frame)

    def coarsen(self, factor=2):
        shape = tuple(max(s // factor, 1) for s in self.shape)
        return Lattice(self.origin, self.h * factor, shape, self.frame)

    def dilate(self, factor):
        return Lattice(self.origin * factor, self.h * factor, self.shape, self.frame)

    def __repr__(self):
        return f'Lattice(origin={self.origin.tolist()}, h={self.h:.4g}, shape={self.shape})'


class WeightedPoints(object):
    r"""Point masses ``sum_k w_k delta_{x_k}`` with an optional lattice cell label per point."""

    def __init__(self, points, weights, lattice=None, cells=None):
        self.points = np.atleast_2d(np.asarray(points, dtype=float))
        self.weights = np.asarray(weights, dtype=float).reshape(-1)
        if len(self.points) != len(self.weights):
            raise ValueError('points and weights must have the same length.')
        self.lattice = lattice
        self.cells = cells

    def __len__(self):
        return len(self.weights)

    @property
    def dimension(self):
        return self.points.shape[1]

    def total(self):
        return float(self.weights.sum())

    def is_uniform(self, rtol=1e-12):
        return bool(np.all(np.abs(self.weights - self.weights[0]) <= rtol * abs(self.weights[0])))

    def rescaled(self, factor):
        return WeightedPoints(self.points, self.weights * factor, self.lattice, self.cells)

    def transformed(self, matrix, shift, mass_factor=1.0):
        matrix = np.asarray(matrix, dtype=float)
        lattice = self.lattice.transform(matrix, shift) if self.lattice is not None else None
        return WeightedPoints(self.points @ matrix.T + shift, self.weights * mass_factor, lattice, self.cells)


def cell_fractions(region, lattice, supersample=4):
    r"""Fraction of each lattice cell inside ``region`` from ``supersample**d`` sub-cell centers."""
    centers = lattice.index_grid() + 0.5
    fractions = np.zeros(len(centers))
    for offset in sub_cell_offsets(lattice.dimension, supersample):
        fractions += region.contains(lattice.to_physical(centers + offset))
    return fractions / supersample ** lattice.dimension


def sample_domain(domain, h=None, lattice=None, supersample=4):
    r"""Stratified cell-center sampling of ``lam * chi_Omega``.

    Each cell of the lattice meeting the domain carries one point at its center with
    weight ``lam * |cell| * fraction``.

    Args:
        domain (Domain): the domain to sample.
        h (float, optional): cell side of an axis-aligned lattice over the domain's bounding box.
        lattice (Lattice, optional): explicit lattice, takes precedence over ``h``.
        supersample (int): sub-cells per axis used for the fractions.

    Returns:
        WeightedPoints: the samples, labelled by lattice cell.
    """
    if lattice is None:
        lo, hi = domain.bbox()
        lattice = Lattice.from_bbox(lo, hi, h)
    fractions = cell_fractions(domain.region, lattice, supersample)
    keep = np.flatnonzero(fractions > 0)
    points = lattice.centers()[keep]
    weights = domain.lam * lattice.cell_volume * fractions[keep]
    return WeightedPoints(points, weights, lattice, keep)


def balance_masses(src, tgt, tol=1e-2):
    r"""Rescale the target weights to the source total.

    Raises:
        ImbalanceError: if the relative mismatch exceeds ``tol``.
    """
    logger = logging.getLogger()
    m0, m1 = src.total(), tgt.total()
    mismatch = abs(m0 - m1) / max(m0, m1)
    if mismatch > tol:
        raise ImbalanceError(f'sampled masses differ by [{mismatch:.3e}] (source {m0:.6g}, target {m1:.6g}).')
    if mismatch > 0:
        logger.info(f'balancing sampled masses: relative mismatch {mismatch:.3e}')
    return tgt.rescaled(m0 / m1)
