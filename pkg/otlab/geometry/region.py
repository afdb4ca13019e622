# -*- coding: utf-8 -*-

"""
otlab.geometry.region
#####################

Membership predicates of bounded domains. Regions compose (union, affine image) and
expose a bounding box, which is all the sampler needs.
"""

import numpy as np


class AbstractRegion(object):
    r"""Bounded open set given by a vectorized membership predicate."""

    dimension = None

    def contains(self, points):
        r"""Boolean mask of the points (shape ``(N, d)``) lying in the region."""
        raise NotImplementedError('Method [contains] should be implemented.')

    def bbox(self):
        r"""Axis-aligned bounding box as ``(lo, hi)`` arrays."""
        raise NotImplementedError('Method [bbox] should be implemented.')


class SlabRegion(AbstractRegion):
    r"""``{lower(x') < x_1 < upper(x'), |x'_i| < half_width}``.

    Args:
        dimension (int): ambient dimension.
        lower (callable): lower boundary, maps ``(N, d-1)`` tangential points to ``(N,)``.
        upper (callable or float): upper boundary.
        half_width (float): lateral half-width (ignored when ``d = 1``).
        height_bounds (tuple): ``(min lower, max upper)`` used for the bounding box.
    """

    def __init__(self, dimension, lower, upper, half_width, height_bounds):
        self.dimension = dimension
        self.lower = lower
        self.upper = upper if callable(upper) else (lambda xp, _u=float(upper): np.full(len(xp), _u))
        self.half_width = half_width
        self.height_bounds = height_bounds

    def contains(self, points):
        points = np.atleast_2d(points)
        xp = points[:, 1:]
        inside = np.all(np.abs(xp) < self.half_width, axis=1) if self.dimension > 1 else np.ones(len(points), bool)
        out = np.zeros(len(points), dtype=bool)
        if np.any(inside):
            sub = points[inside]
            lo = self.lower(sub[:, 1:])
            hi = self.upper(sub[:, 1:])
            out[inside] = (sub[:, 0] > lo) & (sub[:, 0] < hi)
        return out

    def bbox(self):
        lo = np.full(self.dimension, -self.half_width, dtype=float)
        hi = np.full(self.dimension, self.half_width, dtype=float)
        lo[0], hi[0] = self.height_bounds
        return lo, hi


class BoxRegion(AbstractRegion):

    def __init__(self, lo, hi):
        self.lo = np.asarray(lo, dtype=float)
        self.hi = np.asarray(hi, dtype=float)
        self.dimension = len(self.lo)

    def contains(self, points):
        points = np.atleast_2d(points)
        return np.all((points > self.lo) & (points < self.hi), axis=1)

    def bbox(self):
        return self.lo.copy(), self.hi.copy()


class UnionRegion(AbstractRegion):

    def __init__(self, parts):
        self.parts = list(parts)
        self.dimension = self.parts[0].dimension

    def contains(self, points):
        out = np.zeros(len(np.atleast_2d(points)), dtype=bool)
        for part in self.parts:
            out |= part.contains(points)
        return out

    def bbox(self):
        boxes = [part.bbox() for part in self.parts]
        lo = np.min([b[0] for b in boxes], axis=0)
        hi = np.max([b[1] for b in boxes], axis=0)
        return lo, hi


class AffineImageRegion(AbstractRegion):
    r"""Image ``{M x + s : x in base}`` of a region under an invertible affine map."""

    def __init__(self, base, matrix, shift):
        self.base = base
        self.matrix = np.asarray(matrix, dtype=float)
        self.shift = np.asarray(shift, dtype=float)
        self.inverse = np.linalg.inv(self.matrix)
        self.dimension = base.dimension

    def contains(self, points):
        points = np.atleast_2d(points)
        return self.base.contains((points - self.shift) @ self.inverse.T)

    def bbox(self):
        lo, hi = self.base.bbox()
        corners = np.array(np.meshgrid(*zip(lo, hi), indexing='ij')).reshape(self.dimension, -1).T
        image = corners @ self.matrix.T + self.shift
        return image.min(axis=0), image.max(axis=0)
