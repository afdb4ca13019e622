# -*- coding: utf-8 -*-

"""
otlab.transport.plan
####################
"""

import numpy as np
import pandas as pd

from otlab.utils.exceptions import ConfigurationError


class TransportPlan(object):
    r"""Discrete coupling given by its support pairs ``(x0, x1)`` and their masses.

    Args:
        x0 (numpy.ndarray): source support points, shape ``(K, d)``.
        x1 (numpy.ndarray): target support points, shape ``(K, d)``.
        mass (numpy.ndarray): nonnegative masses, shape ``(K,)``.
        src (WeightedPoints, optional): source samples the plan was solved from.
        tgt (WeightedPoints, optional): target samples.
        src_index (numpy.ndarray, optional): sample index of each ``x0`` in ``src``.
        tgt_index (numpy.ndarray, optional): sample index of each ``x1`` in ``tgt``.
        lam0 (float): source density value.
        lam1 (float): target density value.
    """

    def __init__(self, x0, x1, mass, src=None, tgt=None, src_index=None, tgt_index=None, lam0=1.0, lam1=1.0):
        self.x0 = np.atleast_2d(np.asarray(x0, dtype=float))
        self.x1 = np.atleast_2d(np.asarray(x1, dtype=float))
        self.mass = np.asarray(mass, dtype=float).reshape(-1)
        if not len(self.x0) == len(self.x1) == len(self.mass):
            raise ConfigurationError('plan arrays must have matching lengths.', stage='transport')
        self.src = src
        self.tgt = tgt
        self.src_index = src_index
        self.tgt_index = tgt_index
        self.lam0 = float(lam0)
        self.lam1 = float(lam1)

    def __len__(self):
        return len(self.mass)

    @property
    def dimension(self):
        return self.x0.shape[1]

    @property
    def lam(self):
        r"""Target value ``lam_1 / lam_0``."""
        return self.lam1 / self.lam0

    @property
    def displacement(self):
        return self.x1 - self.x0

    def total_mass(self):
        return float(self.mass.sum())

    def cost(self):
        r"""``sum mass * |x1 - x0|^2``."""
        return float(np.sum(self.mass * np.sum(self.displacement ** 2, axis=1)))

    def swapped(self):
        r"""The inverse coupling, roles of source and target exchanged."""
        return TransportPlan(self.x1, self.x0, self.mass, self.tgt, self.src, self.tgt_index, self.src_index,
                             lam0=self.lam1, lam1=self.lam0)

    def restrict(self, keep):
        keep = np.asarray(keep)
        return TransportPlan(self.x0[keep], self.x1[keep], self.mass[keep], self.src, self.tgt,
                             None if self.src_index is None else self.src_index[keep],
                             None if self.tgt_index is None else self.tgt_index[keep], self.lam0, self.lam1)

    def dilate(self, factor):
        r"""Plan of the dilated problem ``x -> s x`` on both sides, masses times ``s^d``."""
        scale = factor ** self.dimension
        src = self.src.transformed(factor * np.eye(self.dimension), 0.0, scale) if self.src is not None else None
        tgt = self.tgt.transformed(factor * np.eye(self.dimension), 0.0, scale) if self.tgt is not None else None
        return TransportPlan(self.x0 * factor, self.x1 * factor, self.mass * scale, src, tgt, self.src_index,
                             self.tgt_index, self.lam0, self.lam1)

    def marginal_errors(self):
        r"""Largest relative deviation of each marginal from the sample weights.

        Returns:
            tuple: ``(source_error, target_error)``; ``nan`` where samples are not attached.
        """
        errors = []
        for samples, index in ((self.src, self.src_index), (self.tgt, self.tgt_index)):
            if samples is None or index is None:
                errors.append(float('nan'))
                continue
            marginal = np.bincount(index, weights=self.mass, minlength=len(samples))
            errors.append(float(np.max(np.abs(marginal - samples.weights)) / samples.weights.max()))
        return tuple(errors)

    def to_dataframe(self):
        d = self.dimension
        columns = {f'x0_{i + 1}': self.x0[:, i] for i in range(d)}
        columns.update({f'x1_{i + 1}': self.x1[:, i] for i in range(d)})
        columns['mass'] = self.mass
        return pd.DataFrame(columns)

    def to_csv(self, path):
        self.to_dataframe().to_csv(path, index=False, float_format='%.17g')

    @classmethod
    def from_csv(cls, path, lam0=1.0, lam1=1.0):
        frame = pd.read_csv(path)
        d = sum(1 for c in frame.columns if c.startswith('x0_'))
        x0 = frame[[f'x0_{i + 1}' for i in range(d)]].to_numpy()
        x1 = frame[[f'x1_{i + 1}' for i in range(d)]].to_numpy()
        return cls(x0, x1, frame['mass'].to_numpy(), lam0=lam0, lam1=lam1)

    def __repr__(self):
        return f'TransportPlan(pairs={len(self)}, d={self.dimension}, mass={self.total_mass():.6g})'


def synthetic_plan(src, transport, lam0=1.0, lam1=1.0):
    r"""Plan ``(Id x T)_# src`` pushing the source samples through an explicit map ``transport``."""
    x1 = np.asarray(transport(src.points), dtype=float)
    return TransportPlan(src.points, x1, src.weights, src=src, src_index=np.arange(len(src)),
                         lam0=lam0, lam1=lam1)


def monotonicity_defect(plan, n_pairs=100000, rng=None):
    r"""Smallest value of ``(y1 - x1) . (y0 - x0)`` over pairs of support pairs.

    All pairs are enumerated when there are at most ``n_pairs`` of them; otherwise
    ``n_pairs`` random pairs are drawn from ``rng``.
    """
    k = len(plan)
    if k < 2:
        return 0.0
    if k * (k - 1) // 2 <= n_pairs:
        i, j = np.triu_indices(k, 1)
    else:
        rng = rng if rng is not None else np.random.default_rng(0)
        i = rng.integers(0, k, n_pairs)
        j = rng.integers(0, k, n_pairs)
    products = np.sum((plan.x1[i] - plan.x1[j]) * (plan.x0[i] - plan.x0[j]), axis=1)
    return float(products.min())
