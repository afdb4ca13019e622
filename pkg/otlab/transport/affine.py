# -*- coding: utf-8 -*-

"""
otlab.transport.affine
######################

Affine changes of variables ``x0 -> B^{-T}(x0 - o)``, ``x1 -> B(x1 - o - b)`` acting on
plans, maps, samples and domains.
"""

import numpy as np

from otlab.geometry.domain import Domain
from otlab.transport.mapfield import MapField
from otlab.transport.plan import TransportPlan
from otlab.transport.sampling import WeightedPoints
from otlab.utils.exceptions import MatrixError


class AffineChange(object):
    r"""The change of variables of the one-step improvement.

    The source side moves by ``B^{-T}``, the target side by ``B(. - b)``, both after removing
    the common origin ``o``. Masses are divided by ``|det B|`` so that the source density
    keeps its value and the target value becomes ``lam |det B|^{-2}``.

    Args:
        matrix (numpy.ndarray): invertible ``B``.
        shift (numpy.ndarray): ``b``.
        origin (numpy.ndarray, optional): common translation ``o``.
    """

    def __init__(self, matrix, shift=None, origin=None):
        self.matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
        d = len(self.matrix)
        self.shift = np.zeros(d) if shift is None else np.asarray(shift, dtype=float).reshape(d)
        self.origin = np.zeros(d) if origin is None else np.asarray(origin, dtype=float).reshape(d)
        self.det = float(np.linalg.det(self.matrix))
        if abs(self.det) < 1e-14:
            raise MatrixError('singular matrix in affine change.')
        self.source_matrix = np.linalg.inv(self.matrix).T

    @classmethod
    def from_frame(cls, frame):
        r"""The change realizing a :class:`~otlab.geometry.TangencyFrame`."""
        matrix = frame.realignment @ frame.tilt_root @ frame.rotation
        return cls(matrix, frame.rotation.T @ frame.shift, frame.translation)

    @property
    def dimension(self):
        return len(self.shift)

    @property
    def mass_factor(self):
        return 1.0 / abs(self.det)

    @property
    def lam_factor(self):
        return abs(self.det) ** -2

    @property
    def source_shift(self):
        return -self.source_matrix @ self.origin

    @property
    def target_shift(self):
        return -self.matrix @ (self.origin + self.shift)

    def source(self, x):
        return np.atleast_2d(x) @ self.source_matrix.T + self.source_shift

    def target(self, y):
        return np.atleast_2d(y) @ self.matrix.T + self.target_shift

    def compose(self, inner):
        r"""The change ``self o inner`` (``inner`` applied first), origins merged into the shift."""
        matrix = self.matrix @ inner.matrix
        # target: B2 (B1 (y - o1 - b1) - o2 - b2) = B2 B1 (y - c)
        c = inner.origin + inner.shift + np.linalg.solve(inner.matrix, self.origin + self.shift)
        # source: B2^{-T} (B1^{-T} (x - o1) - o2) = (B2 B1)^{-T} (x - o)
        o = inner.origin + inner.matrix.T @ self.origin
        return AffineChange(matrix, c - o, o)

    def is_identity(self, tol=1e-14):
        return (np.linalg.norm(self.matrix - np.eye(self.dimension)) <= tol
                and np.linalg.norm(self.shift) <= tol and np.linalg.norm(self.origin) <= tol)

    def __repr__(self):
        return f'AffineChange(|B-Id|={np.linalg.norm(self.matrix - np.eye(self.dimension)):.3e}, b={self.shift.tolist()})'


def apply_affine(obj, change):
    r"""Transform a plan, map, sample set or domain pair member by ``change``.

    Args:
        obj (TransportPlan | MapField | WeightedPoints | Domain): the object; samples and
            domains are treated as source-side when their ``side`` is 0 (domains) and as
            given by ``side`` for samples (see :func:`apply_affine_samples`).
        change (AffineChange): the change of variables.

    Returns:
        same kind as ``obj``.
    """
    if isinstance(obj, TransportPlan):
        return _affine_plan(obj, change)
    if isinstance(obj, MapField):
        return _affine_map(obj, change)
    if isinstance(obj, Domain):
        if obj.side == 0:
            return obj.transform(change.source_matrix, change.source_shift)
        return obj.transform(change.matrix, change.target_shift, lam=obj.lam * change.lam_factor)
    raise TypeError(f'apply_affine does not support [{type(obj).__name__}].')


def apply_affine_samples(samples, change, side):
    r"""Transform source (``side=0``) or target (``side=1``) samples."""
    if side == 0:
        return samples.transformed(change.source_matrix, change.source_shift, change.mass_factor)
    return samples.transformed(change.matrix, change.target_shift, change.mass_factor)


def _affine_plan(plan, change):
    src = apply_affine_samples(plan.src, change, 0) if plan.src is not None else None
    tgt = apply_affine_samples(plan.tgt, change, 1) if plan.tgt is not None else None
    return TransportPlan(change.source(plan.x0), change.target(plan.x1), plan.mass * change.mass_factor, src, tgt,
                         plan.src_index, plan.tgt_index, plan.lam0, plan.lam1 * change.lam_factor)


def _affine_map(field, change):
    r"""``T^(x^) = B(T(x) - o - b)`` at ``x^ = B^{-T}(x - o)``, on the transformed lattice."""
    lattice = field.lattice.transform(change.source_matrix, change.source_shift)
    nodes = field.nodes()
    image = change.target(nodes.reshape(-1, field.dimension) + field.displacement.reshape(-1, field.dimension))
    new_nodes = lattice.centers()
    disp = (image - new_nodes).reshape(field.displacement.shape)
    disp[~field.mask] = 0.0
    return MapField(lattice, disp, field.mask, field.mass * change.mass_factor, field.lam0)
