# -*- coding: utf-8 -*-

"""
otlab.campanato.holder
######################
"""

import numpy as np

from otlab.utils.exceptions import CoverageError, ResolutionError

MIN_SEPARATION = 4
CHUNK = 2048


def holder_quotient(points, values, alpha, min_separation, max_separation, chunk=CHUNK):
    r"""``sup |v(x) - v(y)| / |x - y|^alpha`` over point pairs with separation in the given range.

    Args:
        points (numpy.ndarray): shape ``(N, d)``.
        values (numpy.ndarray): shape ``(N, k)``, compared in the euclidean (Frobenius) norm.

    Returns:
        float: the supremum, ``nan`` when no pair has an admissible separation.
    """
    values = values.reshape(len(values), -1)
    best = float('nan')
    for start in range(0, len(points), chunk):
        block = points[start:start + chunk]
        dist = np.linalg.norm(block[:, None, :] - points[None, :, :], axis=-1)
        jump = np.linalg.norm(values[start:start + chunk, None, :] - values[None, :, :], axis=-1)
        valid = (dist >= min_separation) & (dist <= max_separation)
        if np.any(valid):
            best = np.fmax(best, float(np.max(jump[valid] / dist[valid] ** alpha)))
    return float(best)


def holder_estimate(field, R, alpha, center=None, resolution_factor=256, min_separation=MIN_SEPARATION):
    r"""``R^{2 alpha} [grad T]^2_{alpha, B_{R/16}}`` from the map's finite-difference Jacobian.

    Pairs of valid nodes in ``B_{R/16}(center)`` with separation between ``min_separation`` cells and
    ``R / 8`` enter the supremum; ``grad T`` uses central differences where the mask allows and
    one-sided ones at its edge.

    Raises:
        ResolutionError: if the map spacing exceeds ``R / resolution_factor``.
        CoverageError: if the ball carries no Jacobian, or no pair of its nodes is far enough apart.
    """
    d = field.dimension
    h = field.h
    if h > R / resolution_factor * (1.0 + 1e-9):
        raise ResolutionError(f'map spacing [{h:.4g}] is coarser than R/{resolution_factor} for R = [{R}].',
                              stage='campanato')
    center = np.zeros(d) if center is None else np.asarray(center, dtype=float)
    jac = field.jacobian().reshape(-1, d * d)
    nodes = field.nodes().reshape(-1, d)
    finite = np.all(np.isfinite(jac), axis=1) & field.mask.reshape(-1)
    inside = finite & (np.linalg.norm(nodes - center, axis=1) < R / 16.0)
    if not np.any(inside):
        raise CoverageError(f'no Jacobian available in the ball of radius [{R / 16.0:.4g}].', stage='campanato')
    seminorm = holder_quotient(nodes[inside], jac[inside], alpha, min_separation * h * (1.0 - 1e-9), R / 8.0)
    if np.isnan(seminorm):
        raise CoverageError(f'no node pair in the ball of radius [{R / 16.0:.4g}] is {min_separation} cells '
                            f'[{min_separation * h:.4g}] apart.', stage='campanato')
    return R ** (2.0 * alpha) * seminorm ** 2
