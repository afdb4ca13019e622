# -*- coding: utf-8 -*-

"""
otlab.transport.local
#####################

Exact transport restricted to short pairs, for lattices whose dense cost matrix exceeds the pair cap.

The linear program is solved on the pairs closer than a cutoff; its dual potentials are then
checked on a wider neighbourhood and the cutoff grows until no pair there prices below cost.
"""

import logging

import numpy as np
from scipy.optimize import linprog
from scipy.sparse import coo_matrix
from scipy.spatial import cKDTree

from otlab.transport.plan import TransportPlan
from otlab.utils.exceptions import ConvergenceError, ImbalanceError, SizeError

MASS_TOL = 1e-9
DUAL_TOL = 1e-7
SUPPORT_CUTOFF = 1e-10
SPACING_CELLS = 4


def _spacing(points):
    if len(points) < 2:
        return 1.0
    dist, _ = cKDTree(points).query(points, k=2)
    return float(np.median(dist[:, 1]))


def candidate_pairs(src_points, tgt_tree, cutoff):
    r"""Index pairs ``(i, j)`` with ``|x_i - y_j| <= cutoff``, sorted by source."""
    neighbours = tgt_tree.query_ball_point(src_points, cutoff)
    counts = np.fromiter((len(k) for k in neighbours), dtype=np.int64, count=len(neighbours))
    rows = np.repeat(np.arange(len(src_points)), counts)
    cols = np.concatenate([np.asarray(k, dtype=np.int64) for k in neighbours]) if counts.sum() else \
        np.zeros(0, dtype=np.int64)
    return rows, cols, counts


def solve_local(src, tgt, cutoff=None, max_rounds=6, growth=2.0, check_factor=1.5, max_pairs=4_000_000,
                lam0=1.0, lam1=1.0):
    r"""Optimal plan for the quadratic cost computed on pairs shorter than a growing cutoff.

    Optimality is certified on all pairs within ``check_factor * cutoff``: the dual potentials of
    the restricted program must satisfy ``u_i + v_j <= |x_i - y_j|^2`` there.

    Args:
        src (WeightedPoints): source samples.
        tgt (WeightedPoints): target samples with the same total mass.
        cutoff (float, optional): first cutoff, four sample spacings by default.
        max_rounds (int): number of cutoffs tried.
        growth (float): factor between consecutive cutoffs.
        check_factor (float): radius of the dual check relative to the cutoff.
        max_pairs (int): cap on the number of candidate pairs.

    Returns:
        TransportPlan: plan with its support pairs and sample indices.

    Raises:
        ImbalanceError: if the totals differ by more than ``1e-9`` relative.
        SizeError: if the candidate pairs exceed ``max_pairs``.
        ConvergenceError: if no cutoff within ``max_rounds`` yields a certified plan.
    """
    logger = logging.getLogger()
    n, m = len(src), len(tgt)
    m0, m1 = src.total(), tgt.total()
    if abs(m0 - m1) > MASS_TOL * max(m0, m1):
        raise ImbalanceError(f'total masses differ: source {m0:.12g}, target {m1:.12g}.')
    spacing = src.lattice.spacing if src.lattice is not None else _spacing(src.points)
    cutoff = SPACING_CELLS * spacing if cutoff is None else float(cutoff)

    # unit masses and costs keep the solver tolerances meaningful
    unit = float(max(src.weights.max(), tgt.weights.max()))
    rhs = np.concatenate([src.weights, tgt.weights * (m0 / m1)]) / unit
    tree = cKDTree(tgt.points)

    for round_ in range(max_rounds):
        rows, cols, counts = candidate_pairs(src.points, tree, cutoff)
        if len(rows) > max_pairs:
            raise SizeError(f'{len(rows)} candidate pairs at cutoff [{cutoff:.4g}] exceed the cap of '
                            f'{int(max_pairs)}.')
        covered = counts.min() > 0 and len(np.unique(cols)) == m if len(rows) else False
        if not covered:
            logger.debug(f'cutoff {cutoff:.4g} leaves samples without a partner')
            cutoff *= growth
            continue

        scale = cutoff ** 2
        cost = np.sum((src.points[rows] - tgt.points[cols]) ** 2, axis=1) / scale
        pairs = np.arange(len(rows))
        A = coo_matrix((np.ones(2 * len(rows)), (np.concatenate([rows, n + cols]), np.concatenate([pairs, pairs]))),
                       shape=(n + m, len(rows))).tocsr()
        res = linprog(cost, A_eq=A, b_eq=rhs, bounds=(0, None), method='highs')
        if res.status == 2:
            logger.debug(f'cutoff {cutoff:.4g} is infeasible')
            cutoff *= growth
            continue
        if not res.success:
            raise ConvergenceError(f'restricted transport program failed: {res.message}')

        duals = res.eqlin.marginals
        u, v = duals[:n], duals[n:]
        wide_rows, wide_cols, _ = candidate_pairs(src.points, tree, check_factor * cutoff)
        reduced = np.sum((src.points[wide_rows] - tgt.points[wide_cols]) ** 2, axis=1) / scale \
            - u[wide_rows] - v[wide_cols]
        worst = float(reduced.min()) if len(reduced) else 0.0
        logger.debug(f'round {round_}: cutoff {cutoff:.4g}, {len(rows)} pairs, worst reduced cost {worst:.3e}')
        if worst >= -DUAL_TOL:
            flow = res.x * unit
            keep = flow > SUPPORT_CUTOFF * flow.max()
            si, ti = rows[keep], cols[keep]
            logger.info(f'local plan: cutoff {cutoff:.4g}, {len(rows)} candidate pairs, {int(keep.sum())} support '
                        f'pairs')
            return TransportPlan(src.points[si], tgt.points[ti], flow[keep], src, tgt, si, ti, lam0, lam1)
        cutoff *= growth

    raise ConvergenceError(f'no certified plan within {max_rounds} cutoffs, last [{cutoff / growth:.4g}].')
