# -*- coding: utf-8 -*-

"""
otlab.transport.entropic
########################

Log-domain Sinkhorn iterations with geometric annealing of the regularization.
"""

import logging

import numpy as np
import torch

from otlab.transport.plan import TransportPlan
from otlab.utils.exceptions import ConfigurationError, ConvergenceError, ImbalanceError, SizeError

CHECK_PERIOD = 10
STAGE_TOL = 1e-3
SUPPORT_CUTOFF = 1e-12


def annealing_schedule(reg, reg_start, reg_decay):
    r"""Regularizations ``max(reg, reg_start * decay^k)`` down to ``reg`` inclusive."""
    if not 0.0 < reg_decay < 1.0:
        raise ConfigurationError(f'reg_decay [{reg_decay}] must lie in (0, 1).', stage='transport')
    schedule = []
    eps = max(reg_start, reg)
    while eps > reg:
        schedule.append(eps)
        eps *= reg_decay
    schedule.append(reg)
    return schedule


def solve_entropic(src, tgt, reg=2e-3, reg_start=None, reg_decay=0.5, max_iter=20000, tol=1e-6,
                   max_pairs=4_000_000, lam0=1.0, lam1=1.0):
    r"""Entropic plan by log-domain Sinkhorn with regularization annealing.

    Potentials are carried across stages; each intermediate stage stops at a loose
    tolerance and the final stage at ``tol`` on the relative L1 column-marginal error.

    Args:
        src (WeightedPoints): source samples.
        tgt (WeightedPoints): target samples with the same total mass.
        reg (float): final regularization, ``> 0``.
        reg_start (float, optional): first regularization, ``max C`` by default.
        reg_decay (float): geometric factor between stages.
        max_iter (int): iteration budget per stage.
        tol (float): final marginal tolerance.

    Returns:
        TransportPlan: support of the entropic coupling above ``1e-12`` of its largest entry.

    Raises:
        ConvergenceError: when the final stage misses ``tol``; carries the residual.
    """
    logger = logging.getLogger()
    if reg <= 0:
        raise ConfigurationError(f'regularization [{reg}] must be positive.', stage='transport')
    n, m = len(src), len(tgt)
    m0, m1 = src.total(), tgt.total()
    if abs(m0 - m1) > 1e-9 * max(m0, m1):
        raise ImbalanceError(f'total masses differ: source {m0:.12g}, target {m1:.12g}.')
    if n * m > max_pairs:
        raise SizeError(f'{n} x {m} pairs exceed the cap of {int(max_pairs)}.')

    x = torch.as_tensor(src.points, dtype=torch.float64)
    y = torch.as_tensor(tgt.points, dtype=torch.float64)
    cost = torch.cdist(x, y) ** 2
    log_a = torch.log(torch.as_tensor(src.weights / m0, dtype=torch.float64))
    b = torch.as_tensor(tgt.weights / m1, dtype=torch.float64)
    log_b = torch.log(b)
    f = torch.zeros(n, dtype=torch.float64)
    g = torch.zeros(m, dtype=torch.float64)

    schedule = annealing_schedule(reg, float(cost.max()) if reg_start is None else reg_start, reg_decay)
    error = float('inf')
    for stage, eps in enumerate(schedule):
        final = stage == len(schedule) - 1
        target_tol = tol if final else max(tol, STAGE_TOL)
        for it in range(max_iter):
            g = -eps * torch.logsumexp((f[:, None] - cost) / eps + log_a[:, None], dim=0)
            f = -eps * torch.logsumexp((g[None, :] - cost) / eps + log_b[None, :], dim=1)
            if it % CHECK_PERIOD == 0 or it == max_iter - 1:
                log_plan = (f[:, None] + g[None, :] - cost) / eps + log_a[:, None] + log_b[None, :]
                error = float(torch.sum(torch.abs(torch.exp(log_plan).sum(dim=0) - b)))
                if error <= target_tol:
                    break
        logger.debug(f'sinkhorn stage {stage}: eps={eps:.3e}, marginal error={error:.3e}, iterations={it + 1}')
    if error > tol:
        raise ConvergenceError(f'sinkhorn stopped with marginal error [{error:.3e}] above [{tol:.1e}].',
                               residual=error)

    plan = torch.exp((f[:, None] + g[None, :] - cost) / schedule[-1] + log_a[:, None] + log_b[None, :]).numpy()
    rows, cols = np.nonzero(plan > SUPPORT_CUTOFF * plan.max())
    logger.info(f'entropic plan: eps={schedule[-1]:.3e}, {len(rows)} support entries, marginal error={error:.3e}')
    return TransportPlan(src.points[rows], tgt.points[cols], plan[rows, cols] * m0, src, tgt, rows, cols, lam0, lam1)
