# -*- coding: utf-8 -*-

"""
otlab.quantities.checks
#######################

Topological condition of a plan and the global half-space condition of a domain.
"""

import logging

import numpy as np

from otlab.utils.exceptions import ConfigurationError

MAX_WITNESSES = 10


class TopologicalCheck(object):
    r"""Outcome of :func:`check_topological`; truthy iff the condition holds."""

    def __init__(self, passed, witnesses, forward_violations, backward_violations):
        self.passed = passed
        self.witnesses = witnesses
        self.forward_violations = forward_violations
        self.backward_violations = backward_violations

    def __bool__(self):
        return self.passed

    def to_dict(self):
        return {
            'passed': self.passed,
            'forward_violations': self.forward_violations,
            'backward_violations': self.backward_violations,
            'witnesses': [[x0.tolist(), x1.tolist()] for x0, x1 in self.witnesses],
        }

    def __repr__(self):
        return (f'TopologicalCheck(passed={self.passed}, forward={self.forward_violations}, '
                f'backward={self.backward_violations})')


def check_topological(plan, p=None, R=1.0, max_witnesses=MAX_WITNESSES):
    r"""``T(B_{R/2}(p) ∩ Omega_0) ⊂ B_R(p)`` and ``T^{-1}(B_{R/2}(p) ∩ Omega_1) ⊂ B_R(p)`` on supp plan.

    Returns:
        TopologicalCheck: with up to ``max_witnesses`` violating pairs ``(x0, x1)``.
    """
    p = np.zeros(plan.dimension) if p is None else np.asarray(p, dtype=float)
    r0 = np.linalg.norm(plan.x0 - p, axis=1)
    r1 = np.linalg.norm(plan.x1 - p, axis=1)
    forward = (r0 < 0.5 * R) & (r1 >= R)
    backward = (r1 < 0.5 * R) & (r0 >= R)
    bad = np.flatnonzero(forward | backward)
    witnesses = [(plan.x0[k].copy(), plan.x1[k].copy()) for k in bad[:max_witnesses]]
    passed = len(bad) == 0
    if not passed:
        logging.getLogger().info(f'topological condition fails at R = {R:.4g}: '
                                 f'{int(forward.sum())} forward, {int(backward.sum())} backward violations')
    return TopologicalCheck(passed, witnesses, int(forward.sum()), int(backward.sum()))


def check_global_halfspace(dom, resolution=None):
    r"""Whether the sampled indicator of ``dom`` lies strictly above its extended boundary graph.

    Raises:
        ConfigurationError: if the domain carries no global extension of its chart.
    """
    if dom.extension is None:
        raise ConfigurationError(f'{dom.name} has no global chart extension.', stage='quantities')
    centers, mask, _ = dom.indicator(resolution)
    inside = centers[mask]
    if len(inside) == 0:
        return True
    heights = dom.extension(inside[:, 1:])
    return bool(np.all(inside[:, 0] > heights - 1e-12))
