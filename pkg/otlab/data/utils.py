# -*- coding: utf-8 -*-

"""
otlab.data.utils
################
"""

import logging

from otlab.data.instance import LabInstance
from otlab.geometry.domain import normalize_tangency
from otlab.transport.entropic import solve_entropic
from otlab.transport.exact import solve_exact
from otlab.transport.local import solve_local
from otlab.transport.mapfield import extract_map
from otlab.transport.plan import synthetic_plan
from otlab.transport.sampling import balance_masses, sample_domain
from otlab.utils import Backend, PlanMode, get_family, set_color
from otlab.utils.exceptions import ConfigurationError


def solve_plan(config, src, tgt, lam0=1.0, lam1=1.0):
    r"""Run the configured transport backend on balanced samples.

    Args:
        config (Config): supplies ``backend`` and the solver parameters.
        src (WeightedPoints): source samples.
        tgt (WeightedPoints): target samples with the same total.

    Returns:
        TransportPlan: the plan.
    """
    backend = Backend(config['backend'])
    if backend == Backend.EXACT:
        return solve_exact(src, tgt, max_pairs=config['max_pairs'], assignment_backend=config['assignment_backend'],
                           lam0=lam0, lam1=lam1)
    if backend == Backend.LOCAL:
        return solve_local(src, tgt, cutoff=config['local_cutoff'], max_rounds=config['local_rounds'],
                           max_pairs=config['max_pairs'], lam0=lam0, lam1=lam1)
    return solve_entropic(src, tgt, reg=config['reg'], reg_start=config['reg_start'], reg_decay=config['reg_decay'],
                          max_iter=config['sinkhorn_max_iter'], tol=config['sinkhorn_tol'],
                          max_pairs=config['max_pairs'], lam0=lam0, lam1=lam1)


def create_instance(config):
    r"""Create the instance described by :attr:`config['family']` and its parameters.

    The domains are built by the family, normalized when the family asks for it, sampled on
    lattices of spacing ``1 / n``, coupled either by the family's explicit map
    (``plan_mode: synthetic``) or by the configured solver (``plan_mode: solve``), and the
    forward map is extracted on the source lattice.

    Args:
        config (Config): An instance object of Config, used to record parameter information.

    Returns:
        LabInstance: Constructed instance.
    """
    logger = logging.getLogger()
    generator = get_family(config['family'])(config)
    dom0, dom1 = generator.build_domains()
    frame = None
    if generator.normalize:
        dom0, dom1, frame = normalize_tangency(dom0, dom1, threshold=config['tangency_threshold'])

    h = 1.0 / config['n']
    src = sample_domain(dom0, h=h)
    mode = PlanMode(config['plan_mode'])
    if mode == PlanMode.SYNTHETIC:
        if not generator.explicit or frame is not None:
            raise ConfigurationError(f'family [{generator.name}] needs plan_mode solve.', stage='lab')
        plan = synthetic_plan(src, generator.transport, dom0.lam, dom1.lam)
    else:
        tgt = balance_masses(src, sample_domain(dom1, h=h), config['balance_tol'])
        plan = solve_plan(config, src, tgt, dom0.lam, dom1.lam)
    field = extract_map(plan, domain=dom0, coverage_limit=config['coverage_limit'])

    params = generator.params()
    params.update({'n': config['n'], 'plan_mode': mode.value})
    if mode == PlanMode.SOLVE:
        params['backend'] = Backend(config['backend']).value
    instance = LabInstance(generator.name, params, dom0, dom1, plan, field, frame, generator, config['seed'])
    logger.info(set_color('instance', 'blue') + f': {instance}')
    return instance
