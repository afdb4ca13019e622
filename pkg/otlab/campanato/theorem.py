# -*- coding: utf-8 -*-

"""
otlab.campanato.theorem
#######################

End-to-end verification of the boundary C^{1,alpha} estimate on one instance:
solve, measure, approximate, iterate and estimate the Hölder seminorm.
"""

import json
import logging

import numpy as np

from otlab.campanato.holder import holder_estimate
from otlab.campanato.ladder import RESOLUTION_FACTOR, iterate
from otlab.campanato.one_step import check_preconditions
from otlab.quantities.checks import check_topological
from otlab.quantities.energy import control_lambda, energy_report
from otlab.quantities.linf import linf_statistics
from otlab.utils import ReportStatus, set_color
from otlab.utils.exceptions import CoverageError, PreconditionError, ResolutionError


def safe_ratio(numerator, denominator):
    r"""``numerator / denominator`` with ``0 / 0 = 0`` and ``x / 0 = inf``."""
    if numerator == 0.0:
        return 0.0
    if denominator <= 0.0:
        return float('inf')
    return float(numerator / denominator)


def _plain(value):
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, (np.floating, np.integer, np.bool_)):
        return value.item()
    return value


class RegularityReport(object):
    r"""Everything measured while verifying the estimate on one instance.

    Attributes:
        family (str): instance family.
        params (dict): the parameters that determine the instance.
        status (str): ``pass``, ``fail`` or ``precondition-failed: <reason>``.
        epsilon (float): ``E_R + D_R`` at the study scale.
        energy (EnergyReport): the scalar diagnostics at ``R``.
        ladder (CampanatoLadder): the affine approximations, ``None`` when the preconditions fail.
        holder (float): ``R^{2 alpha} [grad T]^2_{alpha, B_{R/16}}``, ``None`` when the map is too coarse.
        clauses (dict): ``name -> {'value', 'bound', 'passed'}``; ``passed`` is ``None`` for skipped clauses.
    """

    def __init__(self, family, params, status, epsilon, energy, lambda_control=float('nan'), linf=None,
                 topological=None, ladder=None, holder=None, clauses=None, notes=None):
        self.family = family
        self.params = params
        self.status = status
        self.epsilon = epsilon
        self.energy = energy
        self.lambda_control = lambda_control
        self.linf = linf
        self.topological = topological or {}
        self.ladder = ladder
        self.holder = holder
        self.clauses = clauses or {}
        self.notes = notes or []

    @property
    def passed(self):
        return self.status == ReportStatus.PASS.value

    def holder_constant(self):
        return float('nan') if self.holder is None else safe_ratio(self.holder, self.epsilon)

    def to_dict(self):
        ladder = None
        if self.ladder is not None:
            ladder = {
                'status': self.ladder.status,
                'theta': self.ladder.theta,
                'alpha': self.ladder.alpha,
                'beta': self.ladder.beta,
                'decay_constant': self.ladder.decay_constant(),
                'contraction_constant': self.ladder.contraction_constant(),
                'frame_bound': self.ladder.frame_bound(),
                'levels': self.ladder.to_dataframe().to_dict(orient='records'),
                'steps': [lv.step.to_dict() for lv in self.ladder.levels if lv.step is not None],
                'diagnostic': self.ladder.diagnostic,
            }
        return _plain({
            'family': self.family,
            'params': self.params,
            'status': self.status,
            'epsilon': self.epsilon,
            'energy': self.energy.to_row(),
            'lambda_control': self.lambda_control,
            'linf': None if self.linf is None else self.linf.to_row(),
            'topological': self.topological,
            'ladder': ladder,
            'holder': self.holder,
            'holder_constant': self.holder_constant(),
            'clauses': self.clauses,
            'notes': self.notes,
        })

    def to_json(self, path=None):
        text = json.dumps(self.to_dict(), indent=2, sort_keys=True)
        if path is not None:
            with open(path, 'w', encoding='utf-8') as f:
                f.write(text + '\n')
        return text

    def to_row(self):
        r"""Flat row for the aggregate CSV of an experiment."""
        row = {'family': self.family, 'status': self.status, 'epsilon': self.epsilon, 'E': self.energy.E,
               'D': self.energy.D, 'lambda_control': self.lambda_control,
               'linf_ratio': float('nan') if self.linf is None else self.linf.ratio,
               'holder': float('nan') if self.holder is None else self.holder,
               'holder_constant': self.holder_constant()}
        if self.ladder is not None:
            row.update({'depth': self.ladder.depth, 'decay_constant': self.ladder.decay_constant(),
                        'frame_bound': self.ladder.frame_bound()})
        for key, value in self.params.items():
            if np.isscalar(value):
                row[f'param_{key}'] = value
        return row

    def __repr__(self):
        return f'RegularityReport({self.family}, status={self.status}, epsilon={self.epsilon:.3e})'


def _clause(value, bound):
    return {'value': value, 'bound': bound, 'passed': bool(value <= bound)}


def verify_theorem(config, instance=None):
    r"""Run the full pipeline on one instance and judge every acceptance clause.

    Args:
        config (Config): experiment configuration.
        instance (LabInstance, optional): a prepared instance, built from ``config`` otherwise.

    Returns:
        RegularityReport: ``precondition-failed: <reason>`` when the instance is not well prepared
        at the study scale, which is not a regularity failure.
    """
    from otlab.data import create_instance

    logger = logging.getLogger()
    instance = instance if instance is not None else create_instance(config)
    plan, field, dom0, dom1 = instance.plan, instance.field, instance.dom0, instance.dom1
    R = config['radius']
    alpha = config['alpha']

    energy = energy_report(field, plan, dom0, dom1, R, coverage_limit=config['coverage_limit'])
    epsilon = energy.E + energy.D
    lam_control = control_lambda(plan, energy)
    linf = linf_statistics(plan, energy, require_topological=False)
    topological = check_topological(plan, R=R).to_dict()
    notes = list(energy.flags)
    logger.info(set_color('epsilon', 'blue') + f': {epsilon:.4e} (E = {energy.E:.4e}, D = {energy.D:.4e})')

    try:
        check_preconditions(plan, dom0, dom1, R, energy.E, energy.D, config['smallness'])
    except PreconditionError as e:
        logger.warning(set_color('precondition failed', 'yellow') + f': {e}')
        status = f'{ReportStatus.PRECONDITION_FAILED.value}: {e.reason}'
        return RegularityReport(instance.family, instance.params, status, epsilon, energy, lam_control, linf,
                                topological, notes=notes + [str(e)])

    ladder = iterate(field, plan, dom0, dom1, R=R, depth=config['depth'], theta=config['theta'], alpha=alpha,
                     min_cells=config['ladder_min_cells'] or RESOLUTION_FACTOR, smallness=config['smallness'],
                     show_progress=config['show_progress'], r=config['harmonic_radius'], tau=config['tau'],
                     n_poisson=config['neumann_n'])
    if ladder.status.startswith(ReportStatus.PRECONDITION_FAILED.value):
        return RegularityReport(instance.family, instance.params, ladder.status, epsilon, energy, lam_control,
                                linf, topological, ladder, notes=notes + [ladder.diagnostic.get('message', '')])
    if ladder.status != 'complete':
        notes.append(f'ladder {ladder.status}')

    try:
        holder = holder_estimate(field, R, alpha, resolution_factor=config['holder_resolution'])
    except (ResolutionError, CoverageError) as e:
        logger.warning(f'Hölder estimate skipped: {e}')
        holder = None
        notes.append(f'holder skipped: {e}')

    clauses = {
        'decay': _clause(ladder.decay_constant(), config['ladder_constant_cap']),
        'frame': _clause(safe_ratio(ladder.frame_bound(), epsilon), config['ladder_constant_cap']),
        'lambda': _clause(lam_control, config['lambda_constant_cap']),
    }
    if len(ladder.levels) > 1:
        step = ladder.levels[1].step
        lhs = np.linalg.norm(step.B - np.eye(step.dimension)) ** 2 + np.sum(step.b ** 2) / R ** 2
        clauses['step'] = _clause(safe_ratio(float(lhs), epsilon), config['step_constant_cap'])
    if holder is None:
        clauses['holder'] = {'value': None, 'bound': config['holder_constant_cap'], 'passed': None}
    else:
        clauses['holder'] = _clause(safe_ratio(holder, epsilon), config['holder_constant_cap'])

    failed = [name for name, clause in clauses.items() if clause['passed'] is False]
    status = ReportStatus.FAIL.value if failed else ReportStatus.PASS.value
    if failed:
        notes.append('failed clauses: ' + ', '.join(failed))
    report = RegularityReport(instance.family, instance.params, status, epsilon, energy, lam_control, linf,
                              topological, ladder, holder, clauses, notes)
    logger.info(set_color('regularity report', 'green') + f': {report}')
    return report
