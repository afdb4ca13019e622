# -*- coding: utf-8 -*-

"""
otlab.evaluator.base_criterion
##############################
"""

import logging

import numpy as np

from otlab.utils import set_color

CARRIED_KEYS = ('seed', 'reproducibility', 'state', 'out_dir', 'show_progress', 'backend', 'assignment_backend',
                'max_pairs', 'allow_3d')


def fit_exponent(xs, ys):
    r"""Slope of the least-squares line through ``(log x, log y)``."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if len(xs) < 2 or np.any(xs <= 0) or np.any(ys <= 0):
        return float('nan')
    slope, _ = np.polyfit(np.log(xs), np.log(ys), 1)
    return float(slope)


def relative_variation(values):
    r"""``max / min - 1`` over positive values, ``inf`` when some value vanishes."""
    values = np.asarray(values, dtype=float)
    if len(values) == 0:
        return float('nan')
    if values.min() <= 0:
        return 0.0 if values.max() <= 0 else float('inf')
    return float(values.max() / values.min() - 1.0)


class CriterionResult(object):
    r"""Outcome of one acceptance criterion.

    Attributes:
        criterion_id (str): the number of the criterion.
        title (str): one-line description.
        passed (bool): the verdict.
        measurements (dict): the numbers the verdict rests on.
        notes (list): reduced sizes, skipped parts and fallbacks.
    """

    def __init__(self, criterion_id, title, passed, measurements=None, notes=None):
        self.criterion_id = criterion_id
        self.title = title
        self.passed = bool(passed)
        self.measurements = measurements or {}
        self.notes = notes or []

    def to_dict(self):
        return {'criterion': self.criterion_id, 'title': self.title, 'passed': self.passed,
                'measurements': self.measurements, 'notes': self.notes}

    def __repr__(self):
        verdict = 'pass' if self.passed else 'FAIL'
        return f'CriterionResult({self.criterion_id}: {verdict})'


class AbstractCriterion(object):
    r""":class:`AbstractCriterion` is the base object of all acceptance criteria. A criterion
    builds its own instances from the lab configuration and judges one property.

    Args:
        config (Config): the lab configuration; seeds, solver backends and output settings carry over.
    """
    criterion_id = None
    title = None

    def __init__(self, config):
        self.config = config
        self.logger = logging.getLogger()
        self.seed = config['seed']

    def instance_config(self, family, **overrides):
        r"""A validated configuration of ``family`` with the carried settings and ``overrides``."""
        from otlab.config import Config

        values = {key: self.config[key] for key in CARRIED_KEYS if key in self.config}
        values.update(overrides)
        return Config(family=family, config_dict=values, cmd_args=[])

    def result(self, passed, measurements=None, notes=None):
        outcome = CriterionResult(self.criterion_id, self.title, passed, measurements, notes)
        color = 'green' if outcome.passed else 'red'
        self.logger.info(set_color(f'acceptance {self.criterion_id}', color) + f': {self.title} -> '
                         f'{"pass" if outcome.passed else "fail"}')
        return outcome

    def check(self):
        r"""Run the experiment behind the criterion.

        Returns:
            CriterionResult: the verdict with its measurements.
        """
        raise NotImplementedError('Method [check] should be implemented.')
