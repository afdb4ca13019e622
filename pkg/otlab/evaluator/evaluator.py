# -*- coding: utf-8 -*-

"""
otlab.evaluator.evaluator
#########################
"""

import logging
import time

from tqdm import tqdm

from otlab.evaluator.register import criteria_dict
from otlab.utils import ConfigurationError, set_color


class Evaluator(object):
    """Evaluator checks the selected criteria and collects their results.

    The criteria come from ``config['criteria']``; all registered criteria run when it is unset.
    """

    def __init__(self, config):
        self.config = config
        self.logger = logging.getLogger()
        self.criteria = list(config['criteria'] or criteria_dict.keys())
        unknown = [c for c in self.criteria if c not in criteria_dict]
        if unknown:
            raise ConfigurationError(f'unknown acceptance criteria {unknown}, choose from {list(criteria_dict)}.')
        self.criterion_class = {c: criteria_dict[c](self.config) for c in self.criteria}

    def evaluate(self):
        """Run every selected criterion in order.

        Returns:
            dict: criterion id mapped to its :class:`CriterionResult`, e.g. ``{'2': CriterionResult(2: pass)}``.
        """
        result_dict = {}
        iterator = tqdm(self.criteria, desc=set_color('acceptance', 'pink'), ncols=100) \
            if self.config['show_progress'] else self.criteria
        for criterion in iterator:
            start = time.perf_counter()
            result = self.criterion_class[criterion].check()
            result.measurements.setdefault('seconds', time.perf_counter() - start)
            result_dict[criterion] = result
        passed = sum(r.passed for r in result_dict.values())
        self.logger.info(set_color('acceptance', 'blue') + f': {passed}/{len(result_dict)} criteria pass')
        return result_dict
