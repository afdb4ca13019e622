# -*- coding: utf-8 -*-

"""
otlab.data.instance
###################
"""

import os

from otlab.utils import ensure_dir


class LabInstance(object):
    r"""One concrete transport problem with its plan and its extracted map.

    Attributes:
        family (str): family name.
        params (dict): parameters of the family, ``n`` and the plan mode.
        dom0 (Domain), dom1 (Domain): normalized source and target domains.
        plan (TransportPlan): the coupling.
        field (MapField): the forward map on the source lattice.
        frame (TangencyFrame): the normalization applied to the family's domains, if any.
        generator (AbstractFamily): the family object, for its explicit map.
    """

    def __init__(self, family, params, dom0, dom1, plan, field, frame=None, generator=None, seed=None):
        self.family = family
        self.params = params
        self.dom0 = dom0
        self.dom1 = dom1
        self.plan = plan
        self.field = field
        self.frame = frame
        self.generator = generator
        self.seed = seed

    @property
    def dimension(self):
        return self.dom0.dimension

    @property
    def h(self):
        return self.field.h

    def describe(self):
        return {
            'family': self.family,
            'params': self.params,
            'seed': self.seed,
            'omega0': self.dom0.to_dict(),
            'omega1': self.dom1.to_dict(),
            'pairs': len(self.plan),
            'mass': self.plan.total_mass(),
            'cost': self.plan.cost(),
            'valid_cells': int(self.field.mask.sum()),
        }

    def save(self, out_dir):
        r"""Write ``plan.csv`` and ``map.csv`` under ``out_dir``."""
        ensure_dir(out_dir)
        self.plan.to_csv(os.path.join(out_dir, 'plan.csv'))
        self.field.to_csv(os.path.join(out_dir, 'map.csv'))

    def __repr__(self):
        return f'LabInstance({self.family}, {self.plan}, {self.field})'
