# -*- coding: utf-8 -*-

"""
otlab.data.families
###################

Built-in instance families. A family turns the configuration into a source and a target
domain, normalized at the origin, and, when it knows one, the explicit optimal map.

Families named here are looked up by :func:`otlab.utils.get_family`.
"""

import numpy as np

from otlab.geometry.domain import Domain, graph_domain
from otlab.geometry.graph import BoundaryGraph
from otlab.geometry.region import AffineImageRegion, BoxRegion, UnionRegion
from otlab.utils.exceptions import ConfigurationError


class AbstractFamily(object):
    r"""Base of all instance families.

    Source domains are the box ``{0 < x_1 < height, |x'_i| < extent}`` above a flat chart unless a
    family says otherwise.

    Attributes:
        explicit (bool): whether :meth:`transport` is the optimal map of the instance.
        normalize (bool): whether the domains need the tangency normalization before sampling.
        dimensions (tuple): supported ambient dimensions.
    """

    name = None
    explicit = False
    normalize = False
    dimensions = (1, 2, 3)

    def __init__(self, config):
        self.config = config
        self.dimension = int(config['dimension'])
        if self.dimension not in self.dimensions:
            raise ConfigurationError(f'family [{self.name}] does not support dimension [{self.dimension}].',
                                     stage='lab')
        self.alpha = config['alpha']
        self.extent = config['extent']
        self.height = config['height']
        self.chart_nodes = config['chart_nodes']
        self.lam0 = config['lam0']

    def params(self):
        r"""Parameters that determine the instance, recorded in the reports."""
        return {'dimension': self.dimension, 'extent': self.extent, 'height': self.height, 'alpha': self.alpha}

    def chart(self, kind='flat', params=None, half_width=None, normalized=True):
        return BoundaryGraph(self.dimension, half_width or self.extent, self.chart_nodes, self.alpha, kind=kind,
                             params=params, normalized=normalized)

    def source(self):
        return graph_domain(0, self.lam0, self.chart(), self.height, name='omega0')

    def build_domains(self):
        r"""Return ``(dom0, dom1)``."""
        raise NotImplementedError('Method [build_domains] should be implemented.')

    def transport(self, points):
        r"""The explicit optimal map evaluated at ``points`` of shape ``(N, d)``."""
        raise ConfigurationError(f'family [{self.name}] has no explicit optimal map; use plan_mode solve.',
                                 stage='lab')

    def __repr__(self):
        return f'{type(self).__name__}({self.params()})'


class Identity(AbstractFamily):
    r"""``Omega_1 = Omega_0``, ``T = Id``."""

    name = 'identity'
    explicit = True

    def build_domains(self):
        dom0 = self.source()
        return dom0, graph_domain(1, self.lam0, self.chart(), self.height, name='omega1')

    def transport(self, points):
        return np.array(points, dtype=float)


class Translation(AbstractFamily):
    r"""Tangential translation ``T(x) = x + v`` with ``v_1 = 0``."""

    name = 'translation'
    explicit = True
    dimensions = (2, 3)

    def __init__(self, config):
        super().__init__(config)
        shift = np.zeros(self.dimension)
        given = np.asarray(config['shift'], dtype=float).reshape(-1)[:self.dimension]
        shift[:len(given)] = given
        if shift[0] != 0.0:
            raise ConfigurationError(f'translation must be tangential, got v_1 = [{shift[0]}].', stage='lab')
        if np.linalg.norm(shift) >= self.extent:
            raise ConfigurationError(f'shift [{shift.tolist()}] leaves no chart window.', stage='lab')
        self.shift = shift

    def params(self):
        params = super().params()
        params['shift'] = self.shift.tolist()
        return params

    def build_domains(self):
        dom0 = self.source()
        chart = self.chart(half_width=self.extent - np.linalg.norm(self.shift))
        region = AffineImageRegion(dom0.region, np.eye(self.dimension), self.shift)
        return dom0, Domain(1, self.lam0, chart, region, name='omega1')

    def transport(self, points):
        return np.asarray(points, dtype=float) + self.shift


class Dilation(AbstractFamily):
    r"""Target value ``lam``: ``Omega_1 = s Omega_0`` and ``T(x) = s x`` with ``s = (lam_0 / lam_1)^{1/d}``."""

    name = 'dilation'
    explicit = True

    def __init__(self, config):
        super().__init__(config)
        self.lam1 = config['lam']
        self.factor = (self.lam0 / self.lam1) ** (1.0 / self.dimension)

    def params(self):
        params = super().params()
        params['lam'] = self.lam1
        return params

    def build_domains(self):
        dom0 = self.source()
        d = self.dimension
        region = AffineImageRegion(dom0.region, self.factor * np.eye(d), np.zeros(d))
        return dom0, Domain(1, self.lam1, dom0.chart.dilate(self.factor), region, name='omega1')

    def transport(self, points):
        return self.factor * np.asarray(points, dtype=float)


class Saddle(AbstractFamily):
    r"""``T = grad u`` with ``u = |x|^2 / 2 + a (x_1^2 - x_2^2) / 2`` on a flat-bottom box."""

    name = 'saddle'
    explicit = True
    dimensions = (2,)

    def __init__(self, config):
        super().__init__(config)
        self.a = config['saddle']
        if not 0.0 <= abs(self.a) < 0.5:
            raise ConfigurationError(f'saddle parameter [{self.a}] must satisfy |a| < 1/2.', stage='lab')
        self.matrix = np.diag([1.0 + self.a, 1.0 - self.a])

    def params(self):
        params = super().params()
        params['saddle'] = self.a
        return params

    def build_domains(self):
        dom0 = self.source()
        lam1 = self.lam0 / ((1.0 + self.a) * (1.0 - self.a))
        chart = self.chart(half_width=(1.0 - self.a) * self.extent)
        region = AffineImageRegion(dom0.region, self.matrix, np.zeros(2))
        return dom0, Domain(1, lam1, chart, region, name='omega1')

    def transport(self, points):
        return np.asarray(points, dtype=float) @ self.matrix.T


class Remark33(AbstractFamily):
    r"""Separation of the boundary layer in one dimension.

    ``Omega_0 = (0, 2)`` and ``Omega_1 = (-1 - eps, -1) ∪ (0, 2 - eps)``, unit densities. The
    monotone map sends ``(0, eps)`` to the detached piece, ``T(x) = x - 1 - eps``, and the rest
    by ``T(x) = x - eps``; it violates the topological condition at every scale ``R <= 1``.
    """

    name = 'remark33'
    explicit = True
    dimensions = (1,)
    length = 2.0

    def __init__(self, config):
        super().__init__(config)
        self.eps = config['eps']
        if not 0.0 < self.eps < 1.0:
            raise ConfigurationError(f'eps [{self.eps}] must lie in (0, 1).', stage='lab')

    def params(self):
        return {'dimension': self.dimension, 'eps': self.eps}

    def _tangential(self):
        d = self.dimension
        return np.full(d - 1, -self.extent), np.full(d - 1, self.extent)

    def build_domains(self):
        lo, hi = self._tangential()
        eps = self.eps
        region0 = BoxRegion(np.concatenate([[0.0], lo]), np.concatenate([[self.length], hi]))
        region1 = UnionRegion([
            BoxRegion(np.concatenate([[-1.0 - eps], lo]), np.concatenate([[-1.0], hi])),
            BoxRegion(np.concatenate([[0.0], lo]), np.concatenate([[self.length - eps], hi])),
        ])
        dom0 = Domain(0, self.lam0, self.chart(), region0, name='omega0')
        dom1 = Domain(1, self.lam0, self.chart(), region1, name='omega1')
        return dom0, dom1

    def transport(self, points):
        points = np.array(points, dtype=float)
        x1 = points[:, 0]
        points[:, 0] = np.where(x1 < self.eps, x1 - 1.0 - self.eps, x1 - self.eps)
        return points


class Remark33Product(Remark33):
    r"""The one-dimensional separation times ``(-extent, extent)^{d-1}``."""

    name = 'remark33-product'
    dimensions = (2, 3)


class FlatPerturbation(AbstractFamily):
    r"""Flat source against the target graph ``a |x'|^2``; the map comes from the solver."""

    name = 'flat-perturbation'
    dimensions = (2, 3)
    kind = 'quadratic'

    def __init__(self, config):
        super().__init__(config)
        self.amplitude = config['amplitude']

    def params(self):
        params = super().params()
        params['amplitude'] = self.amplitude
        return params

    def target_chart(self):
        return self.chart(kind=self.kind, params={'amplitude': self.amplitude})

    def build_domains(self):
        dom0 = self.source()
        chart = self.target_chart()
        # equal volumes: the top rises by the mean height of the graph
        top = self.height + float(np.mean(chart.samples))
        return dom0, graph_domain(1, self.lam0, chart, top, name='omega1')


class PowerGraph(FlatPerturbation):
    r"""Flat source against the target graph ``amplitude |x'|^{1 + alpha}``, exactly ``C^{1, alpha}`` at 0."""

    name = 'power-graph'
    kind = 'power'

    def target_chart(self):
        return self.chart(kind=self.kind, params={'amplitude': self.amplitude, 'exponent': 1.0 + self.alpha})


class TiltedTangency(FlatPerturbation):
    r"""Target boundary tilted by ``angle`` and lifted by ``offset``: nearly, not exactly, tangent.

    The domains go through the tangency normalization before sampling.
    """

    name = 'tilted-tangency'
    normalize = True

    def __init__(self, config):
        super().__init__(config)
        self.angle = config['angle']
        self.offset = config['offset'] or 0.0

    def params(self):
        params = AbstractFamily.params(self)
        params.update({'angle': self.angle, 'offset': self.offset})
        return params

    def target_chart(self):
        slope = [self.angle] + [0.0] * (self.dimension - 2)
        return self.chart(kind='affine', params={'slope': slope, 'offset': self.offset}, normalized=False)


family_dict = {
    cls.name: cls for cls in (Identity, Translation, Dilation, Saddle, Remark33, Remark33Product,
                              FlatPerturbation, PowerGraph, TiltedTangency)
}

family_aliases = {
    'perturbation': 'flat-perturbation',
}
