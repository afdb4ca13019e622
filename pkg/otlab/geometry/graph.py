# -*- coding: utf-8 -*-

"""
otlab.geometry.graph
####################

Boundary charts: the boundary near the study point is the graph ``x_1 = g(x')``
over the tangential window ``(-W, W)^{d-1}``, the domain lying above it.
"""

import numpy as np
from scipy.interpolate import CubicSpline, RectBivariateSpline

from otlab.utils.exceptions import ChartRangeError, ConfigurationError, NormalizationError, ResolutionError

MAX_SLOPE = 0.25
CLOSED_FORM_KINDS = ('flat', 'affine', 'power', 'quadratic', 'cosine')


class BoundaryGraph(object):
    r"""Graph chart of a C^{1,alpha} boundary piece.

    Closed-form kinds are evaluated exactly; ``samples`` charts are interpolated by cubic
    splines so that the tangential gradient converges at the rate the Hölder estimates need.

    Args:
        dimension (int): ambient dimension ``d`` (the chart has ``d - 1`` variables).
        half_width (float): half-width ``W`` of the chart window.
        n (int): number of grid nodes per tangential axis, endpoints included.
        alpha (float): Hölder exponent in ``(0, 1)``.
        kind (str): one of ``flat``, ``affine``, ``power``, ``quadratic``, ``cosine`` or ``samples``.
        params (dict, optional): parameters of the closed form (``amplitude``, ``slope``, ``offset``,
            ``exponent``, ``length``).
        samples (numpy.ndarray, optional): node values for ``kind='samples'``.
        normalized (bool): whether to enforce ``g(0) = 0`` and ``grad g(0) = 0`` up to one grid cell.
        scale (float): internal dilation factor of closed forms, ``g_s(y) = s * g(y / s)``.
    """

    def __init__(self, dimension, half_width, n, alpha, kind='flat', params=None, samples=None,
                 normalized=True, scale=1.0):
        if kind not in CLOSED_FORM_KINDS and kind != 'samples':
            raise ConfigurationError(f'chart kind [{kind}] is not supported.', stage='geometry')
        if not 0.0 < alpha < 1.0:
            raise ConfigurationError(f'alpha [{alpha}] must lie in (0, 1).', stage='geometry')
        self.dimension = int(dimension)
        self.chart_dimension = self.dimension - 1
        self.half_width = float(half_width)
        self.n = int(n)
        self.alpha = float(alpha)
        self.kind = kind
        self.params = dict(params or {})
        self.scale = float(scale)
        self.normalized = normalized
        self.nodes_1d = np.linspace(-self.half_width, self.half_width, self.n)
        self.h = 2.0 * self.half_width / (self.n - 1)

        if kind == 'samples':
            if samples is None:
                raise ConfigurationError('a samples chart needs its node values.', stage='geometry')
            self.samples = np.asarray(samples, dtype=float)
        else:
            self.samples = self._closed_value(self.node_points()).reshape(self._grid_shape())
        self._spline = self._build_spline() if kind == 'samples' else None
        self._check_slope()
        if normalized:
            self._check_normalization()

    # ------------------------------------------------------------------ grid

    def _grid_shape(self):
        return (self.n,) * self.chart_dimension

    def node_points(self):
        r"""Tangential grid nodes as an array of shape ``(N, d - 1)``."""
        k = self.chart_dimension
        if k == 0:
            return np.zeros((1, 0))
        grids = np.meshgrid(*([self.nodes_1d] * k), indexing='ij')
        return np.stack([g.ravel() for g in grids], axis=-1)

    def _build_spline(self):
        k = self.chart_dimension
        if k == 0:
            return None
        if k == 1:
            return CubicSpline(self.nodes_1d, self.samples.reshape(-1))
        return RectBivariateSpline(self.nodes_1d, self.nodes_1d, self.samples, kx=3, ky=3)

    # ---------------------------------------------------------- closed forms

    def _closed_value(self, xp):
        s = self.scale
        y = xp / s
        p = self.params
        if self.kind == 'flat':
            base = np.zeros(len(y))
        elif self.kind == 'affine':
            slope = np.asarray(p.get('slope', [0.0] * self.chart_dimension), dtype=float)
            base = p.get('offset', 0.0) + (y @ slope if self.chart_dimension else np.zeros(len(y)))
        elif self.kind == 'power':
            exponent = p.get('exponent', 1.0 + self.alpha)
            base = p.get('amplitude', 1.0) * np.linalg.norm(y, axis=1) ** exponent
        elif self.kind == 'quadratic':
            base = p.get('amplitude', 1.0) * np.sum(y ** 2, axis=1)
        else:
            length = p.get('length', 1.0)
            base = p.get('amplitude', 1.0) * np.prod(np.cos(np.pi * y / (2.0 * length)), axis=1)
        return s * base

    def _closed_gradient(self, xp):
        s = self.scale
        y = xp / s
        p = self.params
        k = self.chart_dimension
        if self.kind == 'flat':
            return np.zeros((len(y), k))
        if self.kind == 'affine':
            slope = np.asarray(p.get('slope', [0.0] * k), dtype=float)
            return np.tile(slope, (len(y), 1))
        if self.kind == 'power':
            exponent = p.get('exponent', 1.0 + self.alpha)
            r = np.linalg.norm(y, axis=1)
            with np.errstate(divide='ignore', invalid='ignore'):
                factor = np.where(r > 0, exponent * r ** (exponent - 2.0), 0.0)
            return p.get('amplitude', 1.0) * factor[:, None] * y
        if self.kind == 'quadratic':
            return 2.0 * p.get('amplitude', 1.0) * y
        length = p.get('length', 1.0)
        c = np.cos(np.pi * y / (2.0 * length))
        sn = np.sin(np.pi * y / (2.0 * length))
        grad = np.empty_like(y)
        for i in range(k):
            others = np.prod(np.delete(c, i, axis=1), axis=1)
            grad[:, i] = -np.pi / (2.0 * length) * sn[:, i] * others
        return p.get('amplitude', 1.0) * grad

    # ------------------------------------------------------------ evaluation

    def _as_points(self, xp):
        xp = np.asarray(xp, dtype=float)
        single = xp.ndim <= 1
        xp = xp.reshape(-1, self.chart_dimension) if self.chart_dimension else np.zeros((1 if single else len(xp), 0))
        if self.chart_dimension and np.any(np.abs(xp) > self.half_width * (1.0 + 1e-12)):
            raise ChartRangeError(
                f'tangential point outside the chart window (-{self.half_width}, {self.half_width}).'
            )
        return xp, single

    def value(self, xp):
        r"""Chart value ``g(x')``; accepts one point or an array of shape ``(N, d - 1)``."""
        xp, single = self._as_points(xp)
        if self.kind != 'samples':
            out = self._closed_value(xp)
        elif self.chart_dimension == 0:
            out = np.full(len(xp), float(self.samples))
        elif self.chart_dimension == 1:
            out = self._spline(xp[:, 0])
        else:
            out = self._spline.ev(xp[:, 0], xp[:, 1])
        return float(out[0]) if single else out

    def gradient(self, xp):
        r"""Tangential gradient ``grad' g(x')`` with shape ``(d - 1,)`` or ``(N, d - 1)``."""
        xp, single = self._as_points(xp)
        k = self.chart_dimension
        if k == 0:
            out = np.zeros((len(xp), 0))
        elif self.kind != 'samples':
            out = self._closed_gradient(xp)
        elif k == 1:
            out = self._spline(xp[:, 0], 1)[:, None]
        else:
            out = np.stack([self._spline.ev(xp[:, 0], xp[:, 1], dx=1),
                            self._spline.ev(xp[:, 0], xp[:, 1], dy=1)], axis=-1)
        return out[0] if single else out

    def sup_norm(self, radius=None):
        r"""``max |g|`` over the nodes with ``|x'| <= radius`` (the whole window by default)."""
        values = np.abs(self.samples).reshape(-1)
        if radius is None or self.chart_dimension == 0:
            return float(values.max())
        inside = np.linalg.norm(self.node_points(), axis=1) <= radius * (1.0 + 1e-12)
        return float(values[inside].max()) if np.any(inside) else 0.0

    # -------------------------------------------------------------- checks

    def _check_slope(self):
        if self.chart_dimension == 0:
            return
        slope = np.linalg.norm(self.gradient(self.node_points()), axis=1).max()
        if slope > MAX_SLOPE + 1e-12:
            raise NormalizationError(f'chart slope [{slope:.4f}] exceeds {MAX_SLOPE} on the window.')

    def _check_normalization(self):
        origin = np.zeros(self.chart_dimension)
        g0 = self.value(origin)
        if abs(g0) > self.h:
            raise NormalizationError(f'chart value g(0) = [{g0:.3e}] is not zero within one grid cell.')
        if self.chart_dimension:
            grad0 = np.linalg.norm(self.gradient(origin))
            if grad0 > self.h:
                raise NormalizationError(f'chart gradient |grad g(0)| = [{grad0:.3e}] is not zero within one grid cell.')

    # ---------------------------------------------------------- transforms

    def dilate(self, factor):
        r"""Chart of ``factor * Omega``: ``g_s(y) = s g(y / s)`` on the window ``(-sW, sW)``."""
        samples = self.samples * factor if self.kind == 'samples' else None
        return BoundaryGraph(self.dimension, self.half_width * factor, self.n, self.alpha, kind=self.kind,
                             params=self.params, samples=samples, normalized=self.normalized,
                             scale=self.scale * factor)

    def __repr__(self):
        return f'BoundaryGraph(d={self.dimension}, kind={self.kind}, W={self.half_width}, n={self.n}, alpha={self.alpha})'


def outward_normal(graph, xp):
    r"""Outer unit normal of the region above the graph, ``(-1, grad' g) / sqrt(1 + |grad' g|^2)``.

    Args:
        graph (BoundaryGraph): the chart.
        xp (numpy.ndarray): one tangential point or an array of shape ``(N, d - 1)``.

    Returns:
        numpy.ndarray: unit vectors of shape ``(d,)`` or ``(N, d)``.
    """
    grad = graph.gradient(xp)
    single = grad.ndim == 1
    grad = np.atleast_2d(grad)
    normal = np.concatenate([-np.ones((len(grad), 1)), grad], axis=1)
    normal /= np.sqrt(1.0 + np.sum(grad ** 2, axis=1))[:, None]
    return normal[0] if single else normal


def holder_seminorm_normals(graph, R, min_separation=4, chunk=1024):
    r"""Hölder seminorm ``[nu]_{alpha, B_R}`` of the normal field by pair enumeration.

    Only node pairs with separation of at least ``min_separation`` grid cells enter the
    supremum.

    Args:
        graph (BoundaryGraph): chart normalized at the study point.
        R (float): radius of the tangential ball.

    Returns:
        float: the seminorm estimate.
    """
    if graph.chart_dimension == 0:
        return 0.0
    if R > graph.half_width * (1.0 + 1e-12):
        raise ChartRangeError(f'radius [{R}] exceeds the chart window [{graph.half_width}].')
    if graph.h > R / 32.0 * (1.0 + 1e-12):
        raise ResolutionError(f'chart spacing [{graph.h:.4g}] is coarser than R/32 for R = [{R}].')
    nodes = graph.node_points()
    nodes = nodes[np.linalg.norm(nodes, axis=1) <= R * (1.0 + 1e-12)]
    normals = outward_normal(graph, nodes)
    threshold = min_separation * graph.h * (1.0 - 1e-9)
    best = 0.0
    for start in range(0, len(nodes), chunk):
        block = nodes[start:start + chunk]
        dist = np.linalg.norm(block[:, None, :] - nodes[None, :, :], axis=-1)
        jump = np.linalg.norm(normals[start:start + chunk, None, :] - normals[None, :, :], axis=-1)
        valid = dist >= threshold
        if np.any(valid):
            best = max(best, float(np.max(jump[valid] / dist[valid] ** graph.alpha)))
    return best


def deviation_D(g0, g1, R):
    r"""Boundary deviation ``R^{2 alpha} ([nu_0]^2 + [nu_1]^2)`` at scale ``R``."""
    if abs(g0.alpha - g1.alpha) > 1e-12:
        raise ConfigurationError(f'charts carry different exponents [{g0.alpha}] and [{g1.alpha}].', stage='geometry')
    s0 = holder_seminorm_normals(g0, R)
    s1 = holder_seminorm_normals(g1, R)
    return R ** (2.0 * g0.alpha) * (s0 ** 2 + s1 ** 2)


def width_delta(g0, g1, R):
    r"""Boundary layer width ``||g_0||_inf + ||g_1||_inf`` over ``|x'| <= R``."""
    return g0.sup_norm(R) + g1.sup_norm(R)
