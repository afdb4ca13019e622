# -*- coding: utf-8 -*-

"""
otlab.geometry.domain
#####################

Domains with constant density values, their affine images and the quantitative
tangency normalization at a boundary point.
"""

import logging

import numpy as np

from otlab.geometry.graph import BoundaryGraph, outward_normal
from otlab.geometry.region import AffineImageRegion, SlabRegion
from otlab.utils.exceptions import ChartRangeError, ConfigurationError, MatrixError, NormalizationError, \
    NotNearlyTangentError
from otlab.utils.matrix import normal_tilt, plane_rotation, sym_sqrtm

LAM_RANGE = (0.5, 2.0)
WINDOW_SHRINK = 0.85
BISECTION_STEPS = 64


class Domain(object):
    r"""Bounded open set carrying the constant density ``lam`` and a boundary chart at the study point.

    Args:
        side (int): 0 for the source, 1 for the target.
        lam (float): density value.
        chart (BoundaryGraph): boundary graph at the study point, the domain lying above it.
        region (AbstractRegion): global membership predicate.
        extension (callable, optional): global lower graph ``x' -> height`` used by the half-space check.
        name (str, optional): label used in reports.
        check_lam (bool): whether to enforce ``lam`` in ``[1/2, 2]``; transformed domains skip it.
        indicator_resolution (int): cells per axis of the sampled indicator.
    """

    def __init__(self, side, lam, chart, region, extension=None, name=None, check_lam=True,
                 indicator_resolution=64):
        if side not in (0, 1):
            raise ConfigurationError(f'domain side must be 0 or 1, got [{side}].', stage='geometry')
        if check_lam and not LAM_RANGE[0] <= lam <= LAM_RANGE[1]:
            raise ConfigurationError(f'density value [{lam}] outside {list(LAM_RANGE)}.', stage='geometry')
        if chart.dimension != region.dimension:
            raise ConfigurationError('chart and region dimensions disagree.', stage='geometry')
        self.side = side
        self.lam = float(lam)
        self.chart = chart
        self.region = region
        self.dimension = chart.dimension
        self.extension = extension
        self.name = name or f'omega{side}'
        self.indicator_resolution = int(indicator_resolution)

    def contains(self, points):
        return self.region.contains(points)

    def bbox(self):
        return self.region.bbox()

    def indicator(self, resolution=None):
        r"""Sampled indicator on the bounding box.

        Returns:
            tuple: ``(centers, mask, h)`` with cell centers of shape ``(N, d)``.
        """
        resolution = resolution or self.indicator_resolution
        lo, hi = self.bbox()
        h = float(np.max(hi - lo)) / resolution
        axes = [lo[i] + (np.arange(int(np.ceil((hi[i] - lo[i]) / h))) + 0.5) * h for i in range(self.dimension)]
        grids = np.meshgrid(*axes, indexing='ij')
        centers = np.stack([g.ravel() for g in grids], axis=-1)
        return centers, self.contains(centers), h

    def volume(self, resolution=None):
        _, mask, h = self.indicator(resolution)
        return float(mask.sum()) * h ** self.dimension

    def chart_consistency(self, eta=None, radius=None):
        r"""Whether membership agrees with the chart, ``x in Omega <=> x_1 > g(x')``, on chart nodes.

        Points at height ``g(x') +- eta`` are tested over the nodes with ``|x'| <= radius``.
        """
        chart = self.chart
        eta = eta or 0.25 * chart.h
        nodes = chart.node_points()
        if radius is not None and chart.chart_dimension:
            nodes = nodes[np.linalg.norm(nodes, axis=1) <= radius]
        if chart.chart_dimension:
            nodes = nodes[np.all(np.abs(nodes) < chart.half_width - chart.h, axis=1)]
        g = chart.value(nodes)
        above = np.concatenate([(g + eta)[:, None], nodes], axis=1)
        below = np.concatenate([(g - eta)[:, None], nodes], axis=1)
        return bool(np.all(self.contains(above)) and not np.any(self.contains(below)))

    # ---------------------------------------------------------- transforms

    def transform(self, matrix, shift, lam=None, name=None):
        r"""Image domain ``{M x + s}`` with its chart re-derived along ``e_1``.

        Args:
            matrix (numpy.ndarray): invertible ``d x d`` matrix ``M``.
            shift (numpy.ndarray): translation ``s``.
            lam (float, optional): density value of the image, unchanged by default.

        Returns:
            Domain: the image domain, without a global extension.
        """
        d = self.dimension
        matrix = np.asarray(matrix, dtype=float).reshape(d, d)
        shift = np.asarray(shift, dtype=float).reshape(d)
        lam = self.lam if lam is None else lam
        if abs(np.linalg.det(matrix)) < 1e-14:
            raise MatrixError('singular matrix in domain transform.', stage='geometry')
        if np.allclose(matrix, np.eye(d), rtol=0, atol=1e-15) and not np.any(shift):
            return Domain(self.side, lam, self.chart, self.region, self.extension, name or self.name,
                          check_lam=False, indicator_resolution=self.indicator_resolution)
        factor = matrix[0, 0]
        if factor > 0 and np.allclose(matrix, factor * np.eye(d), rtol=0, atol=1e-15) and not np.any(shift):
            return self.dilate(factor, lam=lam, name=name)
        chart = transformed_chart(self.chart, matrix, shift)
        region = AffineImageRegion(self.region, matrix, shift)
        return Domain(self.side, lam, chart, region, None, name or self.name, check_lam=False,
                      indicator_resolution=self.indicator_resolution)

    def dilate(self, factor, lam=None, name=None):
        r"""The domain ``factor * Omega``; closed-form charts stay closed-form."""
        d = self.dimension
        extension = None
        if self.extension is not None:
            base = self.extension
            extension = lambda xp: factor * base(np.asarray(xp) / factor)
        region = AffineImageRegion(self.region, factor * np.eye(d), np.zeros(d))
        return Domain(self.side, self.lam if lam is None else lam, self.chart.dilate(factor), region, extension,
                      name or self.name, check_lam=False, indicator_resolution=self.indicator_resolution)

    # -------------------------------------------------------- description

    def to_dict(self):
        lo, hi = self.bbox()
        chart = self.chart
        return {
            'dimension': self.dimension,
            'side': self.side,
            'lambda': self.lam,
            'name': self.name,
            'chart': {
                'alpha': chart.alpha,
                'half_width': chart.half_width,
                'n': chart.n,
                'kind': chart.kind,
                'params': chart.params,
                'samples': np.asarray(chart.samples).tolist() if chart.kind == 'samples' else None,
            },
            'bbox': [lo.tolist(), hi.tolist()],
            'indicator_resolution': self.indicator_resolution,
        }

    @classmethod
    def from_dict(cls, description):
        r"""Graph domain ``{g(x') < x_1 < top}`` from a description dictionary (see :meth:`to_dict`)."""
        chart_info = description['chart']
        d = int(description['dimension'])
        chart = BoundaryGraph(d, chart_info['half_width'], chart_info.get('n', 65), chart_info['alpha'],
                              kind=chart_info.get('kind', 'flat'), params=chart_info.get('params'),
                              samples=chart_info.get('samples'), normalized=False)
        top = description['bbox'][1][0]
        return graph_domain(description.get('side', 0), description['lambda'], chart, top,
                            name=description.get('name'),
                            indicator_resolution=description.get('indicator_resolution', 64))

    def __repr__(self):
        return f'Domain({self.name}, side={self.side}, lam={self.lam:.6g}, d={self.dimension})'


def graph_domain(side, lam, chart, top, name=None, extension=None, check_lam=True, indicator_resolution=64):
    r"""Domain above ``chart`` and below the height ``top`` over the chart window."""
    d = chart.dimension
    height_lo = -chart.sup_norm() - 1e-12
    region = SlabRegion(d, chart.value, top, chart.half_width, (height_lo, float(top)))
    return Domain(side, lam, chart, region, extension, name, check_lam=check_lam,
                  indicator_resolution=indicator_resolution)


def transformed_chart(chart, matrix, shift):
    r"""Chart of the image ``{M x + s}`` of the region above ``chart``.

    For each new tangential node ``y'`` the height ``y_1`` solves
    ``x_1 - g(x') = 0`` with ``x = M^{-1}((y_1, y') - s)``, by vectorized bisection.
    The new window is ``0.85 W / |M^{-1}| - |s|``.
    """
    d = chart.dimension
    inverse = np.linalg.inv(matrix)
    if inverse[0, 0] <= 0:
        raise MatrixError('transform reverses the normal direction of the chart.', stage='geometry')
    width = WINDOW_SHRINK * chart.half_width / np.linalg.norm(inverse, 2) - np.linalg.norm(shift)
    if width <= 0:
        raise ChartRangeError(f'transform leaves no chart window (width [{width:.3g}]).')
    window = BoundaryGraph(d, width, chart.n, chart.alpha, kind='flat', normalized=False)
    nodes = window.node_points()
    reach = np.linalg.norm(matrix, 2) * (chart.sup_norm() + chart.half_width) + np.linalg.norm(shift) + width

    def residual(y1):
        y = np.concatenate([y1[:, None], nodes], axis=1)
        x = (y - shift) @ inverse.T
        xp = np.clip(x[:, 1:], -chart.half_width, chart.half_width)
        return x[:, 0] - chart.value(xp) if d > 1 else x[:, 0] - chart.value(np.zeros((len(x), 0)))

    lo = np.full(len(nodes), -reach)
    hi = np.full(len(nodes), reach)
    if np.any(residual(lo) > 0) or np.any(residual(hi) < 0):
        raise ChartRangeError('boundary height not bracketed while re-deriving a chart.')
    for _ in range(BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        positive = residual(mid) > 0
        hi = np.where(positive, mid, hi)
        lo = np.where(positive, lo, mid)
    heights = 0.5 * (lo + hi)
    roots = (np.concatenate([heights[:, None], nodes], axis=1) - shift) @ inverse.T
    if d > 1 and np.any(np.abs(roots[:, 1:]) > chart.half_width):
        raise ChartRangeError('re-derived chart needs the original chart outside its window.')
    samples = np.asarray(heights[0]) if d == 1 else heights.reshape((chart.n,) * (d - 1))
    return BoundaryGraph(d, width, chart.n, chart.alpha, kind='samples', samples=samples, normalized=False)


class TangencyFrame(object):
    r"""Change of variables bringing two nearly tangent boundaries to the normalized position.

    The source is mapped by ``x -> Q2 B^{-1} Q1 (x - p)`` and the target by
    ``y -> Q2 B (Q1 (y - p) - b)``, where ``Q1`` turns ``nu_0(p)`` into ``-e_1``, ``B = A^{1/2}``
    with ``A`` symmetric and ``A nu_0 = nu_1``, ``b = g_1(0) e_1``, and ``Q2`` turns the common
    normal back to ``-e_1``.
    """

    def __init__(self, translation, rotation, tilt, tilt_root, shift, realignment):
        self.translation = np.asarray(translation, dtype=float)
        self.rotation = np.asarray(rotation, dtype=float)
        self.tilt = np.asarray(tilt, dtype=float)
        self.tilt_root = np.asarray(tilt_root, dtype=float)
        self.shift = np.asarray(shift, dtype=float)
        self.realignment = np.asarray(realignment, dtype=float)

    @property
    def source_matrix(self):
        return self.realignment @ np.linalg.inv(self.tilt_root) @ self.rotation

    @property
    def target_matrix(self):
        return self.realignment @ self.tilt_root @ self.rotation

    @property
    def source_shift(self):
        return -self.source_matrix @ self.translation

    @property
    def target_shift(self):
        return -self.realignment @ self.tilt_root @ (self.rotation @ self.translation + self.shift)

    @property
    def lam_factor(self):
        return abs(np.linalg.det(self.tilt_root)) ** -2

    def source(self, x):
        return np.atleast_2d(x) @ self.source_matrix.T + self.source_shift

    def target(self, y):
        return np.atleast_2d(y) @ self.target_matrix.T + self.target_shift

    def is_identity(self, tol=1e-12):
        eye = np.eye(len(self.translation))
        return (np.linalg.norm(self.target_matrix - eye) <= tol and np.linalg.norm(self.source_matrix - eye) <= tol
                and np.linalg.norm(self.translation) <= tol and np.linalg.norm(self.shift) <= tol)

    def __repr__(self):
        return (f'TangencyFrame(p={self.translation.tolist()}, b={self.shift.tolist()}, '
                f'|A-Id|={np.linalg.norm(self.tilt - np.eye(len(self.shift))):.3e})')


def normalize_tangency(dom0, dom1, p=None, threshold=1e-2):
    r"""Bring both boundaries to ``g_i(0) = 0``, ``grad' g_i(0) = 0`` with common normal ``-e_1``.

    Args:
        dom0 (Domain): source domain, ``p`` on its boundary.
        dom1 (Domain): target domain, its boundary passing through the chart window.
        p (numpy.ndarray, optional): study point, the origin by default.
        threshold (float): bound on ``g_1(0)^2 + |grad' g_1(0)|^2`` after the rotation.

    Returns:
        tuple: ``(Domain, Domain, TangencyFrame)``.
    """
    logger = logging.getLogger()
    d = dom0.dimension
    p = np.zeros(d) if p is None else np.asarray(p, dtype=float)
    eye = np.eye(d)
    e1 = eye[0]
    if abs(p[0] - dom0.chart.value(p[1:])) > dom0.chart.h:
        raise NormalizationError(f'study point {p.tolist()} is not on the source boundary.')

    rotation = plane_rotation(outward_normal(dom0.chart, p[1:]), -e1)
    rotated = dom1.transform(rotation, -rotation @ p)
    chart1 = rotated.chart
    origin = np.zeros(d - 1)
    offset = chart1.value(origin)
    slope = np.asarray(chart1.gradient(origin))
    defect = offset ** 2 + float(slope @ slope)
    if defect > threshold:
        raise NotNearlyTangentError(f'tangency defect [{defect:.3e}] exceeds the threshold [{threshold:.3e}].')

    tilt = normal_tilt(-e1, outward_normal(chart1, origin))
    tilt_root = sym_sqrtm(tilt)
    shift = offset * e1
    common = tilt_root @ (-e1)
    realignment = plane_rotation(common / np.linalg.norm(common), -e1)
    frame = TangencyFrame(p, rotation, tilt, tilt_root, shift, realignment)
    if frame.is_identity():
        logger.debug('tangency frame is the identity')
        return dom0, dom1, frame

    new0 = dom0.transform(frame.source_matrix, frame.source_shift)
    new1 = dom1.transform(frame.target_matrix, frame.target_shift, lam=dom1.lam * frame.lam_factor)
    for dom in (new0, new1):
        dom.chart._check_normalization()
    logger.info(f'tangency frame: {frame}')
    return new0, new1, frame
