# -*- coding: utf-8 -*-

import numpy as np
import pytest

from otlab.geometry import BoundaryGraph, Domain, deviation_D, graph_domain, holder_seminorm_normals, \
    normalize_tangency, outward_normal, width_delta
from otlab.geometry.region import BoxRegion
from otlab.utils import ChartRangeError, ConfigurationError, NormalizationError, NotNearlyTangentError, \
    ResolutionError


def test_flat_chart_has_constant_normal():
    g = BoundaryGraph(2, 1.0, 65, 0.5)
    xp = np.linspace(-0.9, 0.9, 7)[:, None]
    assert np.all(g.value(xp) == 0.0)
    np.testing.assert_allclose(outward_normal(g, xp), np.tile([-1.0, 0.0], (7, 1)))


def test_quadratic_chart_closed_form():
    g = BoundaryGraph(2, 1.0, 65, 0.5, kind='quadratic', params={'amplitude': 0.1})
    xp = np.array([[0.5], [-0.25]])
    np.testing.assert_allclose(g.value(xp), [0.025, 0.00625])
    np.testing.assert_allclose(g.gradient(xp)[:, 0], [0.1, -0.05])
    assert g.value([0.0]) == 0.0


def test_steep_chart_is_rejected():
    with pytest.raises(NormalizationError):
        BoundaryGraph(2, 1.0, 65, 0.5, kind='quadratic', params={'amplitude': 0.5})


def test_unnormalized_chart_is_rejected():
    with pytest.raises(NormalizationError):
        BoundaryGraph(2, 1.0, 65, 0.5, kind='affine', params={'offset': 0.1})


def test_chart_outside_window():
    g = BoundaryGraph(2, 1.0, 65, 0.5)
    with pytest.raises(ChartRangeError):
        g.value([1.5])


def test_alpha_must_lie_in_unit_interval():
    with pytest.raises(ConfigurationError):
        BoundaryGraph(2, 1.0, 65, 1.0)


def test_dilated_chart_values():
    g = BoundaryGraph(2, 1.0, 65, 0.5, kind='quadratic', params={'amplitude': 0.1})
    s = 2.0
    gs = g.dilate(s)
    y = np.array([[0.3], [-0.8], [1.6]])
    expected = np.r_[s * g.value(y[:2] / s), s * 0.1 * 0.8 ** 2]
    np.testing.assert_allclose(gs.value(y), expected)
    assert gs.half_width == pytest.approx(2.0)


def test_flat_deviation_vanishes():
    g = BoundaryGraph(2, 1.0, 257, 0.5)
    assert deviation_D(g, g, 0.5) == 0.0


def test_deviation_requires_matching_alpha():
    g0 = BoundaryGraph(2, 1.0, 257, 0.5)
    g1 = BoundaryGraph(2, 1.0, 257, 0.4)
    with pytest.raises(ConfigurationError):
        deviation_D(g0, g1, 0.5)


def test_deviation_resolution_guard():
    g = BoundaryGraph(2, 1.0, 17, 0.5, kind='quadratic', params={'amplitude': 0.05})
    with pytest.raises(ResolutionError):
        holder_seminorm_normals(g, 0.5)


def test_deviation_is_scale_invariant():
    g0 = BoundaryGraph(2, 1.0, 513, 0.5)
    g1 = BoundaryGraph(2, 1.0, 513, 0.5, kind='power', params={'amplitude': 0.05})
    D = deviation_D(g0, g1, 0.5)
    Ds = deviation_D(g0.dilate(2.0), g1.dilate(2.0), 1.0)
    assert D > 0.0
    assert Ds == pytest.approx(D, rel=1e-9)


def test_power_chart_deviation_scales_like_radius():
    # g = a |y|^{1+alpha}: [nu]_alpha is scale free, so D_R grows like R^{2 alpha}
    g0 = BoundaryGraph(2, 1.0, 1025, 0.5)
    g1 = BoundaryGraph(2, 1.0, 1025, 0.5, kind='power', params={'amplitude': 0.05})
    ratio = deviation_D(g0, g1, 0.25) / deviation_D(g0, g1, 0.5)
    assert ratio == pytest.approx(0.5, rel=0.1)


def test_width_delta():
    g0 = BoundaryGraph(2, 1.0, 65, 0.5)
    g1 = BoundaryGraph(2, 1.0, 65, 0.5, kind='quadratic', params={'amplitude': 0.1})
    assert width_delta(g0, g1, 0.5) == pytest.approx(0.025)


def test_graph_domain_membership_and_dilation():
    g = BoundaryGraph(2, 1.0, 65, 0.5, kind='quadratic', params={'amplitude': 0.1})
    dom = graph_domain(0, 1.0, g, 1.0)
    points = np.array([[0.5, 0.0], [0.05, 0.9], [0.1, 0.9], [1.5, 0.0], [0.5, 1.2]])
    np.testing.assert_array_equal(dom.contains(points), [True, False, True, False, False])
    assert dom.chart_consistency()

    big = dom.dilate(2.0)
    np.testing.assert_array_equal(big.contains(2.0 * points), dom.contains(points))
    assert big.chart.value([1.0]) == pytest.approx(2.0 * g.value([0.5]))


def test_domain_density_range():
    g = BoundaryGraph(2, 1.0, 65, 0.5)
    with pytest.raises(ConfigurationError):
        Domain(0, 3.0, g, BoxRegion([0.0, -1.0], [1.0, 1.0]))


def test_normalize_tangency_keeps_tangent_domains():
    g = BoundaryGraph(2, 1.0, 65, 0.5)
    dom0 = graph_domain(0, 1.0, g, 1.0)
    dom1 = graph_domain(1, 1.0, g, 1.0)
    new0, new1, frame = normalize_tangency(dom0, dom1)
    assert frame.is_identity()
    assert new0 is dom0 and new1 is dom1


def test_normalize_tangency_straightens_tilted_target():
    g0 = BoundaryGraph(2, 1.0, 129, 0.5)
    g1 = BoundaryGraph(2, 1.0, 129, 0.5, kind='affine', params={'slope': [0.05]}, normalized=False)
    dom0 = graph_domain(0, 1.0, g0, 1.0)
    dom1 = graph_domain(1, 1.0, g1, 1.0)
    new0, new1, frame = normalize_tangency(dom0, dom1)
    assert not frame.is_identity()
    assert abs(new1.chart.value([0.0])) <= new1.chart.h
    assert np.linalg.norm(new1.chart.gradient([0.0])) <= new1.chart.h


def test_normalize_tangency_threshold():
    g0 = BoundaryGraph(2, 1.0, 129, 0.5)
    g1 = BoundaryGraph(2, 1.0, 129, 0.5, kind='affine', params={'slope': [0.2]}, normalized=False)
    with pytest.raises(NotNearlyTangentError):
        normalize_tangency(graph_domain(0, 1.0, g0, 1.0), graph_domain(1, 1.0, g1, 1.0))
