# -*- coding: utf-8 -*-

import numpy as np
import pytest

from otlab.geometry import BoundaryGraph, graph_domain
from otlab.quantities import EnergyReport, check_global_halfspace, check_topological, control_lambda, energy_E, \
    energy_report, linf_ratio, linf_statistics, sup_displacement
from otlab.transport import TransportPlan, extract_map, sample_domain, synthetic_plan
from otlab.utils import ConfigurationError, CoverageError, PreconditionError


@pytest.fixture
def upper_half():
    chart = BoundaryGraph(2, 1.0, 65, 0.5)
    return graph_domain(0, 1.0, chart, 1.0)


def _translated(dom, shift, h=1.0 / 32):
    samples = sample_domain(dom, h=h)
    plan = synthetic_plan(samples, lambda x: x + np.asarray(shift))
    return plan, extract_map(plan)


def test_identity_has_zero_energy(upper_half):
    plan, field = _translated(upper_half, [0.0, 0.0])
    assert energy_E(field, upper_half, 0.5) == 0.0


def test_translation_energy_closed_form(upper_half):
    # half of B_R lies in the domain: E = |v|^2 / (2 R^2)
    v = np.array([0.0, 0.1])
    _, field = _translated(upper_half, v)
    for R in (0.25, 0.5):
        assert energy_E(field, upper_half, R) == pytest.approx(v @ v / (2 * R ** 2), rel=0.03)


def test_energy_ball_must_meet_domain(upper_half):
    _, field = _translated(upper_half, [0.0, 0.1])
    with pytest.raises(CoverageError):
        energy_E(field, upper_half, 0.25, center=[-0.5, 0.0])


def test_energy_report_on_flat_charts(upper_half):
    plan, field = _translated(upper_half, [0.0, 0.1])
    report = energy_report(field, plan, upper_half, upper_half, 0.5)
    assert report.D == 0.0
    assert report.delta == 0.0
    assert report.M == pytest.approx(0.1)
    assert report.resolution_change < 0.05
    assert report.flags == []
    row = report.to_row()
    assert row['width_constant'] == 0.0
    assert row['flags'] == ''


def test_sup_displacement_is_anchored():
    plan = TransportPlan([[0.0], [5.0]], [[0.1], [9.0]], [1.0, 1.0])
    assert sup_displacement(plan, 1.0) == pytest.approx(0.1)
    assert sup_displacement(plan, 0.01) == 0.0


def test_control_lambda():
    plan = TransportPlan([[0.0]], [[0.0]], [1.0], lam0=1.0, lam1=1.2)
    report = EnergyReport(1.0, 0.04, 0.0)
    assert control_lambda(plan, report) == pytest.approx(1.0)
    assert control_lambda(TransportPlan([[0.0]], [[0.0]], [1.0]), EnergyReport(1.0, 0.0, 0.0)) == 0.0

    empty = EnergyReport(1.0, 0.0, 0.0)
    assert control_lambda(plan, empty) == float('inf')
    assert 'lambda-contradiction' in empty.flags


def test_linf_ratio():
    assert linf_ratio(0.1, 0.0016, 0.0, 2) == pytest.approx(0.1 / 0.2)
    assert linf_ratio(0.1, 0.0016, 0.01, 2) == pytest.approx(0.1 / 0.3)
    assert linf_ratio(0.0, 0.0, 0.0, 2) == 0.0
    assert linf_ratio(0.1, 0.0, 0.0, 2) == float('inf')


def test_linf_statistics_of_translation(upper_half):
    plan, field = _translated(upper_half, [0.0, 0.1])
    report = energy_report(field, plan, upper_half, upper_half, 0.5, two_resolutions=False)
    stats = linf_statistics(plan, report)
    assert stats.topological
    assert stats.sup == pytest.approx(0.1)
    assert stats.directional['+2'] == pytest.approx(0.1)
    assert stats.directional['-2'] == pytest.approx(-0.1)
    assert stats.ratio == pytest.approx(0.1 / report.E ** 0.25)


def test_linf_statistics_need_the_topological_condition():
    # one pair leaves B_R from B_{R/2}: the sup bound does not apply
    plan = TransportPlan([[0.1], [0.3]], [[2.0], [0.3]], [1.0, 1.0])
    report = EnergyReport(1.0, 0.01, 0.0)
    with pytest.raises(PreconditionError) as info:
        linf_statistics(plan, report)
    assert info.value.reason == 'topological'

    stats = linf_statistics(plan, report, require_topological=False)
    assert not stats.topological
    assert stats.sup == pytest.approx(1.9)
    assert np.isnan(stats.ratio)
    assert stats.to_row()['topological'] is False


def test_topological_condition_detects_long_jumps():
    # one-dimensional separation: mass near the origin is sent far away
    plan = TransportPlan([[0.1], [0.3], [-2.0]], [[2.0], [0.3], [-0.1]], [1.0, 1.0, 1.0])
    check = check_topological(plan, R=1.0)
    assert not check
    assert check.forward_violations == 1
    assert check.backward_violations == 1
    assert len(check.witnesses) == 2
    assert check.to_dict()['witnesses'][0] == [[0.1], [2.0]]


def test_topological_condition_holds_for_small_moves():
    x = np.linspace(-1, 1, 21)[:, None]
    plan = TransportPlan(x, x + 0.05, np.ones(21))
    assert check_topological(plan, R=1.0)


def test_halfspace_check_needs_extension(upper_half):
    with pytest.raises(ConfigurationError):
        check_global_halfspace(upper_half)
