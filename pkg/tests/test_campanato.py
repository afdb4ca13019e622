# -*- coding: utf-8 -*-

import numpy as np
import pytest

from otlab.campanato import CampanatoLadder, LadderLevel, build_affine_step, check_preconditions, \
    holder_estimate, holder_quotient, one_step, safe_ratio, verify_theorem
from otlab.config import Config
from otlab.data import create_instance
from otlab.geometry import BoundaryGraph, graph_domain
from otlab.transport import Lattice, MapField, TransportPlan
from otlab.utils import CoverageError, PreconditionError, ResolutionError, SymmetryError


@pytest.fixture
def flat_pair():
    chart = BoundaryGraph(2, 1.0, 65, 0.5)
    return graph_domain(0, 1.0, chart, 1.0), graph_domain(1, 1.0, chart, 1.0)


def _config(family, **updates):
    return Config(family=family, config_dict=updates, cmd_args=[])


def test_safe_ratio():
    assert safe_ratio(0.0, 0.0) == 0.0
    assert safe_ratio(1.0, 0.0) == float('inf')
    assert safe_ratio(1.0, 4.0) == 0.25


def test_trivial_affine_step(flat_pair):
    dom0, dom1 = flat_pair
    step = build_affine_step(np.zeros(2), np.zeros((2, 2)), dom0.chart, dom1.chart)
    np.testing.assert_allclose(step.B, np.eye(2), atol=1e-14)
    np.testing.assert_allclose(step.b, 0.0, atol=1e-14)
    assert step.change().is_identity(1e-12)


def test_diagonal_hessian_gives_exponential_step(flat_pair):
    dom0, dom1 = flat_pair
    step = build_affine_step(np.zeros(2), np.diag([0.1, -0.1]), dom0.chart, dom1.chart)
    np.testing.assert_allclose(step.B, np.diag(np.exp([-0.05, 0.05])), atol=1e-12)
    assert step.rotation_defect == pytest.approx(0.0, abs=1e-12)
    assert step.block_defect == 0.0


def test_tangential_shift_lands_on_target_boundary():
    chart0 = BoundaryGraph(2, 1.0, 257, 0.5)
    chart1 = BoundaryGraph(2, 1.0, 257, 0.5, kind='quadratic', params={'amplitude': 0.1})
    step = build_affine_step(np.array([0.0, 0.2]), np.zeros((2, 2)), chart0, chart1)
    assert step.b[0] == pytest.approx(0.1 * 0.2 ** 2, rel=1e-6)
    assert step.b[1] == pytest.approx(0.2)


def test_asymmetric_hessian_is_rejected(flat_pair):
    dom0, dom1 = flat_pair
    with pytest.raises(SymmetryError):
        build_affine_step(np.zeros(2), np.array([[0.0, 0.1], [-0.1, 0.0]]), dom0.chart, dom1.chart)


def test_preconditions(flat_pair):
    dom0, dom1 = flat_pair
    x = np.array([[0.1, 0.0], [0.2, 0.3]])
    calm = TransportPlan(x, x + 0.01, [1.0, 1.0])
    check_preconditions(calm, dom0, dom1, 1.0, 0.01, 0.0)

    with pytest.raises(PreconditionError) as info:
        check_preconditions(calm, dom0, dom1, 1.0, 0.2, 0.0)
    assert info.value.reason == 'smallness'

    jumping = TransportPlan(x, x + [0.0, 2.0], [1.0, 1.0])
    with pytest.raises(PreconditionError) as info:
        check_preconditions(jumping, dom0, dom1, 1.0, 0.01, 0.0)
    assert info.value.reason == 'topological'


def test_preconditions_need_normalized_charts(flat_pair):
    dom0, _ = flat_pair
    lifted = BoundaryGraph(2, 1.0, 65, 0.5, kind='affine', params={'offset': 0.05}, normalized=False)
    dom1 = graph_domain(1, 1.0, lifted, 1.0)
    plan = TransportPlan([[0.1, 0.0]], [[0.1, 0.0]], [1.0])
    with pytest.raises(PreconditionError) as info:
        check_preconditions(plan, dom0, dom1, 1.0, 0.0, 0.0)
    assert info.value.reason == 'tangency'


def test_holder_quotient_of_linear_profile():
    points = np.linspace(0.0, 1.0, 11)[:, None]
    assert holder_quotient(points, points.copy(), 0.5, 0.1 - 1e-12, 1.0) == pytest.approx(1.0)
    assert holder_quotient(points, np.ones((11, 1)), 0.5, 0.1, 1.0) == 0.0


def test_holder_estimate_needs_resolution():
    instance = create_instance(_config('identity', n=8))
    with pytest.raises(ResolutionError):
        holder_estimate(instance.field, 1.0, 0.5, resolution_factor=256)


def _power_field(c, alpha=0.5, h=1.0 / 128, half=0.125):
    # affine map plus c |x|^{1 + alpha} e_1 on a lattice centred at the origin
    cells = int(round(2 * half / h))
    lattice = Lattice([-half, -half], h, (cells, cells))
    x = lattice.centers()
    A = np.array([[0.1, 0.2], [0.0, -0.1]])
    disp = x @ A.T
    disp[:, 0] += c * np.linalg.norm(x, axis=1) ** (1.0 + alpha)
    shape = lattice.shape
    return MapField(lattice, disp.reshape(*shape, 2), np.ones(shape, dtype=bool), np.ones(shape))


def test_holder_estimate_of_power_perturbation():
    # [grad |x|^{3/2}]_{1/2} = (3/2) 2^{1/2}, attained on antipodal pairs
    estimate = holder_estimate(_power_field(1.0), 1.0, 0.5, resolution_factor=128)
    assert estimate == pytest.approx(1.5 ** 2 * 2.0, rel=0.15)
    doubled = holder_estimate(_power_field(2.0), 1.0, 0.5, resolution_factor=128)
    assert doubled == pytest.approx(4.0 * estimate, rel=1e-9)
    assert holder_estimate(_power_field(0.0), 1.0, 0.5, resolution_factor=128) < 1e-20


def test_holder_estimate_needs_separated_pairs():
    # B_{R/16} holds four nodes, all closer than four cells
    with pytest.raises(CoverageError):
        holder_estimate(_power_field(1.0), 0.1, 0.5, resolution_factor=4)
    points = np.linspace(0.0, 0.1, 3)[:, None]
    assert np.isnan(holder_quotient(points, points.copy(), 0.5, 0.5, 1.0))


def test_ladder_constants():
    eye = np.eye(2)
    levels = [LadderLevel(k, 0.5 ** k, 0.1 * 0.5 ** k, 0.0, eye, np.zeros(2)) for k in range(3)]
    ladder = CampanatoLadder(levels, 0.5, 0.5)
    assert ladder.depth == 2
    assert ladder.decay_constant() == pytest.approx(1.0)
    assert ladder.frame_bound() == 0.0
    assert ladder.contraction_constant() == float('inf')
    frame = ladder.to_dataframe()
    assert list(frame['k']) == [0, 1, 2]
    assert np.isnan(CampanatoLadder(levels[:1], 0.5, 0.5).contraction_constant())


def test_one_step_keeps_identity():
    instance = create_instance(_config('identity', n=16, extent=1.0, height=1.0))
    result = one_step(instance.field, instance.plan, instance.dom0, instance.dom1, R=0.5, n_poisson=16)
    np.testing.assert_allclose(result.step.B, np.eye(2), atol=1e-10)
    np.testing.assert_allclose(result.step.b, 0.0, atol=1e-10)
    assert result.E == 0.0
    assert result.E_hat == pytest.approx(0.0, abs=1e-20)


def test_identity_report_passes():
    config = _config('identity', n=16)
    report = verify_theorem(config)
    assert report.passed
    assert report.epsilon == 0.0
    assert report.clauses['holder']['passed'] is None
    assert any(note.startswith('holder skipped') for note in report.notes)
    row = report.to_row()
    assert row['family'] == 'identity'
    assert row['param_n'] == 16


def test_separation_fails_topological_precondition():
    config = _config('remark33', eps=0.1, n=100)
    report = verify_theorem(config)
    assert report.status == 'precondition-failed: topological'
    assert not report.passed
    assert report.ladder is None
    assert report.topological['passed'] is False
    assert '"status": "precondition-failed: topological"' in report.to_json()
