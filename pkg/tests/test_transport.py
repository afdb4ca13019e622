# -*- coding: utf-8 -*-

import itertools

import numpy as np
import ot
import pytest

from otlab.geometry import BoundaryGraph, graph_domain
from otlab.transport import AffineChange, Lattice, WeightedPoints, annealing_schedule, apply_affine, \
    apply_affine_samples, balance_masses, extract_map, inverse_map, monotonicity_defect, sample_domain, \
    solve_entropic, solve_exact, solve_local, synthetic_plan
from otlab.utils import ConfigurationError, ImbalanceError, SizeError


def _uniform(points):
    points = np.atleast_2d(points)
    return WeightedPoints(points, np.full(len(points), 1.0 / len(points)))


def _brute_force(x, y):
    best = np.inf
    for perm in itertools.permutations(range(len(y))):
        best = min(best, np.sum((x - y[list(perm)]) ** 2) / len(x))
    return best


@pytest.mark.parametrize('seed', [0, 1, 2])
def test_exact_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    x = rng.random((6, 2))
    y = rng.random((6, 2))
    plan = solve_exact(_uniform(x), _uniform(y))
    assert plan.cost() == pytest.approx(_brute_force(x, y), abs=1e-12)
    assert plan.total_mass() == pytest.approx(1.0)


def test_unequal_counts_are_split():
    src = _uniform(np.array([[0.0], [1.0]]))
    tgt = _uniform(np.array([[0.0], [0.5], [1.0]]))
    plan = solve_exact(src, tgt)
    expected = ot.emd2(src.weights, tgt.weights, ot.dist(src.points, tgt.points))
    assert plan.cost() == pytest.approx(expected, abs=1e-12)
    src_err, tgt_err = plan.marginal_errors()
    assert src_err == pytest.approx(0.0, abs=1e-12)
    assert tgt_err == pytest.approx(0.0, abs=1e-12)


def test_nonuniform_weights_use_network_simplex():
    src = WeightedPoints(np.array([[0.0], [1.0], [2.0]]), [0.5, 0.25, 0.25])
    tgt = WeightedPoints(np.array([[0.5], [2.5]]), [0.6, 0.4])
    plan = solve_exact(src, tgt)
    expected = ot.emd2(src.weights, tgt.weights, ot.dist(src.points, tgt.points))
    assert plan.cost() == pytest.approx(expected, abs=1e-12)
    assert max(plan.marginal_errors()) < 1e-12


def test_exact_rejects_imbalance():
    src = WeightedPoints(np.zeros((2, 1)), [0.5, 0.5])
    tgt = WeightedPoints(np.zeros((2, 1)), [0.5, 0.6])
    with pytest.raises(ImbalanceError):
        solve_exact(src, tgt)


def test_exact_rejects_large_problems():
    src = _uniform(np.linspace(0, 1, 10)[:, None])
    with pytest.raises(SizeError):
        solve_exact(src, src, max_pairs=99)


def test_exact_plan_is_monotone():
    rng = np.random.default_rng(3)
    plan = solve_exact(_uniform(rng.random((40, 2))), _uniform(rng.random((40, 2))))
    assert monotonicity_defect(plan) >= -1e-12


def test_entropic_is_close_to_exact():
    rng = np.random.default_rng(4)
    src = _uniform(rng.random((8, 2)))
    tgt = _uniform(rng.random((8, 2)))
    reg = 5e-3
    exact = solve_exact(src, tgt).cost()
    plan = solve_entropic(src, tgt, reg=reg)
    assert plan.cost() >= exact - 1e-4
    assert plan.cost() <= exact + 2 * reg * np.log(8) + 1e-4
    src_err, tgt_err = plan.marginal_errors()
    assert src_err < 1e-4
    assert tgt_err < 1e-4


def test_local_matches_network_simplex():
    rng = np.random.default_rng(5)
    src = WeightedPoints(rng.random((40, 2)), rng.random(40) + 0.5)
    weights = rng.random(30) + 0.5
    tgt = WeightedPoints(rng.random((30, 2)), weights * src.total() / weights.sum())
    # the first cutoff leaves samples unmatched and must grow
    plan = solve_local(src, tgt, cutoff=0.05, max_rounds=8)
    expected = ot.emd2(src.weights, tgt.weights, ot.dist(src.points, tgt.points))
    assert plan.cost() == pytest.approx(expected, rel=1e-6)
    assert max(plan.marginal_errors()) < 1e-6


def test_local_plan_of_a_lattice_translation():
    chart = BoundaryGraph(2, 1.0, 65, 0.5)
    dom = graph_domain(0, 1.0, chart, 0.5)
    src = sample_domain(dom, h=1.0 / 16)
    tgt = WeightedPoints(src.points + [0.0, 1.0 / 16], src.weights)
    plan = solve_local(src, tgt)
    assert plan.cost() == pytest.approx(src.total() / 256, rel=1e-6)
    assert np.allclose(plan.displacement, [0.0, 1.0 / 16])


def test_local_respects_the_pair_cap():
    src = _uniform(np.linspace(0, 1, 10)[:, None])
    with pytest.raises(SizeError):
        solve_local(src, src, cutoff=2.0, max_pairs=99)
    with pytest.raises(ImbalanceError):
        solve_local(src, src.rescaled(2.0))


def test_entropic_rejects_bad_regularization():
    src = _uniform(np.zeros((2, 1)))
    with pytest.raises(ConfigurationError):
        solve_entropic(src, src, reg=0.0)


def test_annealing_schedule():
    schedule = annealing_schedule(1e-3, 1.0, 0.5)
    assert schedule[0] == 1.0
    assert schedule[-1] == 1e-3
    assert all(a > b for a, b in zip(schedule, schedule[1:]))
    assert annealing_schedule(1e-2, 1e-3, 0.5) == [1e-2]
    with pytest.raises(ConfigurationError):
        annealing_schedule(1e-3, 1.0, 1.0)


def test_synthetic_translation_plan():
    src = _uniform(np.random.default_rng(5).random((20, 2)))
    shift = np.array([0.1, -0.2])
    plan = synthetic_plan(src, lambda x: x + shift)
    np.testing.assert_allclose(plan.displacement, np.tile(shift, (20, 1)))
    assert plan.cost() == pytest.approx(0.05)
    assert np.isnan(plan.marginal_errors()[1])
    assert plan.marginal_errors()[0] == 0.0


def test_plan_dilation():
    src = _uniform(np.array([[0.0, 0.0], [1.0, 0.0]]))
    plan = synthetic_plan(src, lambda x: x + 1.0)
    big = plan.dilate(2.0)
    assert big.total_mass() == pytest.approx(4.0)
    np.testing.assert_allclose(big.displacement, 2.0 * plan.displacement)


def test_affine_change_keeps_optimal_pairing():
    rng = np.random.default_rng(6)
    src = _uniform(rng.random((12, 2)))
    tgt = _uniform(rng.random((12, 2)))
    change = AffineChange([[1.1, 0.2], [0.0, 0.9]], shift=[0.05, -0.1], origin=[0.3, 0.2])
    plan = solve_exact(src, tgt)
    moved = solve_exact(apply_affine_samples(src, change, 0), apply_affine_samples(tgt, change, 1))
    np.testing.assert_array_equal(plan.tgt_index[np.argsort(plan.src_index)],
                                  moved.tgt_index[np.argsort(moved.src_index)])
    assert monotonicity_defect(apply_affine(plan, change)) == pytest.approx(monotonicity_defect(plan), abs=1e-12)


def test_affine_compose_with_inverse_is_identity():
    change = AffineChange([[1.2, 0.1], [0.0, 0.8]], shift=[0.1, 0.0])
    inverse = AffineChange(np.linalg.inv(change.matrix), shift=-change.matrix @ change.shift)
    assert inverse.compose(change).is_identity(1e-12)


def test_sample_domain_mass():
    chart = BoundaryGraph(2, 1.0, 65, 0.5)
    dom = graph_domain(0, 1.0, chart, 1.0)
    samples = sample_domain(dom, h=1.0 / 16)
    assert samples.total() == pytest.approx(2.0, rel=1e-2)
    assert np.all(dom.contains(samples.points[samples.weights == samples.weights.max()]))


def test_balance_masses():
    src = WeightedPoints(np.zeros((2, 1)), [0.5, 0.5])
    tgt = WeightedPoints(np.zeros((2, 1)), [0.5, 0.505])
    assert balance_masses(src, tgt).total() == pytest.approx(1.0)
    with pytest.raises(ImbalanceError):
        balance_masses(src, WeightedPoints(np.zeros((2, 1)), [0.5, 0.7]))


def test_barycentric_map_of_translation():
    lattice = Lattice.from_bbox([0.0, 0.0], [1.0, 1.0], 0.125)
    src = WeightedPoints(lattice.centers(), np.full(lattice.size, lattice.cell_volume), lattice,
                         np.arange(lattice.size))
    plan = synthetic_plan(src, lambda x: x + [0.25, 0.0])
    field = extract_map(plan)
    assert field.mask.all()
    np.testing.assert_allclose(field.displacement[..., 0], 0.25)
    assert field.curl_defect() == pytest.approx(0.0, abs=1e-12)


def test_inverse_map_of_translation():
    lattice = Lattice.from_bbox([0.0, 0.0], [1.0, 1.0], 0.125)
    src = WeightedPoints(lattice.centers(), np.full(lattice.size, lattice.cell_volume), lattice,
                         np.arange(lattice.size))
    plan = synthetic_plan(src, lambda x: x + [0.25, 0.0])
    inverse = inverse_map(plan, lattice=Lattice.from_bbox([0.25, 0.0], [1.25, 1.0], 0.125))
    assert inverse.mask.all()
    np.testing.assert_allclose(inverse.displacement[..., 0], -0.25, atol=1e-12)
    np.testing.assert_allclose(inverse.displacement[..., 1], 0.0, atol=1e-12)
