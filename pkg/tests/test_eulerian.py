# -*- coding: utf-8 -*-

import numpy as np
import pytest

from otlab.eulerian import TrajectorySet, competitor_boundary, competitor_main_smooth, competitor_singular, \
    cube_crossings, distance_to_cube, face_id, flux_slice, orthogonality_defect, rasterize_eulerian, \
    select_good_slice, slice_radii, time_factor, unit_value_reduction, weak_continuity_residual
from otlab.geometry import BoundaryGraph
from otlab.utils import ConfigurationError, MassBalanceError, PreconditionError


def _unit_square_translation(shift, h=1.0 / 16):
    ticks = (np.arange(int(round(1 / h))) + 0.5) * h
    x0 = np.stack(np.meshgrid(ticks, ticks, indexing='ij'), axis=-1).reshape(-1, 2)
    return TrajectorySet(x0, x0 + np.asarray(shift), np.full(len(x0), h * h))


def test_face_numbering():
    assert face_id(0, False) == 0
    assert face_id(0, True) == 1
    assert face_id(1, True) == 3


def test_cube_crossings():
    x0 = np.array([[0.0, 0.0], [-3.0, 0.2], [0.0, 0.0]])
    x1 = np.array([[2.0, 0.0], [0.0, 0.2], [0.5, 0.5]])
    cross = cube_crossings(x0, x1, 1.0)
    np.testing.assert_array_equal(cross['exits'], [True, False, False])
    np.testing.assert_array_equal(cross['enters'], [False, True, False])
    assert cross['t_exit'][0] == pytest.approx(0.5)
    assert cross['t_enter'][1] == pytest.approx(2.0 / 3.0)
    assert cross['face_exit'][0] == 1
    assert cross['face_enter'][1] == 0
    assert cross['face_exit'][2] == -1


def test_distance_to_cube():
    np.testing.assert_allclose(distance_to_cube([[0.0, 0.0], [2.0, 0.0], [0.5, 0.9], [2.0, 2.0]], 1.0),
                               [1.0, 1.0, 0.1, np.sqrt(2.0)])


def test_flux_balances_mass():
    rng = np.random.default_rng(0)
    x0 = rng.uniform(-2, 2, (200, 2))
    traj = TrajectorySet(x0, x0 + rng.normal(0, 0.8, (200, 2)), rng.uniform(0.5, 1.5, 200))
    fs = flux_slice(traj, 1.3, 0.1, 0.2)
    assert fs.mass_balance_defect() == pytest.approx(0.0, abs=1e-9)
    assert len(fs.exits) > 0 and len(fs.entries) > 0


def test_flux_slice_validates_parameters():
    traj = _unit_square_translation([0.1, 0.0])
    with pytest.raises(ConfigurationError):
        flux_slice(traj, 1.0, 0.3, 0.0)
    with pytest.raises(ConfigurationError):
        flux_slice(traj, 1.0, 0.1, -0.1)


def test_slice_radii():
    radii = slice_radii(4)
    np.testing.assert_allclose(radii, [1.125, 1.375, 1.625, 1.875])


def test_rasterized_translation_momentum():
    v = np.array([0.25, 0.0])
    traj = _unit_square_translation(v)
    field = rasterize_eulerian(traj, [-0.5, -0.5], [1.5, 1.5], 1.0 / 16, n_times=8)
    np.testing.assert_allclose(field.j[..., 0], v[0] * field.rho, atol=1e-12)
    np.testing.assert_allclose(field.j[..., 1], 0.0, atol=1e-12)
    np.testing.assert_allclose(field.total_mass(), 1.0)
    np.testing.assert_allclose(field.total_momentum(), np.tile(v, (8, 1)))
    assert field.max_density() <= 1.0 + 1e-9
    assert weak_continuity_residual(field.rho, field.j, field.lattice, field.times) < 0.1


def test_unit_value_reduction():
    traj = TrajectorySet([[1.0, 0.0]], [[2.0, 0.0]], [1.0])
    reduced = unit_value_reduction(traj, 4.0)
    np.testing.assert_allclose(reduced.x1, [[4.0, 0.0]])
    np.testing.assert_allclose(reduced.mass, traj.mass)


def test_boundary_competitor_matches_closed_form():
    g0 = BoundaryGraph(2, 1.0, 257, 0.5)
    g1 = BoundaryGraph(2, 1.0, 257, 0.5, kind='quadratic', params={'amplitude': 0.05})
    comp = competitor_boundary(g0, g1, 0.05, 0.1)
    assert comp.cost > 0
    assert comp.relative_gap < 1e-2
    assert comp.field.max_density() <= 1.0 + 1e-12


def test_boundary_competitor_cubic_law():
    g0 = BoundaryGraph(2, 1.0, 257, 0.5)
    costs = []
    for amplitude in (0.02, 0.04):
        g1 = BoundaryGraph(2, 1.0, 257, 0.5, kind='quadratic', params={'amplitude': amplitude})
        costs.append(competitor_boundary(g0, g1, amplitude, 0.1))
    assert costs[1].cost / costs[0].cost == pytest.approx(8.0, rel=1e-6)
    assert costs[1].closed_form / costs[0].closed_form == pytest.approx(8.0, rel=1e-6)


def test_boundary_competitor_needs_wide_layer():
    g0 = BoundaryGraph(2, 1.0, 257, 0.5)
    g1 = BoundaryGraph(2, 1.0, 257, 0.5, kind='quadratic', params={'amplitude': 0.05})
    with pytest.raises(PreconditionError):
        competitor_boundary(g0, g1, 0.01, 0.1)
    with pytest.raises(ConfigurationError):
        competitor_boundary(g0, g1, 0.05, 0.3)


class _ConstantGradient(object):

    def __init__(self, v):
        self.v = np.asarray(v, dtype=float)

    def gradient_at(self, points):
        return np.tile(self.v, (len(points), 1))


def test_orthogonality_defect_of_translation():
    v = np.array([0.25, 0.0])
    field = rasterize_eulerian(_unit_square_translation(v), [-0.5, -0.5], [1.5, 1.5], 1.0 / 16, n_times=8)
    defect = orthogonality_defect(field, _ConstantGradient(v))
    assert not defect.infinite
    assert defect.terms['A'] == pytest.approx(0.0, abs=1e-12)
    assert defect.terms['B'] == pytest.approx(v @ v, rel=1e-9)
    # three of the four units of raster area lie above x_1 = 0
    assert defect.terms['C'] == pytest.approx(3.0 * (v @ v), rel=1e-9)
    assert float(defect) == pytest.approx(2.0 * (v @ v), rel=1e-9)
    assert defect.relative_gap < 1e-10

    still = orthogonality_defect(field, _ConstantGradient([0.0, 0.0]))
    assert float(still) == pytest.approx(0.0, abs=1e-12)


def test_orthogonality_defect_flags_momentum_without_density():
    v = np.array([0.25, 0.0])
    field = rasterize_eulerian(_unit_square_translation(v), [-0.5, -0.5], [1.5, 1.5], 1.0 / 16, n_times=2)
    carrying = np.argwhere(field.rho[0] > 0)[0]
    field.rho[(0,) + tuple(carrying)] = 0.0
    defect = orthogonality_defect(field, _ConstantGradient(v))
    assert defect.infinite
    assert float(defect) == float('inf')


def test_singular_density_of_one_early_entry():
    # enters Q_1 through the bottom of the x_2 axis at t = 0.025
    traj = TrajectorySet([[0.5, -1.05]], [[0.5, 0.95]], [0.01])
    fs = flux_slice(traj, 1.0, 0.1, 0.0, n_t=20)
    sing = competitor_singular(fs)
    assert sing.cost == 0.0
    profile = sing.density[face_id(1, False)].sum(axis=-1) * fs.face_bin_area()
    expected = np.zeros(21)
    expected[1:2] = 0.01
    middle = np.arange(2, 19)
    expected[middle] = 0.01 * (0.9 - middle / 20) / 0.8
    np.testing.assert_allclose(profile, expected, atol=1e-12)
    assert np.all(sing.density >= 0.0)
    assert sing.derivative_defect() == pytest.approx(0.0, abs=1e-9)


def test_singular_density_vanishes_without_crossings():
    x0 = np.random.default_rng(1).uniform(-0.5, 0.5, (50, 2))
    sing = competitor_singular(flux_slice(TrajectorySet(x0, x0.copy(), np.ones(50)), 1.0, 0.1, 0.0))
    assert np.all(sing.density == 0.0)


def test_main_smooth_competitor():
    flat = competitor_main_smooth(2.0, 1.0, 1.0, 0.1)
    assert flat.cost == pytest.approx(2.0 / 0.8)
    assert flat.quadrature_cost == pytest.approx(2.0 / 0.8)

    tilted = competitor_main_smooth(2.0, 1.1, 0.9, 0.1)
    assert time_factor(1.1, 0.9) == pytest.approx(np.log(1.1 / 0.9) / 0.2)
    assert tilted.cost == pytest.approx(time_factor(1.1, 0.9) * 2.0 / 0.8)
    assert tilted.relative_gap < 1e-5
    assert tilted.density(0.1) == pytest.approx(1.1)
    assert tilted.density(0.9) == pytest.approx(0.9)

    assert competitor_main_smooth(0.0, 1.1, 0.9, 0.1).cost == 0.0


def test_main_smooth_competitor_checks_mass_balance():
    with pytest.raises(MassBalanceError):
        competitor_main_smooth(1.0, 1.1, 0.9, 0.1, c_tilde=0.0)
    with pytest.raises(ConfigurationError):
        competitor_main_smooth(1.0, 3.0, 0.9, 0.1)


def test_good_slice_of_resting_particles():
    x0 = np.random.default_rng(2).uniform(-2.5, 2.5, (200, 2))
    R, fs, diagnostics = select_good_slice(TrajectorySet(x0, x0.copy(), np.ones(200)), 0.1, n_radii=8)
    assert len(diagnostics) == 8
    assert R == pytest.approx(slice_radii(8)[0])
    assert fs.R == R
    assert np.all(diagnostics['normalized'] == 0.0)
