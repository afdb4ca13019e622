# -*- coding: utf-8 -*-

import numpy as np
import pytest

from otlab.evaluator import fit_exponent
from otlab.eulerian import TrajectorySet, face_id, flux_slice
from otlab.geometry import BoundaryGraph
from otlab.harmonic import NeumannRecord, PotentialField, flux_neumann_data, half_cube_axes, main_competitor, \
    solve_neumann, tilde_neumann_data
from otlab.eulerian import competitor_main_smooth
from otlab.utils import ConfigurationError, MassBalanceError, PreconditionError

K = 0.5 * np.pi


def _cosine_record(d=2):
    # phi = prod cos(pi x_i / 2) has zero normal derivative on {x_1 = 0}
    def flux(points, face):
        axis = face // 2
        others = np.delete(points, axis, axis=1)
        return -K * np.prod(np.cos(K * others), axis=1)

    def source(points):
        return -d * K ** 2 * np.prod(np.cos(K * points), axis=1)

    return NeumannRecord(1.0, flux, source=source, dimension=d)


def _weighted_error(potential):
    exact = np.prod(np.cos(K * potential.nodes()), axis=-1)
    diff = potential.values - exact
    w = potential.weights()
    diff = diff - np.sum(w * diff) / np.sum(w)
    return float(np.sqrt(np.sum(w * diff ** 2)))


def test_half_cube_axes():
    axes = half_cube_axes(1.0, 0.25)
    np.testing.assert_allclose(axes[0], np.linspace(0, 1, 5))
    np.testing.assert_allclose(axes[1], np.linspace(-1, 1, 9))


def test_record_bottom_inside_cube():
    with pytest.raises(ConfigurationError):
        NeumannRecord.zero(1.0, lower=1.0)


def test_zero_data_give_zero_potential():
    potential = solve_neumann(NeumannRecord.zero(1.0), n=8)
    assert potential.constant == 0.0
    assert np.all(potential.values == 0.0)


def test_uniform_flux_fixes_constant():
    # total outward flux 4 over the half-square of area 2
    potential = solve_neumann(NeumannRecord.uniform(1.0, 1.0), n=8)
    assert potential.constant == pytest.approx(2.0)
    assert potential.compatibility_defect() == pytest.approx(0.0, abs=1e-10)
    assert potential.mean() == pytest.approx(0.0, abs=1e-10)


def test_manufactured_solution_converges_at_second_order():
    record = _cosine_record()
    resolutions = (8, 16, 32)
    errors = [_weighted_error(solve_neumann(record, n=n)) for n in resolutions]
    assert errors[0] > errors[1] > errors[2]
    assert fit_exponent([1.0 / n for n in resolutions], errors) >= 1.7


def test_manufactured_solution_is_compatible():
    potential = solve_neumann(_cosine_record(), n=16)
    assert potential.constant == pytest.approx(0.0, abs=5e-2)
    assert abs(potential.compatibility_defect()) <= 1e-10
    assert potential.laplacian_residual() <= 1e-6


def test_three_dimensional_solve():
    potential = solve_neumann(_cosine_record(3), n=6)
    assert potential.shape == (7, 13, 13)
    assert _weighted_error(potential) < 0.05


def test_reflection_is_symmetric():
    potential = solve_neumann(_cosine_record(), n=8)
    full = potential.reflect()
    assert full.reflected
    assert full.shape == (17, 17)
    assert full.symmetry_defect() == 0.0
    assert full.reflect() is full
    np.testing.assert_allclose(full.half().values, potential.values)
    assert full.compatibility_defect() == pytest.approx(potential.compatibility_defect(), abs=1e-12)


def test_reflection_needs_bottom_at_zero():
    axes = [np.linspace(0.5, 1.0, 3), np.linspace(-1.0, 1.0, 3)]
    with pytest.raises(ConfigurationError):
        PotentialField(axes, np.zeros((3, 3))).reflect()


def test_gradient_of_quadratic_is_exact():
    axes = [np.linspace(0.0, 1.0, 5), np.linspace(-1.0, 1.0, 9)]
    field = PotentialField.from_function(lambda p: 0.5 * np.sum(p ** 2, axis=1), axes, constant=2.0)
    np.testing.assert_allclose(field.gradient(), field.nodes(), atol=1e-12)
    np.testing.assert_allclose(field.hessian_at([[0.3, 0.1]])[0], np.eye(2), atol=1e-10)
    assert field.laplacian_residual() == pytest.approx(0.0, abs=1e-10)


def test_dilation_scales_gradient():
    axes = [np.linspace(0.0, 1.0, 5), np.linspace(-1.0, 1.0, 9)]
    field = PotentialField.from_function(lambda p: p[:, 0] * p[:, 1], axes)
    big = field.dilate(2.0)
    np.testing.assert_allclose(big.gradient_at([[1.0, 1.0]])[0], 2.0 * field.gradient_at([[0.5, 0.5]])[0],
                               atol=1e-12)


def test_flux_data_of_one_late_exit():
    # leaves Q_1 through the top face of the x_2 axis at t = 0.5
    traj = TrajectorySet([[0.5, 0.0]], [[0.5, 2.0]], [0.01])
    fs = flux_slice(traj, 1.0, 0.1, 0.1)
    record = flux_neumann_data(fs, lam0=2.0)
    top = face_id(1, True)
    area = fs.face_bin_area()
    assert record.flux(np.array([[0.5, 1.0]]), top)[0] == pytest.approx(0.01 / area / 2.0)
    assert record.flux(np.array([[-0.5, 1.0]]), top)[0] == 0.0
    assert np.all(record.flux(np.array([[0.5, -1.0], [0.0, 0.5]]), face_id(1, False)) == 0.0)


def test_flux_data_vanish_for_resting_particles():
    x0 = np.random.default_rng(3).uniform(-0.9, 0.9, (40, 2))
    record = flux_neumann_data(flux_slice(TrajectorySet(x0, x0.copy(), np.ones(40)), 1.0, 0.1, 0.0))
    points = np.array([[0.5, 1.0], [0.2, 1.0]])
    for face in range(4):
        assert np.all(record.flux(points, face) == 0.0)


def test_slice_energy_is_bounded_by_the_flux():
    # phi = cosh(pi x_1) cos(pi x_2) / (pi sinh(pi)) with int fbar^2 = 1
    def flux(points, face):
        return np.cos(np.pi * points[:, 1]) if face == 1 else np.zeros(len(points))

    exact = 2.0 + 1.0 / np.sinh(np.pi) ** 2
    ratios = []
    for n, rel in ((16, 0.1), (32, 0.05)):
        potential = solve_neumann(NeumannRecord(1.0, flux), n=n)
        assert potential.constant == pytest.approx(0.0, abs=1e-12)
        assert potential.slice_energy_sup() == pytest.approx(exact, rel=rel)
        ratios.append(potential.slice_energy_sup())
    assert ratios[1] == pytest.approx(ratios[0], rel=0.1)


def _layer_slice():
    # resting lattice on Q_1 plus a few movers around the layer {x_1 < 0.1}
    ticks = -1.0 + (np.arange(32) + 0.5) / 16
    rest = np.stack(np.meshgrid(ticks, ticks, indexing='ij'), axis=-1).reshape(-1, 2)
    movers0 = np.array([[0.5, 0.0], [0.05, 0.3], [0.5, -0.5], [0.02, 0.9], [0.5, -2.0], [0.6, -1.2]])
    movers1 = np.array([[0.5, 2.0], [0.3, 0.3], [0.04, -0.5], [0.02, 1.5], [0.5, -0.9], [0.6, -0.8]])
    masses = np.array([0.01, 0.02, 0.03, 0.015, 0.005, 0.004])
    traj = TrajectorySet(np.vstack([rest, movers0]), np.vstack([rest, movers1]),
                         np.concatenate([np.full(len(rest), 1.0 / 256), masses]))
    return flux_slice(traj, 1.0, 0.1, 0.1)


def test_tilde_data_of_a_layer_slice():
    fs = _layer_slice()
    assert fs.kept_boundary_masses() == pytest.approx((0.015, 0.005))
    assert fs.kept_balance_defect() == pytest.approx(0.0, abs=1e-15)
    masses = fs.layer_masses()
    assert masses['layer1'] - masses['layer0'] == pytest.approx(-0.005, abs=1e-12)
    record = tilde_neumann_data(fs)
    assert record.lower == 0.1
    # removed exit 0.01, removed entry 0.004, layer deficit 0.005
    assert record.integral == pytest.approx(0.001, abs=1e-12)
    area = fs.face_bin_area()
    # a mover leaves the layer over x_2 = 0.3 and another one lands in it over x_2 = -0.5
    np.testing.assert_allclose(record.face_flux(np.array([[0.1, 0.3], [0.1, -0.5], [0.1, -0.9]]), 0),
                               [-0.02 / area, 0.03 / area, 0.0], atol=1e-9)


def test_tilde_constant_matches_the_densities():
    fs = _layer_slice()
    c0, c1 = fs.main_densities()
    assert 0.5 <= c1 <= c0 <= 2.0
    assert c0 - c1 == pytest.approx(0.001 / 1.8, abs=1e-12)
    potential = solve_neumann(tilde_neumann_data(fs), n=16)
    assert abs(potential.constant - (c0 - c1)) <= 1e-8
    assert potential.compatibility_defect() == pytest.approx(0.0, abs=1e-12)
    main = competitor_main_smooth(potential, c0, c1, fs.tau)
    assert main.cost > 0.0
    assert main.relative_gap < 1e-4
    assert main_competitor(fs, n=16).cost == pytest.approx(main.cost, rel=1e-12)
    with pytest.raises(MassBalanceError):
        competitor_main_smooth(potential, c0 + 1e-6, c1, fs.tau)


def test_tilde_data_need_charts_inside_the_layer():
    fs = _layer_slice()
    flat = BoundaryGraph(2, 1.0, 65, 0.5)
    assert tilde_neumann_data(fs, flat, flat).lower == 0.1
    lifted = BoundaryGraph(2, 1.0, 65, 0.5, kind='affine', params={'offset': 0.2}, normalized=False)
    with pytest.raises(PreconditionError) as info:
        tilde_neumann_data(fs, flat, lifted)
    assert info.value.reason == 'width'
