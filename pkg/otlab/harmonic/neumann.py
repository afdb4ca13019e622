# -*- coding: utf-8 -*-

"""
otlab.harmonic.neumann
######################

Neumann problem ``Delta phi = c + s`` on the half-cube ``Q_R ∩ {x_1 > lower}`` with
``nu . grad phi`` prescribed on its boundary, the resulting :class:`PotentialField` and its
reflection across ``{x_1 = 0}``.
"""

import logging

import numpy as np
import pandas as pd
from scipy import sparse
from scipy.interpolate import RegularGridInterpolator
from scipy.sparse.linalg import cg

from otlab.utils.exceptions import ConfigurationError, FluxSplitError, PreconditionError, SolverError

SOLVER_TOL = 1e-10


class NeumannRecord(object):
    r"""Data of one Neumann problem.

    Args:
        R (float): half-side of the cube.
        flux (callable): ``flux(points, face) -> nu . grad phi`` on the faces ``1`` (``x_1 = R``) and
            ``2i``, ``2i + 1`` (``x_i = -R``, ``x_i = R``) for ``i >= 1``.
        source (callable, optional): ``s(points)``, zero by default.
        lower (float): height of the bottom face, ``0`` for the reflected problem.
        lower_flux (callable, optional): ``nu . grad phi`` on the bottom face (``nu = -e_1``),
            zero by default as required by the reflection.
        dimension (int): ambient dimension.
        integral (float, optional): exact ``int nu . grad phi`` over the boundary when the data are
            piecewise constant; it then fixes ``c`` instead of the face quadrature.
    """

    def __init__(self, R, flux, source=None, lower=0.0, lower_flux=None, dimension=2, integral=None):
        self.R = float(R)
        self.flux = flux
        self.source = source
        self.lower = float(lower)
        self.lower_flux = lower_flux
        self.dimension = int(dimension)
        self.integral = None if integral is None else float(integral)
        if not -self.R < self.lower < self.R:
            raise ConfigurationError(f'bottom face [{lower}] must lie inside (-R, R).', stage='harmonic')

    def face_flux(self, points, face):
        if face == 0:
            if self.lower_flux is None:
                return np.zeros(len(points))
            return np.asarray(self.lower_flux(points), dtype=float).reshape(-1)
        return np.asarray(self.flux(points, face), dtype=float).reshape(-1)

    def source_values(self, points):
        if self.source is None:
            return np.zeros(len(points))
        return np.asarray(self.source(points), dtype=float).reshape(-1)

    @classmethod
    def zero(cls, R, lower=0.0, dimension=2):
        return cls(R, lambda points, face: np.zeros(len(points)), lower=lower, dimension=dimension)

    @classmethod
    def uniform(cls, R, value, lower=0.0, dimension=2):
        r"""Constant outward flux ``value`` on every face except the bottom one."""
        return cls(R, lambda points, face: np.full(len(points), float(value)), lower=lower, dimension=dimension)

    def to_dataframe(self, n=33):
        r"""Data sampled at ``n`` points per tangential axis of every face."""
        rows = []
        for face, points in _face_samples(self, n):
            d = points.shape[1]
            values = self.face_flux(points, face)
            for p, v in zip(points, values):
                row = {'face': face, 'flux': float(v)}
                row.update({f'x_{i + 1}': float(p[i]) for i in range(d)})
                rows.append(row)
        return pd.DataFrame(rows)

    def __repr__(self):
        return f'NeumannRecord(R={self.R}, lower={self.lower})'


def _face_samples(record, n):
    R, lower = record.R, record.lower
    d = record.dimension
    ticks = np.linspace(-R, R, n)
    heights = np.linspace(lower, R, n)
    for face in range(2 * d):
        axis, positive = face // 2, face % 2 == 1
        axes = [heights] + [ticks] * (d - 1)
        axes[axis] = np.array([R if positive else (lower if axis == 0 else -R)])
        grids = np.meshgrid(*axes, indexing='ij')
        yield face, np.stack([g.ravel() for g in grids], axis=-1)


def _lumped_weights(nodes):
    w = np.empty_like(nodes)
    spacing = np.diff(nodes)
    w[0] = 0.5 * spacing[0]
    w[-1] = 0.5 * spacing[-1]
    w[1:-1] = 0.5 * (spacing[:-1] + spacing[1:])
    return w


def _stiffness_1d(nodes):
    n = len(nodes)
    inv = 1.0 / np.diff(nodes)
    main = np.zeros(n)
    main[:-1] += inv
    main[1:] += inv
    return sparse.diags([-inv, main, -inv], [-1, 0, 1], format='csr')


def _kron_all(factors):
    out = factors[0]
    for f in factors[1:]:
        out = sparse.kron(out, f, format='csr')
    return out


def _outer_all(vectors):
    out = vectors[0]
    for v in vectors[1:]:
        out = np.multiply.outer(out, v)
    return out


class PotentialField(object):
    r"""Scalar potential on a tensor grid.

    Attributes:
        axes (list): node coordinates per axis.
        values (numpy.ndarray): ``phi`` at the nodes.
        constant (float): solvability constant ``c`` of ``Delta phi = c + s``.
        record (NeumannRecord): the data it solves, if any.
        reflected (bool): whether the field covers the full cube by mirror symmetry in ``x_1``.
    """

    def __init__(self, axes, values, constant=0.0, record=None, reflected=False, mean_zero=False):
        self.axes = [np.asarray(a, dtype=float) for a in axes]
        self.values = np.asarray(values, dtype=float)
        self.constant = float(constant)
        self.record = record
        self.reflected = reflected
        self.mean_zero = mean_zero
        self._gradient = None
        self._interpolators = None

    @property
    def dimension(self):
        return len(self.axes)

    @property
    def shape(self):
        return self.values.shape

    @property
    def spacing(self):
        return float(max(np.max(np.diff(a)) for a in self.axes))

    def nodes(self):
        grids = np.meshgrid(*self.axes, indexing='ij')
        return np.stack(grids, axis=-1)

    def weights(self):
        r"""Trapezoidal quadrature weights of the nodes."""
        return _outer_all([_lumped_weights(a) for a in self.axes])

    @classmethod
    def from_function(cls, func, axes, constant=0.0):
        r"""Sample ``func(points) -> values`` on the tensor grid of ``axes``."""
        axes = [np.asarray(a, dtype=float) for a in axes]
        grids = np.meshgrid(*axes, indexing='ij')
        points = np.stack([g.ravel() for g in grids], axis=-1)
        values = np.asarray(func(points), dtype=float).reshape(grids[0].shape)
        return cls(axes, values, constant)

    # ---------------------------------------------------------- derivatives

    def gradient(self):
        r"""``grad phi`` at the nodes, second order up to the boundary, shape ``(*shape, d)``."""
        if self._gradient is None:
            parts = np.gradient(self.values, *self.axes, edge_order=2)
            parts = list(parts) if isinstance(parts, (list, tuple)) else [parts]
            self._gradient = np.stack(parts, axis=-1)
        return self._gradient

    def hessian(self):
        r"""``grad^2 phi`` at the nodes, shape ``(*shape, d, d)``."""
        grad = self.gradient()
        rows = []
        for i in range(self.dimension):
            parts = np.gradient(grad[..., i], *self.axes, edge_order=2)
            parts = list(parts) if isinstance(parts, (list, tuple)) else [parts]
            rows.append(np.stack(parts, axis=-1))
        return np.stack(rows, axis=-2)

    def _interpolator(self, key):
        if self._interpolators is None:
            self._interpolators = {}
        if key not in self._interpolators:
            if key == 'value':
                data = self.values
            elif key == 'gradient':
                data = self.gradient()
            else:
                data = self.hessian().reshape(self.shape + (-1,))
            self._interpolators[key] = RegularGridInterpolator(self.axes, data, method='linear', bounds_error=False,
                                                               fill_value=None)
        return self._interpolators[key]

    def value_at(self, points):
        return self._interpolator('value')(np.atleast_2d(points))

    def gradient_at(self, points):
        r"""Multilinear interpolation of the nodal gradient, shape ``(N, d)``."""
        return self._interpolator('gradient')(np.atleast_2d(points))

    def hessian_at(self, points):
        d = self.dimension
        return self._interpolator('hessian')(np.atleast_2d(points)).reshape(-1, d, d)

    # ------------------------------------------------------------ integrals

    def dirichlet_energy(self, lower=None):
        r"""``int |grad phi|^2`` over the grid, or over ``{x_1 > lower}`` when given."""
        weights = self.weights()
        if lower is not None:
            weights = weights * (self.axes[0] > lower).reshape((-1,) + (1,) * (self.dimension - 1))
        return float(np.sum(weights * np.sum(self.gradient() ** 2, axis=-1)))

    def slice_energy_sup(self):
        r"""``sup_{x_1} int_{Q'} |grad phi(x_1, .)|^2`` over the node slices."""
        tangential = _outer_all([_lumped_weights(a) for a in self.axes[1:]]) if self.dimension > 1 else 1.0
        energy = np.sum(self.gradient() ** 2, axis=-1)
        per_slice = np.sum((energy * tangential).reshape(len(self.axes[0]), -1), axis=1)
        return float(per_slice.max())

    def mean(self):
        w = self.weights()
        return float(np.sum(w * self.values) / np.sum(w))

    # ------------------------------------------------------------ defects

    def symmetry_defect(self):
        r"""``max |phi(s, x') - phi(-s, x')|`` for reflected fields."""
        if not self.reflected:
            return 0.0
        return float(np.abs(self.values - self.values[::-1]).max())

    def laplacian_residual(self):
        r"""Largest interior ``|Delta_h phi - c - s|`` of the 5-point (7-point) stencil."""
        d = self.dimension
        inner = tuple(slice(1, -1) for _ in range(d))
        lap = np.zeros(tuple(n - 2 for n in self.shape))
        for i, a in enumerate(self.axes):
            h = np.diff(a)
            hm = h[:-1].reshape((-1,) + (1,) * (d - 1 - i)) if d - 1 - i else h[:-1]
            hp = h[1:].reshape((-1,) + (1,) * (d - 1 - i)) if d - 1 - i else h[1:]
            sl = list(inner)
            sl[i] = slice(2, None)
            up = self.values[tuple(sl)]
            sl[i] = slice(None, -2)
            down = self.values[tuple(sl)]
            mid = self.values[inner]
            lap = lap + 2.0 * ((up - mid) / hp - (mid - down) / hm) / (hp + hm)
        source = 0.0
        if self.record is not None and self.record.source is not None:
            points = self.nodes()[inner].reshape(-1, d)
            source = self.record.source_values(points).reshape(lap.shape)
        return float(np.abs(lap - self.constant - source).max()) if lap.size else 0.0

    def compatibility_defect(self):
        r"""``c |Q+| + int s - int nu . grad phi`` from the quadrature of the data, or their exact integral."""
        if self.record is None:
            return 0.0
        half = self.half() if self.reflected else self
        _, b, m, s = _assemble_data(self.record, half.axes)
        total = b.sum() if self.record.integral is None else self.record.integral
        return float(self.constant * m.sum() + np.sum(m * s) - total)

    # ---------------------------------------------------------- transforms

    def reflect(self):
        r"""Mirror a field on ``{x_1 >= 0}`` to the full cube, exactly symmetric."""
        if self.reflected:
            return self
        if abs(self.axes[0][0]) > 1e-12:
            raise ConfigurationError('only fields on {x_1 >= 0} can be reflected.', stage='harmonic')
        axis0 = np.concatenate([-self.axes[0][:0:-1], self.axes[0]])
        values = np.concatenate([self.values[:0:-1], self.values], axis=0)
        return PotentialField([axis0] + self.axes[1:], values, self.constant, self.record, reflected=True,
                              mean_zero=self.mean_zero)

    def half(self):
        r"""Restriction of a reflected field to ``{x_1 >= 0}``."""
        k = len(self.axes[0]) // 2
        return PotentialField([self.axes[0][k:]] + self.axes[1:], self.values[k:], self.constant, self.record,
                              mean_zero=self.mean_zero)

    def scaled_with_quadratic(self, factor, coeff):
        r"""``factor * phi + coeff |x|^2 / 2``; the constant follows ``Delta``."""
        sq = np.sum(self.nodes() ** 2, axis=-1)
        return PotentialField(self.axes, factor * self.values + 0.5 * coeff * sq,
                              factor * self.constant + coeff * self.dimension, None, self.reflected)

    def dilate(self, factor):
        r"""``phi_s(x) = s^2 phi(x / s)``, so that ``grad phi_s(x) = s grad phi(x / s)``."""
        return PotentialField([a * factor for a in self.axes], self.values * factor ** 2, self.constant, None,
                              self.reflected, self.mean_zero)

    def to_dataframe(self):
        d = self.dimension
        points = self.nodes().reshape(-1, d)
        grad = self.gradient().reshape(-1, d)
        frame = pd.DataFrame(points, columns=[f'x_{i + 1}' for i in range(d)])
        frame['phi'] = self.values.reshape(-1)
        for i in range(d):
            frame[f'dphi_{i + 1}'] = grad[:, i]
        return frame

    def to_csv(self, path):
        self.to_dataframe().to_csv(path, index=False)

    def __repr__(self):
        return f'PotentialField(shape={self.shape}, c={self.constant:.6g}, reflected={self.reflected})'


def half_cube_axes(R, h, lower=0.0, dimension=2):
    r"""Node axes of ``[lower, R] x [-R, R]^{d-1}`` with spacing at most ``h``."""
    n1 = max(int(np.ceil((R - lower) / h - 1e-9)), 2)
    nt = max(int(np.ceil(2.0 * R / h - 1e-9)), 2)
    return [np.linspace(lower, R, n1 + 1)] + [np.linspace(-R, R, nt + 1)] * (dimension - 1)


def _assemble_data(record, axes):
    r"""Stiffness matrix, face load, lumped masses and source values on the node grid."""
    d = len(axes)
    weights = [_lumped_weights(a) for a in axes]
    stiff = [_stiffness_1d(a) for a in axes]
    masses = [sparse.diags(w, format='csr') for w in weights]
    K = None
    for i in range(d):
        factors = [stiff[k] if k == i else masses[k] for k in range(d)]
        term = _kron_all(factors)
        K = term if K is None else K + term

    grids = np.meshgrid(*axes, indexing='ij')
    points = np.stack([g.ravel() for g in grids], axis=-1)
    shape = grids[0].shape
    b = np.zeros(shape)
    for face in range(2 * d):
        axis, positive = face // 2, face % 2 == 1
        index = [slice(None)] * d
        index[axis] = -1 if positive else 0
        index = tuple(index)
        face_points = points.reshape(shape + (d,))[index].reshape(-1, d)
        face_weight = _outer_all([weights[k] for k in range(d) if k != axis]) if d > 1 else np.ones(())
        b[index] += record.face_flux(face_points, face).reshape(np.shape(face_weight)) * face_weight
    m = _outer_all(weights).reshape(-1)
    s = record.source_values(points)
    return K, b.reshape(-1), m, s


def _conjugate_gradient(K, rhs, tol, maxiter):
    precond = sparse.diags(1.0 / K.diagonal())
    try:
        return cg(K, rhs, M=precond, rtol=tol, atol=0.0, maxiter=maxiter)
    except TypeError:
        # scipy < 1.12 names the relative tolerance ``tol``
        return cg(K, rhs, M=precond, tol=tol, atol=0.0, maxiter=maxiter)


def solve_neumann(record, h=None, n=64, tol=SOLVER_TOL, maxiter=None):
    r"""Solve ``Delta phi = c + s`` in ``Q_R ∩ {x_1 > lower}`` with the Neumann data of ``record``.

    The operator is the standard 5-point (7-point) Laplacian with ghost-node Neumann closure,
    assembled as ``sum_i M ⊗ .. ⊗ K_i ⊗ .. ⊗ M`` from 1D stiffness matrices and lumped masses.
    The constant ``c`` is fixed by the discrete compatibility condition, or by the exact integral
    of the data when the record carries one, and ``phi`` is normalized to zero mean.

    Args:
        record (NeumannRecord): the data.
        h (float, optional): node spacing, ``(R - lower) / n`` by default.
        n (int): intervals along ``x_1`` when ``h`` is not given.
        tol (float): relative residual tolerance of the conjugate gradients.

    Returns:
        PotentialField: on the half-cube grid (call ``reflect`` for the full cube).

    Raises:
        SolverError: if the conjugate gradients stop above the tolerance.
    """
    logger = logging.getLogger()
    h = (record.R - record.lower) / n if h is None else h
    axes = half_cube_axes(record.R, h, record.lower, record.dimension)
    K, b, m, s = _assemble_data(record, axes)
    total = b.sum() if record.integral is None else record.integral
    c = float((total - np.sum(m * s)) / m.sum())
    rhs = b - m * (c + s)
    shape = tuple(len(a) for a in axes)
    norm = float(np.linalg.norm(rhs))
    if norm <= 1e-300:
        logger.debug('neumann data vanish; returning the zero potential')
        return PotentialField(axes, np.zeros(shape), c, record, mean_zero=True)
    # remove the component along the kernel (round-off, or the quadrature error of exact data)
    rhs = rhs - rhs.mean()
    maxiter = maxiter or 20 * len(rhs)
    phi, info = _conjugate_gradient(K, rhs, tol, maxiter)
    residual = float(np.linalg.norm(K @ phi - rhs) / norm)
    logger.debug(f'neumann solve: {len(rhs)} nodes, info = {info}, relative residual = {residual:.3e}')
    if info != 0 or residual > 1e3 * tol:
        raise SolverError(f'conjugate gradients stopped at relative residual [{residual:.3e}].', residual=residual)
    phi = phi - np.sum(m * phi) / m.sum()
    logger.info(f'neumann problem solved on {shape}: c = {c:.6g}')
    return PotentialField(axes, phi.reshape(shape), c, record, mean_zero=True)


def flux_neumann_data(fslice, lam0=1.0):
    r"""``fbar = int_0^1 (f - f') dt`` of a slice as piecewise constant Neumann data per face bin.

    The data are divided by the source value so that ``grad phi`` approximates the displacement.

    Raises:
        FluxSplitError: if removed flux sits in the layer ``{x_1 < delta}``.
    """
    for atoms in (fslice.exits, fslice.entries):
        leaking = ~atoms.kept & (atoms.point[:, 0] < fslice.delta)
        if np.any(leaking):
            raise FluxSplitError(f'{int(leaking.sum())} removed atoms lie below x_1 = delta = [{fslice.delta:.4g}].')
    density, _ = fslice.binned('removed', time_binned=False)
    density = density[:, 0, :] / lam0

    def flux(points, face):
        faces = np.full(len(points), face, dtype=np.int64)
        return density[face, fslice.face_bin_index(points, faces)]

    return NeumannRecord(fslice.R, flux, dimension=fslice.dimension)


def tilde_neumann_data(fslice, chart0=None, chart1=None, lam0=1.0):
    r"""Data of ``phi~`` on ``Q_R ∩ {x_1 > delta}`` with ``fbar`` on the sides and ``gbar`` on the bottom.

    ``gbar = g_0 - g_1`` is read per tangential bin from the slice as the mass of ``x1`` minus the
    mass of ``x0`` in the column of the layer ``Q ∩ {x_1 < delta}`` above it. The exact integral of
    both data is attached, so that ``c~ = c_0 - c_1`` with the densities of
    :meth:`FluxSlice.main_densities` up to :meth:`FluxSlice.kept_balance_defect`.

    Args:
        fslice (FluxSlice): slice with ``0 <= delta < R``.
        chart0 (BoundaryGraph, optional), chart1 (BoundaryGraph, optional): the boundary charts;
            when given both must stay inside the layer over the window.
        lam0 (float): source value.

    Returns:
        NeumannRecord: with ``lower = delta``.

    Raises:
        FluxSplitError: if removed flux sits in the layer.
        PreconditionError: if a chart leaves the layer ``|g| <= delta``.
    """
    logger = logging.getLogger()
    base = flux_neumann_data(fslice, lam0)
    R, d = fslice.R, fslice.dimension
    radius = R * np.sqrt(d - 1)
    for name, chart in (('g_0', chart0), ('g_1', chart1)):
        if chart is not None and chart.sup_norm(radius=radius) > fslice.delta * (1.0 + 1e-12):
            raise PreconditionError(f'{name} reaches [{chart.sup_norm(radius=radius):.4g}] outside the layer '
                                    f'of width [{fslice.delta:.4g}].', reason='width', stage='harmonic')

    area = fslice.face_bin_area()
    columns = np.zeros(fslice.face_bins)
    zeros = np.zeros(len(fslice.traj_mass), dtype=np.int64)
    for sign, points in ((-1.0, fslice.x0), (1.0, fslice.x1)):
        layer = np.all(np.abs(points) < R, axis=1) & (points[:, 0] < fslice.delta)
        np.add.at(columns, fslice.face_bin_index(points[layer], zeros[layer]), sign * fslice.traj_mass[layer])
    gbar = columns / (lam0 * area)
    if chart0 is not None and chart1 is not None and d > 1 and R <= min(chart0.half_width, chart1.half_width):
        tangential = fslice.face_bin_centers(0)[:, 1:]
        gap = np.abs(gbar - (chart0.value(tangential) - chart1.value(tangential)))
        logger.info(f'layer flux against g_0 - g_1: mean gap {gap.mean():.3e}, max gap {gap.max():.3e}')

    def lower_flux(points):
        return gbar[fslice.face_bin_index(points, np.zeros(len(points), dtype=np.int64))]

    removed = fslice.net_flux() - fslice.kept_net_flux()
    integral = (removed + columns.sum()) / lam0
    return NeumannRecord(R, base.flux, lower=fslice.delta, lower_flux=lower_flux, dimension=d, integral=integral)
