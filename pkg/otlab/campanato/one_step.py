# -*- coding: utf-8 -*-

"""
otlab.campanato.one_step
########################

One affine improvement step: the harmonic approximation at scale ``R`` yields ``(b, B)``,
and the map is renormalized to ``T^(x^) = B (T(B^T x^) - b)`` at scale ``theta R``.
"""

import logging

import numpy as np

from otlab.geometry.graph import deviation_D, outward_normal, width_delta
from otlab.harmonic.approximation import DEFAULT_RADIUS, harmonic_approximation, harmonic_potential
from otlab.quantities.checks import check_topological
from otlab.quantities.energy import energy_E
from otlab.transport.affine import AffineChange, apply_affine
from otlab.utils import ball_quadrature
from otlab.utils.exceptions import OutOfRegimeError, PreconditionError, SymmetryError
from otlab.utils.matrix import normal_tilt, plane_rotation, sym_expm, sym_sqrtm, symmetrization_defect

SYMMETRY_TOL = 1e-8
REGIME_LIMIT = 0.5
SMALLNESS = 0.1


class AffineStep(object):
    r"""The affine data of one improvement step.

    Attributes:
        b_bar (numpy.ndarray): ball average of ``grad phi`` near 0.
        A_bar (numpy.ndarray): ball average of ``grad^2 phi`` near 0, symmetrized.
        B_bar (numpy.ndarray): ``exp(-A_bar / 2)``.
        b_tilde (numpy.ndarray): ``g_1(b_bar') e_1``.
        B_tilde (numpy.ndarray): symmetric root realigning the two transformed normals.
        rotation (numpy.ndarray): plane rotation taking the common normal back to ``-e_1``.
        B (numpy.ndarray): ``rotation @ B_tilde @ B_bar``.
        b (numpy.ndarray): ``b_bar + b_tilde``.
        symmetry_defect (float): norm of the antisymmetric part removed from ``A_bar``.
        block_defect (float): size of ``b_bar_1`` and of the mixed entries ``A_bar_{1j}``.
    """

    def __init__(self, b_bar, A_bar, B_bar, b_tilde, B_tilde, rotation, symmetry_defect=0.0):
        self.b_bar = b_bar
        self.A_bar = A_bar
        self.B_bar = B_bar
        self.b_tilde = b_tilde
        self.B_tilde = B_tilde
        self.rotation = rotation
        self.symmetry_defect = symmetry_defect
        self.B = rotation @ B_tilde @ B_bar
        self.b = b_bar + b_tilde
        self.lam_hat = None

    @property
    def dimension(self):
        return len(self.b)

    @property
    def block_defect(self):
        return float(np.sqrt(self.b_bar[0] ** 2 + np.sum(self.A_bar[0, 1:] ** 2) + np.sum(self.A_bar[1:, 0] ** 2)))

    @property
    def rotation_defect(self):
        return float(np.linalg.norm(self.rotation - np.eye(self.dimension)))

    def distance_to_identity(self):
        return float(np.linalg.norm(self.B - np.eye(self.dimension), 2))

    def change(self):
        return AffineChange(self.B, self.b)

    def to_dict(self):
        return {
            'b_bar': self.b_bar.tolist(), 'A_bar': self.A_bar.tolist(), 'B': self.B.tolist(), 'b': self.b.tolist(),
            'b_tilde': self.b_tilde.tolist(), 'rotation_defect': self.rotation_defect,
            'symmetry_defect': self.symmetry_defect, 'block_defect': self.block_defect, 'lam_hat': self.lam_hat,
        }

    def __repr__(self):
        return f'AffineStep(|B-Id|={self.distance_to_identity():.3e}, |b|={np.linalg.norm(self.b):.3e})'


def ball_averages(potential, radius, center=None, n_quad=32):
    r"""Averages of ``grad phi`` and ``grad^2 phi`` over ``B_radius``; by the mean-value property
    they equal the values at the center for harmonic gradients."""
    points, weights = ball_quadrature(radius, potential.dimension, n=n_quad, center=center)
    total = weights.sum()
    grad = np.einsum('n,ni->i', weights, potential.gradient_at(points)) / total
    hess = np.einsum('n,nij->ij', weights, potential.hessian_at(points)) / total
    return grad, hess


def build_affine_step(b_bar, A_bar, chart0, chart1, tol=SYMMETRY_TOL):
    r"""``(b, B)`` from the harmonic data and the two normalized charts.

    ``B_bar = exp(-A_bar / 2)``; ``b = b_bar + g_1(b_bar') e_1`` puts 0 on both boundaries;
    ``B_tilde^2`` is the symmetric matrix acting as the identity on the complement of
    ``u_0 = B_bar nu_0(0) / |.|`` and taking it to ``u_1 = B_bar^{-1} nu_1(b) / |.|``; the final
    rotation brings the common normal back to ``-e_1``.

    Raises:
        SymmetryError: if ``A_bar`` is not symmetric within ``tol``.
    """
    b_bar = np.asarray(b_bar, dtype=float)
    A_bar = np.asarray(A_bar, dtype=float)
    d = len(b_bar)
    defect = symmetrization_defect(A_bar)
    if defect > tol * max(1.0, float(np.linalg.norm(A_bar))):
        raise SymmetryError(f'averaged Hessian has antisymmetric part [{defect:.3e}]: reflection is broken.')
    A_bar = 0.5 * (A_bar + A_bar.T)
    B_bar = sym_expm(-0.5 * A_bar)
    e1 = np.eye(d)[0]
    tangential = b_bar[1:]
    b_tilde = chart1.value(tangential) * e1
    b = b_bar + b_tilde

    nu0 = outward_normal(chart0, np.zeros(d - 1))
    nu1 = outward_normal(chart1, b[1:])
    u0 = B_bar @ nu0
    u0 /= np.linalg.norm(u0)
    u1 = np.linalg.solve(B_bar, nu1)
    u1 /= np.linalg.norm(u1)
    B_tilde = sym_sqrtm(normal_tilt(u0, u1))
    common = B_tilde @ B_bar @ nu0
    rotation = plane_rotation(common / np.linalg.norm(common), -e1)
    return AffineStep(b_bar, A_bar, B_bar, b_tilde, B_tilde, rotation, defect)


class OneStepResult(object):
    r"""Outcome of :func:`one_step`.

    Attributes:
        step (AffineStep): the affine data.
        plan (TransportPlan), field (MapField), dom0 (Domain), dom1 (Domain): the transformed problem.
        E (float), D (float): ``E_R`` and ``D_R`` before the step.
        E_hat (float), D_hat (float): ``E^_{theta R}`` and ``D^_{theta R}`` after it.
        approx_error (float), dirichlet (float): quality of the harmonic approximation on ``B_{rR}``.
    """

    def __init__(self, step, plan, field, dom0, dom1, R, theta, E, D, E_hat, D_hat, approx_error=float('nan'),
                 dirichlet=float('nan')):
        self.step = step
        self.plan = plan
        self.field = field
        self.dom0 = dom0
        self.dom1 = dom1
        self.R = R
        self.theta = theta
        self.E = E
        self.D = D
        self.E_hat = E_hat
        self.D_hat = D_hat
        self.approx_error = approx_error
        self.dirichlet = dirichlet

    @property
    def contraction(self):
        return self.E_hat / self.E if self.E > 0 else 0.0

    @property
    def step_constant(self):
        r"""Fitted ``C`` in ``|B - Id|^2 + |b|^2 / R^2 <= C (E + D)``."""
        lhs = np.linalg.norm(self.step.B - np.eye(self.step.dimension)) ** 2 + np.sum(self.step.b ** 2) / self.R ** 2
        total = self.E + self.D
        if total == 0.0:
            return 0.0 if lhs == 0.0 else float('inf')
        return float(lhs / total)

    def to_row(self):
        return {'R': self.R, 'theta': self.theta, 'E': self.E, 'D': self.D, 'E_hat': self.E_hat, 'D_hat': self.D_hat,
                'contraction': self.contraction, 'step_constant': self.step_constant,
                'approx_error': self.approx_error, 'dirichlet': self.dirichlet}

    def __repr__(self):
        return f'OneStepResult(R={self.R:.4g}, E={self.E:.3e} -> {self.E_hat:.3e}, D={self.D:.3e} -> {self.D_hat:.3e})'


def check_preconditions(plan, dom0, dom1, R, E, D, smallness=SMALLNESS):
    r"""Tangency, topological and smallness conditions at scale ``R``.

    Raises:
        PreconditionError: with reason ``tangency``, ``topological`` or ``smallness``.
    """
    origin = np.zeros(dom0.dimension - 1)
    for dom in (dom0, dom1):
        chart = dom.chart
        offset = abs(chart.value(origin))
        slope = float(np.linalg.norm(chart.gradient(origin))) if chart.chart_dimension else 0.0
        if max(offset, slope) > chart.h + 1e-9:
            raise PreconditionError(f'{dom.name} is not normalized at 0: |g(0)| = {offset:.3e}, '
                                    f'|grad g(0)| = {slope:.3e}.', reason='tangency')
    topo = check_topological(plan, R=R)
    if not topo:
        raise PreconditionError(f'topological condition fails at R = {R:.4g}.', reason='topological',
                                witnesses=topo.witnesses)
    if E + D > smallness:
        raise PreconditionError(f'E + D = [{E + D:.3e}] exceeds the smallness threshold [{smallness:.3e}].',
                                reason='smallness')


def one_step(field, plan, dom0, dom1, R=1.0, theta=0.5, r=DEFAULT_RADIUS, tau=0.1, n_poisson=64,
             smallness=SMALLNESS, regime_limit=REGIME_LIMIT):
    r"""Run one improvement step at scale ``R``.

    Args:
        field (MapField): the map ``T``.
        plan (TransportPlan): the coupling it comes from.
        dom0 (Domain): normalized source domain.
        dom1 (Domain): normalized target domain.
        R (float): current scale.
        theta (float): contraction of the scale.
        r (float): radius fraction of the harmonic approximation; derivatives are averaged on ``B_{rR/2}``.
        tau (float): early/late time window of the flux split.
        n_poisson (int): intervals along ``x_1`` of the Poisson half-cube.

    Returns:
        OneStepResult: the step and the transformed problem measured at ``theta R``.

    Raises:
        PreconditionError: if the problem is not well prepared at scale ``R``.
        SymmetryError: if the averaged Hessian is not symmetric.
        OutOfRegimeError: if ``|B - Id| >= regime_limit``.
    """
    logger = logging.getLogger()
    d = field.dimension
    E = energy_E(field, dom0, R)
    D = deviation_D(dom0.chart, dom1.chart, R) if d > 1 else 0.0
    check_preconditions(plan, dom0, dom1, R, E, D, smallness)

    delta = width_delta(dom0.chart, dom1.chart, R)
    solution = harmonic_potential(plan, tau=tau, delta=delta, scale=R, n=n_poisson)
    potential = solution.potential
    approx_error, dirichlet = harmonic_approximation(field, potential, r * R)
    b_bar, A_bar = ball_averages(potential, 0.5 * r * R)
    step = build_affine_step(b_bar, A_bar, dom0.chart, dom1.chart)
    distance = step.distance_to_identity()
    if distance >= regime_limit:
        raise OutOfRegimeError(f'|B - Id| = [{distance:.3f}] leaves the perturbative regime.')

    change = step.change()
    plan_hat = apply_affine(plan, change)
    field_hat = apply_affine(field, change)
    dom0_hat = apply_affine(dom0, change)
    dom1_hat = apply_affine(dom1, change)
    step.lam_hat = plan_hat.lam
    E_hat = energy_E(field_hat, dom0_hat, theta * R)
    D_hat = deviation_D(dom0_hat.chart, dom1_hat.chart, theta * R) if d > 1 else 0.0
    result = OneStepResult(step, plan_hat, field_hat, dom0_hat, dom1_hat, R, theta, E, D, E_hat, D_hat,
                           approx_error, dirichlet)
    logger.info(f'one step: {result}, {step}')
    return result
