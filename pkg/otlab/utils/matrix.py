# -*- coding: utf-8 -*-

"""
otlab.utils.matrix
##################

Matrix functions of symmetric matrices by eigendecomposition, plus the two
orthogonal/symmetric constructions used to realign boundary normals.
"""

import numpy as np
from scipy.linalg import eigh

from otlab.utils.exceptions import MatrixError


def symmetrization_defect(matrix):
    r"""Frobenius norm of the antisymmetric part ``(A - A^T) / 2``."""
    matrix = np.asarray(matrix, dtype=float)
    return float(np.linalg.norm(0.5 * (matrix - matrix.T)))


def symmetric_part(matrix):
    matrix = np.asarray(matrix, dtype=float)
    return 0.5 * (matrix + matrix.T)


def sym_map(matrix, func):
    r"""Apply a scalar function to the spectrum of the symmetric part of ``matrix``.

    Args:
        matrix (numpy.ndarray): square matrix, symmetrized before decomposition.
        func (callable): elementwise function applied to the eigenvalues.

    Returns:
        numpy.ndarray: ``V diag(func(w)) V^T``.
    """
    values, vectors = eigh(symmetric_part(matrix))
    return (vectors * func(values)) @ vectors.T


def sym_expm(matrix):
    return sym_map(matrix, np.exp)


def sym_sqrtm(matrix):
    values = np.linalg.eigvalsh(symmetric_part(matrix))
    if values.min() <= 0.0:
        raise MatrixError(f'matrix square root needs a positive definite input, smallest eigenvalue [{values.min():.3e}].')
    return sym_map(matrix, np.sqrt)


def plane_rotation(source, target):
    r"""Rotation in ``span(source, target)`` taking the unit vector ``source`` to ``target``.

    ``R = I + K + K^2 / (1 + c)`` with ``K = t s^T - s t^T`` and ``c = s . t``; the identity on
    the orthogonal complement, determinant one.
    """
    s = np.asarray(source, dtype=float)
    t = np.asarray(target, dtype=float)
    s = s / np.linalg.norm(s)
    t = t / np.linalg.norm(t)
    c = float(s @ t)
    if c <= -1.0 + 1e-12:
        raise MatrixError('antipodal vectors do not determine a plane rotation.')
    k = np.outer(t, s) - np.outer(s, t)
    return np.eye(len(s)) + k + (k @ k) / (1.0 + c)


def normal_tilt(u0, u1):
    r"""Symmetric matrix ``A`` with ``A u0 = u1`` acting as the identity on ``u0``'s complement.

    Writing ``u1 = a u0 + w`` with ``w`` orthogonal to ``u0``,
    ``A = a u0 u0^T + w u0^T + u0 w^T + (I - u0 u0^T)``.
    """
    u0 = np.asarray(u0, dtype=float)
    u1 = np.asarray(u1, dtype=float)
    u0 = u0 / np.linalg.norm(u0)
    a = float(u0 @ u1)
    w = u1 - a * u0
    eye = np.eye(len(u0))
    return a * np.outer(u0, u0) + np.outer(w, u0) + np.outer(u0, w) + (eye - np.outer(u0, u0))
