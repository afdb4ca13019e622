# -*- coding: utf-8 -*-

"""
otlab.utils.utils
################################
"""

import datetime
import importlib
import os
import random

import numpy as np
import torch


def get_local_time():
    r"""Get current time

    Returns:
        str: current time
    """
    cur = datetime.datetime.now()
    cur = cur.strftime('%b-%d-%Y_%H-%M-%S')

    return cur


def ensure_dir(dir_path):
    r"""Make sure the directory exists, if it does not exist, create it

    Args:
        dir_path (str): directory path

    """
    if not os.path.exists(dir_path):
        os.makedirs(dir_path)


def get_family(family_name):
    r"""Automatically select the instance family class based on its name.

    Args:
        family_name (str): family name, e.g. ``flat-perturbation``

    Returns:
        AbstractFamily: family class
    """
    module = importlib.import_module('otlab.data.families')
    families = module.family_dict
    key = family_name.lower()
    if key in module.family_aliases:
        key = module.family_aliases[key]
    if key not in families:
        raise ValueError('`family_name` [{}] is not the name of an existing instance family.'.format(family_name))
    return families[key]


def init_seed(seed, reproducibility=True):
    r""" init random seed for random functions in numpy and torch

    Args:
        seed (int): random seed
        reproducibility (bool): Whether to require deterministic torch kernels
    """
    random.seed(seed)
    np.random.seed(seed % (2 ** 32))
    torch.manual_seed(seed)
    if reproducibility:
        torch.use_deterministic_algorithms(True, warn_only=True)


def ball_volume(radius, dimension):
    r"""Lebesgue measure of the euclidean ball of the given radius in R^d."""
    from scipy.special import gamma
    return np.pi ** (dimension / 2.0) / gamma(dimension / 2.0 + 1.0) * radius ** dimension


def sub_cell_offsets(dimension, supersample):
    r"""Offsets (in units of the cell side) of the ``supersample**d`` sub-cell centers of a unit cell.

    Returns:
        numpy.ndarray: array of shape ``(supersample**d, d)`` with entries in ``(-1/2, 1/2)``.
    """
    ticks = (np.arange(supersample) + 0.5) / supersample - 0.5
    grids = np.meshgrid(*([ticks] * dimension), indexing='ij')
    return np.stack([g.ravel() for g in grids], axis=-1)


def ball_quadrature(radius, dimension, n=48, supersample=4, center=None):
    r"""Midpoint quadrature of the ball ``B_radius(center)`` with fractional boundary cells.

    The bounding cube is split into ``(2n)**d`` cells; each cell weight is its volume times
    the fraction of its ``supersample**d`` sub-cell centers inside the ball.

    Returns:
        tuple: ``(points, weights)`` restricted to cells with positive weight.
    """
    h = radius / n
    ticks = -radius + (np.arange(2 * n) + 0.5) * h
    grids = np.meshgrid(*([ticks] * dimension), indexing='ij')
    centers = np.stack([g.ravel() for g in grids], axis=-1)
    offsets = sub_cell_offsets(dimension, supersample) * h
    inside = np.zeros(len(centers))
    for off in offsets:
        inside += (np.linalg.norm(centers + off, axis=1) < radius)
    weights = inside / len(offsets) * h ** dimension
    keep = weights > 0
    points = centers[keep]
    if center is not None:
        points = points + np.asarray(center, dtype=float)
    return points, weights[keep]
