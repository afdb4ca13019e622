# -*- coding: utf-8 -*-

"""
otlab.quick_start.plot
######################

SVG figures of experiment outputs.
"""

import logging
import os

import matplotlib

matplotlib.use('Agg')
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402

from otlab.utils import ensure_dir  # noqa: E402

# deterministic ids keep the SVG output diffable
matplotlib.rcParams['svg.hashsalt'] = 'otlab'
matplotlib.rcParams['svg.fonttype'] = 'none'

PARAMETER_COLUMNS = ('param_amplitude', 'param_eps', 'param_lam', 'param_saddle', 'param_angle')


def _save(fig, path):
    ensure_dir(os.path.dirname(os.path.abspath(path)))
    fig.savefig(path, format='svg', metadata={'Date': None})
    plt.close(fig)
    logging.getLogger().info(f'figure written to {path}')
    return path


def parameter_column(frame):
    r"""The family parameter that varies across the rows of an aggregate table, if any."""
    for column in PARAMETER_COLUMNS:
        if column in frame and frame[column].nunique() > 1:
            return column
    for column in PARAMETER_COLUMNS:
        if column in frame:
            return column
    return None


def plot_ratio(frame, path, column=None):
    r"""L-infinity ratio and ``epsilon`` against the family parameter, log-log."""
    column = column or parameter_column(frame)
    if column is None:
        raise ValueError('the table has no family parameter column to plot against.')
    frame = frame.sort_values(column)
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.5))
    axes[0].plot(frame[column], frame['linf_ratio'], 'o-')
    axes[0].set_xlabel(column.replace('param_', ''))
    axes[0].set_ylabel('sup|T - x| / (E^{1/(d+2)} + D^{1/2})')
    axes[0].set_xscale('log')
    axes[1].loglog(frame[column], frame['epsilon'], 's-', label='E + D')
    if 'holder' in frame and frame['holder'].notna().any():
        axes[1].loglog(frame[column], frame['holder'], '^-', label='Hölder')
    axes[1].set_xlabel(column.replace('param_', ''))
    axes[1].legend()
    fig.tight_layout()
    return _save(fig, path)


def plot_ladder(levels, path, theta=0.5, alpha=0.5):
    r"""``E_k`` and ``D_k`` of a ladder against the level, with the rate ``theta^{2 alpha k}``.

    Args:
        levels (pandas.DataFrame): one row per level with columns ``k``, ``E`` and ``D``.
    """
    k = np.asarray(levels['k'], dtype=float)
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.semilogy(k, levels['E'], 'o-', label='E_k')
    ax.semilogy(k, levels['D'] + 1e-300, 's-', label='D_k')
    scale = float(levels['E'].iloc[0] + levels['D'].iloc[0])
    if scale > 0:
        ax.semilogy(k, scale * theta ** (2.0 * alpha * k), 'k--', label='theta^{2 alpha k}')
    ax.set_xlabel('level k')
    ax.legend()
    fig.tight_layout()
    return _save(fig, path)


def plot_profile(field, path, transport=None):
    r"""Normal component of a one-dimensional map with the explicit map when known."""
    nodes, disp = field.valid_nodes()
    x = nodes[:, 0]
    order = np.argsort(x)
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(x[order], (x + disp[:, 0])[order], '.', markersize=2, label='T (solver)')
    if transport is not None:
        ax.plot(x[order], transport(nodes)[order, 0], 'k-', linewidth=0.8, label='T (explicit)')
    ax.set_xlabel('x_1')
    ax.set_ylabel('T_1(x)')
    ax.legend()
    fig.tight_layout()
    return _save(fig, path)


def plot_csv(csv_path, out_dir=None):
    r"""Figures of an aggregate CSV written by :func:`otlab.quick_start.run_lab`."""
    frame = pd.read_csv(csv_path)
    out_dir = out_dir or os.path.dirname(os.path.abspath(csv_path))
    stem = os.path.splitext(os.path.basename(csv_path))[0]
    return plot_ratio(frame, os.path.join(out_dir, f'{stem}_ratio.svg'))
