# -*- coding: utf-8 -*-

"""
otlab.quick_start
########################
"""
import json
import logging
import os
import threading
from concurrent.futures import ThreadPoolExecutor
from logging import getLogger

import numpy as np
import pandas as pd
from tqdm import tqdm

from otlab.campanato.theorem import verify_theorem
from otlab.config import Config
from otlab.data import create_instance
from otlab.data.families import family_dict
from otlab.evaluator import Evaluator, fit_exponent
from otlab.quick_start.plot import plot_ladder, plot_profile, plot_ratio
from otlab.utils import ensure_dir, init_logger, init_seed, set_color

FIT_COLUMNS = ('epsilon', 'E', 'D', 'holder', 'linf_ratio')
_PLOT_LOCK = threading.Lock()


def _json_default(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    return str(value)


def _instance_configs(config):
    if config['amplitudes']:
        return [config.copy(amplitude=a, amplitudes=None) for a in config['amplitudes']]
    return [config]


def _run_one(index, config, out_dir, plots=True):
    r"""Build, verify and export one instance; returns its aggregate row."""
    instance_id = f"{config['family']}-{index:03d}"
    instance_dir = os.path.join(out_dir, instance_id)
    ensure_dir(instance_dir)

    instance = create_instance(config)
    report = verify_theorem(config, instance)
    report.to_json(os.path.join(instance_dir, 'report.json'))
    instance.save(instance_dir)
    if plots:
        # pyplot keeps global state
        with _PLOT_LOCK:
            _plot_instance(instance, report, instance_dir)
    row = {'instance': instance_id}
    row.update(report.to_row())
    return row


def _plot_instance(instance, report, instance_dir):
    if instance.dimension == 1:
        transport = instance.generator.transport if instance.generator.explicit else None
        plot_profile(instance.field, os.path.join(instance_dir, 'profile.svg'), transport)
    if report.ladder is not None and len(report.ladder) > 1:
        plot_ladder(report.ladder.to_dataframe(), os.path.join(instance_dir, 'ladder.svg'),
                    report.ladder.theta, report.ladder.alpha)


def fit_slopes(frame, column):
    r"""Fitted log-log exponents of the report quantities against the family parameter ``column``."""
    rows = []
    for quantity in FIT_COLUMNS:
        if quantity not in frame:
            continue
        sub = frame[[column, quantity]].dropna()
        sub = sub[(sub[column] > 0) & (sub[quantity] > 0)]
        rows.append({'quantity': quantity, 'parameter': column.replace('param_', ''), 'points': len(sub),
                     'exponent': fit_exponent(sub[column], sub[quantity])})
    return pd.DataFrame(rows)


def run_lab(family=None, config_file_list=None, config_dict=None, cmd_args=None, config=None):
    r""" A fast running api, which includes the complete process of building and verifying
    every instance of an experiment.

    Writes ``<out_dir>/<family>/<instance>/report.json`` with the plan and map CSVs, the
    aggregate ``results.csv`` sorted by instance id, ``fits.csv`` when an amplitude sweep
    is run, and the SVG figures.

    Args:
        family (str, optional): instance family. Defaults to ``None``.
        config_file_list (list, optional): Config files used to modify experiment parameters. Defaults to ``None``.
        config_dict (dict, optional): Parameters dictionary used to modify experiment parameters. Defaults to ``None``.
        cmd_args (list, optional): ``--key=value`` arguments; ``sys.argv`` when ``None``.
        config (Config, optional): a prepared configuration, replacing the arguments above.

    Returns:
        pandas.DataFrame: the aggregate table.
    """
    # configurations initialization
    if config is None:
        config = Config(family=family, config_file_list=config_file_list, config_dict=config_dict, cmd_args=cmd_args)
    init_seed(config['seed'], config['reproducibility'])
    # logger initialization
    init_logger(config)
    logger = getLogger()
    logger.info(config)

    out_dir = os.path.join(config['out_dir'], config['family'])
    ensure_dir(out_dir)
    configs = _instance_configs(config)
    plots = bool(config['plots'])

    def task(item):
        index, instance_config = item
        return _run_one(index, instance_config, out_dir, plots)

    items = list(enumerate(configs))
    if config['threads'] > 1 and len(items) > 1:
        # map keeps the input order
        with ThreadPoolExecutor(max_workers=config['threads']) as pool:
            rows = list(pool.map(task, items))
    else:
        iterator = tqdm(items, desc=set_color('instances', 'pink'), ncols=100) if config['show_progress'] else items
        rows = [task(item) for item in iterator]

    frame = pd.DataFrame(rows).sort_values('instance').reset_index(drop=True)
    csv_path = os.path.join(out_dir, 'results.csv')
    frame.to_csv(csv_path, index=False, float_format='%.10g')
    logger.info(set_color('aggregate', 'yellow') + f': {len(frame)} instances written to {csv_path}')

    if len(frame) > 1 and 'param_amplitude' in frame:
        fits = fit_slopes(frame, 'param_amplitude')
        fits.to_csv(os.path.join(out_dir, 'fits.csv'), index=False, float_format='%.10g')
        logger.info(set_color('fitted exponents', 'yellow') + '\n' + fits.to_string(index=False))
        if plots:
            plot_ratio(frame, os.path.join(out_dir, 'ratio.svg'), 'param_amplitude')
    return frame


def accept(criteria=None, config_file_list=None, config_dict=None, cmd_args=None):
    r"""Run acceptance criteria and write ``<out_dir>/acceptance.json``.

    Args:
        criteria (list, optional): criterion ids, all of them by default.

    Returns:
        dict: criterion id mapped to its :class:`~otlab.evaluator.CriterionResult`.
    """
    config_dict = dict(config_dict or {})
    if criteria:
        config_dict['criteria'] = [str(c) for c in criteria]
    config = Config(family=config_dict.pop('family', 'identity'), config_file_list=config_file_list,
                    config_dict=config_dict, cmd_args=cmd_args)
    init_seed(config['seed'], config['reproducibility'])
    init_logger(config)
    logger = getLogger()

    results = Evaluator(config).evaluate()
    ensure_dir(config['out_dir'])
    path = os.path.join(config['out_dir'], 'acceptance.json')
    with open(path, 'w', encoding='utf-8') as f:
        json.dump({cid: r.to_dict() for cid, r in results.items()}, f, indent=2, sort_keys=True,
                  default=_json_default)
        f.write('\n')
    for cid, result in results.items():
        color = 'green' if result.passed else 'red'
        logger.info(set_color(f'[{cid}] {result.title}', color) + f': {"pass" if result.passed else "FAIL"}')
    return results


def list_families():
    r"""The built-in instance families with their one-line descriptions."""
    catalog = []
    for name, cls in family_dict.items():
        doc = (cls.__doc__ or '').strip().splitlines()
        catalog.append({'family': name, 'dimensions': list(cls.dimensions), 'explicit': cls.explicit,
                        'description': doc[0] if doc else ''})
    logging.getLogger().debug(f'{len(catalog)} families registered')
    return catalog
