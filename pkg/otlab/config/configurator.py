# -*- coding: utf-8 -*-

"""
otlab.config.configurator
################################
"""

import os
import re
import sys
from logging import getLogger

import yaml

from otlab.utils import AssignmentBackend, Backend, PlanMode, ConfigurationError, get_family, set_color, \
    general_arguments, geometry_arguments, solver_arguments, eulerian_arguments, harmonic_arguments, \
    campanato_arguments, experiment_arguments

SCHEMA_VERSION = 1
LAM_RANGE = (0.5, 2.0)


class Config(object):
    """ Configurator module that loads the defined parameters.

    Configurator module will first load the default parameters from ``properties/overall.yaml``, then the
    preset of the instance family from ``properties/family/<family>.yaml``, and finally the external input.

    External input supports three kinds of forms: config file, command line and parameter dictionaries.

    - config file: a ``yaml`` or ``json`` file with the parameters to be modified or added, e.g.

        n: 128

        tau: 0.05

    - command line: in the format ``--n=128``.

    - parameter dictionaries: a dict, e.g. ``config_dict = {'n': 128}``.

    The priority order is: command line > parameter dictionaries > config file.

    Every configuration is validated on construction; violations raise
    :class:`~otlab.utils.exceptions.ConfigurationError`.
    """

    def __init__(self, family=None, config_file_list=None, config_dict=None, cmd_args=None):
        """
        Args:
            family (str, optional): the instance family, searched in the external input when ``None``.
            config_file_list (list of str): external config files.
            config_dict (dict): external parameter dictionary.
            cmd_args (list of str, optional): command line arguments, ``sys.argv[1:]`` when ``None``.
        """
        self._init_parameters_category()
        self.yaml_loader = self._build_yaml_loader()
        self.file_config_dict = self._load_config_files(config_file_list)
        self.variable_config_dict = self._load_variable_config_dict(config_dict)
        self.cmd_config_dict = self._load_cmd_line(cmd_args)
        self._merge_external_config_dict()

        self.family = self._get_family(family)
        self._load_internal_config_dict(self.family)
        self.final_config_dict = self._get_final_config_dict()
        self._set_default_parameters()

    def _init_parameters_category(self):
        self.parameters = dict()
        self.parameters['General'] = general_arguments
        self.parameters['Geometry'] = geometry_arguments
        self.parameters['Solver'] = solver_arguments
        self.parameters['Eulerian'] = eulerian_arguments
        self.parameters['Harmonic'] = harmonic_arguments
        self.parameters['Campanato'] = campanato_arguments
        self.parameters['Experiment'] = experiment_arguments

    def _build_yaml_loader(self):
        # a subclass keeps the float resolver local to otlab
        class Loader(yaml.SafeLoader):
            pass

        Loader.add_implicit_resolver(
            u'tag:yaml.org,2002:float',
            re.compile(
                u'''^(?:
             [-+]?(?:[0-9][0-9_]*)\\.[0-9_]*(?:[eE][-+]?[0-9]+)?
            |[-+]?(?:[0-9][0-9_]*)(?:[eE][-+]?[0-9]+)
            |\\.[0-9_]+(?:[eE][-+][0-9]+)?
            |[-+]?[0-9][0-9_]*(?::[0-5]?[0-9])+\\.[0-9_]*
            |[-+]?\\.(?:inf|Inf|INF)
            |\\.(?:nan|NaN|NAN))$''', re.X
            ), list(u'-+0123456789.')
        )
        return Loader

    def _convert_config_dict(self, config_dict):
        r"""Convert the str parameters to their original type with the yaml loader."""
        for key in config_dict:
            param = config_dict[key]
            if not isinstance(param, str):
                continue
            try:
                value = yaml.load(param, Loader=self.yaml_loader)
            except yaml.YAMLError:
                value = param
            config_dict[key] = value
        return config_dict

    def _read_mapping(self, path):
        with open(path, 'r', encoding='utf-8') as f:
            loaded = yaml.load(f.read(), Loader=self.yaml_loader)
        if loaded is None:
            return {}
        if not isinstance(loaded, dict):
            raise ConfigurationError(f'config file [{path}] does not hold a mapping.')
        return loaded

    def _load_config_files(self, file_list):
        merged = {}
        for path in file_list or []:
            merged.update(self._read_mapping(path))
        return merged

    def _load_variable_config_dict(self, config_dict):
        return self._convert_config_dict(dict(config_dict)) if config_dict else {}

    def _load_cmd_line(self, cmd_args):
        r""" Read parameters of the form ``--key=value`` from the command line."""
        parsed = {}
        ignored = []
        args = sys.argv[1:] if cmd_args is None else cmd_args
        if cmd_args is None and sys.argv and 'ipykernel_launcher' in sys.argv[0]:
            args = []
        for arg in args:
            name, sep, value = arg[2:].partition('=')
            if not arg.startswith('--') or not sep or '=' in value:
                ignored.append(arg)
                continue
            name = name.replace('-', '_')
            if parsed.get(name, value) != value:
                raise ConfigurationError(f"duplicate command line arg '{arg}' with different value.")
            parsed[name] = value
        if ignored:
            getLogger().warning(f"command line args [{' '.join(ignored)}] will not be used in otlab")
        return self._convert_config_dict(parsed)

    def _merge_external_config_dict(self):
        # later layers win
        self.external_config_dict = {**self.file_config_dict, **self.variable_config_dict, **self.cmd_config_dict}

    def _get_family(self, family):
        if family is None:
            try:
                family = self.external_config_dict['family']
            except KeyError:
                raise ConfigurationError(
                    'family needs to be specified in at least one of these ways: '
                    '[family variable, config file, config dict, command line]'
                )
        try:
            return get_family(family).name
        except ValueError as e:
            raise ConfigurationError(str(e))

    def _load_internal_config_dict(self, family):
        properties = os.path.join(os.path.dirname(os.path.realpath(__file__)), '..', 'properties')
        self.internal_config_dict = {}
        for path in (os.path.join(properties, 'overall.yaml'), os.path.join(properties, 'family', f'{family}.yaml')):
            if os.path.isfile(path):
                self.internal_config_dict.update(self._read_mapping(path))

    def _get_final_config_dict(self):
        return {**self.internal_config_dict, **self.external_config_dict}

    def _check_range(self, key, lo, hi, closed=False):
        value = self.final_config_dict[key]
        numeric = isinstance(value, (int, float)) and not isinstance(value, bool)
        inside = numeric and (lo <= value <= hi if closed else lo < value < hi)
        if not inside:
            bracket = f'[{lo}, {hi}]' if closed else f'({lo}, {hi})'
            raise ConfigurationError(f'{key} [{value}] must lie in {bracket}.')

    def _check_positive_int(self, key):
        value = self.final_config_dict[key]
        if not isinstance(value, int) or isinstance(value, bool) or value <= 0:
            raise ConfigurationError(f'{key} [{value}] must be a positive integer.')

    def _set_default_parameters(self):
        config = self.final_config_dict
        config['family'] = self.family

        if config.get('schema_version') != SCHEMA_VERSION:
            raise ConfigurationError(f"schema_version [{config.get('schema_version')}] is not supported, "
                                     f"expected {SCHEMA_VERSION}.")

        allowed = (1, 2, 3) if config['allow_3d'] else (1, 2)
        if config['dimension'] not in allowed:
            raise ConfigurationError(f"dimension [{config['dimension']}] must be one of {list(allowed)}.")
        self._check_range('tau', 0.0, 0.25)
        self._check_range('theta', 0.0, 1.0)
        self._check_range('alpha', 0.0, 1.0)
        self._check_range('harmonic_radius', 0.0, 1.0)
        for key in ('lam0', 'lam'):
            self._check_range(key, *LAM_RANGE, closed=True)
        for key in ('n', 'chart_nodes', 'neumann_n', 'depth', 'raster_cells', 'time_slices', 'n_radii',
                    'holder_resolution', 'acceptance_n', 'threads', 'local_rounds'):
            self._check_positive_int(key)
        for key in ('radius', 'extent', 'height', 'smallness'):
            value = config[key]
            if not isinstance(value, (int, float)) or isinstance(value, bool) or not value > 0:
                raise ConfigurationError(f'{key} [{config[key]}] must be positive.')

        for key, enum in (('backend', Backend), ('assignment_backend', AssignmentBackend), ('plan_mode', PlanMode)):
            try:
                config[key] = enum(config[key]).value
            except ValueError:
                choices = [e.value for e in enum]
                raise ConfigurationError(f'{key} [{config[key]}] must be one of {choices}.')

        amplitudes = config['amplitudes']
        if isinstance(amplitudes, str):
            try:
                amplitudes = [float(a) for a in amplitudes.split(',') if a.strip()]
            except ValueError:
                raise ConfigurationError(f'amplitudes [{amplitudes}] must be comma separated numbers.')
        elif isinstance(amplitudes, (int, float)):
            amplitudes = [float(amplitudes)]
        config['amplitudes'] = list(amplitudes) if amplitudes else None

        criteria = config['criteria']
        if isinstance(criteria, (int, str)):
            criteria = [c for c in str(criteria).split(',') if c.strip()]
        config['criteria'] = [str(c).strip() for c in criteria] if criteria else None

    def copy(self, **updates):
        r"""A new configuration with ``updates`` on top of this one's values, validated again."""
        values = dict(self.final_config_dict)
        values.update(updates)
        return Config(family=values['family'], config_dict=values, cmd_args=[])

    def __setitem__(self, key, value):
        if not isinstance(key, str):
            raise TypeError("index must be a str.")
        self.final_config_dict[key] = value

    def __getattr__(self, item):
        if 'final_config_dict' not in self.__dict__:
            raise AttributeError(f"'Config' object has no attribute 'final_config_dict'")
        if item in self.final_config_dict:
            return self.final_config_dict[item]
        raise AttributeError(f"'Config' object has no attribute '{item}'")

    def __getitem__(self, item):
        if item in self.final_config_dict:
            return self.final_config_dict[item]
        else:
            return None

    def __contains__(self, key):
        if not isinstance(key, str):
            raise TypeError("index must be a str.")
        return key in self.final_config_dict

    def __str__(self):
        args_info = '\n'
        for category in self.parameters:
            args_info += set_color(category + ' Parameters:\n', 'pink')
            args_info += '\n'.join([(set_color("{}", 'cyan') + " =" + set_color(" {}", 'yellow')).format(arg, value)
                                    for arg, value in self.final_config_dict.items()
                                    if arg in self.parameters[category]])
            args_info += '\n\n'

        others = [(arg, value) for arg, value in self.final_config_dict.items()
                  if arg not in {_ for args in self.parameters.values() for _ in args}]
        if others:
            args_info += set_color('Other Parameters: \n', 'pink')
            args_info += '\n'.join([(set_color("{}", 'cyan') + " = " + set_color("{}", 'yellow')).format(arg, value)
                                    for arg, value in others])
            args_info += '\n\n'
        return args_info

    def __repr__(self):
        return self.__str__()
