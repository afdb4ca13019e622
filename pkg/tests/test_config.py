# -*- coding: utf-8 -*-

import pytest

from otlab.config import Config
from otlab.utils import ConfigurationError


def _config(family='identity', **updates):
    return Config(family=family, config_dict=updates, cmd_args=[])


def test_defaults_and_family_preset():
    config = _config()
    assert config['family'] == 'identity'
    assert config['n'] == 64
    assert config['plan_mode'] == 'synthetic'
    assert config['schema_version'] == 1

    preset = _config('flat-perturbation')
    assert preset['n'] == 24
    assert preset['radius'] == 0.5
    assert preset['plan_mode'] == 'solve'


def test_priority_of_external_input(tmp_path):
    path = tmp_path / 'lab.yaml'
    path.write_text('n: 10\ntau: 0.05\nseed: 7\n', encoding='utf-8')

    from_file = Config(family='identity', config_file_list=[str(path)], cmd_args=[])
    assert from_file['n'] == 10
    assert from_file['tau'] == 0.05

    from_dict = Config(family='identity', config_file_list=[str(path)], config_dict={'n': 12}, cmd_args=[])
    assert from_dict['n'] == 12
    assert from_dict['seed'] == 7

    from_cmd = Config(family='identity', config_file_list=[str(path)], config_dict={'n': 12},
                      cmd_args=['--n=14', '--show-progress=True'])
    assert from_cmd['n'] == 14
    assert from_cmd['tau'] == 0.05
    assert from_cmd['show_progress'] is True


def test_family_from_external_input():
    config = Config(config_dict={'family': 'perturbation'}, cmd_args=[])
    assert config['family'] == 'flat-perturbation'
    assert Config(cmd_args=['--family=translation'])['family'] == 'translation'


@pytest.mark.parametrize('family', [None, 'no-such-family'])
def test_family_is_required(family):
    with pytest.raises(ConfigurationError):
        Config(family=family, config_dict={'n': 8}, cmd_args=[])


@pytest.mark.parametrize('updates', [
    {'tau': 0.3},
    {'tau': 0.0},
    {'schema_version': 2},
    {'backend': 'foo'},
    {'plan_mode': 'guess'},
    {'dimension': 3},
    {'n': 0},
    {'depth': 1.5},
    {'lam': 3.0},
    {'theta': 1.0},
    {'radius': -1.0},
])
def test_invalid_values_are_rejected(updates):
    with pytest.raises(ConfigurationError):
        _config(**updates)


def test_three_dimensions_need_opt_in():
    assert _config(dimension=3, allow_3d=True)['dimension'] == 3


def test_comma_separated_lists():
    config = Config(family='flat-perturbation', cmd_args=['--amplitudes=0.01,0.02', '--criteria=2,8'])
    assert config['amplitudes'] == [0.01, 0.02]
    assert config['criteria'] == ['2', '8']
    assert _config(criteria=2)['criteria'] == ['2']
    assert _config()['amplitudes'] is None


def test_copy_revalidates_and_keeps_original():
    config = _config(n=16)
    other = config.copy(n=32, eps=0.2)
    assert other['n'] == 32
    assert other['eps'] == 0.2
    assert config['n'] == 16
    with pytest.raises(ConfigurationError):
        config.copy(tau=0.5)


def test_item_access():
    config = _config()
    assert config['missing'] is None
    assert 'tau' in config
    assert 'missing' not in config
    assert config.tau == config['tau']
    with pytest.raises(AttributeError):
        config.missing
    with pytest.raises(TypeError):
        config[0] = 1
    assert 'Campanato Parameters' in str(config)


def test_file_must_hold_a_mapping(tmp_path):
    path = tmp_path / 'list.yaml'
    path.write_text('- 1\n- 2\n', encoding='utf-8')
    with pytest.raises(ConfigurationError):
        Config(family='identity', config_file_list=[str(path)], cmd_args=[])


def test_conflicting_command_line_values():
    with pytest.raises(ConfigurationError):
        Config(family='identity', cmd_args=['--n=8', '--n=9'])
    assert Config(family='identity', cmd_args=['--n=8', '--n=8'])['n'] == 8
