# -*- coding: utf-8 -*-

import json
from types import SimpleNamespace

import pandas as pd
import pytest

import otlab.evaluator.criteria as criteria_module
import run_lab as cli
from otlab.config import Config
from otlab.evaluator import Evaluator, criteria_dict, fit_exponent, relative_variation
from otlab.quick_start import fit_slopes, list_families, run_lab
from otlab.utils import ConfigurationError, PreconditionError, SolverError


def test_criteria_are_registered_in_order():
    assert list(criteria_dict) == [str(i) for i in range(1, 12)]
    for cid, cls in criteria_dict.items():
        assert cls.criterion_id == cid
        assert cls.title


def test_unknown_criterion_is_rejected():
    config = Config(family='identity', config_dict={'criteria': '99'}, cmd_args=[])
    with pytest.raises(ConfigurationError):
        Evaluator(config)


def test_list_families():
    catalog = {entry['family']: entry for entry in list_families()}
    assert {'identity', 'remark33', 'flat-perturbation', 'tilted-tangency'} <= set(catalog)
    assert catalog['identity']['description']
    assert catalog['remark33']['dimensions'] == [1]


def test_fit_exponent():
    assert fit_exponent([1.0, 2.0, 4.0], [3.0, 12.0, 48.0]) == pytest.approx(2.0)
    assert pd.isna(fit_exponent([1.0], [1.0]))
    assert relative_variation([2.0, 3.0]) == pytest.approx(0.5)


def test_fit_slopes():
    frame = pd.DataFrame({'param_amplitude': [0.01, 0.02, 0.04], 'E': [1e-4, 4e-4, 1.6e-3],
                          'D': [0.0, 0.0, 0.0]})
    fits = fit_slopes(frame, 'param_amplitude').set_index('quantity')
    assert fits.loc['E', 'exponent'] == pytest.approx(2.0)
    assert fits.loc['E', 'parameter'] == 'amplitude'
    assert fits.loc['D', 'points'] == 0
    assert 'holder' not in fits.index


def test_run_lab_writes_outputs(tmp_path):
    frame = run_lab(family='identity', config_dict={'n': 16, 'out_dir': str(tmp_path), 'plots': False},
                    cmd_args=[])
    assert list(frame['instance']) == ['identity-000']
    assert frame.loc[0, 'status'] == 'pass'

    family_dir = tmp_path / 'identity'
    assert (family_dir / 'results.csv').exists()
    assert not (family_dir / 'fits.csv').exists()
    instance_dir = family_dir / 'identity-000'
    for name in ('report.json', 'plan.csv', 'map.csv'):
        assert (instance_dir / name).exists()
    report = json.loads((instance_dir / 'report.json').read_text(encoding='utf-8'))
    assert report['family'] == 'identity'
    assert report['status'] == 'pass'


def test_cli_lists_families(capsys):
    assert cli.main(['list-families']) == cli.EXIT_PASS
    assert 'flat-perturbation' in capsys.readouterr().out


def test_cli_reports_configuration_errors(tmp_path):
    code = cli.main(['run', '--family', 'identity', '--out', str(tmp_path), '--tau=0.3'])
    assert code == cli.EXIT_CONFIG
    assert cli.main(['run', '--family', 'no-such-family', '--out', str(tmp_path)]) == cli.EXIT_CONFIG


def test_build_config_dict():
    args, extra = cli.get_args(['run', '--family', 'identity', '--n', '32', '--amplitudes', '0.1,0.2', '--lam=1.1'])
    assert cli.build_config_dict(args) == {'n': 32, 'amplitudes': '0.1,0.2'}
    assert extra == ['--lam=1.1']


class _Ladder(object):
    depth = 2

    def __len__(self):
        return 2

    def decay_constant(self):
        return 1.0


def _theorem_report(holder_of):
    def fake(config):
        eps = config['amplitude'] ** 2
        return SimpleNamespace(status='pass', epsilon=eps, holder=holder_of(eps), ladder=_Ladder(), notes=[])
    return fake


def test_ladder_criterion_needs_holder_estimates(monkeypatch):
    config = Config(family='identity', cmd_args=[])
    monkeypatch.setattr(criteria_module, 'verify_theorem', _theorem_report(lambda eps: None))
    result = criteria_module.LadderStability(config).check()
    assert not result.passed
    assert 'holder_exponent' not in result.measurements

    monkeypatch.setattr(criteria_module, 'verify_theorem', _theorem_report(lambda eps: 3.0 * eps))
    result = criteria_module.LadderStability(config).check()
    assert result.passed
    assert result.measurements['holder_exponent'] == pytest.approx(1.0)


def test_one_step_criterion_fails_without_a_step(monkeypatch):
    def fake_step(self, config):
        if config['family'] == 'power-graph':
            raise SolverError('no step')
        return None, SimpleNamespace(E=1.0, E_hat=0.1, to_row=lambda: {})

    monkeypatch.setattr(criteria_module.OneStepContraction, '_step', fake_step)
    result = criteria_module.OneStepContraction(Config(family='identity', cmd_args=[])).check()
    assert not result.passed
    assert 'error' in result.measurements['power-graph']
    assert 'D_ratio' not in result.measurements['power-graph']


def test_linf_criterion_skips_topological_failures(monkeypatch):
    monkeypatch.setattr(criteria_module, 'create_instance',
                        lambda config: SimpleNamespace(field=None, plan=config['amplitude'], dom0=None, dom1=None))
    monkeypatch.setattr(criteria_module, 'energy_report', lambda *args, **kwargs: SimpleNamespace(E=1e-4, D=0.0))

    def fake_stats(plan, report):
        if plan == 0.04:
            raise PreconditionError('long jump', reason='topological')
        return SimpleNamespace(ratio=1.0, sup=0.1)

    monkeypatch.setattr(criteria_module, 'linf_statistics', fake_stats)
    result = criteria_module.LinfScaling(Config(family='identity', cmd_args=[])).check()
    assert result.passed
    assert result.measurements['a=0.04,n=256'] == {'skipped': 'topological'}
    assert result.measurements['variation'] == 0.0

    def always_separated(plan, report):
        raise PreconditionError('long jump', reason='topological')

    monkeypatch.setattr(criteria_module, 'linf_statistics', always_separated)
    assert not criteria_module.LinfScaling(Config(family='identity', cmd_args=[])).check().passed
