"""
otlab command line
==================
Runs experiments and acceptance criteria of the boundary regularity lab.

    lab run --family remark33 --eps 0.1 --n 400
    lab run --family perturbation --amplitudes 0.01,0.02,0.04
    lab accept 2 8
    lab list-families
    lab plot output/flat-perturbation/results.csv

Arguments not listed below are forwarded to the configuration as ``--key=value``.
"""
import argparse
import logging
import sys

from otlab.utils import ConfigurationError, LabError

EXIT_PASS = 0
EXIT_PIPELINE = 1
EXIT_CONFIG = 2
EXIT_ACCEPTANCE = 3


def get_args(argv=None):
    parser = argparse.ArgumentParser(prog='lab', description='Boundary regularity lab for optimal transport maps.')
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', '-c', type=str, action='append', default=None, help='YAML or JSON config file.')
    common.add_argument('--out', '-o', type=str, default=None, help='output directory.')
    common.add_argument('--threads', type=int, default=None, help='parallel instances.')
    common.add_argument('--seed', type=int, default=None, help='random seed.')
    subparsers = parser.add_subparsers(dest='command', required=True)

    run = subparsers.add_parser('run', parents=[common], help='verify the estimate on one family.')
    run.add_argument('--family', '-f', type=str, default=None, help='instance family.')
    run.add_argument('--n', type=int, default=None, help='lattice nodes per unit length.')
    run.add_argument('--eps', type=float, default=None, help='separation of the one-dimensional families.')
    run.add_argument('--amplitudes', type=str, default=None, help='comma separated amplitude sweep.')

    accept = subparsers.add_parser('accept', parents=[common], help='run acceptance criteria.')
    accept.add_argument('criteria', nargs='*', help='criterion ids, all by default.')

    subparsers.add_parser('list-families', help='print the built-in instance families.')

    plot = subparsers.add_parser('plot', help='draw the figures of an aggregate CSV.')
    plot.add_argument('csv', type=str, help='aggregate CSV written by lab run.')
    plot.add_argument('--out', '-o', type=str, default=None, help='figure directory.')
    return parser.parse_known_args(argv)


def build_config_dict(args):
    r"""Explicit flags as config parameters; ``None`` means the flag was not given."""
    names = {'out': 'out_dir', 'threads': 'threads', 'seed': 'seed', 'n': 'n', 'eps': 'eps',
             'amplitudes': 'amplitudes'}
    config_dict = {}
    for flag, key in names.items():
        value = getattr(args, flag, None)
        if value is not None:
            config_dict[key] = value
    return config_dict


def main(argv=None):
    args, extra = get_args(argv)
    from otlab.quick_start import accept, list_families, plot_csv, run_lab

    if args.command == 'list-families':
        for entry in list_families():
            dims = ','.join(str(d) for d in entry['dimensions'])
            print(f"{entry['family']:<20s} d={dims:<6s} {entry['description']}")
        return EXIT_PASS
    if args.command == 'plot':
        print(plot_csv(args.csv, args.out))
        return EXIT_PASS

    logger = logging.getLogger()
    try:
        if args.command == 'run':
            run_lab(family=args.family, config_file_list=args.config, config_dict=build_config_dict(args),
                    cmd_args=extra)
            return EXIT_PASS
        results = accept(args.criteria, config_file_list=args.config, config_dict=build_config_dict(args),
                         cmd_args=extra)
        return EXIT_PASS if all(r.passed for r in results.values()) else EXIT_ACCEPTANCE
    except ConfigurationError as e:
        logger.error(f'configuration error: {e}')
        print(f'configuration error: {e}', file=sys.stderr)
        return EXIT_CONFIG
    except LabError as e:
        logger.exception(e)
        print(f'pipeline error: {e}', file=sys.stderr)
        return EXIT_PIPELINE


if __name__ == '__main__':
    sys.exit(main())
