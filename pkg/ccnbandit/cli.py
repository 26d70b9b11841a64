"""
Command line entry point::

    ccnbandit simulate --preset fig2 --replications 20
    ccnbandit sweep-t0 --config my-experiment.yaml --t0 3,9,30 --strategies rr,uni
    ccnbandit bounds --preset fig6 --out-dir /tmp/fig6
    ccnbandit validate --preset fig2

Exit codes: 0 on success, 1 on runtime failures, 2 on configuration errors.
"""
import argparse
import logging
import sys

from . import __version__
from . import caches
from . import config
from . import exceptions
from . import runner

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2


def comma_separated(cast):
    def parse(value):
        try:
            return [cast(part) for part in value.split(',') if part.strip()]
        except ValueError:
            raise argparse.ArgumentTypeError('expected a comma separated list, got {0!r}'.format(value))
    return parse


def build_parser():
    parser = argparse.ArgumentParser(
        prog='ccnbandit',
        description='Interest forwarding as a bandit with delayed feedback: '
                    'simulations and closed-form bounds')
    parser.add_argument('--version', action='version', version='%(prog)s {0}'.format(__version__))

    common = argparse.ArgumentParser(add_help=False)
    source = common.add_mutually_exclusive_group(required=True)
    source.add_argument('--config', help='YAML or JSON experiment document')
    source.add_argument('--preset', help='bundled experiment: {0}'.format(', '.join(config.available_presets())))
    common.add_argument('--seed', type=int, help='master seed')
    common.add_argument('--replications', type=int, help='Monte Carlo replications')
    common.add_argument('--horizon', type=int, help='slots per run')
    common.add_argument('--workers', type=int, help='worker processes for replications')
    common.add_argument('--out-dir', help='output directory (default: ${0}/<name>)'.format(config.OUT_DIR_ENV))
    common.add_argument('--no-cache', action='store_true', help='recompute every empirical estimate')
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument('-v', '--verbose', action='store_true')
    verbosity.add_argument('-q', '--quiet', action='store_true')

    subparsers = parser.add_subparsers(dest='command', metavar='command')
    subparsers.required = True

    simulate = subparsers.add_parser('simulate', parents=[common], help='fraction-optimal curves')
    simulate.add_argument('--traces', type=int, help='write the traces of the first N replications')

    sweep = subparsers.add_parser('sweep-t0', parents=[common], help='initial phase length and strategy sweep')
    sweep.add_argument('--t0', type=comma_separated(int), help='e.g. 3,9,30')
    sweep.add_argument('--strategies', type=comma_separated(str), help='e.g. round-robin,uniform-random')

    subparsers.add_parser('bounds', parents=[common], help='theorem bounds against empirical estimates')
    subparsers.add_parser('validate', parents=[common], help='check a configuration without running it')
    subparsers.add_parser('distributions', parents=[common], help='delay pmf and cdf tables')
    return parser


def configure_logging(args):
    level = logging.INFO
    if args.verbose:
        level = logging.DEBUG
    elif args.quiet:
        level = logging.WARNING
    logging.basicConfig(level=level, stream=sys.stderr,
                        format='%(asctime)s %(levelname)s %(name)s: %(message)s')


def get_overrides(args):
    overrides = {
        'seed': args.seed,
        'replications': args.replications,
        'horizon': args.horizon,
        'workers': args.workers,
        'output.traces': getattr(args, 'traces', None),
        'sweep.t0': getattr(args, 't0', None),
        'sweep.strategies': getattr(args, 'strategies', None),
    }
    section_overrides = {
        'bounds.replications': args.replications,
        'bounds.theorem4.replications': args.replications,
    }
    return overrides, section_overrides


def load(args):
    overrides, section_overrides = get_overrides(args)
    if args.preset:
        return config.load_preset(args.preset, overrides, section_overrides)
    return config.load_experiment(args.config, overrides, section_overrides)


def report_config_error(error):
    sys.stderr.write('Invalid configuration: {0}\n'.format(error))
    for line in error.lines():
        sys.stderr.write('  {0}\n'.format(line))


def print_report(report, stream=None):
    stream = stream or sys.stdout
    for line in report.lines:
        stream.write('{0}\n'.format(line))
    for warning in report.warnings:
        stream.write('warning: {0}\n'.format(warning))
    for error in report.errors:
        stream.write('error: {0}\n'.format(error))
    stream.write('valid: {0}\n'.format('yes' if report.ok else 'no'))


def main(argv=None):
    args = build_parser().parse_args(argv)
    configure_logging(args)

    try:
        spec = load(args)
    except exceptions.ConfigError as e:
        report_config_error(e)
        return EXIT_CONFIG
    except exceptions.UnknownPreset as e:
        sys.stderr.write('{0}\n'.format(e.args[0]))
        return EXIT_CONFIG

    cache = None if args.no_cache else caches.FileCache(spec.cache_directory(args.out_dir))
    experiment_runner = runner.ExperimentRunner(cache=cache, workers=args.workers)
    try:
        result = experiment_runner.execute(args.command, spec, out_dir=args.out_dir)
    except exceptions.ConfigError as e:
        report_config_error(e)
        return EXIT_CONFIG
    except Exception:
        logger.exception('%s failed', args.command)
        return EXIT_FAILURE

    if args.command == 'validate':
        print_report(result)
        return EXIT_OK if result.ok else EXIT_CONFIG
    for path in result:
        logger.info('Output: %s', path)
    return EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
