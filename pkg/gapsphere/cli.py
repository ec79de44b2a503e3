""" Command-line surface: one subcommand per experiment, plus sampling, densities and the two-level curves.

Exit codes: 0 when every check passes, 1 when a check fails, 2 for usage and
configuration errors.
"""
import argparse
import contextlib
import csv
import json
import logging
import sys

import numpy

import gapsphere.about as about
from gapsphere.config import config_from_dict, load_config
from gapsphere.experiments import comparison, heatbath, properties, typicality
from gapsphere.measures.factory import build_measure
from gapsphere.measures.gap import density_g, density_ga, density_gap
from gapsphere.measures.measure import matrix_from_json
from gapsphere.twolevel import DEFAULT_DELTAS, DEFAULT_GRID, figure1_data, write_figure1_csv
from gapsphere.util.error import ConfigError, ContractViolation, DomainError
from gapsphere.util.log import configure_logging
from gapsphere.util.rng import RngStream

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2

_RUNNERS = {
    'verify': (properties.DEFAULTS, properties.run_property_suite),
    'typicality': (typicality.DEFAULTS, typicality.run_typicality),
    'heatbath': (heatbath.DEFAULTS, heatbath.run_heat_bath),
    'compare': (comparison.DEFAULTS, comparison.run_measure_comparison),
}

_DENSITIES = {
    'G': density_g,
    'GA': density_ga,
    'GAP': density_gap,
}

_HELP = {
    'sample': 'draw from a configured measure',
    'density': 'evaluate G, GA or GAP densities at configured vectors',
    'verify': 'run the property suite',
    'typicality': 'typicality of conditional distributions as the bath grows',
    'heatbath': 'system coupled to a bath in a microcanonical state',
    'compare': 'GAP against the other thermal measures',
    'figure1': 'two-level GAP marginal densities as CSV',
}


def _seed(text):
    try:
        value = int(text, 0)
    except ValueError as error:
        raise argparse.ArgumentTypeError(f'invalid seed {text!r}') from error
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError('seed must lie in [0, 2**64)')
    return value


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', help='JSON configuration file')
    common.add_argument('--seed', type=_seed, help='master seed, overrides the configuration')
    common.add_argument('--out', help='output file (default: stdout)')
    common.add_argument('--format', choices=('csv', 'json'), dest='output_format')
    common.add_argument('--timing', action='store_true', help='include wall time in reports')
    common.add_argument('-v', '--verbose', action='count', default=0)

    parser = argparse.ArgumentParser(prog='gapsphere', description=f'{about.GS_TITLE} {about.GS_VERSION}')
    parser.add_argument('--version', action='version', version=f'{about.GS_TITLE} {about.GS_VERSION}')
    commands = parser.add_subparsers(dest='command', metavar='command')
    commands.required = True
    for name, text in _HELP.items():
        commands.add_parser(name, parents=[common], help=text)
    return parser


def _config(args, defaults=None, default_seed=None):
    if args.config is not None:
        config = load_config(args.config, args.command, args.seed, default_seed)
    elif defaults is not None:
        if args.seed is None and default_seed is None:
            raise ConfigError('A seed is required: pass --seed or a configuration holding one')
        config = config_from_dict(defaults, args.command, args.seed, default_seed)
    else:
        raise ConfigError(f'{args.command} needs --config')
    if config.experiment != args.command:
        raise ConfigError(f'Configuration is for {config.experiment!r}, not {args.command!r}')
    return config.with_overrides(out=args.out)


@contextlib.contextmanager
def _output(path):
    if path is None:
        yield sys.stdout
        return
    try:
        stream = open(path, 'w', encoding='utf-8', newline='')
    except OSError as error:
        raise ConfigError(f'Cannot write {path}: {error}') from error
    with stream:
        yield stream


def _write_rows(stream, header, rows):
    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in row])


def _write_tables(stream, tables):
    for index, name in enumerate(sorted(tables)):
        rows = tables[name]
        if index:
            stream.write('\n')
        stream.write(f'# {name}\n')
        header = sorted({key for row in rows for key in row})
        _write_rows(stream, header, ([_cell(row.get(key)) for key in header] for row in rows))


def _cell(value):
    if isinstance(value, (numpy.floating, numpy.integer, numpy.bool_)):
        return value.item()
    return '' if value is None else value


def _measure(config):
    spec = config.param('measure')
    if not isinstance(spec, dict):
        raise ConfigError('Configuration params need a "measure" object with a "tag"')
    return build_measure(spec)


def run_sample(args):
    config = _config(args)
    measure = _measure(config)
    stream = RngStream(config.seed)
    batch = measure.sample(stream, config.samples)
    logger.info('drew %d samples from %r', len(batch), measure)
    with _output(config.out) as out:
        if args.output_format == 'json':
            values = {'measure': measure.describe().to_json(), 'provenance': batch.provenance(),
                      'vectors': batch.to_rows().tolist()}
            out.write(json.dumps(values, sort_keys=True, indent=2) + '\n')
        else:
            header = [f'{part}{i}' for i in range(batch.dimension) for part in ('re', 'im')]
            _write_rows(out, header, (row.tolist() for row in batch.to_rows()))
    return EXIT_PASS


def run_density(args):
    config = _config(args, default_seed=0)
    spec = config.param('measure')
    if not isinstance(spec, dict) or spec.get('tag') not in _DENSITIES:
        raise ConfigError(f'density needs a measure tagged {", ".join(_DENSITIES)}')
    measure = build_measure(spec)
    if config.param('vectors') is None:
        raise ConfigError('density needs params.vectors')
    density = _DENSITIES[spec['tag']]
    try:
        vectors = numpy.atleast_2d(matrix_from_json(config.param('vectors')))
        values = [density(measure.spec, psi) for psi in vectors]
    except (ValueError, TypeError) as error:
        raise ConfigError(f'Cannot evaluate the density at params.vectors: {error}') from error

    with _output(config.out) as out:
        if args.output_format == 'json':
            rows = [{'index': i, 'value': v.value, 'log_value': v.log_value if numpy.isfinite(v.log_value) else None,
                     'reference': v.reference, 'in_support': v.in_support} for i, v in enumerate(values)]
            out.write(json.dumps({'measure': spec['tag'], 'densities': rows}, sort_keys=True, indent=2) + '\n')
        else:
            _write_rows(out, ('index', 'value', 'log_value', 'reference', 'in_support'),
                        ((i, v.value, v.log_value, v.reference, v.in_support) for i, v in enumerate(values)))
    return EXIT_PASS


def run_report(args):
    defaults, runner = _RUNNERS[args.command]
    config = _config(args, defaults)
    report = runner(config)
    with _output(config.out) as out:
        if args.output_format == 'csv':
            _write_tables(out, report.tables)
        else:
            out.write(report.dumps(args.timing) + '\n')
    for name in report.failed_checks():
        logger.warning('check failed: %s', name)
    return EXIT_PASS if report.passed else EXIT_FAIL


def run_figure1(args):
    deltas, grid = DEFAULT_DELTAS, DEFAULT_GRID
    out = args.out
    if args.config is not None:
        config = _config(args, default_seed=0)
        deltas = config.param('deltas', deltas)
        grid = int(config.param('grid', grid))
        out = config.out
    rows = figure1_data(deltas, grid)
    with _output(out) as stream:
        if args.output_format == 'json':
            values = [{'delta': delta, 's': s, 'f': f} for delta, s, f in rows]
            stream.write(json.dumps(values, sort_keys=True, indent=2) + '\n')
        else:
            write_figure1_csv(rows, stream)
    return EXIT_PASS


_COMMANDS = {
    'sample': run_sample,
    'density': run_density,
    'figure1': run_figure1,
    **{name: run_report for name in _RUNNERS},
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_:
        return exit_.code if isinstance(exit_.code, int) else EXIT_USAGE

    configure_logging(args.verbose)
    logger.info('%s version %s', about.GS_TITLE, about.GS_VERSION)
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, DomainError, ContractViolation) as error:
        logger.error('%s', error)
        print(f'{parser.prog}: error: {error}', file=sys.stderr)
        return EXIT_USAGE
