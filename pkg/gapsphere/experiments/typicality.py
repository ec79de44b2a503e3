""" Typicality of GAP conditional distributions for wave functions with a fixed reduced density matrix.

For each bath dimension d2 the exact conditional ensemble of every drawn psi is
compared with GAP(rho1) on the test-function dictionary; the deviation of psi is
the largest absolute difference of means.
"""
import logging
import time

import numpy

from gapsphere.experiments.report import CheckResult, RunReport
from gapsphere.hilbert.decomp import partial_amplitudes, spectral
from gapsphere.hilbert.haar import haar_unitary_entries
from gapsphere.hilbert.state import DensityMatrix
from gapsphere.measures.gap import GapMeasure
from gapsphere.measures.measure import matrix_from_json
from gapsphere.stats.functions import default_dictionary
from gapsphere.subsystem import FixedReducedMeasure, ProductEigenstateMeasure
from gapsphere.util.error import ConfigError, DomainError
from gapsphere.util.rng import RngStream

logger = logging.getLogger(__name__)

DEFAULTS = {
    'experiment': 'typicality',
    'samples': 200,
    'dimensions': {'d2': [8, 32, 128]},
    'params': {'rho1': {'diagonal': [0.7, 0.3]}, 'basis_mode': 'fixed', 'reference_samples': 200000},
    'thresholds': {'epsilon': 0.05, 'min_fraction': 0.9, 'median_ratio': 2.0},
}

BASIS_MODES = ('fixed', 'random')


def conditional_ensembles(amplitudes):
    """ Weights (n, d2) and normalized conditional vectors (n, d2, d1) from partial amplitudes (n, d1, d2). """
    probabilities = numpy.sum(numpy.abs(amplitudes) ** 2, axis=1)
    probabilities /= numpy.sum(probabilities, axis=1, keepdims=True)
    columns = numpy.swapaxes(amplitudes, 1, 2)
    norms = numpy.linalg.norm(columns, axis=2, keepdims=True)
    # zero-probability rows carry no weight; keep them finite
    columns = columns / numpy.where(norms == 0, 1.0, norms)
    return probabilities, columns


def ensemble_deviations(amplitudes, functions, reference_means):
    probabilities, columns = conditional_ensembles(amplitudes)
    n, d2, d1 = columns.shape
    flat = columns.reshape(n * d2, d1)
    means = numpy.stack([numpy.sum(probabilities * f(flat).reshape(n, d2), axis=1) for f in functions], axis=1)
    return numpy.max(numpy.abs(means - reference_means), axis=1)


def gaussian_deviations(amplitudes, rho1, functions):
    """ Deviation of the points sqrt(d2) <q2|psi>, uniformly weighted, from G(rho1) on the linear functions. """
    n, d1, d2 = amplitudes.shape
    points = numpy.sqrt(d2) * numpy.swapaxes(amplitudes, 1, 2).reshape(n * d2, d1)
    linear = [f for f in functions if f.linear_expectation(rho1) is not None]
    reference = numpy.array([f.linear_expectation(rho1) for f in linear])
    means = numpy.stack([f(points).reshape(n, d2).mean(axis=1) for f in linear], axis=1)
    return numpy.max(numpy.abs(means - reference), axis=1)


def reference_means(rho1, functions, stream, samples):
    """ GAP(rho1) means: exact for linear functions, Monte Carlo for the higher powers. """
    batch = GapMeasure(rho1).sample(stream, samples)
    means = []
    for function in functions:
        exact = function.linear_expectation(rho1)
        means.append(exact if exact is not None else float(numpy.mean(function(batch.vectors))))
    return numpy.array(means)


def _amplitudes(config, rho1, d2, stream):
    n = config.samples
    d1 = rho1.dimension
    mode = config.param('basis_mode', 'fixed')
    measure = FixedReducedMeasure(rho1, d2)
    if mode == 'fixed':
        batch = measure.sample(stream.child(0), n)
        return partial_amplitudes(batch.vectors, numpy.eye(d2), d1, d2)
    # one typical psi, many Haar bases of the bath
    psi = measure.sample(stream.child(0), 1).vectors[0]
    bases = haar_unitary_entries(stream.child(1).generator, d2, size=n)
    return psi.reshape(d1, d2)[None, :, :] @ bases.conj()


def _summary(deviations, epsilon):
    return {'fraction_within': float(numpy.mean(deviations < epsilon)),
            'median_deviation': float(numpy.median(deviations)),
            'max_deviation': float(numpy.max(deviations))}


def run_typicality(config):
    start = time.perf_counter()
    report = RunReport('typicality', config.resolved())
    master = RngStream(config.seed)

    rho1 = DensityMatrix(matrix_from_json(config.param('rho1', {'diagonal': [0.7, 0.3]})))
    mode = config.param('basis_mode', 'fixed')
    if mode not in BASIS_MODES:
        raise ConfigError(f'basis_mode must be one of {", ".join(BASIS_MODES)}')
    sizes = sorted(config.dimensions.get('d2', [8, 32, 128]))
    rank = int(numpy.sum(spectral(rho1).eigenvalues > 1e-12))
    if rank > sizes[0]:
        raise DomainError(f'rank(rho1) = {rank} exceeds the smallest d2 = {sizes[0]}')
    epsilon = config.threshold('epsilon', 0.05)

    functions = default_dictionary(rho1.dimension, master.child(0), eigenbasis=spectral(rho1).eigenvectors)
    reference = reference_means(rho1, functions, master.child(1), int(config.param('reference_samples', 200000)))

    rows = []
    for index, d2 in enumerate(sizes):
        amplitudes = _amplitudes(config, rho1, d2, master.child(2 + index))
        summary = _summary(ensemble_deviations(amplitudes, functions, reference), epsilon)
        summary['gaussian_median_deviation'] = float(numpy.median(gaussian_deviations(amplitudes, rho1, functions)))
        rows.append({'d2': d2, **summary})
        logger.info('d2=%d fraction=%.3f median=%.4f', d2, summary['fraction_within'], summary['median_deviation'])
    report.add_table('typicality', rows)

    fractions = [row['fraction_within'] for row in rows]
    medians = [row['median_deviation'] for row in rows]
    report.add_check(CheckResult('fraction nondecreasing', all(b >= a for a, b in zip(fractions, fractions[1:])),
                                 {'fractions': fractions}))
    report.add_check(CheckResult('median decreasing', all(b < a for a, b in zip(medians, medians[1:])),
                                 {'medians': medians}))
    ratio = medians[0] / medians[-1] if medians[-1] > 0 else numpy.inf
    report.add_check(CheckResult('median shrinks', ratio >= config.threshold('median_ratio', 2.0), {'ratio': ratio}))
    report.add_check(CheckResult('largest bath typical', fractions[-1] >= config.threshold('min_fraction', 0.9),
                                 {'fraction': fractions[-1]}))

    control = master.child(2 + len(sizes))
    minimal = _summary(ensemble_deviations(_amplitudes(config, rho1, rank, control.child(0)), functions, reference),
                       epsilon)
    report.add_check(CheckResult('minimal bath control', minimal['median_deviation'] > medians[-1],
                                 {'d2': rank, **minimal}))

    largest = sizes[-1]
    product = ProductEigenstateMeasure(rho1, largest).sample(control.child(1), config.samples)
    amplitudes = partial_amplitudes(product.vectors, numpy.eye(largest), rho1.dimension, largest)
    delta = _summary(ensemble_deviations(amplitudes, functions, reference), epsilon)
    report.add_check(CheckResult('product eigenstate control', delta['median_deviation'] > epsilon,
                                 {'d2': largest, **delta}))

    report.wall_time = time.perf_counter() - start
    return report
