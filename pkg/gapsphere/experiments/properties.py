""" The property battery: covariance, equivariance, stationarity, phases and heredity for GAP and EIG. """
import logging
import time
from concurrent.futures import ThreadPoolExecutor

import numpy
from scipy import stats

from gapsphere.config import thread_count
from gapsphere.experiments.report import CheckResult, RunReport
from gapsphere.hilbert.decomp import spectral
from gapsphere.hilbert.haar import haar_orthonormal_system, haar_unitary, random_hamiltonian, random_spectrum_density
from gapsphere.hilbert.state import DensityMatrix
from gapsphere.measures.ensembles import EigMeasure, canonical_rho
from gapsphere.measures.gap import GapMeasure, ProjectedGaussianMeasure, UniformSphereMeasure
from gapsphere.measures.measure import SampleBatch
from gapsphere.stats.covariance import covariance_tolerance, empirical_covariance, trace_distance
from gapsphere.stats.discrepancy import discrepancy
from gapsphere.stats.functions import MARGINAL, TestFunction, default_dictionary
from gapsphere.stats.goodness import (eigenspace_phase_uniformity, ks_two_sample, phase_uniformity,
                                      stationarity_check)
from gapsphere.subsystem import BipartiteSplit, pooled_conditional_draws
from gapsphere.util.error import ConfigError
from gapsphere.util.rng import RngStream

logger = logging.getLogger(__name__)

MEASURES = {
    'GAP': GapMeasure,
    'EIG': EigMeasure,
    'PG': ProjectedGaussianMeasure,
}

DEFAULTS = {
    'experiment': 'verify',
    'samples': 100000,
    'dimensions': {'d': [2, 3, 4], 'd1': 2, 'd2': 4, 'subspace': 4, 'ambient': 8},
    'params': {'measures': ['GAP', 'EIG'], 'beta': 1.0, 'times': [0.1, 1.0, 10.0], 'heredity_samples': 10000},
    'thresholds': {'z': 4.0, 'phase_z': 4.0, 'covariance_factor': 5.0, 'alpha': 0.01, 'eigenvector_overlap': 1e-10},
}


def _log_check(check):
    logger.info('%-40s %s', check.name, 'pass' if check.passed else 'FAIL')
    return check


def _grid_checks(config, d, tag, rho_stream, stream):
    beta = float(config.param('beta', 1.0))
    z = config.threshold('z', 4.0)
    n = config.samples

    hamiltonian = random_hamiltonian(d, rho_stream)
    rho = canonical_rho(hamiltonian, beta)
    eigenvectors = spectral(rho).eigenvectors
    measure_class = MEASURES[tag]
    batch = measure_class(rho).sample(stream.child(0), n)
    checks = []

    distance = trace_distance(empirical_covariance(batch), rho)
    tolerance = covariance_tolerance(d, n, config.threshold('covariance_factor', 5.0))
    checks.append(CheckResult(f'{tag} d={d} covariance', distance <= tolerance,
                              {'trace_distance': distance, 'tolerance': tolerance}))

    unitary = haar_unitary(d, stream.child(1))
    rotated = measure_class(rho.conjugated(unitary)).sample(stream.child(2), n)
    pushed = batch.transformed(unitary.apply(batch.vectors), f'U.{tag}')
    functions = default_dictionary(d, stream.child(3), eigenbasis=unitary.entries @ eigenvectors)
    report = discrepancy(rotated, pushed, functions, threshold=z)
    checks.append(CheckResult(f'{tag} d={d} equivariance', report.passed, report=report))

    times = config.param('times', [0.1, 1.0, 10.0])
    functions = default_dictionary(d, stream.child(4), eigenbasis=eigenvectors)
    report = stationarity_check(batch, hamiltonian, times, functions, rho=rho, threshold=z)
    checks.append(CheckResult(f'{tag} d={d} stationarity', report.passed, report=report))

    # EIG draws lie in single eigenspaces; only their coefficients there carry a phase
    if tag == 'EIG':
        eigenspaces = [columns for _, columns in spectral(rho).eigenspaces()]
        report = eigenspace_phase_uniformity(batch, eigenspaces, threshold=config.threshold('phase_z', 4.0))
    else:
        report = phase_uniformity(batch, eigenvectors, threshold=config.threshold('phase_z', 4.0))
    checks.append(CheckResult(f'{tag} d={d} phases', report.passed, report=report))
    return [_log_check(check) for check in checks]


def heredity_check(config, stream):
    """ Pooled conditional draws of GAP(rho1 (x) rho2) in a fixed basis against direct GAP(rho1) draws. """
    split = BipartiteSplit(config.dimensions.get('d1', 2), config.dimensions.get('d2', 4))
    n = int(config.param('heredity_samples', 10000))
    rho1 = random_spectrum_density(split.d1, stream.child(0))
    rho2 = random_spectrum_density(split.d2, stream.child(1))
    basis = haar_unitary(split.d2, stream.child(2))

    composite = GapMeasure(rho1.tensor(rho2)).sample(stream.child(3), n)
    pooled = pooled_conditional_draws(composite, basis.entries, split, stream.child(4))
    direct = GapMeasure(rho1).sample(stream.child(5), n)
    functions = default_dictionary(split.d1, stream.child(6), eigenbasis=spectral(rho1).eigenvectors)
    report = discrepancy(pooled, direct, functions, threshold=config.threshold('z', 4.0))
    return _log_check(CheckResult(f'GAP heredity {split.d1}x{split.d2}', report.passed, report=report))


def eig_heredity_check(config, stream):
    """ Conditional draws of EIG(rho1 (x) rho2) are eigenvectors of rho1 with frequencies p_n. """
    split = BipartiteSplit(config.dimensions.get('d1', 2), config.dimensions.get('d2', 4))
    n = int(config.param('heredity_samples', 10000))
    rho1 = random_spectrum_density(split.d1, stream.child(0))
    rho2 = random_spectrum_density(split.d2, stream.child(1))
    basis = haar_unitary(split.d2, stream.child(2))

    composite = EigMeasure(rho1.tensor(rho2)).sample(stream.child(3), n)
    pooled = pooled_conditional_draws(composite, basis.entries, split, stream.child(4))
    decomposition = spectral(rho1)
    overlaps = numpy.abs(pooled.vectors @ decomposition.eigenvectors.conj()) ** 2
    nearest = numpy.argmax(overlaps, axis=1)
    concentrated = float(numpy.min(numpy.max(overlaps, axis=1)))
    counts = numpy.bincount(nearest, minlength=split.d1)
    expected = n * decomposition.eigenvalues / numpy.sum(decomposition.eigenvalues)
    pvalue = float(stats.chisquare(counts, expected).pvalue)
    tol = config.threshold('eigenvector_overlap', 1e-10)
    passed = concentrated >= 1.0 - tol and pvalue > config.threshold('alpha', 0.01)
    return _log_check(CheckResult(f'EIG heredity {split.d1}x{split.d2}', passed,
                                  {'min_overlap': concentrated, 'chi2_pvalue': pvalue, 'counts': counts}))


def correlated_counterexample(config, stream, n=1000):
    """ Phi = sum sqrt(p_n) psi_n (x) phi_n conditioned in a basis extending {phi_n}.

    Every conditional draw is an eigenvector of rho1.
    """
    split = BipartiteSplit(config.dimensions.get('d1', 2), config.dimensions.get('d2', 4))
    if split.d1 > split.d2:
        raise ConfigError('The correlated counterexample needs d1 <= d2')
    rho1 = random_spectrum_density(split.d1, stream.child(0))
    decomposition = spectral(rho1)
    basis = haar_unitary(split.d2, stream.child(1)).entries
    coefficients = numpy.sqrt(decomposition.eigenvalues)
    phi = ((decomposition.eigenvectors * coefficients) @ basis[:, :split.d1].T).reshape(-1)

    repeated = SampleBatch(numpy.tile(phi, (n, 1)), 'correlated')
    draws = pooled_conditional_draws(repeated, basis, split, stream.child(2))
    overlaps = numpy.max(numpy.abs(draws.vectors @ decomposition.eigenvectors.conj()) ** 2, axis=1)

    reference = GapMeasure(rho1).sample(stream.child(3), n)
    gap_overlaps = numpy.max(numpy.abs(reference.vectors @ decomposition.eigenvectors.conj()) ** 2, axis=1)
    tol = config.threshold('eigenvector_overlap', 1e-10)
    concentrated = bool(numpy.all(overlaps >= 1.0 - tol))
    gap_fraction = float(numpy.mean(gap_overlaps >= 1.0 - tol))
    return _log_check(CheckResult('correlated state non-heredity', concentrated and gap_fraction < 0.01,
                                  {'min_overlap': float(numpy.min(overlaps)),
                                   'gap_eigenvector_fraction': gap_fraction}))


def microcanonical_identity(config, stream):
    """ GAP(P/dim) and EIG(P/dim) against the uniform measure on the subspace, by two-sample KS. """
    count = config.dimensions.get('subspace', 4)
    ambient = config.dimensions.get('ambient', 8)
    subspace = haar_orthonormal_system(ambient, count, stream.child(0))
    rho = DensityMatrix.from_unnormalized(subspace.projector())
    n = config.samples
    uniform = UniformSphereMeasure(subspace).sample(stream.child(1), n)

    directions = [subspace.vectors[:, 0], subspace.vectors[:, 1],
                  haar_unitary(ambient, stream.child(2)).column(0).entries]
    functions = [TestFunction(MARGINAL, phi, label=f'marginal {i}') for i, phi in enumerate(directions)]
    alpha = config.threshold('alpha', 0.01) / (2 * len(functions))

    pvalues = {}
    for index, (tag, measure) in enumerate((('GAP', GapMeasure(rho)), ('EIG', EigMeasure(rho)))):
        batch = measure.sample(stream.child(3 + index), n)
        for function in functions:
            result = ks_two_sample(function(batch.vectors), function(uniform.vectors))
            pvalues[f'{tag} {function.label}'] = result.pvalue
    passed = all(p > alpha for p in pvalues.values())
    return _log_check(CheckResult(f'microcanonical identity {count} in {ambient}', passed,
                                  {'pvalues': pvalues, 'alpha': alpha}))


def run_property_suite(config):
    start = time.perf_counter()
    report = RunReport('verify', config.resolved())
    master = RngStream(config.seed)

    dimensions = config.dimensions.get('d', [2, 3, 4])
    tags = config.param('measures', ['GAP', 'EIG'])
    unknown = [tag for tag in tags if tag not in MEASURES]
    if unknown:
        raise ConfigError(f'Unknown measures for the property suite: {", ".join(unknown)}')

    jobs = []
    for i, d in enumerate(dimensions):
        grid = master.child(i)
        for j, tag in enumerate(tags):
            jobs.append((config, d, tag, grid.child(0), grid.child(1 + j)))

    with ThreadPoolExecutor(max_workers=thread_count()) as pool:
        for checks in pool.map(lambda job: _grid_checks(*job), jobs):
            for check in checks:
                report.add_check(check)

    extra = master.child(len(dimensions))
    report.add_check(heredity_check(config, extra.child(0)))
    report.add_check(eig_heredity_check(config, extra.child(1)))
    report.add_check(correlated_counterexample(config, extra.child(2)))
    report.add_check(microcanonical_identity(config, extra.child(3)))

    report.wall_time = time.perf_counter() - start
    logger.info('property suite: %d checks, %d failed', report.check_count(), len(report.failed_checks()))
    return report
