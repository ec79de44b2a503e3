""" GAP against the other candidate thermal measures at fixed (H, beta). """
import logging
import math
import time

import numpy

from gapsphere.experiments.report import CheckResult, RunReport
from gapsphere.hilbert.decomp import spectral
from gapsphere.hilbert.state import HermitianOperator
from gapsphere.measures.chain import BrodyHughstonChain
from gapsphere.measures.ensembles import EigMeasure, ExtremalMeasure, ExtremalSpec, canonical_rho
from gapsphere.measures.gap import GapMeasure
from gapsphere.measures.measure import matrix_from_json
from gapsphere.measures.oscillator import GuerraLoffredoMeasure, OscillatorParams
from gapsphere.stats.covariance import covariance_tolerance, empirical_covariance, trace_distance
from gapsphere.stats.discrepancy import weighted_mean
from gapsphere.stats.goodness import eigenspace_phase_uniformity, phase_uniformity
from gapsphere.util.rng import RngStream

logger = logging.getLogger(__name__)

EIGENVECTOR_DISTANCE = 0.1

DEFAULTS = {
    'experiment': 'compare',
    'samples': 100000,
    'params': {'levels': [0.0, 1.0], 'beta': 2.0, 'chain_samples': 20000,
               'oscillator': {'beta': 1.0, 'cutoff': 64, 'samples': 10000}},
    'thresholds': {'covariance_factor': 5.0, 'deviation_z': 5.0, 'moduli_dispersion': 1e-12, 'phase_z': 4.0,
                   'ray_distance': 0.1, 'ray_fraction': 0.8},
}


def ray_distances(vectors, eigenvectors):
    """ Distance sqrt(1 - max_n |<n|psi>|^2) from each row to the nearest eigenvector ray. """
    overlaps = numpy.max(numpy.abs(vectors @ eigenvectors.conj()) ** 2, axis=1)
    return numpy.sqrt(numpy.clip(1.0 - overlaps, 0.0, 1.0))


def moduli_dispersion(vectors, eigenvectors):
    return float(numpy.max(numpy.std(numpy.abs(vectors @ eigenvectors.conj()), axis=0)))


def _row(tag, batch, rho, eigenvectors, phase_z):
    distances = ray_distances(batch.vectors, eigenvectors)
    if tag == 'EIG':
        eigenspaces = [columns for _, columns in spectral(rho).eigenspaces()]
        phases = eigenspace_phase_uniformity(batch, eigenspaces, threshold=phase_z)
    else:
        phases = phase_uniformity(batch, eigenvectors, threshold=phase_z)
    return {'measure': tag, 'samples': len(batch),
            'trace_distance': trace_distance(empirical_covariance(batch), rho),
            'phases_pass': phases.passed,
            'moduli_dispersion': moduli_dispersion(batch.vectors, eigenvectors),
            'median_ray_distance': float(numpy.median(distances)),
            'ray_distance_fraction': float(numpy.mean(distances > EIGENVECTOR_DISTANCE))}


def run_measure_comparison(config):
    start = time.perf_counter()
    report = RunReport('compare', config.resolved())
    master = RngStream(config.seed)

    hamiltonian = HermitianOperator(matrix_from_json({'diagonal': config.param('levels', [0.0, 1.0])}))
    beta = float(config.param('beta', 2.0))
    rho = canonical_rho(hamiltonian, beta)
    eigenvectors = spectral(hamiltonian).eigenvectors
    d = hamiltonian.dimension
    n = config.samples
    phase_z = config.threshold('phase_z', 4.0)

    measures = [('GAP', GapMeasure(rho)), ('EIG', EigMeasure(rho)),
                ('extremal', ExtremalMeasure(ExtremalSpec.thermal(hamiltonian, beta)))]
    batches = {}
    rows = []
    for index, (tag, measure) in enumerate(measures):
        batches[tag] = measure.sample(master.child(index), n)
        rows.append(_row(tag, batches[tag], rho, eigenvectors, phase_z))

    chain = BrodyHughstonChain(hamiltonian, beta)
    chain_batch = chain.sample(master.child(len(measures)), int(config.param('chain_samples', 20000)))
    rows.append({**_row('brody-hughston', chain_batch, rho, eigenvectors, phase_z),
                 **{k: chain_batch.diagnostics[k] for k in ('acceptance_rate', 'effective_sample_size')}})
    report.add_table('measures', rows)
    by_tag = {row['measure']: row for row in rows}

    tolerance = covariance_tolerance(d, n, config.threshold('covariance_factor', 5.0))
    for tag in ('GAP', 'EIG', 'extremal'):
        report.add_check(CheckResult(f'{tag} covariance', by_tag[tag]['trace_distance'] <= tolerance,
                                     {'trace_distance': by_tag[tag]['trace_distance'], 'tolerance': tolerance}))

    dispersion = by_tag['extremal']['moduli_dispersion']
    report.add_check(CheckResult('extremal moduli fixed', dispersion <= config.threshold('moduli_dispersion', 1e-12),
                                 {'dispersion': dispersion}))

    # ground-state population of the chain against rho_beta, standard error from the effective sample size
    populations = numpy.abs(chain_batch.vectors @ eigenvectors[:, 0].conj()) ** 2
    mean, error = weighted_mean(populations)
    error *= math.sqrt(len(chain_batch) / chain_batch.diagnostics['effective_sample_size'])
    canonical = float(numpy.real(rho.entries[0, 0]))
    z = (mean - canonical) / error
    deviates = abs(z) > config.threshold('deviation_z', 5.0)
    report.add_check(CheckResult('Brody-Hughston deviates from rho_beta', deviates,
                                 {'population': mean, 'canonical': canonical, 'z': z,
                                  'acceptance_warning': chain_batch.diagnostics['acceptance_warning']}))

    cut = config.threshold('ray_distance', 0.1)
    fraction = float(numpy.mean(ray_distances(batches['GAP'].vectors, eigenvectors) > cut))
    eig_fraction = float(numpy.mean(ray_distances(batches['EIG'].vectors, eigenvectors) > cut))
    report.add_check(CheckResult('GAP away from eigenvector rays',
                                 fraction > config.threshold('ray_fraction', 0.8) and eig_fraction == 0.0,
                                 {'gap_fraction': fraction, 'eig_fraction': eig_fraction}))

    oscillator = dict(config.param('oscillator', {}))
    if oscillator:
        params = OscillatorParams(**{k: oscillator[k] for k in ('mass', 'frequency', 'hbar', 'cutoff')
                                     if k in oscillator})
        measure = GuerraLoffredoMeasure(float(oscillator.get('beta', 1.0)), params)
        samples = int(oscillator.get('samples', 10000))
        batch = measure.sample(master.child(len(measures) + 1), samples)
        distance = trace_distance(empirical_covariance(batch), measure.density_matrix())
        bound = max(measure.truncation_tail(), covariance_tolerance(params.cutoff, samples,
                                                                    config.threshold('covariance_factor', 5.0)))
        report.add_table('oscillator', [{'measure': 'guerra-loffredo', 'beta': measure.beta, 'cutoff': params.cutoff,
                                         'trace_distance': distance, 'bound': bound}])
        report.add_check(CheckResult('Guerra-Loffredo covariance', distance <= bound,
                                     {'trace_distance': distance, 'bound': bound}))

    report.wall_time = time.perf_counter() - start
    return report
