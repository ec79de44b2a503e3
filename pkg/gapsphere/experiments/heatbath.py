""" A small system coupled to a bath of qubit-like units: microcanonical wave functions of the
composite and the conditional wave function of the system.

The bath has n_b units with level spacings 1 + jitter_j; the jitter is a deterministic
irrational sequence so that the composite spectrum is nondegenerate. The energy is
scaled with the bath, E = energy_per_unit * n_b.
"""
import itertools
import logging
import math
import time

import numpy
from scipy import optimize

from gapsphere.experiments.report import CheckResult, RunReport
from gapsphere.hilbert.decomp import partial_amplitudes, spectral
from gapsphere.hilbert.haar import haar_unitary_entries
from gapsphere.hilbert.state import DensityMatrix, HermitianOperator
from gapsphere.measures.ensembles import canonical_rho
from gapsphere.measures.gap import GapMeasure
from gapsphere.measures.measure import SampleBatch, matrix_from_json
from gapsphere.stats.covariance import trace_distance
from gapsphere.stats.discrepancy import discrepancy
from gapsphere.stats.functions import default_dictionary
from gapsphere.subsystem import MicrocanonicalMeasure, composite_spectrum, microcanonical_spec
from gapsphere.util.error import ConfigError, EmptyWindowError
from gapsphere.util.rng import RngStream

logger = logging.getLogger(__name__)

MAX_TOTAL_DIMENSION = 2048
GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0

DEFAULTS = {
    'experiment': 'heatbath',
    'samples': 20,
    'dimensions': {'bath_units': [6, 8, 10]},
    'params': {'system_levels': [0.0, 1.0], 'energy_per_unit': 0.3, 'min_levels': 50, 'jitter': 0.2,
               'bases': 20, 'reference_samples': 20000, 'beta_max': 10.0},
    'thresholds': {'discrepancy': 0.05, 'trace_distance': 0.05},
}


def bath_spacings(units, jitter=0.2):
    return 1.0 + jitter * (numpy.mod(numpy.arange(1, units + 1) * GOLDEN, 1.0) - 0.5)


def bath_hamiltonian(units, jitter=0.2):
    """ Diagonal H2 = sum_j spacing_j n_j over the 2^units product basis. """
    spacings = bath_spacings(units, jitter)
    occupations = (numpy.arange(2 ** units)[:, None] >> numpy.arange(units - 1, -1, -1)) & 1
    return HermitianOperator.diagonal(occupations @ spacings)


def window_width(levels, energy, min_levels):
    """ Smallest delta such that [E, E + delta] holds min_levels levels. """
    start = int(numpy.searchsorted(levels, energy))
    if start + min_levels > levels.shape[0]:
        raise EmptyWindowError(f'Fewer than {min_levels} levels above E = {energy}')
    return float(levels[start + min_levels - 1] - energy)


def fit_beta(rho_bar, system_hamiltonian, beta_max, grid=33):
    """ Golden-section minimization of the trace distance to rho_beta over [0, beta_max]. """
    def distance(beta):
        return trace_distance(rho_bar, canonical_rho(system_hamiltonian, max(0.0, min(beta, beta_max))))

    betas = numpy.linspace(0.0, beta_max, grid)
    values = [distance(b) for b in betas]
    best = int(numpy.argmin(values))
    if best in (0, grid - 1):
        return float(betas[best]), float(values[best])
    result = optimize.minimize_scalar(distance, bracket=(betas[best - 1], betas[best], betas[best + 1]),
                                      method='golden')
    return float(result.x), float(result.fun)


class HeatBathSetup:
    """ System (x) bath with its microcanonical window.

    energy=None takes the whole composite spectrum as the window.
    """

    _DEFAULT_FULL_MARGIN = 0.5

    def __init__(self, system_hamiltonian, units, energy, min_levels, jitter=0.2, delta=None):
        self.system = system_hamiltonian
        self.bath = bath_hamiltonian(units, jitter)
        self.units = units
        self.d1 = self.system.dimension
        self.d2 = self.bath.dimension
        if self.d1 * self.d2 > MAX_TOTAL_DIMENSION:
            raise ConfigError(f'Composite dimension {self.d1 * self.d2} exceeds {MAX_TOTAL_DIMENSION}')
        self.decomposition = composite_spectrum(spectral(self.system), spectral(self.bath))
        levels = self.decomposition.eigenvalues
        if energy is None:
            energy = float(levels.min()) - self._DEFAULT_FULL_MARGIN
            delta = float(levels.max() - levels.min()) + 2.0 * self._DEFAULT_FULL_MARGIN
        elif delta is None:
            delta = window_width(levels, energy, min_levels)
        self.spec = microcanonical_spec(None, energy, delta, self.decomposition)
        logger.info('bath n_b=%d: window [%g, %g] holds %d levels', units, energy, energy + delta,
                    self.spec.dimension)

    def measure(self):
        return MicrocanonicalMeasure(self.spec)


def pooled_ensemble(vectors, bases, d1, d2):
    """ Exact conditional ensembles of each psi in its own basis, pooled with weight 1/n per psi.

    bases yields one d2 x d2 unitary per row of vectors.
    """
    columns = []
    weights = []
    for psi, basis in zip(vectors, bases):
        amplitudes = partial_amplitudes(psi, basis, d1, d2).T
        probabilities = numpy.sum(numpy.abs(amplitudes) ** 2, axis=1)
        keep = probabilities > 1e-14
        columns.append(amplitudes[keep] / numpy.sqrt(probabilities[keep])[:, None])
        weights.append(probabilities[keep] / vectors.shape[0])
    return SampleBatch(numpy.concatenate(columns), 'conditional', weights=numpy.concatenate(weights))


def haar_bases(stream, d2, count):
    generator = stream.generator
    return (haar_unitary_entries(generator, d2) for _ in range(count))


def mean_reduced_density(ensemble):
    vectors = ensemble.vectors
    entries = (vectors.T * ensemble.weights) @ vectors.conj()
    return DensityMatrix.from_unnormalized(entries)


def _arm(name, ensemble, setup, config, stream, functions):
    rho_bar = mean_reduced_density(ensemble)
    beta_hat, distance = fit_beta(rho_bar, setup.system, float(config.param('beta_max', 10.0)))
    rho_beta = canonical_rho(setup.system, beta_hat)
    reference = GapMeasure(rho_beta).sample(stream, int(config.param('reference_samples', 20000)))
    report = discrepancy(ensemble, reference, functions, min_samples=1)
    return {'arm': name, 'bath_units': setup.units, 'd2': setup.d2, 'beta_hat': beta_hat,
            'trace_distance': distance, 'discrepancy': report.max_abs_difference(), 'max_abs_z': report.max_abs_z()}


def run_heat_bath(config):
    start = time.perf_counter()
    report = RunReport('heatbath', config.resolved())
    master = RngStream(config.seed)

    system = HermitianOperator(matrix_from_json({'diagonal': config.param('system_levels', [0.0, 1.0])}))
    units = sorted(config.dimensions.get('bath_units', [6, 8, 10]))
    n = config.samples
    n_bases = int(config.param('bases', 20))
    jitter = float(config.param('jitter', 0.2))
    functions = default_dictionary(system.dimension, master.child(0), eigenbasis=spectral(system).eigenvectors)

    rows = []
    for index, n_b in enumerate(units):
        stream = master.child(1 + index)
        setup = HeatBathSetup(system, n_b, float(config.param('energy_per_unit', 0.3)) * n_b,
                              int(config.param('min_levels', 50)), jitter)
        batch = setup.measure().sample(stream.child(0), n)

        # mode A: one typical bath basis per psi
        bases = haar_bases(stream.child(1), setup.d2, n)
        rows.append(_arm('typical', pooled_ensemble(batch.vectors, bases, setup.d1, setup.d2),
                         setup, config, stream.child(2), functions))

        # mode B: one psi, many bath bases
        bases = haar_bases(stream.child(3), setup.d2, n_bases)
        fixed = numpy.repeat(batch.vectors[:1], n_bases, axis=0)
        rows.append(_arm('fixed-psi', pooled_ensemble(fixed, bases, setup.d1, setup.d2),
                         setup, config, stream.child(4), functions))

        # control: the energy eigenbasis of the (diagonal) bath
        energy_basis = itertools.repeat(numpy.eye(setup.d2))
        rows.append(_arm('energy-basis', pooled_ensemble(batch.vectors, energy_basis, setup.d1, setup.d2),
                         setup, config, stream.child(5), functions))

    report.add_table('heatbath', rows)
    tolerance = config.threshold('discrepancy', 0.05)
    typical = [row for row in rows if row['arm'] == 'typical']
    fixed = [row for row in rows if row['arm'] == 'fixed-psi']
    control = [row for row in rows if row['arm'] == 'energy-basis']

    values = [row['discrepancy'] for row in typical]
    report.add_check(CheckResult('discrepancy decreases with bath size',
                                 all(b < a for a, b in zip(values, values[1:])), {'discrepancy': values}))
    report.add_check(CheckResult('typical basis close to GAP', typical[-1]['discrepancy'] <= tolerance,
                                 {'discrepancy': typical[-1]['discrepancy'], 'tolerance': tolerance}))
    report.add_check(CheckResult('fixed psi close to GAP', fixed[-1]['discrepancy'] <= tolerance,
                                 {'discrepancy': fixed[-1]['discrepancy'], 'tolerance': tolerance}))
    report.add_check(CheckResult('reduced density near rho_beta',
                                 typical[-1]['trace_distance'] <= config.threshold('trace_distance', 0.05),
                                 {'trace_distance': typical[-1]['trace_distance']}))
    report.add_check(CheckResult('energy eigenbasis control fails', control[-1]['discrepancy'] > tolerance,
                                 {'discrepancy': control[-1]['discrepancy']}))

    # infinite temperature: the full spectrum as window
    smallest = units[0]
    stream = master.child(1 + len(units))
    full = HeatBathSetup(system, smallest, None, 1, jitter)
    batch = full.measure().sample(stream.child(0), n)
    bases = haar_bases(stream.child(1), full.d2, n)
    ensemble = pooled_ensemble(batch.vectors, bases, full.d1, full.d2)
    uniform = GapMeasure(DensityMatrix.maximally_mixed(system.dimension)).sample(stream.child(2), 20000)
    infinite = discrepancy(ensemble, uniform, functions, min_samples=1)
    report.add_check(CheckResult('full window is uniform', infinite.max_abs_difference() <= tolerance,
                                 {'discrepancy': infinite.max_abs_difference()}))

    report.wall_time = time.perf_counter() - start
    return report
