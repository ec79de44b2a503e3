""" Kolmogorov-Smirnov tests, the phase-uniformity battery and the stationarity check.

Evolution operators use hbar = 1: U(t) = exp(-i H t).
"""
import itertools
import logging
import math
from dataclasses import dataclass

import numpy
from scipy import linalg, stats

from gapsphere.hilbert.state import as_entries
from gapsphere.measures.measure import SampleBatch
from gapsphere.stats.discrepancy import DiscrepancyEntry, DiscrepancyReport, weighted_mean
from gapsphere.util.error import DomainError

logger = logging.getLogger(__name__)

KS_MIN_SAMPLES = 100
PHASE_THRESHOLD = 4.0
ORIGIN_GRID = 64
ZERO_COEFFICIENT_TOL = 1e-12
COMMUTATOR_TOL = 1e-8


@dataclass(frozen=True)
class KsResult:
    statistic: float
    pvalue: float

    def passed(self, alpha=0.01):
        return self.pvalue > alpha


def ks_test(samples, reference_cdf, min_samples=KS_MIN_SAMPLES):
    """ Two-sided one-sample KS with the asymptotic p-value. """
    samples = numpy.asarray(samples, dtype=float)
    if samples.shape[0] < min_samples:
        raise DomainError(f'KS test needs at least {min_samples} samples, got {samples.shape[0]}')
    result = stats.kstest(samples, reference_cdf, method='asymp')
    return KsResult(float(result.statistic), float(result.pvalue))


def ks_two_sample(samples_a, samples_b, min_samples=KS_MIN_SAMPLES):
    samples_a = numpy.asarray(samples_a, dtype=float)
    samples_b = numpy.asarray(samples_b, dtype=float)
    if min(samples_a.shape[0], samples_b.shape[0]) < min_samples:
        raise DomainError(f'KS test needs at least {min_samples} samples per side')
    result = stats.ks_2samp(samples_a, samples_b, method='asymp')
    return KsResult(float(result.statistic), float(result.pvalue))


def _z_from_pvalue(pvalue):
    return float(stats.norm.isf(max(pvalue, 1e-300) / 2.0))


def circular_ks(phases, grid=ORIGIN_GRID):
    """ KS distance of the phases from uniform on the circle, maximized over a grid of origins.

    The p-value is the Bonferroni bound over the grid.
    """
    phases = numpy.mod(numpy.asarray(phases, dtype=float), 2.0 * math.pi)
    n = phases.shape[0]
    uniform = numpy.arange(1, n + 1) / n
    statistic = 0.0
    for origin in numpy.linspace(0.0, 2.0 * math.pi, grid, endpoint=False):
        shifted = numpy.sort(numpy.mod(phases - origin, 2.0 * math.pi)) / (2.0 * math.pi)
        d_plus = numpy.max(uniform - shifted)
        d_minus = numpy.max(shifted - (uniform - 1.0 / n))
        statistic = max(statistic, d_plus, d_minus)
    pvalue = min(1.0, grid * float(stats.kstwo.sf(statistic, n)))
    return KsResult(float(statistic), pvalue)


def _correlation_entry(label, x, y, zero_variance=1e-12):
    n = x.shape[0]
    if numpy.std(x) <= zero_variance or numpy.std(y) <= zero_variance:
        return DiscrepancyEntry(label, 0.0, 0.0, 0.0, 0.0, True)
    r = float(numpy.corrcoef(x, y)[0, 1])
    return DiscrepancyEntry(label, r, 0.0, 1.0 / math.sqrt(n), r * math.sqrt(n))


def phase_uniformity(samples, eigenbasis, threshold=PHASE_THRESHOLD, zero_tol=ZERO_COEFFICIENT_TOL):
    """ Coefficients Z_n = <n|psi>: uniform phases, independent of each other and of all moduli. """
    vectors = samples.vectors if isinstance(samples, SampleBatch) else numpy.asarray(as_entries(samples))
    coefficients = vectors @ numpy.asarray(as_entries(eigenbasis)).conj()
    moduli = numpy.abs(coefficients)

    report = DiscrepancyReport(threshold=threshold)
    active = []
    for n in range(coefficients.shape[1]):
        if numpy.max(moduli[:, n]) <= zero_tol:
            report.notes.append(f'Z{n} vanishes on every sample, skipped')
            logger.warning('phase uniformity: coefficient %d is identically zero', n)
            continue
        active.append(n)
        result = circular_ks(numpy.angle(coefficients[:, n]))
        report.entries.append(DiscrepancyEntry(f'circular ks Z{n}', result.statistic, result.pvalue, 0.0,
                                               _z_from_pvalue(result.pvalue)))

    phases = {n: numpy.angle(coefficients[:, n]) for n in active}
    trig = {n: {'cos': numpy.cos(phases[n]), 'sin': numpy.sin(phases[n])} for n in active}
    for n in active:
        for name, values in trig[n].items():
            for m in range(coefficients.shape[1]):
                report.entries.append(_correlation_entry(f'corr {name} Z{n} |Z{m}|', values, moduli[:, m]))
    for n, m in itertools.combinations(active, 2):
        for a, b in itertools.product(('cos', 'sin'), repeat=2):
            report.entries.append(_correlation_entry(f'corr {a} Z{n} {b} Z{m}', trig[n][a], trig[m][b]))

    if report.excluded:
        report.notes.append(f'{len(report.excluded)} zero-variance tests excluded')
    return report


def eigenspace_phase_uniformity(samples, eigenspaces, threshold=PHASE_THRESHOLD, min_samples=KS_MIN_SAMPLES,
                                support_tol=1e-8):
    """ Phase uniformity for draws that each lie in one eigenspace.

    eigenspaces is a list of column matrices. Each draw is assigned to the eigenspace holding it, and
    the phases of its coefficients inside that eigenspace are tested; the other coefficients vanish.
    """
    vectors = samples.vectors if isinstance(samples, SampleBatch) else numpy.asarray(as_entries(samples))
    report = DiscrepancyReport(threshold=threshold)
    assigned = 0
    for index, columns in enumerate(eigenspaces):
        coefficients = vectors @ numpy.asarray(as_entries(columns)).conj()
        inside = numpy.sum(numpy.abs(coefficients) ** 2, axis=1) >= 1.0 - support_tol
        assigned += int(numpy.sum(inside))
        if numpy.sum(inside) < min_samples:
            report.notes.append(f'eigenspace {index} holds {int(numpy.sum(inside))} draws, skipped')
            continue
        for n in range(coefficients.shape[1]):
            values = coefficients[inside, n]
            if numpy.max(numpy.abs(values)) <= ZERO_COEFFICIENT_TOL:
                continue
            result = circular_ks(numpy.angle(values))
            report.entries.append(DiscrepancyEntry(f'circular ks eigenspace {index} Z{n}', result.statistic,
                                                   result.pvalue, 0.0, _z_from_pvalue(result.pvalue)))
    if assigned != vectors.shape[0]:
        report.notes.append(f'{vectors.shape[0] - assigned} draws lie in no single eigenspace')
        report.entries.append(DiscrepancyEntry('draws outside eigenspaces', float(vectors.shape[0] - assigned),
                                               0.0, 0.0, math.inf))
    return report


def evolution_operator(hamiltonian, t):
    return linalg.expm(-1j * float(t) * numpy.asarray(as_entries(hamiltonian)))


def stationarity_check(samples, hamiltonian, times, functions, rho=None, threshold=3.0):
    """ Paired comparison of f(exp(-iHt) psi) against f(psi) over the same draws, for each t. """
    vectors = samples.vectors if isinstance(samples, SampleBatch) else numpy.asarray(as_entries(samples))
    weights = samples.weights if isinstance(samples, SampleBatch) else None
    h = numpy.asarray(as_entries(hamiltonian))

    report = DiscrepancyReport(threshold=threshold)
    if rho is None:
        report.notes.append('no density matrix given; [H, rho] = 0 not checked')
    else:
        r = numpy.asarray(as_entries(rho))
        commutator = float(numpy.linalg.norm(h @ r - r @ h))
        if commutator > COMMUTATOR_TOL:
            logger.warning('H does not commute with rho (norm %.3g); stationarity is not expected', commutator)
            report.notes.append(f'[H, rho] != 0 (norm {commutator:.3g})')

    for t in times:
        evolved = vectors @ evolution_operator(h, t).T
        for function in functions:
            before = function(vectors)
            after = function(evolved)
            mean_after, _ = weighted_mean(after, weights)
            mean_before, _ = weighted_mean(before, weights)
            _, error = weighted_mean(after - before, weights)
            label = f't={t:g} {function.label}'
            if error <= 1e-15:
                report.entries.append(DiscrepancyEntry(label, mean_after, mean_before, 0.0,
                                                       0.0 if mean_after == mean_before else math.inf, True))
            else:
                report.entries.append(DiscrepancyEntry(label, mean_after, mean_before, error,
                                                       (mean_after - mean_before) / error))
    return report
