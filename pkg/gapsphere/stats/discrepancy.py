import logging
import math
from dataclasses import asdict, dataclass, field

import numpy

from gapsphere.measures.measure import SampleBatch
from gapsphere.util.error import DomainError

logger = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 3.0
MIN_SAMPLES = 1000


@dataclass(frozen=True)
class DiscrepancyEntry:
    label: str
    estimate_a: float
    estimate_b: float
    standard_error: float
    z: float
    excluded: bool = False

    @property
    def difference(self):
        return self.estimate_a - self.estimate_b


@dataclass
class DiscrepancyReport:
    entries: list = field(default_factory=list)
    threshold: float = DEFAULT_THRESHOLD
    notes: list = field(default_factory=list)

    @property
    def passed(self):
        return all(abs(entry.z) <= self.threshold for entry in self.entries if not entry.excluded)

    @property
    def active(self):
        return [entry for entry in self.entries if not entry.excluded]

    @property
    def excluded(self):
        return [entry.label for entry in self.entries if entry.excluded]

    def max_abs_z(self):
        return max((abs(entry.z) for entry in self.active), default=0.0)

    def max_abs_difference(self):
        return max((abs(entry.difference) for entry in self.active), default=0.0)

    def entry(self, label):
        for entry in self.entries:
            if entry.label == label:
                return entry
        raise KeyError(label)

    def extend(self, other, prefix=''):
        self.entries.extend(DiscrepancyEntry(prefix + e.label, e.estimate_a, e.estimate_b, e.standard_error, e.z,
                                             e.excluded) for e in other.entries)
        self.notes.extend(other.notes)

    def to_json(self):
        return {'passed': self.passed, 'threshold': self.threshold, 'max_abs_z': self.max_abs_z(),
                'notes': list(self.notes), 'entries': [_entry_json(entry) for entry in self.entries]}

    def __repr__(self):
        return (f'DiscrepancyReport(passed={self.passed}, max_abs_z={self.max_abs_z():.3g}, '
                f'entries={len(self.entries)})')


def _entry_json(entry):
    values = asdict(entry)
    # JSON has no infinity
    if not math.isfinite(values['z']):
        values['z'] = None
    return values


def _unpack(samples):
    if isinstance(samples, SampleBatch):
        return samples.vectors, samples.weights
    return numpy.asarray(getattr(samples, 'entries', samples)), None


def weighted_mean(values, weights=None):
    """ Self-normalized mean and its standard error, using the Kish effective sample size. """
    values = numpy.asarray(values, dtype=float)
    if weights is None:
        n = values.shape[0]
        return float(numpy.mean(values)), float(numpy.std(values) / math.sqrt(n))
    weights = numpy.asarray(weights, dtype=float)
    total = numpy.sum(weights)
    if total <= 0:
        raise DomainError('Weights must have a positive sum')
    mean = float(numpy.dot(weights, values) / total)
    variance = float(numpy.dot(weights, (values - mean) ** 2) / total)
    effective = total ** 2 / float(numpy.dot(weights, weights))
    return mean, math.sqrt(variance / effective)


def _z_entry(label, mean_a, error_a, mean_b, error_b, zero_variance):
    error = math.sqrt(error_a ** 2 + error_b ** 2)
    if error <= zero_variance:
        return DiscrepancyEntry(label, mean_a, mean_b, error, 0.0 if mean_a == mean_b else math.inf, True)
    return DiscrepancyEntry(label, mean_a, mean_b, error, (mean_a - mean_b) / error)


class AnalyticReference:
    """ Exact expectations for the linear test functions of a known density matrix. """

    def __init__(self, rho, label='analytic'):
        self.rho = rho
        self.label = label

    def __call__(self, function):
        return function.linear_expectation(self.rho)


def discrepancy(samples_a, reference, functions, threshold=DEFAULT_THRESHOLD, min_samples=MIN_SAMPLES,
                zero_variance=1e-15):
    """ Compare test-function means of samples_a against samples or an analytic reference.

    Functions with zero pooled variance are reported but excluded from the verdict;
    functions an analytic reference cannot evaluate are skipped with a note.
    """
    vectors_a, weights_a = _unpack(samples_a)
    if vectors_a.shape[0] < min_samples:
        raise DomainError(f'Discrepancy needs at least {min_samples} samples, got {vectors_a.shape[0]}')

    analytic = callable(reference) and not isinstance(reference, (SampleBatch, numpy.ndarray))
    if not analytic:
        vectors_b, weights_b = _unpack(reference)
        if vectors_b.shape[0] < min_samples:
            raise DomainError(f'Discrepancy needs at least {min_samples} reference samples')

    report = DiscrepancyReport(threshold=threshold)
    for function in functions:
        mean_a, error_a = weighted_mean(function(vectors_a), weights_a)
        if analytic:
            expected = reference(function)
            if expected is None:
                report.notes.append(f'{function.label}: no analytic reference, skipped')
                continue
            mean_b, error_b = float(expected), 0.0
        else:
            mean_b, error_b = weighted_mean(function(vectors_b), weights_b)
        entry = _z_entry(function.label, mean_a, error_a, mean_b, error_b, zero_variance)
        if entry.excluded:
            report.notes.append(f'{function.label}: zero variance, excluded')
        report.entries.append(entry)

    logger.debug('discrepancy over %d functions: max |z| = %.3g', len(report.entries), report.max_abs_z())
    return report
