import numpy

from gapsphere.hilbert.state import DensityMatrix, as_entries
from gapsphere.measures.measure import SampleBatch, WeightedSample
from gapsphere.util.error import DomainError


def _vectors_and_weights(samples):
    if isinstance(samples, SampleBatch):
        return samples.vectors, samples.weights
    if isinstance(samples, numpy.ndarray):
        return numpy.atleast_2d(samples), None

    samples = list(samples)
    if not samples:
        raise DomainError('Empirical covariance needs at least one sample')
    if isinstance(samples[0], WeightedSample):
        return (numpy.array([s.vector.entries for s in samples]),
                numpy.array([s.weight for s in samples]))
    return numpy.array([as_entries(s) for s in samples]), None


def empirical_covariance(samples):
    """ sum w |psi><psi| / sum w over a batch, an (n, d) array or a list of vectors / weighted samples. """
    vectors, weights = _vectors_and_weights(samples)
    if vectors.shape[0] == 0:
        raise DomainError('Empirical covariance needs at least one sample')
    if weights is None:
        weights = numpy.ones(vectors.shape[0])
    if numpy.any(weights < 0) or numpy.sum(weights) <= 0:
        raise DomainError('Weights must be nonnegative with a positive sum')
    entries = (vectors.T * weights) @ vectors.conj()
    return DensityMatrix.from_unnormalized(entries)


def trace_distance(rho, sigma):
    """ Half the trace norm of rho - sigma. """
    rho = rho if isinstance(rho, DensityMatrix) else DensityMatrix(as_entries(rho))
    sigma = sigma if isinstance(sigma, DensityMatrix) else DensityMatrix(as_entries(sigma))
    if rho.dimension != sigma.dimension:
        raise DomainError(f'Cannot compare density matrices of dimension {rho.dimension} and {sigma.dimension}')
    eigenvalues = numpy.linalg.eigvalsh(rho.entries - sigma.entries)
    return float(min(1.0, 0.5 * numpy.sum(numpy.abs(eigenvalues))))


def covariance_tolerance(dimension, samples, factor=5.0):
    """ The CLT-rate bound factor * d / sqrt(N) used by the covariance checks. """
    return factor * dimension / numpy.sqrt(samples)
