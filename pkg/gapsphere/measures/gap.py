""" Gaussian, adjusted Gaussian and GAP measures, the uniform sphere measure, and adjust-and-project.

Densities are relative to Lebesgue measure on support(rho) (G, GA) and to the
unnormalized surface measure on the unit sphere of support(rho) (GAP). If the
surface measure is normalized to a probability measure instead, GAP densities
scale by the sphere area 2 pi^k / (k-1)!.
"""
import logging
import math

import numpy
from scipy.special import gammaln

from gapsphere.hilbert.decomp import spectral
from gapsphere.hilbert.haar import standard_normal_complex
from gapsphere.hilbert.state import (DensityMatrix, OrthonormalSystem, StateVector, as_entries,
                                     normalize_rows)
from gapsphere.measures.measure import (LEBESGUE_SUPPORT, SURFACE_SUPPORT, DensityValue, Measure, SampleBatch,
                                        WeightedSample, matrix_to_json)
from gapsphere.util.error import DomainError, contract_check

logger = logging.getLogger(__name__)

RANK_TOL = 1e-12
COMPONENT_TOL = 1e-8
WEIGHT_SUM_TOL = 1e-10


class GapSpec:

    def __init__(self, rho, rank_tol=RANK_TOL):
        if not isinstance(rho, DensityMatrix):
            rho = DensityMatrix(rho)
        self._rho = rho
        self._decomposition = spectral(rho)

        eigenvalues = self._decomposition.eigenvalues
        support = eigenvalues > rank_tol
        contract_check(numpy.any(support), 'density matrix has empty support')
        contract_check(abs(numpy.sum(eigenvalues) - 1.0) <= WEIGHT_SUM_TOL, 'eigenvalues do not sum to 1')

        weights = eigenvalues[support]
        self._weights = weights / numpy.sum(weights)
        self._weights.flags.writeable = False
        self._support = OrthonormalSystem(self._decomposition.eigenvectors[:, support])

        projector = self._support.projector()
        contract_check(numpy.max(numpy.abs(projector @ projector - projector)) <= WEIGHT_SUM_TOL,
                       'support projector is not idempotent')

    @classmethod
    def of(cls, value):
        return value if isinstance(value, GapSpec) else cls(value)

    @property
    def rho(self):
        return self._rho

    @property
    def decomposition(self):
        return self._decomposition

    @property
    def weights(self):
        return self._weights

    @property
    def support(self):
        return self._support

    @property
    def rank(self):
        return self._weights.shape[0]

    @property
    def dimension(self):
        return self._rho.dimension

    def support_projector(self):
        return self._support.projector()

    def log_det(self):
        return float(numpy.sum(numpy.log(self._weights)))

    def outside_norm(self, vectors):
        vectors = as_entries(vectors)
        return numpy.linalg.norm(vectors - self._support.embed(self._support.coordinates(vectors)), axis=-1)

    def quadratic_form(self, vectors):
        """ <psi|rho_+^{-1}|psi> for one vector or each row. """
        coordinates = self._support.coordinates(as_entries(vectors))
        return numpy.sum(numpy.abs(coordinates) ** 2 / self._weights, axis=-1)

    def log_density_gap(self, vectors):
        k = self.rank
        return gammaln(k + 1) - math.log(2.0) - k * math.log(math.pi) - self.log_det() \
            - (k + 1) * numpy.log(self.quadratic_form(vectors))

    def __repr__(self):
        return f'GapSpec(dimension={self.dimension}, rank={self.rank})'


def gaussian_coordinates(generator, weights, n):
    return standard_normal_complex(generator, (n, weights.shape[0])) * numpy.sqrt(weights)


def adjusted_gaussian_coordinates(generator, weights, n):
    """ Exact GA draw: mixture over a distinguished index chosen with probability p_n,
    whose squared modulus is Gamma(2, p_n) while the others stay Exponential(p_m). """
    k = weights.shape[0]
    moduli_squared = generator.exponential(1.0, (n, k)) * weights
    chosen = generator.choice(k, size=n, p=weights)
    moduli_squared[numpy.arange(n), chosen] += generator.exponential(1.0, n) * weights[chosen]
    phases = generator.uniform(0.0, 2.0 * math.pi, (n, k))
    return numpy.sqrt(moduli_squared) * numpy.exp(1j * phases)


class _SpecMeasure(Measure):

    def __init__(self, rho):
        self.spec = GapSpec.of(rho)
        super().__init__(self.spec.dimension)

    def density_matrix(self):
        return self.spec.rho

    def _params(self):
        return {'rho': matrix_to_json(self.spec.rho)}


class GaussianMeasure(_SpecMeasure):

    tag = 'G'
    on_sphere = False

    def _sample_self(self, generator, n):
        return self.spec.support.embed(gaussian_coordinates(generator, self.spec.weights, n))


class AdjustedGaussianMeasure(_SpecMeasure):

    tag = 'GA'
    on_sphere = False

    def _sample_self(self, generator, n):
        return self.spec.support.embed(adjusted_gaussian_coordinates(generator, self.spec.weights, n))


class GapMeasure(_SpecMeasure):

    tag = 'GAP'

    def _sample_self(self, generator, n):
        coordinates = adjusted_gaussian_coordinates(generator, self.spec.weights, n)
        return self.spec.support.embed(normalize_rows(coordinates))


class ProjectedGaussianMeasure(_SpecMeasure):
    """ P_* G(rho): projection without the ||psi||^2 adjustment. Its covariance is not rho. """

    tag = 'PG'

    def _sample_self(self, generator, n):
        coordinates = gaussian_coordinates(generator, self.spec.weights, n)
        return self.spec.support.embed(normalize_rows(coordinates))

    def density_matrix(self):
        raise NotImplementedError('The projected Gaussian measure has no closed-form density matrix')


class UniformSphereMeasure(Measure):

    tag = 'uniform'

    def __init__(self, subspace):
        if isinstance(subspace, int):
            subspace = OrthonormalSystem(numpy.eye(subspace, dtype=numpy.complex128))
        self.subspace = subspace
        super().__init__(subspace.dimension)

    def _sample_self(self, generator, n):
        coordinates = standard_normal_complex(generator, (n, self.subspace.count))
        return self.subspace.embed(normalize_rows(coordinates))

    def density_matrix(self):
        return DensityMatrix.from_unnormalized(self.subspace.projector())

    def _params(self):
        if numpy.allclose(self.subspace.vectors, numpy.eye(self.dimension, self.subspace.count)):
            return {'dimension': self.dimension, 'count': self.subspace.count}
        return {'dimension': self.dimension, 'subspace': matrix_to_json(self.subspace.vectors)}


def sample_g(spec, rng):
    return GaussianMeasure(spec).draw(rng)


def sample_ga(spec, rng):
    return AdjustedGaussianMeasure(spec).draw(rng)


def sample_gap(spec, rng):
    return GapMeasure(spec).draw(rng)


def _support_coordinates(spec, psi, component_tol):
    psi = as_entries(psi)
    if psi.shape != (spec.dimension,):
        raise DomainError('Vector dimension does not match the density matrix')
    outside = float(spec.outside_norm(psi))
    if outside > component_tol:
        logger.debug('vector leaves support(rho) by %g', outside)
        return psi, False
    return psi, True


def density_g(spec, psi, component_tol=COMPONENT_TOL):
    spec = GapSpec.of(spec)
    psi, inside = _support_coordinates(spec, psi, component_tol)
    if not inside:
        return DensityValue(0.0, -math.inf, LEBESGUE_SUPPORT, False)
    log_value = -float(spec.quadratic_form(psi)) - spec.rank * math.log(math.pi) - spec.log_det()
    return DensityValue(math.exp(log_value), log_value, LEBESGUE_SUPPORT)


def density_ga(spec, psi, component_tol=COMPONENT_TOL):
    base = density_g(spec, psi, component_tol)
    if not base.in_support:
        return base
    norm_squared = float(numpy.sum(numpy.abs(as_entries(psi)) ** 2))
    if norm_squared == 0:
        return DensityValue(0.0, -math.inf, LEBESGUE_SUPPORT)
    log_value = base.log_value + math.log(norm_squared)
    return DensityValue(math.exp(log_value), log_value, LEBESGUE_SUPPORT)


def density_gap(spec, psi, component_tol=COMPONENT_TOL):
    spec = GapSpec.of(spec)
    if not isinstance(psi, StateVector):
        psi = StateVector(as_entries(psi), tol=1e-10)
    psi, inside = _support_coordinates(spec, psi, component_tol)
    if not inside:
        return DensityValue(0.0, -math.inf, SURFACE_SUPPORT, False)
    log_value = float(spec.log_density_gap(psi))
    return DensityValue(math.exp(log_value), log_value, SURFACE_SUPPORT)


def adjust_and_project(samples):
    if not samples:
        raise ValueError('adjust_and_project needs at least one sample')
    adjusted = []
    for sample in samples:
        if not isinstance(sample, WeightedSample):
            sample = WeightedSample(sample)
        norm = sample.vector.norm()
        if norm == 0:
            raise DomainError('Cannot project the zero vector to the unit sphere')
        adjusted.append(WeightedSample(StateVector(sample.vector.entries / norm), sample.weight * norm ** 2))
    return adjusted


def adjust_and_project_batch(batch):
    """ Batch form of adjust_and_project; returns a weighted SampleBatch on the sphere. """
    weights = batch.weights if batch.weights is not None else numpy.ones(len(batch))
    norms_squared = numpy.sum(numpy.abs(batch.vectors) ** 2, axis=1)
    return SampleBatch(normalize_rows(batch.vectors), f'A({batch.tag})', seed=batch.seed, key=batch.key,
                       weights=weights * norms_squared, on_sphere=True)


def project_batch(batch):
    return SampleBatch(normalize_rows(batch.vectors), f'P({batch.tag})', seed=batch.seed, key=batch.key,
                       weights=batch.weights, on_sphere=True)
