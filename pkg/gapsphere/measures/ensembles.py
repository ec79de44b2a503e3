""" Thermal density matrices and the alternative candidates for a thermal wave-function distribution. """
import logging
import math

import numpy

from gapsphere.hilbert.decomp import spectral
from gapsphere.hilbert.haar import standard_normal_complex
from gapsphere.hilbert.state import DensityMatrix, HermitianOperator, OrthonormalSystem, as_entries, normalize_rows
from gapsphere.measures.measure import Measure, matrix_to_json
from gapsphere.util.error import DomainError, contract_check

logger = logging.getLogger(__name__)

PARTITION_TOL = 1e-10
WEIGHT_TOL = 1e-12


def _operator(value):
    return value if isinstance(value, HermitianOperator) else HermitianOperator(as_entries(value))


class CanonicalSpec:
    """ rho_beta = exp(-beta H) / Z, computed from the spectrum shifted by its minimum. """

    def __init__(self, hamiltonian, beta):
        beta = float(beta)
        if not math.isfinite(beta) or beta < 0:
            raise DomainError('Inverse temperature must be finite and nonnegative')
        self.hamiltonian = _operator(hamiltonian)
        self.beta = beta
        self.decomposition = spectral(self.hamiltonian)

        levels = self.decomposition.eigenvalues
        shifted = numpy.exp(-beta * (levels - levels[0]))
        self.log_z = float(-beta * levels[0] + numpy.log(numpy.sum(shifted)))
        self.weights = shifted / numpy.sum(shifted)

    @property
    def z(self):
        return math.exp(self.log_z)

    def rho(self):
        return DensityMatrix.from_spectrum(self.weights, self.decomposition.eigenvectors)

    def __repr__(self):
        return f'CanonicalSpec(dimension={self.hamiltonian.dimension}, beta={self.beta})'


def canonical_rho(hamiltonian, beta):
    return CanonicalSpec(hamiltonian, beta).rho()


def _uniform_on(generator, columns, n):
    coordinates = standard_normal_complex(generator, (n, columns.shape[1]))
    return normalize_rows(coordinates) @ columns.T


class EigMeasure(Measure):
    """ EIG(rho): eigenvalue p is picked with probability p dim(H_p), then a uniform vector of H_p. """

    tag = 'EIG'

    def __init__(self, rho):
        if not isinstance(rho, DensityMatrix):
            rho = DensityMatrix(rho)
        self.rho = rho
        super().__init__(rho.dimension)

        spaces = spectral(rho).eigenspaces()
        weights = numpy.array([value * columns.shape[1] for value, columns in spaces])
        weights[weights < WEIGHT_TOL] = 0.0
        self._spaces = [columns for _, columns in spaces]
        self._weights = weights / numpy.sum(weights)

    @property
    def eigenspace_count(self):
        return len(self._spaces)

    def _sample_self(self, generator, n):
        chosen = generator.choice(len(self._spaces), size=n, p=self._weights)
        vectors = numpy.empty((n, self.dimension), dtype=numpy.complex128)
        for index, columns in enumerate(self._spaces):
            rows = numpy.flatnonzero(chosen == index)
            if rows.size:
                vectors[rows] = _uniform_on(generator, columns, rows.size)
        return vectors

    def density_matrix(self):
        return self.rho

    def _params(self):
        return {'rho': matrix_to_json(self.rho)}


def sample_eig(rho, rng):
    return EigMeasure(rho).draw(rng)


class ExtremalSpec:

    def __init__(self, weights, bases):
        weights = numpy.asarray(weights, dtype=float)
        if weights.ndim != 1 or weights.shape[0] != len(bases):
            raise ValueError('Need one weight per eigenspace basis')
        if numpy.any(weights < 0):
            raise DomainError('Extremal weights must be nonnegative')
        contract_check(abs(numpy.sum(weights) - 1.0) <= 1e-10, 'extremal weights do not sum to 1')
        self.weights = weights
        self.bases = [b if isinstance(b, OrthonormalSystem) else OrthonormalSystem(b) for b in bases]
        dimensions = {b.dimension for b in self.bases}
        if len(dimensions) != 1:
            raise DomainError('Eigenspace bases live in different dimensions')
        self.dimension = dimensions.pop()

    @classmethod
    def from_density(cls, rho):
        """ Eigenspaces of rho with weight p dim(H_p), so the covariance is rho. """
        spaces = spectral(rho if isinstance(rho, DensityMatrix) else DensityMatrix(rho)).eigenspaces()
        weights = numpy.array([value * columns.shape[1] for value, columns in spaces])
        return cls(weights / numpy.sum(weights), [columns for _, columns in spaces])

    @classmethod
    def thermal(cls, hamiltonian, beta):
        """ lambda_p with p(E) = exp(-beta E) / Z over the eigenspaces of H. """
        canonical = CanonicalSpec(hamiltonian, beta)
        groups = canonical.decomposition.eigenspaces()
        weights = []
        start = 0
        for _, columns in groups:
            count = columns.shape[1]
            weights.append(numpy.sum(canonical.weights[start:start + count]))
            start += count
        return cls(numpy.array(weights), [columns for _, columns in groups])

    def density_matrix(self):
        entries = sum(w * b.projector() / b.count for w, b in zip(self.weights, self.bases))
        return DensityMatrix.from_unnormalized(entries)

    def __repr__(self):
        return f'ExtremalSpec(dimension={self.dimension}, eigenspaces={len(self.bases)})'


class ExtremalMeasure(Measure):
    """ Psi = sum_p sqrt(p) Psi_p with independent uniform Psi_p on each eigenspace.

    For one-dimensional eigenspaces the moduli are fixed and only the phases are random.
    """

    tag = 'extremal'

    def __init__(self, spec):
        self.spec = spec
        super().__init__(spec.dimension)

    def _sample_self(self, generator, n):
        vectors = numpy.zeros((n, self.dimension), dtype=numpy.complex128)
        for weight, basis in zip(self.spec.weights, self.spec.bases):
            if weight > 0:
                vectors += math.sqrt(weight) * _uniform_on(generator, basis.vectors, n)
        return vectors

    def density_matrix(self):
        return self.spec.density_matrix()

    def _params(self):
        return {'weights': self.spec.weights.tolist(),
                'bases': [matrix_to_json(basis.vectors) for basis in self.spec.bases]}


def sample_extremal(spec, rng):
    return ExtremalMeasure(spec).draw(rng)


class EntropyFamilySpec:

    def __init__(self, operator):
        self.operator = _operator(operator)

    def __repr__(self):
        return f'EntropyFamilySpec(dimension={self.operator.dimension})'


def entropy_family_log_density(psi, spec):
    """ <psi|L|psi>, relative to the uniform sphere measure and unnormalized. """
    return spec.operator.expectation(psi)


def brody_hughston_log_density(psi, hamiltonian, beta):
    """ -beta <psi|H|psi> / <psi|psi>; constant on rays. """
    psi = as_entries(psi)
    norm_squared = numpy.sum(numpy.abs(psi) ** 2, axis=-1)
    return -float(beta) * _operator(hamiltonian).expectation(psi) / norm_squared
