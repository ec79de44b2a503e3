""" Conditional wave functions of a bipartite system and the measures built around them.

For psi in C^{d1} (x) C^{d2} stored row-major (index i*d2 + j) and a basis
{|q2>} of C^{d2} given as the columns of a unitary, the conditional wave
function is the normalized partial inner product <q2|psi> with q2 drawn with
probability ||<q2|psi>||^2.
"""
import logging
from dataclasses import dataclass

import numpy

from gapsphere.hilbert.decomp import SpectralDecomposition, partial_amplitudes, partial_inner, spectral
from gapsphere.hilbert.haar import haar_columns_entries
from gapsphere.hilbert.state import (MAX_DIMENSION, DensityMatrix, HermitianOperator, OrthonormalSystem,
                                     StateVector, as_entries, normalize_rows, require_state)
from gapsphere.measures.gap import RANK_TOL, UniformSphereMeasure
from gapsphere.measures.measure import Measure, SampleBatch, matrix_to_json
from gapsphere.util.error import DomainError, EmptyWindowError, contract_check
from gapsphere.util.rng import as_stream

logger = logging.getLogger(__name__)

ZERO_PROBABILITY_TOL = 1e-14
WINDOW_TOL = 1e-12


class BipartiteSplit:

    def __init__(self, d1, d2):
        if int(d1) < 1 or int(d2) < 1:
            raise ValueError('Subsystem dimensions must be at least 1')
        if int(d1) * int(d2) > MAX_DIMENSION:
            raise ValueError(f'Total dimension {int(d1) * int(d2)} exceeds the cap of {MAX_DIMENSION}')
        self.d1 = int(d1)
        self.d2 = int(d2)

    @classmethod
    def of(cls, value):
        if isinstance(value, BipartiteSplit):
            return value
        d1, d2 = value
        return cls(d1, d2)

    @property
    def total(self):
        return self.d1 * self.d2

    def check(self, dimension):
        if dimension != self.total:
            raise DomainError(f'Split {self.d1}x{self.d2} does not match dimension {dimension}')

    def __iter__(self):
        yield self.d1
        yield self.d2

    def __eq__(self, other):
        return isinstance(other, BipartiteSplit) and (self.d1, self.d2) == (other.d1, other.d2)

    def __hash__(self):
        return hash((self.d1, self.d2))

    def __repr__(self):
        return f'BipartiteSplit(d1={self.d1}, d2={self.d2})'


@dataclass(frozen=True)
class ConditionalDraw:
    q2: int
    psi1: StateVector
    probability: float


class ConditionalEnsemble:
    """ The exact conditional distribution mu_1^psi: one draw per basis index with nonzero probability. """

    def __init__(self, draws, excluded=()):
        self.draws = list(draws)
        self.excluded = tuple(excluded)
        total = sum(draw.probability for draw in self.draws)
        contract_check(abs(total - 1.0) <= 1e-10, f'conditional probabilities sum to {total!r}')

    def probabilities(self):
        return numpy.array([draw.probability for draw in self.draws])

    def vectors(self):
        return numpy.array([draw.psi1.entries for draw in self.draws])

    def expectation(self, function):
        """ mu_1^psi(f) for f taking an (n, d1) array to n values. """
        return float(numpy.dot(self.probabilities(), function(self.vectors())))

    def as_batch(self, tag='conditional'):
        return SampleBatch(self.vectors(), tag, weights=self.probabilities())

    def __iter__(self):
        return iter(self.draws)

    def __len__(self):
        return len(self.draws)

    def __getitem__(self, item):
        return self.draws[item]


def _basis_entries(basis, d2):
    basis = as_entries(basis)
    if basis.shape != (d2, d2):
        raise DomainError(f'Basis of shape {basis.shape} does not act on C^{d2}')
    return basis


def _amplitudes(psi, basis, split):
    split = BipartiteSplit.of(split)
    psi = require_state(psi)
    split.check(psi.dimension)
    return partial_amplitudes(psi.entries, _basis_entries(basis, split.d2), split.d1, split.d2)


def reduced_density(psi, split):
    split = BipartiteSplit.of(split)
    psi = require_state(psi)
    split.check(psi.dimension)
    matrix = psi.entries.reshape(split.d1, split.d2)
    return DensityMatrix.from_unnormalized(matrix @ matrix.conj().T)


def reduced_densities(vectors, split):
    """ Reduced density matrices of each row of an (n, d1*d2) array, shape (n, d1, d1). """
    split = BipartiteSplit.of(split)
    matrices = numpy.asarray(vectors).reshape(-1, split.d1, split.d2)
    return matrices @ matrices.conj().transpose(0, 2, 1)


def conditional_draw(psi, basis, split, rng):
    amplitudes = _amplitudes(psi, basis, split)
    probabilities = numpy.sum(numpy.abs(amplitudes) ** 2, axis=0)
    probabilities = probabilities / numpy.sum(probabilities)
    q2 = int(as_stream(rng).generator.choice(probabilities.shape[0], p=probabilities))
    column = amplitudes[:, q2]
    return ConditionalDraw(q2, StateVector(column / numpy.linalg.norm(column)), float(probabilities[q2]))


def conditional_ensemble(psi, basis, split, zero_tol=ZERO_PROBABILITY_TOL):
    amplitudes = _amplitudes(psi, basis, split)
    probabilities = numpy.sum(numpy.abs(amplitudes) ** 2, axis=0)
    probabilities = probabilities / numpy.sum(probabilities)

    draws = []
    excluded = []
    for q2, probability in enumerate(probabilities):
        if probability <= zero_tol:
            excluded.append(q2)
            continue
        column = amplitudes[:, q2]
        draws.append(ConditionalDraw(q2, StateVector(column / numpy.linalg.norm(column)), float(probability)))

    if excluded:
        logger.debug('%d zero-probability basis indices excluded', len(excluded))
    # renormalize after dropping the numerically-zero rows
    kept = sum(draw.probability for draw in draws)
    draws = [ConditionalDraw(d.q2, d.psi1, d.probability / kept) for d in draws]
    return ConditionalEnsemble(draws, excluded)


def pooled_conditional_draws(batch, basis, split, rng):
    """ One conditional draw per row of a SampleBatch, vectorised; returns a batch on S(C^{d1}). """
    split = BipartiteSplit.of(split)
    split.check(batch.dimension)
    amplitudes = partial_amplitudes(batch.vectors, _basis_entries(basis, split.d2), split.d1, split.d2)
    probabilities = numpy.sum(numpy.abs(amplitudes) ** 2, axis=1)
    probabilities /= numpy.sum(probabilities, axis=1, keepdims=True)

    n = len(batch)
    uniforms = as_stream(rng).generator.random(n)
    chosen = numpy.sum(numpy.cumsum(probabilities, axis=1) < uniforms[:, None], axis=1)
    chosen = numpy.minimum(chosen, split.d2 - 1)
    picked = amplitudes[numpy.arange(n), :, chosen]
    return SampleBatch(normalize_rows(picked), f'cond({batch.tag})', seed=batch.seed, key=batch.key,
                       weights=batch.weights)


def scaled_partial_inner(q2, psi, basis, split, rho2):
    """ f(q2) <q2|psi> with f(q2) = <q2|rho2|q2>^{-1/2}. """
    split = BipartiteSplit.of(split)
    basis = _basis_entries(basis, split.d2)
    column = basis[:, q2]
    weight = numpy.real(numpy.vdot(column, as_entries(rho2) @ column))
    if weight <= 0:
        raise DomainError(f'<q2|rho2|q2> vanishes for q2 = {q2}')
    return partial_inner(q2, psi, basis, split).entries / numpy.sqrt(weight)


def scaled_partial_inner_rows(vectors, q2, basis, split, rho2):
    """ Row-wise f(q2) <q2|psi> for unnormalized (n, d1*d2) vectors such as G draws. """
    split = BipartiteSplit.of(split)
    basis = _basis_entries(basis, split.d2)
    column = basis[:, q2]
    weight = numpy.real(numpy.vdot(column, as_entries(rho2) @ column))
    matrices = numpy.asarray(vectors).reshape(-1, split.d1, split.d2)
    return (matrices @ column.conj()) / numpy.sqrt(weight)


def scaled_conditional_points(psi, basis, split):
    """ The d2 points sqrt(d2) <q2|psi>; their uniform empirical law approximates G(rho1). """
    split = BipartiteSplit.of(split)
    return numpy.sqrt(split.d2) * _amplitudes(psi, basis, split).T


class FixedReducedMeasure(Measure):
    """ u_{rho1}: uniform measure on wave functions in C^{d1} (x) C^{d2} with reduced density matrix rho1. """

    tag = 'fixed-reduced'

    def __init__(self, rho1, d2, rank_tol=RANK_TOL):
        if not isinstance(rho1, DensityMatrix):
            rho1 = DensityMatrix(rho1)
        self.rho1 = rho1
        self.split = BipartiteSplit(rho1.dimension, d2)
        super().__init__(self.split.total)

        decomposition = spectral(rho1)
        support = decomposition.eigenvalues > rank_tol
        self.rank = int(numpy.sum(support))
        if self.rank > d2:
            raise DomainError(f'rank(rho1) = {self.rank} exceeds d2 = {d2}')
        # eigenbasis fixed once; u_rho1 does not depend on the choice within degenerate eigenspaces
        self._chi = decomposition.eigenvectors[:, support]
        self._coefficients = numpy.sqrt(decomposition.eigenvalues[support])

    def _sample_self(self, generator, n):
        phis = haar_columns_entries(generator, self.split.d2, self.rank, size=n)
        matrices = (self._chi * self._coefficients) @ phis.transpose(0, 2, 1)
        return matrices.reshape(n, self.split.total)

    def density_matrix(self):
        return self.rho1.tensor(DensityMatrix.maximally_mixed(self.split.d2))

    def _params(self):
        return {'rho1': matrix_to_json(self.rho1), 'd2': self.split.d2}


def sample_fixed_reduced(rho1, d2, rng):
    return FixedReducedMeasure(rho1, d2).draw(rng)


class ProductEigenstateMeasure(Measure):
    """ Random product eigenvector chi_i (x) b_j of rho1 (x) I/d2, weight p_i/d2, uniform phase.

    Same density matrix as u_rho1, but every conditional distribution in the
    basis {b_j} is a delta measure.
    """

    tag = 'product-eigenstate'

    def __init__(self, rho1, d2, bath_basis=None):
        if not isinstance(rho1, DensityMatrix):
            rho1 = DensityMatrix(rho1)
        self.rho1 = rho1
        self.split = BipartiteSplit(rho1.dimension, d2)
        super().__init__(self.split.total)
        decomposition = spectral(rho1)
        self._chi = decomposition.eigenvectors
        self._weights = decomposition.eigenvalues / numpy.sum(decomposition.eigenvalues)
        self._bath = numpy.eye(d2, dtype=numpy.complex128) if bath_basis is None else _basis_entries(bath_basis, d2)

    def _sample_self(self, generator, n):
        system = generator.choice(self.split.d1, size=n, p=self._weights)
        bath = generator.integers(0, self.split.d2, size=n)
        phases = numpy.exp(1j * generator.uniform(0.0, 2.0 * numpy.pi, n))
        left = self._chi[:, system].T
        right = self._bath[:, bath].T
        return (phases[:, None, None] * left[:, :, None] * right[:, None, :]).reshape(n, self.split.total)

    def density_matrix(self):
        return self.rho1.tensor(DensityMatrix.maximally_mixed(self.split.d2))

    def _params(self):
        return {'rho1': matrix_to_json(self.rho1), 'd2': self.split.d2, 'bath_basis': matrix_to_json(self._bath)}


def product_eigenstate(rho1, d2, rng, bath_basis=None):
    return ProductEigenstateMeasure(rho1, d2, bath_basis).draw(rng)


class MicrocanonicalSpec:

    def __init__(self, hamiltonian, energy, delta, basis, energies):
        if delta < 0:
            raise ValueError('Energy window width must be nonnegative')
        if basis.count == 0:
            raise EmptyWindowError('Microcanonical subspace is empty')
        energies = numpy.asarray(energies, dtype=float)
        tol = WINDOW_TOL * max(1.0, abs(energy) + delta)
        contract_check(numpy.all(energies >= energy - tol) and numpy.all(energies <= energy + delta + tol),
                       'retained eigenvalues leave the energy window')
        self.hamiltonian = hamiltonian
        self.energy = float(energy)
        self.delta = float(delta)
        self.basis = basis
        self.energies = energies

    @property
    def dimension(self):
        return self.basis.count

    def density_matrix(self):
        return DensityMatrix.from_unnormalized(self.basis.projector())

    def __repr__(self):
        return f'MicrocanonicalSpec(E={self.energy}, delta={self.delta}, dimension={self.dimension})'


def microcanonical_spec(hamiltonian, energy, delta, decomposition=None):
    if decomposition is None:
        decomposition = spectral(hamiltonian)
    tol = WINDOW_TOL * max(1.0, abs(energy) + delta)
    levels = decomposition.eigenvalues
    window = (levels >= energy - tol) & (levels <= energy + delta + tol)
    if not numpy.any(window):
        raise EmptyWindowError(f'No eigenvalue of H lies in [{energy}, {energy + delta}]')
    logger.debug('microcanonical window [%g, %g] holds %d levels', energy, energy + delta, int(numpy.sum(window)))
    basis = OrthonormalSystem(decomposition.eigenvectors[:, window])
    return MicrocanonicalSpec(hamiltonian, energy, delta, basis, levels[window])


class MicrocanonicalMeasure(UniformSphereMeasure):

    tag = 'microcanonical'

    def __init__(self, spec):
        self.spec = spec
        super().__init__(spec.basis)

    def _params(self):
        params = {'E': self.spec.energy, 'delta': self.spec.delta}
        if self.spec.hamiltonian is not None:
            params['H'] = matrix_to_json(self.spec.hamiltonian)
        return params


def sample_microcanonical(spec, rng):
    return MicrocanonicalMeasure(spec).draw(rng)


def composite_hamiltonian(h1, h2):
    h1 = as_entries(h1)
    h2 = as_entries(h2)
    return HermitianOperator(numpy.kron(h1, numpy.eye(h2.shape[0])) + numpy.kron(numpy.eye(h1.shape[0]), h2))


def composite_spectrum(first, second):
    """ Spectral decomposition of H1 (x) I + I (x) H2 from those of H1 and H2. """
    values = numpy.add.outer(first.eigenvalues, second.eigenvalues).ravel()
    order = numpy.argsort(values, kind='stable')
    vectors = numpy.kron(first.eigenvectors, second.eigenvectors)[:, order]
    return SpectralDecomposition(values[order], vectors, verify=False)
