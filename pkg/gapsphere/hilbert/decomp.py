import numpy

from gapsphere.hilbert.state import (DensityMatrix, OrthonormalSystem, RawVector, HERMITIAN_TOL, as_entries,
                                     hermiticity_error, require_state)
from gapsphere.util.error import DomainError, contract_check

CLAMP_TOL = 1e-10
RECONSTRUCTION_TOL = 1e-10
DEGENERACY_TOL = 1e-10
SCHMIDT_TOL = 1e-12


class SpectralDecomposition:

    def __init__(self, eigenvalues, eigenvectors, tol=RECONSTRUCTION_TOL, verify=True):
        self._eigenvalues = numpy.array(eigenvalues, dtype=float)
        self._eigenvectors = numpy.array(eigenvectors, dtype=numpy.complex128)
        if numpy.any(numpy.diff(self._eigenvalues) < 0):
            raise ValueError('Eigenvalues must be ascending')
        if verify:
            n = self._eigenvalues.shape[0]
            error = numpy.max(numpy.abs(self._eigenvectors.conj().T @ self._eigenvectors - numpy.eye(n)))
            contract_check(error <= tol, f'eigenvectors not orthonormal (error {error!r})')
        self._eigenvalues.flags.writeable = False
        self._eigenvectors.flags.writeable = False

    @property
    def eigenvalues(self):
        return self._eigenvalues

    @property
    def eigenvectors(self):
        return self._eigenvectors

    @property
    def dimension(self):
        return self._eigenvalues.shape[0]

    def reconstruct(self):
        return (self._eigenvectors * self._eigenvalues) @ self._eigenvectors.conj().T

    def eigenspaces(self, tol=DEGENERACY_TOL):
        """ Group eigenvectors by eigenvalue; returns [(value, d x m columns), ...] ascending. """
        groups = []
        start = 0
        for i in range(1, self.dimension + 1):
            if i == self.dimension or self._eigenvalues[i] - self._eigenvalues[start] > tol:
                value = float(numpy.mean(self._eigenvalues[start:i]))
                groups.append((value, self._eigenvectors[:, start:i]))
                start = i
        return groups

    def __repr__(self):
        return f'SpectralDecomposition(dimension={self.dimension})'


def spectral(operator, tol=HERMITIAN_TOL, clamp_tol=CLAMP_TOL, density=None):
    entries = as_entries(operator)
    contract_check(hermiticity_error(entries) <= tol, 'input is not Hermitian')
    eigenvalues, eigenvectors = numpy.linalg.eigh(entries)

    if density is None:
        density = isinstance(operator, DensityMatrix)
    if density:
        contract_check(eigenvalues[0] >= -clamp_tol and eigenvalues[-1] <= 1.0 + clamp_tol,
                       f'density eigenvalues leave [0, 1] by more than {clamp_tol}')
        eigenvalues = numpy.clip(eigenvalues, 0.0, 1.0)

    decomposition = SpectralDecomposition(eigenvalues, eigenvectors)
    scale = max(1.0, float(numpy.linalg.norm(entries)))
    error = float(numpy.linalg.norm(entries - decomposition.reconstruct()))
    contract_check(error <= RECONSTRUCTION_TOL * scale + clamp_tol, f'reconstruction error {error!r}')
    return decomposition


class SchmidtDecomposition:

    def __init__(self, coefficients, left, right, tol=RECONSTRUCTION_TOL):
        self._coefficients = numpy.array(coefficients, dtype=float)
        self._coefficients.flags.writeable = False
        if numpy.any(numpy.diff(self._coefficients) > 0) or numpy.any(self._coefficients < 0):
            raise ValueError('Schmidt coefficients must be nonnegative and descending')
        contract_check(abs(numpy.sum(self._coefficients ** 2) - 1.0) <= tol, 'squared coefficients do not sum to 1')
        self._left = OrthonormalSystem(left, tol=tol)
        self._right = OrthonormalSystem(right, tol=tol)

    @property
    def coefficients(self):
        return self._coefficients

    @property
    def left(self):
        return self._left

    @property
    def right(self):
        return self._right

    @property
    def rank(self):
        return self._coefficients.shape[0]

    def reconstruct(self):
        matrix = (self._left.vectors * self._coefficients) @ self._right.vectors.T
        return matrix.reshape(-1)

    def __repr__(self):
        return f'SchmidtDecomposition(rank={self.rank})'


def schmidt(psi, d1, d2, tol=SCHMIDT_TOL):
    psi = require_state(psi)
    if d1 * d2 != psi.dimension:
        raise DomainError(f'Split {d1}x{d2} does not match vector length {psi.dimension}')

    left, singular, right_h = numpy.linalg.svd(psi.entries.reshape(d1, d2), full_matrices=False)
    rank = max(1, int(numpy.sum(singular > tol)))
    decomposition = SchmidtDecomposition(singular[:rank], left[:, :rank], right_h[:rank].T)

    error = numpy.linalg.norm(decomposition.reconstruct() - psi.entries)
    contract_check(error <= RECONSTRUCTION_TOL, f'Schmidt reconstruction error {error!r}')
    return decomposition


def split_dimensions(split):
    d1, d2 = split
    return int(d1), int(d2)


def partial_amplitudes(vectors, basis, d1, d2):
    """ All partial inner products <q2|psi>; returns shape (..., d1, d2), column q2 per basis vector. """
    vectors = numpy.asarray(vectors)
    matrices = vectors.reshape(vectors.shape[:-1] + (d1, d2))
    return matrices @ numpy.asarray(basis).conj()


def partial_inner(q2, psi, basis, split):
    d1, d2 = split_dimensions(split)
    psi = require_state(psi)
    basis = as_entries(basis)
    if psi.dimension != d1 * d2 or basis.shape != (d2, d2):
        raise DomainError('Dimensions of state, basis and split do not match')
    if q2 not in range(d2):
        raise DomainError(f'Basis index {q2} out of range')
    return RawVector(psi.entries.reshape(d1, d2) @ basis[:, q2].conj())
