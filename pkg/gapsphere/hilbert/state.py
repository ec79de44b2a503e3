""" Vectors and operators on C^d.

All types wrap a read-only complex128 NumPy array and are immutable after
construction. Tolerances are module constants; every constructor accepts an
override.
"""
import numpy

from gapsphere.util.error import DomainError, contract_check

HERMITIAN_TOL = 1e-12
NORM_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-12
UNITARY_TOL = 1e-10
ORTHONORMAL_TOL = 1e-10
MAX_DIMENSION = 4096


def _frozen(entries, ndim):
    array = numpy.array(entries, dtype=numpy.complex128)
    if array.ndim != ndim:
        raise ValueError(f'Expected a {ndim}-dimensional array, got shape {array.shape}')
    if array.size == 0:
        raise ValueError('Empty array')
    if max(array.shape) > MAX_DIMENSION:
        raise ValueError(f'Dimension exceeds the cap of {MAX_DIMENSION}')
    if not numpy.all(numpy.isfinite(array)):
        raise ValueError('Entries must be finite')
    array.flags.writeable = False
    return array


def hermiticity_error(matrix):
    matrix = numpy.asarray(matrix)
    scale = max(1.0, float(numpy.max(numpy.abs(matrix))))
    return float(numpy.max(numpy.abs(matrix - matrix.conj().T))) / scale


class RawVector:

    def __init__(self, entries):
        self._entries = _frozen(entries, 1)

    @property
    def entries(self):
        return self._entries

    @property
    def dimension(self):
        return self._entries.shape[0]

    def norm(self):
        return float(numpy.linalg.norm(self._entries))

    def inner(self, other):
        """ <self|other>, antilinear in the first slot. """
        return complex(numpy.vdot(self._entries, numpy.asarray(getattr(other, 'entries', other))))

    def __len__(self):
        return self.dimension

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._entries
        return self._entries.astype(dtype)

    def __repr__(self):
        return f'{type(self).__name__}(dimension={self.dimension})'


class StateVector(RawVector):

    def __init__(self, entries, tol=NORM_TOL):
        super().__init__(entries)
        contract_check(abs(self.norm() - 1.0) <= tol, f'state vector norm {self.norm()!r} is not 1')

    @classmethod
    def basis(cls, dimension, index):
        if index not in range(dimension):
            raise DomainError('Basis index out of range')
        entries = numpy.zeros(dimension, dtype=numpy.complex128)
        entries[index] = 1.0
        return cls(entries)

    def projector(self):
        return numpy.outer(self._entries, self._entries.conj())


class HermitianOperator:

    def __init__(self, entries, tol=HERMITIAN_TOL):
        self._entries = _frozen(entries, 2)
        rows, columns = self._entries.shape
        if rows != columns:
            raise ValueError('Operator must be square')
        contract_check(hermiticity_error(self._entries) <= tol, 'operator is not Hermitian')

    @classmethod
    def diagonal(cls, values):
        return cls(numpy.diag(numpy.asarray(values, dtype=numpy.complex128)))

    @property
    def entries(self):
        return self._entries

    @property
    def dimension(self):
        return self._entries.shape[0]

    def expectation(self, vectors):
        """ <psi|A|psi> for one vector or each row of an (n, d) array. """
        vectors = numpy.asarray(getattr(vectors, 'entries', vectors))
        values = numpy.einsum('...i,ij,...j->...', vectors.conj(), self._entries, vectors)
        return numpy.real(values)

    def commutator_norm(self, other):
        other = numpy.asarray(getattr(other, 'entries', other))
        return float(numpy.linalg.norm(self._entries @ other - other @ self._entries))

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._entries
        return self._entries.astype(dtype)

    def __repr__(self):
        return f'{type(self).__name__}(dimension={self.dimension})'


class DensityMatrix(HermitianOperator):

    def __init__(self, entries, tol=HERMITIAN_TOL, trace_tol=TRACE_TOL, psd_tol=PSD_TOL):
        super().__init__(entries, tol=tol)
        trace = numpy.trace(self._entries)
        contract_check(abs(trace - 1.0) <= trace_tol, f'trace {trace.real!r} is not 1')
        smallest = float(numpy.linalg.eigvalsh(self._entries)[0])
        contract_check(smallest >= -psd_tol, f'negative eigenvalue {smallest!r}')

    @classmethod
    def from_spectrum(cls, weights, vectors):
        weights = numpy.asarray(weights, dtype=float)
        vectors = numpy.asarray(vectors, dtype=numpy.complex128)
        entries = (vectors * weights) @ vectors.conj().T
        return cls(_hermitize(entries))

    @classmethod
    def diagonal(cls, weights):
        return cls(numpy.diag(numpy.asarray(weights, dtype=numpy.complex128)))

    @classmethod
    def pure(cls, state):
        state = numpy.asarray(getattr(state, 'entries', state))
        return cls(numpy.outer(state, state.conj()))

    @classmethod
    def maximally_mixed(cls, dimension):
        return cls(numpy.eye(dimension, dtype=numpy.complex128) / dimension)

    @classmethod
    def from_unnormalized(cls, entries):
        """ Hermitize and rescale to unit trace; for matrices assembled from data. """
        entries = _hermitize(numpy.asarray(entries, dtype=numpy.complex128))
        trace = numpy.trace(entries).real
        if trace <= 0:
            raise DomainError('Matrix has nonpositive trace')
        return cls(entries / trace)

    def conjugated(self, unitary):
        u = numpy.asarray(getattr(unitary, 'entries', unitary))
        return DensityMatrix(_hermitize(u @ self._entries @ u.conj().T))

    def tensor(self, other):
        return DensityMatrix(numpy.kron(self._entries, numpy.asarray(other.entries)))


class UnitaryMatrix:

    def __init__(self, entries, tol=UNITARY_TOL):
        self._entries = _frozen(entries, 2)
        rows, columns = self._entries.shape
        if rows != columns:
            raise ValueError('Unitary must be square')
        error = numpy.max(numpy.abs(self._entries.conj().T @ self._entries - numpy.eye(rows)))
        contract_check(error <= tol, f'U*U deviates from identity by {error!r}')

    @classmethod
    def identity(cls, dimension):
        return cls(numpy.eye(dimension, dtype=numpy.complex128))

    @property
    def entries(self):
        return self._entries

    @property
    def dimension(self):
        return self._entries.shape[0]

    def adjoint(self):
        return UnitaryMatrix(self._entries.conj().T)

    def column(self, index):
        if index not in range(self.dimension):
            raise DomainError('Column index out of range')
        return StateVector(self._entries[:, index], tol=ORTHONORMAL_TOL)

    def apply(self, vectors):
        """ U psi for one vector or each row of an (n, d) array. """
        vectors = numpy.asarray(getattr(vectors, 'entries', vectors))
        return vectors @ self._entries.T

    def __matmul__(self, other):
        return UnitaryMatrix(self._entries @ numpy.asarray(other.entries))

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._entries
        return self._entries.astype(dtype)

    def __repr__(self):
        return f'UnitaryMatrix(dimension={self.dimension})'


class OrthonormalSystem:

    def __init__(self, vectors, tol=ORTHONORMAL_TOL):
        self._vectors = _frozen(vectors, 2)
        dimension, count = self._vectors.shape
        if count > dimension:
            raise DomainError('An orthonormal system cannot have more vectors than the dimension')
        gram = self._vectors.conj().T @ self._vectors
        error = numpy.max(numpy.abs(gram - numpy.eye(count)))
        contract_check(error <= tol, f'Gram matrix deviates from identity by {error!r}')

    @property
    def vectors(self):
        return self._vectors

    @property
    def dimension(self):
        return self._vectors.shape[0]

    @property
    def count(self):
        return self._vectors.shape[1]

    def projector(self):
        return self._vectors @ self._vectors.conj().T

    def coordinates(self, vectors):
        """ Coefficients <v_i|psi> for each row of an (n, d) array. """
        vectors = numpy.asarray(getattr(vectors, 'entries', vectors))
        return vectors @ self._vectors.conj()

    def embed(self, coordinates):
        return numpy.asarray(coordinates) @ self._vectors.T

    def __repr__(self):
        return f'OrthonormalSystem(dimension={self.dimension}, count={self.count})'


def _hermitize(matrix):
    return 0.5 * (matrix + matrix.conj().T)


def normalize_rows(vectors):
    vectors = numpy.asarray(vectors)
    norms = numpy.linalg.norm(vectors, axis=-1)
    if numpy.any(norms == 0):
        raise DomainError('Cannot project the zero vector to the unit sphere')
    return vectors / norms[..., None]


def project_to_sphere(phi):
    phi = phi if isinstance(phi, RawVector) else RawVector(phi)
    norm = phi.norm()
    if norm == 0:
        raise DomainError('Cannot project the zero vector to the unit sphere')
    return StateVector(phi.entries / norm)


def as_entries(value):
    return numpy.asarray(getattr(value, 'entries', value))


def require_state(value, tol=NORM_TOL):
    if isinstance(value, StateVector):
        return value
    return StateVector(as_entries(value), tol=tol)
