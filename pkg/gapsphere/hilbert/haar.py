""" Haar-distributed unitaries and orthonormal systems.

QR of a complex Ginibre matrix is Haar only after the phases of R's diagonal
are moved into Q; both samplers apply that correction.
"""
import numpy

from gapsphere.hilbert.state import DensityMatrix, HermitianOperator, OrthonormalSystem, UnitaryMatrix
from gapsphere.util.error import DomainError
from gapsphere.util.rng import as_stream


def standard_normal_complex(generator, size):
    """ Complex Gaussian with E|z|^2 = 1. """
    return (generator.standard_normal(size) + 1j * generator.standard_normal(size)) / numpy.sqrt(2.0)


def _phase_corrected_qr(matrix):
    q, r = numpy.linalg.qr(matrix)
    diagonal = numpy.diagonal(r, axis1=-2, axis2=-1)
    phases = numpy.where(diagonal == 0, 1.0, diagonal / numpy.abs(diagonal))
    return q * phases[..., None, :]


def haar_unitary_entries(generator, d, size=None):
    shape = (d, d) if size is None else (size, d, d)
    return _phase_corrected_qr(standard_normal_complex(generator, shape))


def haar_columns_entries(generator, m, k, size=None):
    shape = (m, k) if size is None else (size, m, k)
    return _phase_corrected_qr(standard_normal_complex(generator, shape))


def haar_unitary(d, rng):
    if d < 1:
        raise DomainError('Dimension must be at least 1')
    return UnitaryMatrix(haar_unitary_entries(as_stream(rng).generator, d))


def haar_orthonormal_system(m, k, rng):
    if k < 1 or m < 1:
        raise DomainError('Dimension and count must be at least 1')
    if k > m:
        raise DomainError(f'Cannot draw {k} orthonormal vectors in dimension {m}')
    return OrthonormalSystem(haar_columns_entries(as_stream(rng).generator, m, k))


def random_spectrum_density(d, rng):
    """ Density matrix with a flat-Dirichlet spectrum in a Haar-random eigenbasis. """
    generator = as_stream(rng).generator
    weights = generator.dirichlet(numpy.ones(d))
    unitary = haar_unitary_entries(generator, d)
    return DensityMatrix.from_spectrum(weights, unitary)


def random_hamiltonian(d, rng, spread=1.0):
    """ Hermitian operator with levels uniform in [0, spread * d] and a Haar-random eigenbasis. """
    generator = as_stream(rng).generator
    levels = numpy.sort(generator.uniform(0.0, spread * d, d))
    unitary = haar_unitary_entries(generator, d)
    return HermitianOperator(_hermitian_from_spectrum(levels, unitary))


def _hermitian_from_spectrum(levels, unitary):
    entries = (unitary * levels) @ unitary.conj().T
    return 0.5 * (entries + entries.conj().T)
