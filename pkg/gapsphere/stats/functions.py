""" Bounded test functions on the unit sphere and the default dictionary used by the suites. """
import numpy

from gapsphere.hilbert.haar import haar_columns_entries
from gapsphere.hilbert.state import as_entries
from gapsphere.util.rng import as_stream

MARGINAL = 'marginal'
POLYNOMIAL = 'polynomial'
REAL_PART = 'real_part'

_RANDOM_DIRECTIONS = 8
_POWERS = (1, 2, 3)
_REAL_PARTS = 4


class TestFunction:
    """ |<phi|psi>|^2, |<phi|psi>|^(2r) or Re <phi|psi><psi|phi'>. """

    __test__ = False

    def __init__(self, kind, phi, phi_prime=None, power=1, label=None):
        if kind not in (MARGINAL, POLYNOMIAL, REAL_PART):
            raise ValueError(f'Unknown test function kind {kind!r}')
        if kind == REAL_PART and phi_prime is None:
            raise ValueError('Real-part test function needs a second vector')
        if int(power) < 1:
            raise ValueError('Polynomial power must be at least 1')
        self.kind = kind
        self.phi = numpy.array(as_entries(phi), dtype=numpy.complex128)
        self.phi_prime = None if phi_prime is None else numpy.array(as_entries(phi_prime), dtype=numpy.complex128)
        self.power = int(power) if kind == POLYNOMIAL else 1
        self.label = label or kind

    @property
    def dimension(self):
        return self.phi.shape[0]

    def __call__(self, vectors):
        vectors = numpy.asarray(as_entries(vectors))
        overlap = vectors @ self.phi.conj()
        if self.kind == REAL_PART:
            return numpy.real(overlap * (self.phi_prime.conj() @ vectors.T).conj())
        return numpy.abs(overlap) ** (2 * self.power)

    def linear_expectation(self, rho):
        """ Exact mean under any measure with density matrix rho, or None for r > 1. """
        rho = numpy.asarray(as_entries(rho))
        if self.kind == MARGINAL or (self.kind == POLYNOMIAL and self.power == 1):
            return float(numpy.real(self.phi.conj() @ rho @ self.phi))
        if self.kind == REAL_PART:
            return float(numpy.real(self.phi.conj() @ rho @ self.phi_prime))
        return None

    def __repr__(self):
        return f'TestFunction({self.label!r})'


def default_dictionary(dimension, rng, eigenbasis=None):
    """ Marginals on every eigenbasis vector and on 8 Haar directions, powers 1 to 3,
    and 4 off-diagonal real parts. """
    if eigenbasis is None:
        basis = numpy.eye(dimension, dtype=numpy.complex128)
    else:
        basis = numpy.asarray(as_entries(eigenbasis))
    directions = haar_columns_entries(as_stream(rng).generator, dimension, 1, size=_RANDOM_DIRECTIONS)[:, :, 0]

    functions = [TestFunction(MARGINAL, basis[:, i], label=f'marginal e{i}') for i in range(basis.shape[1])]
    functions += [TestFunction(MARGINAL, phi, label=f'marginal h{i}') for i, phi in enumerate(directions)]
    functions += [TestFunction(POLYNOMIAL, basis[:, 0], power=r, label=f'power{r} e0') for r in _POWERS]
    functions += [TestFunction(POLYNOMIAL, directions[0], power=r, label=f'power{r} h0') for r in _POWERS[1:]]

    pairs = [(i, j) for i in range(basis.shape[1]) for j in range(i + 1, basis.shape[1])][:_REAL_PARTS]
    functions += [TestFunction(REAL_PART, basis[:, i], basis[:, j], label=f're e{i}e{j}') for i, j in pairs]
    for k in range(_REAL_PARTS - len(pairs)):
        functions.append(TestFunction(REAL_PART, directions[k], directions[k + 1], label=f're h{k}h{k + 1}'))
    return functions
