""" Harmonic oscillator in a truncated Fock basis: coherent states and the Guerra-Loffredo measure. """
import logging
import math

import numpy

from gapsphere.hilbert.state import HermitianOperator, StateVector
from gapsphere.measures.ensembles import canonical_rho
from gapsphere.measures.measure import Measure
from gapsphere.util.error import CutoffError, DomainError

logger = logging.getLogger(__name__)

TRUNCATION_TOL = 1e-8


class OscillatorParams:

    _DEFAULT_CUTOFF = 64

    def __init__(self, mass=1.0, frequency=1.0, hbar=1.0, cutoff=_DEFAULT_CUTOFF):
        if mass <= 0 or frequency <= 0 or hbar <= 0:
            raise ValueError('Mass, frequency and hbar must be positive')
        if int(cutoff) < 2:
            raise ValueError('Fock cutoff must be at least 2')
        self.mass = float(mass)
        self.frequency = float(frequency)
        self.hbar = float(hbar)
        self.cutoff = int(cutoff)

    @property
    def sigma_squared(self):
        return self.hbar / (2.0 * self.mass * self.frequency)

    def alpha(self, q, p):
        m, w = self.mass, self.frequency
        return (m * w * numpy.asarray(q) + 1j * numpy.asarray(p)) / math.sqrt(2.0 * m * w * self.hbar)

    def hamiltonian(self):
        levels = self.hbar * self.frequency * (numpy.arange(self.cutoff) + 0.5)
        return HermitianOperator.diagonal(levels)

    def number_operator(self):
        return HermitianOperator.diagonal(numpy.arange(self.cutoff, dtype=float))

    def to_json(self):
        return {'mass': self.mass, 'frequency': self.frequency, 'hbar': self.hbar, 'cutoff': self.cutoff}

    def __repr__(self):
        return f'OscillatorParams(m={self.mass}, omega={self.frequency}, hbar={self.hbar}, cutoff={self.cutoff})'


def coherent_amplitudes(alpha, cutoff):
    """ Fock coefficients exp(-|a|^2/2) a^n / sqrt(n!) for each alpha, renormalized; shape (n, cutoff). """
    alpha = numpy.atleast_1d(numpy.asarray(alpha, dtype=numpy.complex128))
    intensity = numpy.abs(alpha) ** 2
    if numpy.any(intensity > cutoff / 4.0):
        raise CutoffError(f'|alpha|^2 = {numpy.max(intensity):.3g} exceeds cutoff/4 = {cutoff / 4.0}')

    amplitudes = numpy.empty((alpha.shape[0], cutoff), dtype=numpy.complex128)
    amplitudes[:, 0] = numpy.exp(-intensity / 2.0)
    for n in range(1, cutoff):
        amplitudes[:, n] = amplitudes[:, n - 1] * alpha / math.sqrt(n)

    norms = numpy.linalg.norm(amplitudes, axis=1)
    if numpy.any(norms ** 2 < 1.0 - TRUNCATION_TOL):
        raise CutoffError(f'Truncated coherent state keeps only {numpy.min(norms) ** 2!r} of its norm')
    return amplitudes / norms[:, None]


def coherent_state(q, p, params):
    return StateVector(coherent_amplitudes(params.alpha(q, p), params.cutoff)[0])


class GuerraLoffredoMeasure(Measure):
    """ Coherent states |q, p> with (q, p) drawn from the classical canonical law at
    inverse temperature beta' = (exp(beta hbar omega) - 1) / (hbar omega). """

    tag = 'guerra-loffredo'

    def __init__(self, beta, params=None):
        if not beta > 0 or not math.isfinite(beta):
            raise DomainError('Guerra-Loffredo measure needs a finite beta > 0')
        self.beta = float(beta)
        self.params = params if params is not None else OscillatorParams()
        super().__init__(self.params.cutoff)

    @property
    def classical_beta(self):
        quantum = self.params.hbar * self.params.frequency
        return math.expm1(self.beta * quantum) / quantum

    def position_variance(self):
        return 1.0 / (self.classical_beta * self.params.mass * self.params.frequency ** 2)

    def momentum_variance(self):
        return self.params.mass / self.classical_beta

    def phase_space(self, generator, n):
        q = generator.normal(0.0, math.sqrt(self.position_variance()), n)
        p = generator.normal(0.0, math.sqrt(self.momentum_variance()), n)
        return q, p

    def _sample_self(self, generator, n):
        q, p = self.phase_space(generator, n)
        return coherent_amplitudes(self.params.alpha(q, p), self.params.cutoff)

    def density_matrix(self):
        return canonical_rho(self.params.hamiltonian(), self.beta)

    def truncation_tail(self):
        """ Mass of exp(-beta H) beyond the cutoff. """
        return math.exp(-self.beta * self.params.hbar * self.params.frequency * self.params.cutoff)

    def _params(self):
        return {'beta': self.beta, **self.params.to_json()}

    def _diagnostics(self):
        return {'classical_beta': self.classical_beta}


def sample_guerra_loffredo(beta, params, rng):
    return GuerraLoffredoMeasure(beta, params).draw(rng)
