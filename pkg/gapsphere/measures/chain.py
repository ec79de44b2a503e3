""" Random-walk Metropolis on the unit sphere for the Brody-Hughston measure.

Proposals move along a Gaussian tangent vector of the real sphere S^{2d-1} and
reproject; the kernel depends only on the angle between the two points, so it
is symmetric and the acceptance ratio is the density ratio.
"""
import logging
import math

import numpy

from gapsphere.hilbert.haar import standard_normal_complex
from gapsphere.hilbert.state import HermitianOperator, as_entries, normalize_rows
from gapsphere.measures.measure import Measure, SampleBatch, matrix_to_json
from gapsphere.util.rng import as_stream

logger = logging.getLogger(__name__)

ACCEPTANCE_BOUNDS = (0.1, 0.9)


def tangent_step(states, noise, step_size):
    """ Move each row along the real-tangent part of its noise vector, then reproject. """
    radial = numpy.real(numpy.sum(states.conj() * noise, axis=1))
    tangent = noise - radial[:, None] * states
    return normalize_rows(states + step_size * tangent)


def integrated_autocorrelation(trace, cutoff=0.05):
    """ 1 + 2 sum of autocorrelations up to the first lag where it drops below the cutoff. """
    trace = numpy.asarray(trace, dtype=float)
    centered = trace - numpy.mean(trace)
    variance = numpy.dot(centered, centered)
    if variance == 0:
        return 1.0
    tau = 1.0
    for lag in range(1, trace.shape[0] // 2):
        rho = numpy.dot(centered[:-lag], centered[lag:]) / variance
        if rho < cutoff:
            break
        tau += 2.0 * rho
    return tau


class BrodyHughstonChain(Measure):
    """ Density proportional to exp(-beta <psi|H|psi>) relative to the uniform sphere measure. """

    tag = 'brody-hughston'

    _DEFAULT_STEP_SIZE = 0.5
    _DEFAULT_BURN_IN = 500
    _DEFAULT_THINNING = 5
    _DEFAULT_CHAINS = 16
    _DEFAULT_TARGET_ACCEPTANCE = 0.3
    _ADAPT_WINDOW = 25

    def __init__(self, hamiltonian, beta, step_size=_DEFAULT_STEP_SIZE, burn_in=_DEFAULT_BURN_IN,
                 thinning=_DEFAULT_THINNING, chains=_DEFAULT_CHAINS, target_acceptance=_DEFAULT_TARGET_ACCEPTANCE):
        if not isinstance(hamiltonian, HermitianOperator):
            hamiltonian = HermitianOperator(as_entries(hamiltonian))
        if step_size <= 0:
            raise ValueError('Step size must be positive')
        if burn_in < 0 or thinning < 1 or chains < 1:
            raise ValueError('Chain needs burn_in >= 0, thinning >= 1 and chains >= 1')
        if not 0 < target_acceptance < 1:
            raise ValueError('Target acceptance must lie in (0, 1)')
        super().__init__(hamiltonian.dimension)
        self.hamiltonian = hamiltonian
        self.beta = float(beta)
        self.step_size = float(step_size)
        self.burn_in = int(burn_in)
        self.thinning = int(thinning)
        self.chains = int(chains)
        self.target_acceptance = float(target_acceptance)
        self._last_diagnostics = {}

    def log_density(self, vectors):
        return -self.beta * self.hamiltonian.expectation(vectors)

    def sample(self, rng, n=1):
        if n < 1:
            raise ValueError('Sample count must be at least 1')
        stream = as_stream(rng)
        vectors = self._sample_self(stream.generator, n)
        return SampleBatch(vectors, self.tag, seed=stream.seed, key=stream.key,
                           diagnostics=self._last_diagnostics)

    def _sample_self(self, generator, n):
        states = normalize_rows(standard_normal_complex(generator, (self.chains, self.dimension)))
        log_p = self.log_density(states)
        step = self.step_size

        window_accepted = 0
        for sweep in range(self.burn_in):
            states, log_p, accepted = self._sweep(generator, states, log_p, step)
            window_accepted += accepted
            if (sweep + 1) % self._ADAPT_WINDOW == 0:
                rate = window_accepted / (self._ADAPT_WINDOW * self.chains)
                step *= math.exp(rate - self.target_acceptance)
                window_accepted = 0

        per_chain = -(-n // self.chains)
        collected = numpy.empty((per_chain, self.chains, self.dimension), dtype=numpy.complex128)
        energies = numpy.empty((per_chain, self.chains))
        accepted_total = 0
        for row in range(per_chain):
            for _ in range(self.thinning):
                states, log_p, accepted = self._sweep(generator, states, log_p, step)
                accepted_total += accepted
            collected[row] = states
            energies[row] = self.hamiltonian.expectation(states)

        acceptance = accepted_total / (per_chain * self.thinning * self.chains)
        tau = float(numpy.mean([integrated_autocorrelation(energies[:, c]) for c in range(self.chains)]))
        low, high = ACCEPTANCE_BOUNDS
        warning = not low <= acceptance <= high
        if warning:
            logger.warning('Brody-Hughston chain acceptance %.3f outside [%g, %g]', acceptance, low, high)
        self._last_diagnostics = {'acceptance_rate': acceptance, 'step_size': step,
                                  'effective_sample_size': per_chain * self.chains / tau,
                                  'acceptance_warning': warning}

        # interleave chains so any prefix of the batch mixes all of them
        return collected.reshape(per_chain * self.chains, self.dimension)[:n]

    def _sweep(self, generator, states, log_p, step):
        noise = standard_normal_complex(generator, states.shape)
        proposals = tangent_step(states, noise, step)
        proposal_log_p = self.log_density(proposals)
        accept = numpy.log(generator.random(states.shape[0])) < proposal_log_p - log_p
        states = numpy.where(accept[:, None], proposals, states)
        log_p = numpy.where(accept, proposal_log_p, log_p)
        return states, log_p, int(numpy.sum(accept))

    def _params(self):
        return {'H': matrix_to_json(self.hamiltonian), 'beta': self.beta, 'step_size': self.step_size,
                'burn_in': self.burn_in, 'thinning': self.thinning, 'chains': self.chains}


def sample_brody_hughston(hamiltonian, beta, rng, n=1000, **chain_config):
    return BrodyHughstonChain(hamiltonian, beta, **chain_config).sample(rng, n)
