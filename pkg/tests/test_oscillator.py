"""Unit tests for coherent states and the Guerra-Loffredo measure."""
import math

import numpy
import pytest

from gapsphere.measures.ensembles import canonical_rho
from gapsphere.measures.oscillator import (GuerraLoffredoMeasure, OscillatorParams, coherent_amplitudes,
                                           coherent_state, sample_guerra_loffredo)
from gapsphere.stats.covariance import empirical_covariance, trace_distance
from gapsphere.util.error import CutoffError, DomainError

N = 20000


class TestCoherentStates:
    """Truncated Fock expansion of |q, p>"""

    def test_origin_is_ground_state(self):
        """|0, 0> is the Fock vacuum."""
        psi = coherent_state(0.0, 0.0, OscillatorParams(cutoff=16))
        assert numpy.allclose(psi.entries, numpy.eye(16)[0])

    def test_mean_number(self):
        """<alpha|N|alpha> = |alpha|^2."""
        params = OscillatorParams(cutoff=64)
        alpha = 1.0 + 0.5j
        psi = coherent_amplitudes(alpha, params.cutoff)[0]
        assert params.number_operator().expectation(psi) == pytest.approx(abs(alpha) ** 2, rel=1e-10)

    def test_alpha_from_phase_space(self):
        """alpha = (m omega q + i p) / sqrt(2 m omega hbar)."""
        params = OscillatorParams(mass=2.0, frequency=0.5, hbar=1.0)
        assert params.alpha(1.0, 1.0) == pytest.approx((1.0 + 1.0j) / math.sqrt(2.0))
        assert params.sigma_squared == pytest.approx(1.0)

    def test_cutoff_too_small(self):
        """|alpha|^2 above cutoff / 4 is refused."""
        with pytest.raises(CutoffError):
            coherent_amplitudes(3.0, 16)

    def test_bad_parameters(self):
        """Physical constants are positive and the cutoff holds at least two levels."""
        with pytest.raises(ValueError):
            OscillatorParams(mass=0.0)
        with pytest.raises(ValueError):
            OscillatorParams(cutoff=1)


class TestGuerraLoffredo:
    """Coherent states drawn from the classical canonical law at beta'"""

    def test_classical_beta(self):
        """beta' = (exp(beta hbar omega) - 1) / (hbar omega)."""
        measure = GuerraLoffredoMeasure(1.0, OscillatorParams(frequency=2.0))
        assert measure.classical_beta == pytest.approx((math.exp(2.0) - 1.0) / 2.0)

    def test_phase_space_variances(self, rng):
        """q has variance 1 / (beta' m omega^2) and p has variance m / beta'."""
        measure = GuerraLoffredoMeasure(1.0, OscillatorParams(mass=1.5, frequency=0.8))
        q, p = measure.phase_space(rng(0).generator, N)
        expected_q = 1.0 / (measure.classical_beta * 1.5 * 0.8 ** 2)
        assert numpy.var(q) == pytest.approx(expected_q, rel=0.05)
        assert numpy.var(p) == pytest.approx(1.5 / measure.classical_beta, rel=0.05)

    def test_mean_number(self, rng):
        """The mean occupation is the Bose-Einstein value 1 / (exp(beta hbar omega) - 1)."""
        params = OscillatorParams(cutoff=32)
        batch = GuerraLoffredoMeasure(1.0, params).sample(rng(1), N)
        numbers = params.number_operator().expectation(batch.vectors)
        expected = 1.0 / math.expm1(1.0)
        assert abs(numpy.mean(numbers) - expected) <= 5.0 * numpy.std(numbers) / math.sqrt(N)

    def test_covariance_is_canonical(self, rng):
        """The density matrix is rho_beta of the oscillator up to truncation and sampling error."""
        params = OscillatorParams(cutoff=32)
        measure = GuerraLoffredoMeasure(1.0, params)
        batch = measure.sample(rng(2), N)
        rho = canonical_rho(params.hamiltonian(), 1.0)
        covariance = empirical_covariance(batch)
        assert numpy.allclose(numpy.diag(covariance.entries).real, numpy.diag(rho.entries).real, atol=0.01)
        assert trace_distance(covariance, rho) <= max(measure.truncation_tail(), 0.05)
        assert batch.diagnostics['classical_beta'] == pytest.approx(measure.classical_beta)

    @pytest.mark.parametrize("beta", [1.0, 3.0, 6.0])
    def test_ground_state_population(self, beta, rng):
        """E|<0|psi>|^2 = beta' / (beta' + 1), which tends to one as beta grows."""
        measure = GuerraLoffredoMeasure(beta, OscillatorParams(cutoff=48))
        populations = numpy.abs(measure.sample(rng(4), N).vectors[:, 0]) ** 2
        expected = measure.classical_beta / (measure.classical_beta + 1.0)
        tolerance = 5 * numpy.std(populations) / math.sqrt(N) + 1e-12
        assert numpy.mean(populations) == pytest.approx(expected, abs=tolerance)

    def test_tends_to_ground_state(self, rng):
        """At low temperature nearly every draw is the ground state |0>."""
        measure = GuerraLoffredoMeasure(8.0, OscillatorParams(cutoff=16))
        populations = numpy.abs(measure.sample(rng(5), 2000).vectors[:, 0]) ** 2
        assert numpy.min(populations) > 0.95
        assert numpy.mean(populations) > 0.999

    def test_nonpositive_beta(self):
        """beta must be positive and finite."""
        for beta in (0.0, -1.0, math.inf):
            with pytest.raises(DomainError):
                GuerraLoffredoMeasure(beta)

    def test_single_draw(self, rng):
        """The single-draw form returns a unit vector of the Fock space."""
        psi = sample_guerra_loffredo(1.0, OscillatorParams(cutoff=24), rng(3))
        assert psi.dimension == 24
        assert psi.norm() == pytest.approx(1.0)
