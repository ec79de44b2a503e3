"""Unit tests for the canonical density matrix and the EIG and extremal measures."""
import math

import numpy
import pytest
from scipy import stats

from gapsphere.hilbert.decomp import spectral
from gapsphere.hilbert.haar import haar_unitary, random_hamiltonian
from gapsphere.hilbert.state import DensityMatrix, HermitianOperator
from gapsphere.measures.ensembles import (CanonicalSpec, EigMeasure, EntropyFamilySpec, ExtremalMeasure, ExtremalSpec,
                                          brody_hughston_log_density, canonical_rho, entropy_family_log_density,
                                          sample_eig, sample_extremal)
from gapsphere.measures.gap import GapSpec
from gapsphere.stats.covariance import covariance_tolerance, empirical_covariance, trace_distance
from gapsphere.stats.functions import default_dictionary
from gapsphere.stats.goodness import phase_uniformity, stationarity_check
from gapsphere.subsystem import composite_hamiltonian, pooled_conditional_draws
from gapsphere.util.error import ContractViolation, DomainError

N = 20000


class TestCanonical:
    """rho_beta = exp(-beta H) / Z"""

    def test_infinite_temperature(self):
        """beta = 0 gives I/d."""
        rho = canonical_rho(HermitianOperator.diagonal([0.0, 1.0, 5.0]), 0.0)
        assert numpy.allclose(rho.entries, numpy.eye(3) / 3)

    def test_two_level_weights(self):
        """The ground state has weight 1 / (1 + exp(-beta eps))."""
        rho = canonical_rho(HermitianOperator.diagonal([0.0, 2.0]), 1.5)
        assert rho.entries[0, 0].real == pytest.approx(1.0 / (1.0 + math.exp(-3.0)))

    def test_large_beta_is_stable(self):
        """Shifting by the smallest level avoids overflow."""
        spec = CanonicalSpec(HermitianOperator.diagonal([1000.0, 1001.0]), 1000.0)
        assert numpy.all(numpy.isfinite(spec.weights))
        assert spec.log_z == pytest.approx(-1000.0 * 1000.0, rel=1e-12)

    def test_composite_factorizes(self, rng):
        """The canonical state of H1 (x) I + I (x) H2 is the product of canonical states."""
        h1 = random_hamiltonian(2, rng(0))
        h2 = random_hamiltonian(3, rng(1))
        composite = canonical_rho(composite_hamiltonian(h1, h2), 0.7)
        product = canonical_rho(h1, 0.7).tensor(canonical_rho(h2, 0.7))
        assert numpy.allclose(composite.entries, product.entries, atol=1e-10)

    def test_negative_beta(self):
        """Inverse temperatures are nonnegative."""
        with pytest.raises(DomainError):
            CanonicalSpec(HermitianOperator.diagonal([0.0, 1.0]), -1.0)


class TestEig:
    """Random eigenvectors with random phases"""

    def test_draws_are_eigenvectors_with_frequencies(self, rng):
        """Nondegenerate rho: draws are eigenvectors chosen with probability p_n."""
        rho = DensityMatrix.diagonal([0.5, 0.3, 0.2])
        batch = EigMeasure(rho).sample(rng(2), N)
        moduli = numpy.abs(batch.vectors) ** 2
        assert numpy.allclose(numpy.max(moduli, axis=1), 1.0)
        counts = numpy.bincount(numpy.argmax(moduli, axis=1), minlength=3)
        assert stats.chisquare(counts, N * numpy.array([0.5, 0.3, 0.2])).pvalue > 0.01

    def test_covariance(self, rng):
        """The density matrix of EIG(rho) is rho."""
        rho = DensityMatrix.diagonal([0.5, 0.3, 0.2])
        batch = EigMeasure(rho).sample(rng(3), N)
        assert trace_distance(empirical_covariance(batch), rho) <= covariance_tolerance(3, N)

    def test_single_eigenspace_is_uniform(self, rng):
        """EIG(I/k) is the uniform measure: |Z_0|^2 ~ Beta(1, k - 1)."""
        measure = EigMeasure(DensityMatrix.maximally_mixed(3))
        assert measure.eigenspace_count == 1
        values = numpy.abs(measure.sample(rng(4), 5000).vectors[:, 0]) ** 2
        assert stats.kstest(values, stats.beta(1, 2).cdf).pvalue > 0.001
        assert sample_eig(DensityMatrix.maximally_mixed(3), rng(5)).dimension == 3

    def test_weak_heredity_at_degeneracy(self, rng):
        """Conditioning in the eigenbasis of rho2 keeps EIG draws on eigenvectors of rho1."""
        rho1 = DensityMatrix.diagonal([0.7, 0.3])
        composite = EigMeasure(rho1.tensor(rho1)).sample(rng(6), 2000)
        pooled = pooled_conditional_draws(composite, numpy.eye(2), (2, 2), rng(7))
        assert numpy.allclose(numpy.max(numpy.abs(pooled.vectors) ** 2, axis=1), 1.0)

    def test_non_heredity_at_degeneracy(self, rng):
        """In a generic bath basis the degenerate eigenspace yields superpositions of eigenvectors."""
        rho1 = DensityMatrix.diagonal([0.7, 0.3])
        composite = EigMeasure(rho1.tensor(rho1)).sample(rng(8), 2000)
        pooled = pooled_conditional_draws(composite, haar_unitary(2, rng(9)).entries, (2, 2), rng(10))
        moduli = numpy.abs(pooled.vectors) ** 2
        assert numpy.any(numpy.all(moduli > 0.1, axis=1))


class TestExtremal:
    """Independent uniform vectors on each eigenspace, weighted by sqrt(p)"""

    def test_fixed_moduli(self, rng):
        """Nondegenerate H: every draw has |Z_n|^2 = p_n."""
        h = HermitianOperator.diagonal([0.0, 1.0, 2.5])
        spec = ExtremalSpec.thermal(h, 1.0)
        batch = ExtremalMeasure(spec).sample(rng(11), 500)
        weights = numpy.diag(canonical_rho(h, 1.0).entries).real
        assert numpy.allclose(numpy.abs(batch.vectors) ** 2, weights)

    def test_covariance_and_phases(self, rng):
        """The covariance is rho_beta and the phases are uniform and independent."""
        h = HermitianOperator.diagonal([0.0, 1.0, 2.5])
        rho = canonical_rho(h, 1.0)
        batch = ExtremalMeasure(ExtremalSpec.thermal(h, 1.0)).sample(rng(12), N)
        assert trace_distance(empirical_covariance(batch), rho) <= covariance_tolerance(3, N)
        assert phase_uniformity(batch, numpy.eye(3)).passed

    def test_stationary(self, rng):
        """Time evolution leaves the test-function statistics unchanged."""
        h = random_hamiltonian(3, rng(13))
        rho = canonical_rho(h, 0.5)
        batch = ExtremalMeasure(ExtremalSpec.thermal(h, 0.5)).sample(rng(14), N)
        functions = default_dictionary(3, rng(15), eigenbasis=spectral(h).eigenvectors)
        assert stationarity_check(batch, h, [0.5, 3.0], functions, rho=rho, threshold=4.0).passed

    def test_from_density(self):
        """Eigenspaces of rho get weight p dim(H_p), reproducing rho."""
        rho = DensityMatrix.diagonal([0.4, 0.4, 0.2])
        spec = ExtremalSpec.from_density(rho)
        assert len(spec.bases) == 2
        assert numpy.allclose(spec.density_matrix().entries, rho.entries)

    def test_weights_must_sum_to_one(self):
        """Weights form a probability vector."""
        with pytest.raises(ContractViolation):
            ExtremalSpec([0.5, 0.4], [numpy.eye(2)[:, :1], numpy.eye(2)[:, 1:]])

    def test_single_draw(self, rng):
        """The single-draw form is a unit vector."""
        psi = sample_extremal(ExtremalSpec.thermal(HermitianOperator.diagonal([0.0, 1.0]), 1.0), rng(16))
        assert psi.norm() == pytest.approx(1.0)


class TestLogDensities:
    """Brody-Hughston and maximum-entropy log densities"""

    def test_brody_hughston_on_eigenvectors(self):
        """|n> has log density -beta E_n; beta = 0 gives the uniform measure."""
        h = HermitianOperator.diagonal([0.0, 1.0, 3.0])
        assert brody_hughston_log_density(numpy.eye(3), h, 2.0) == pytest.approx([0.0, -2.0, -6.0])
        assert brody_hughston_log_density(numpy.eye(3), h, 0.0) == pytest.approx([0.0, 0.0, 0.0])

    def test_brody_hughston_constant_on_rays(self):
        """psi and c psi have the same value."""
        h = HermitianOperator(numpy.array([[1.0, 0.5j], [-0.5j, 2.0]]))
        psi = numpy.array([0.6, 0.8j])
        assert brody_hughston_log_density(psi, h, 1.0) == pytest.approx(
            brody_hughston_log_density(2.0 * numpy.exp(0.7j) * psi, h, 1.0))

    def test_entropy_family_gauge(self):
        """L = c I shifts the log density by c; L = 0 is uniform."""
        psi = numpy.array([0.6, 0.8j])
        assert entropy_family_log_density(psi, EntropyFamilySpec(numpy.zeros((2, 2)))) == pytest.approx(0.0)
        shifted = EntropyFamilySpec(numpy.diag([1.0, -1.0]) + 3.0 * numpy.eye(2))
        base = EntropyFamilySpec(numpy.diag([1.0, -1.0]))
        assert entropy_family_log_density(psi, shifted) == pytest.approx(entropy_family_log_density(psi, base) + 3.0)

    def test_entropy_family_quadratic_form(self, rng):
        """L = -rho^{-1} gives minus the quadratic form that enters the GAP density."""
        rho = DensityMatrix.diagonal([0.6, 0.3, 0.1])
        vectors = EigMeasure(DensityMatrix.maximally_mixed(3)).sample(rng(17), 200).vectors
        family = EntropyFamilySpec(-numpy.linalg.inv(rho.entries))
        assert numpy.allclose(entropy_family_log_density(vectors, family), -GapSpec(rho).quadratic_form(vectors))

    def test_gap_not_in_entropy_family(self):
        """Along cos t |0> + sin t |1> an entropy-family log density is affine in sin^2 t; GAP's is not."""
        t = numpy.linspace(0.05, 1.5, 40)
        u = numpy.sin(t) ** 2
        vectors = numpy.stack([numpy.cos(t), numpy.sin(t)], axis=1).astype(complex)
        family = EntropyFamilySpec(numpy.diag([0.3, -1.2]))
        gap = GapSpec(DensityMatrix.diagonal([0.8, 0.2]))
        for values, affine in ((entropy_family_log_density(vectors, family), True),
                               (gap.log_density_gap(vectors), False)):
            residual = values - numpy.polyval(numpy.polyfit(u, values, 1), u)
            assert (numpy.max(numpy.abs(residual)) < 1e-10) == affine
