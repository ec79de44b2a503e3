"""Unit tests for Haar sampling and random streams."""
import numpy
import pytest
from scipy import stats

from gapsphere.hilbert.haar import haar_orthonormal_system, haar_unitary, haar_unitary_entries, random_hamiltonian
from gapsphere.stats.goodness import ks_test, ks_two_sample
from gapsphere.util.error import DomainError
from gapsphere.util.rng import RngStream, as_stream


class TestHaar:
    """Haar unitaries and orthonormal systems"""

    @pytest.mark.parametrize("d", [1, 2, 4, 8])
    def test_unitary(self, d, rng):
        """Draws are unitary."""
        u = haar_unitary(d, rng(d)).entries
        assert numpy.allclose(u.conj().T @ u, numpy.eye(d), atol=1e-10)

    def test_column_modulus_law(self, rng):
        """|U_00|^2 of a Haar unitary in dimension d is Beta(1, d-1)."""
        d = 4
        draws = haar_unitary_entries(rng(0).generator, d, size=5000)
        values = numpy.abs(draws[:, 0, 0]) ** 2
        assert ks_test(values, stats.beta(1, d - 1).cdf).pvalue > 0.001

    def test_diagonal_phase_uniform(self, rng):
        """The phase of U_00 is uniform, so its mean vanishes."""
        draws = haar_unitary_entries(rng(1).generator, 3, size=20000)
        assert abs(numpy.mean(draws[:, 0, 0])) < 0.02

    @pytest.mark.parametrize("statistic", [
        lambda u: numpy.abs(u[:, 0, 0]) ** 2,
        lambda u: numpy.trace(u, axis1=1, axis2=2).real,
    ], ids=["modulus", "trace"])
    def test_left_invariance(self, statistic, rng):
        """Multiplying by a fixed unitary W leaves the law of T(U) unchanged."""
        d = 3
        w = haar_unitary(d, rng(4)).entries
        rotated = w @ haar_unitary_entries(rng(5).generator, d, size=4000)
        fresh = haar_unitary_entries(rng(6).generator, d, size=4000)
        assert ks_two_sample(statistic(rotated), statistic(fresh)).pvalue > 0.001

    def test_orthonormal_system_bounds(self, rng):
        """At most m orthonormal vectors exist in dimension m."""
        system = haar_orthonormal_system(5, 3, rng(2))
        assert system.vectors.shape == (5, 3)
        with pytest.raises(DomainError):
            haar_orthonormal_system(2, 3, rng(2))

    def test_random_hamiltonian_levels(self, rng):
        """Levels lie in [0, spread * d]."""
        levels = numpy.linalg.eigvalsh(random_hamiltonian(4, rng(3), spread=0.5).entries)
        assert levels.min() >= -1e-10 and levels.max() <= 2.0 + 1e-10


class TestRngStream:
    """Seeded, addressable streams"""

    def test_same_key_same_draws(self):
        """Identical (seed, key) pairs reproduce draws."""
        a = RngStream(7, 1).child(3).generator.standard_normal(5)
        b = RngStream(7, 1).child(3).generator.standard_normal(5)
        assert numpy.array_equal(a, b)

    def test_children_independent(self):
        """Sibling streams differ."""
        first, second = RngStream(7).children(2)
        assert first.key == (0, 0) and second.key == (0, 1)
        assert not numpy.array_equal(first.generator.standard_normal(5), second.generator.standard_normal(5))

    @pytest.mark.parametrize("seed", [-1, 2 ** 64, True, 1.5])
    def test_invalid_seed(self, seed):
        """Seeds are integers in [0, 2**64)."""
        with pytest.raises(ValueError):
            RngStream(seed)

    def test_as_stream(self):
        """Integers become root streams; other values are rejected."""
        assert as_stream(5).key == (0,)
        with pytest.raises(TypeError):
            as_stream("5")
