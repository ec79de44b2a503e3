"""Unit tests for the two-level marginal law of |Z_1|^2 under GAP."""
import io
import math

import numpy
import pytest
from scipy import integrate

from gapsphere.measures.gap import GapMeasure
from gapsphere.stats.goodness import ks_test
from gapsphere.twolevel import (DEFAULT_DELTAS, DEFAULT_GRID, FIGURE1_HEADER, TwoLevelSpec, f_cdf, f_closed,
                                f_density, f_mean, figure1_data, gap_marginal_density, joint_ga_moduli_density,
                                write_figure1_csv)
from gapsphere.util.error import DomainError

DELTAS = [1.0 / 3.0, 0.5, 1.0, 2.0, 3.0]


class TestTwoLevelSpec:
    """Coefficients alpha1 and alpha2 for a ratio delta = p1 / p2"""

    def test_coefficients(self):
        """alpha1^3 = (1/delta)(1/delta + 1)/2 and alpha2^3 = delta(delta + 1)/2."""
        spec = TwoLevelSpec(2.0)
        assert spec.alpha1 ** 3 == pytest.approx(0.375)
        assert spec.alpha2 ** 3 == pytest.approx(3.0)
        assert spec.weights == pytest.approx((2.0 / 3.0, 1.0 / 3.0))

    def test_from_energies(self):
        """delta = exp(beta (E2 - E1))."""
        assert TwoLevelSpec.from_energies(0.0, 1.0, 2.0).delta == pytest.approx(math.exp(2.0))

    @pytest.mark.parametrize("delta", [0.0, -1.0, math.inf, math.nan])
    def test_invalid_delta(self, delta):
        """delta must be positive and finite."""
        with pytest.raises(DomainError):
            TwoLevelSpec(delta)


class TestMarginalDensity:
    """f(s) = (alpha1 s + alpha2 (1 - s))^(-3)"""

    @pytest.mark.parametrize("delta", DELTAS)
    def test_normalized(self, delta):
        """f integrates to one."""
        spec = TwoLevelSpec(delta)
        value, _ = integrate.quad(lambda s: float(f_density(s, spec)), 0.0, 1.0, epsabs=1e-12)
        assert value == pytest.approx(1.0, abs=1e-9)

    @pytest.mark.parametrize("delta", DELTAS)
    def test_cdf(self, delta):
        """The closed-form CDF integrates the density."""
        spec = TwoLevelSpec(delta)
        for s in (0.1, 0.5, 0.9):
            value, _ = integrate.quad(lambda x: float(f_density(x, spec)), 0.0, s, epsabs=1e-12)
            assert f_cdf(s, spec) == pytest.approx(value, abs=1e-9)
        assert f_cdf(0.0, spec) == pytest.approx(0.0)
        assert f_cdf(1.0, spec) == pytest.approx(1.0)

    @pytest.mark.parametrize("delta", DELTAS)
    def test_mean(self, delta):
        """The mean of s is p1 because the density matrix is diag(p1, p2)."""
        spec = TwoLevelSpec(delta)
        assert f_mean(spec) == pytest.approx(spec.weights[0], abs=1e-9)

    def test_uniform_at_equal_weights(self):
        """delta = 1 gives the uniform law."""
        assert numpy.allclose(f_density(numpy.linspace(0.01, 0.99, 9), TwoLevelSpec(1.0)), 1.0)

    @pytest.mark.parametrize("delta", DELTAS)
    def test_endpoints(self, delta):
        """f(0) = 2 / (delta (delta + 1)) and f(1) = 2 delta^2 / (1 + delta)."""
        spec = TwoLevelSpec(delta)
        assert f_closed(0.0, spec) == pytest.approx(2.0 / (delta * (delta + 1.0)))
        assert f_closed(1.0, spec) == pytest.approx(2.0 * delta ** 2 / (1.0 + delta))

    def test_open_interval(self):
        """f_density is defined on (0, 1); f_closed also on the endpoints."""
        spec = TwoLevelSpec(2.0)
        for s in (0.0, 1.0, 1.5):
            with pytest.raises(DomainError):
                f_density(s, spec)
        with pytest.raises(DomainError):
            f_closed(-0.1, spec)

    @pytest.mark.parametrize("delta", DELTAS)
    def test_matches_gap_density(self, delta):
        """Integrating the GAP density over the phases gives f."""
        spec = TwoLevelSpec(delta)
        s = numpy.linspace(0.05, 0.95, 7)
        assert numpy.allclose(gap_marginal_density(s, spec), f_density(s, spec), rtol=1e-10)

    @pytest.mark.parametrize("delta", [0.5, 3.0])
    def test_matches_gap_samples(self, rng, delta):
        """|Z_1|^2 under GAP(diag(p1, p2)) follows f."""
        spec = TwoLevelSpec(delta)
        batch = GapMeasure(spec.rho()).sample(rng(int(delta * 10)), 5000)
        values = numpy.abs(batch.vectors[:, 0]) ** 2
        assert ks_test(values, lambda s: f_cdf(s, spec)).pvalue > 0.001


class TestJointGa:
    """Joint law of the squared moduli under GA"""

    def test_normalized(self):
        """The joint density integrates to one."""
        value, _ = integrate.dblquad(lambda s2, s1: joint_ga_moduli_density(s1, s2, 0.7, 0.3), 0.0, numpy.inf,
                                     0.0, numpy.inf)
        assert value == pytest.approx(1.0, abs=1e-7)

    def test_invalid(self):
        """Weights are positive and moduli nonnegative."""
        with pytest.raises(DomainError):
            joint_ga_moduli_density(0.1, 0.1, 0.0, 1.0)
        with pytest.raises(DomainError):
            joint_ga_moduli_density(-0.1, 0.1, 0.5, 0.5)


class TestFigure1:
    """Marginal densities on a grid of [0, 1]"""

    def test_rows(self):
        """One row per delta and grid point, endpoints included."""
        rows = figure1_data()
        assert len(rows) == len(DEFAULT_DELTAS) * DEFAULT_GRID
        assert rows[0][1] == 0.0 and rows[DEFAULT_GRID - 1][1] == 1.0
        assert all(f > 0 for _, _, f in rows)

    def test_csv(self):
        """The CSV has the header delta,s,f and one line per row."""
        stream = io.StringIO()
        write_figure1_csv(figure1_data([2.0], 3), stream)
        lines = stream.getvalue().splitlines()
        assert lines[0] == ','.join(FIGURE1_HEADER)
        assert len(lines) == 4
        assert float(lines[-1].split(',')[2]) == pytest.approx(8.0 / 3.0)

    def test_grid_too_small(self):
        """At least two grid points are needed."""
        with pytest.raises(ValueError):
            figure1_data(grid=1)
