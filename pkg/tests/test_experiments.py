"""Tests for the experiment runners and their helpers."""
import json
import math

import numpy
import pytest

from gapsphere.config import config_from_dict
from gapsphere.experiments import comparison, heatbath, properties, typicality
from gapsphere.experiments.report import CheckResult, RunReport
from gapsphere.hilbert.decomp import partial_amplitudes
from gapsphere.hilbert.state import DensityMatrix, HermitianOperator
from gapsphere.measures.ensembles import canonical_rho
from gapsphere.stats.functions import default_dictionary
from gapsphere.subsystem import FixedReducedMeasure
from gapsphere.util.error import ConfigError, EmptyWindowError


def _config(module, seed, **changes):
    values = json.loads(json.dumps(module.DEFAULTS))
    for key, value in changes.items():
        if isinstance(value, dict):
            values.setdefault(key, {}).update(value)
        else:
            values[key] = value
    return config_from_dict(values, seed=seed)


class TestRunReport:
    """Check records and their JSON form"""

    def test_verdict(self):
        """A report passes when every check passes."""
        report = RunReport('verify', {'seed': 1})
        assert report.passed
        report.add_check(CheckResult('a', True))
        report.add_check(CheckResult('b', False, {'value': numpy.float64(2.0)}))
        report.add_check(None)
        assert report.check_count() == 2
        assert not report.passed
        assert report.failed_checks() == ['b']
        with pytest.raises(KeyError):
            report.check('c')

    def test_json(self):
        """numpy values become plain JSON; non-finite numbers become null; timing is optional."""
        report = RunReport('compare', {'seed': 1})
        report.add_check(CheckResult('z', True, {'z': numpy.inf, 'counts': numpy.arange(3), 'ok': numpy.bool_(True)}))
        report.add_table('rows', [{'x': numpy.float32(0.5)}])
        report.wall_time = 1.5
        values = json.loads(report.dumps())
        assert values['checks'][0]['details'] == {'z': None, 'counts': [0, 1, 2], 'ok': True}
        assert values['tables']['rows'] == [{'x': 0.5}]
        assert 'wall_time' not in values
        assert json.loads(report.dumps(timing=True))['wall_time'] == 1.5


class TestHeatBathHelpers:
    """Bath spectra, energy windows and the temperature fit"""

    def test_spacings(self):
        """Spacings stay within 1 +- jitter / 2 and are distinct."""
        spacings = heatbath.bath_spacings(10, 0.2)
        assert numpy.all(numpy.abs(spacings - 1.0) <= 0.1)
        assert len(set(spacings.tolist())) == 10

    def test_bath_hamiltonian(self):
        """The bath has 2^n levels running from 0 to the sum of the spacings."""
        h = heatbath.bath_hamiltonian(4)
        levels = numpy.sort(numpy.diag(h.entries).real)
        assert h.dimension == 16
        assert levels[0] == 0.0
        assert levels[-1] == pytest.approx(numpy.sum(heatbath.bath_spacings(4)))

    def test_window_width(self):
        """The window [E, E + delta] holds exactly min_levels levels."""
        levels = numpy.arange(20, dtype=float)
        assert heatbath.window_width(levels, 3.5, 5) == pytest.approx(4.5)
        with pytest.raises(EmptyWindowError):
            heatbath.window_width(levels, 18.0, 5)

    @pytest.mark.parametrize("levels", [[0.0, 1.0], [0.0, 10.0], [-7.5, 0.0, 3.0]])
    def test_full_window_holds_whole_spectrum(self, levels):
        """Without an energy the window covers every composite level, whatever the system scale."""
        system = HermitianOperator.diagonal(levels)
        setup = heatbath.HeatBathSetup(system, 5, None, 1, 0.2)
        assert setup.spec.dimension == setup.d1 * setup.d2
        assert numpy.allclose(setup.measure().density_matrix().entries,
                              numpy.eye(setup.d1 * setup.d2) / (setup.d1 * setup.d2))

    @pytest.mark.parametrize("beta", [0.0, 0.8, 2.5])
    def test_fit_beta(self, beta):
        """The fit recovers the temperature of a canonical state."""
        h = HermitianOperator.diagonal([0.0, 1.0])
        beta_hat, distance = heatbath.fit_beta(canonical_rho(h, beta), h, 10.0)
        assert beta_hat == pytest.approx(beta, abs=1e-3)
        assert distance < 1e-4

    def test_pooled_ensemble(self, rng):
        """Pooled weights sum to one and average to the reduced density matrix."""
        rho1 = DensityMatrix.diagonal([0.6, 0.4])
        batch = FixedReducedMeasure(rho1, 4).sample(rng(0), 5)
        ensemble = heatbath.pooled_ensemble(batch.vectors, heatbath.haar_bases(rng(1), 4, 5), 2, 4)
        assert numpy.sum(ensemble.weights) == pytest.approx(1.0)
        assert numpy.allclose(heatbath.mean_reduced_density(ensemble).entries, rho1.entries)


class TestTypicalityHelpers:
    """Exact conditional ensembles and reference means"""

    def test_conditional_ensembles(self, rng):
        """Probabilities sum to one and conditional vectors are normalized."""
        batch = FixedReducedMeasure(DensityMatrix.diagonal([0.7, 0.3]), 6).sample(rng(2), 10)
        amplitudes = partial_amplitudes(batch.vectors, numpy.eye(6), 2, 6)
        probabilities, columns = typicality.conditional_ensembles(amplitudes)
        assert numpy.allclose(numpy.sum(probabilities, axis=1), 1.0)
        assert numpy.allclose(numpy.linalg.norm(columns, axis=2), 1.0)

    def test_reference_means(self, rng):
        """Linear functions use tr(rho A); higher powers use Monte Carlo."""
        rho1 = DensityMatrix.diagonal([0.7, 0.3])
        functions = default_dictionary(2, rng(3))
        means = typicality.reference_means(rho1, functions, rng(4), 1000)
        for function, mean in zip(functions, means):
            exact = function.linear_expectation(rho1)
            if exact is not None:
                assert mean == exact

    def test_unknown_basis_mode(self):
        """basis_mode is fixed or random."""
        with pytest.raises(ConfigError):
            typicality.run_typicality(_config(typicality, 1, params={'basis_mode': 'diagonal'}))


class TestComparisonHelpers:
    """Distances to eigenvector rays"""

    def test_ray_distances(self):
        """Eigenvectors are at distance zero; an equal superposition at sqrt(1/2)."""
        vectors = numpy.array([[1.0, 0.0], [0.0, 1.0j], [1.0, 1.0] / numpy.sqrt(2.0)])
        distances = comparison.ray_distances(vectors, numpy.eye(2))
        assert distances == pytest.approx([0.0, 0.0, math.sqrt(0.5)])

    def test_moduli_dispersion(self):
        """Fixed moduli with varying phases have no dispersion."""
        phases = numpy.exp(1j * numpy.linspace(0.0, 3.0, 10))
        vectors = numpy.stack([0.8 * phases, 0.6 * phases[::-1]], axis=1)
        assert comparison.moduli_dispersion(vectors, numpy.eye(2)) == pytest.approx(0.0, abs=1e-15)


@pytest.mark.slow
class TestRunners:
    """End-to-end runs with reduced sample sizes"""

    def test_property_suite(self):
        """The battery passes for GAP and EIG and its report is reproducible."""
        config = _config(properties, 42, samples=20000, dimensions={'d': [2, 3]},
                         params={'heredity_samples': 5000})
        first = properties.run_property_suite(config)
        second = properties.run_property_suite(config)
        assert first.passed, first.failed_checks()
        assert first.dumps() == second.dumps()
        assert first.check('EIG heredity 2x4').passed
        assert first.check('EIG d=3 phases').passed
        assert first.check('correlated state non-heredity').passed

    def test_unknown_property_measure(self):
        """Only GAP, EIG and PG can be checked."""
        with pytest.raises(ConfigError):
            properties.run_property_suite(_config(properties, 1, params={'measures': ['G']}))

    def test_typicality(self):
        """Deviations shrink as the bath grows; the delta-measure control stays far from GAP."""
        config = _config(typicality, 5, samples=100, params={'reference_samples': 20000})
        report = typicality.run_typicality(config)
        rows = report.tables['typicality']
        assert [row['d2'] for row in rows] == [8, 32, 128]
        assert report.check('median decreasing').passed
        assert report.check('product eigenstate control').passed

    def test_heat_bath(self):
        """Every bath size contributes the three arms."""
        config = _config(heatbath, 11, samples=10, dimensions={'bath_units': [5, 6]},
                         params={'min_levels': 12, 'bases': 5, 'reference_samples': 5000})
        report = heatbath.run_heat_bath(config)
        rows = report.tables['heatbath']
        assert len(rows) == 6
        assert {row['arm'] for row in rows} == {'typical', 'fixed-psi', 'energy-basis'}
        assert all(0.0 <= row['beta_hat'] <= 10.0 for row in rows)
        assert report.check_count() == 6

    def test_comparison(self):
        """GAP, EIG and extremal reproduce rho_beta; Brody-Hughston does not."""
        config = _config(comparison, 3, samples=20000,
                         params={'chain_samples': 4000, 'oscillator': {'beta': 1.0, 'cutoff': 32, 'samples': 2000}})
        report = comparison.run_measure_comparison(config)
        assert report.passed, report.failed_checks()
        assert [row['measure'] for row in report.tables['measures']] == ['GAP', 'EIG', 'extremal', 'brody-hughston']
        assert report.tables['measures'][1]['phases_pass']
