import numpy
import pytest

from gapsphere.util.rng import RngStream

SEED = 20240917


@pytest.fixture(name="rng")
def fixture_rng():
    """Factory for fixed-seed streams, one per index"""

    def _rng(index=0, seed=SEED):
        """stream (seed, index)"""
        return RngStream(seed, index)

    return _rng


@pytest.fixture(name="qubit_rho")
def fixture_qubit_rho():
    """A nondegenerate qubit density matrix in a non-diagonal basis"""
    theta = 0.3
    u = numpy.array([[numpy.cos(theta), -numpy.sin(theta)], [numpy.sin(theta), numpy.cos(theta)]])
    return (u * numpy.array([0.75, 0.25])) @ u.T
