""" Closed forms for k = 2: the law of s = |Z_1|^2 under GAP(diag(p1, p2)).

With delta = p1 / p2 = exp(beta (E2 - E1)), s has density
f(s) = (alpha1 s + alpha2 (1 - s))^(-3) on (0, 1).
"""
import csv
import math

import numpy
from scipy import integrate

from gapsphere.hilbert.state import DensityMatrix
from gapsphere.measures.gap import density_gap
from gapsphere.util.error import DomainError

DEFAULT_DELTAS = (1.0 / 3.0, 0.5, 1.0, 2.0, 3.0)
DEFAULT_GRID = 101
FIGURE1_HEADER = ('delta', 's', 'f')


class TwoLevelSpec:

    def __init__(self, delta):
        delta = float(delta)
        if not delta > 0 or not math.isfinite(delta):
            raise DomainError('delta must be positive and finite')
        self.delta = delta
        self.alpha1 = ((1.0 / delta) * (1.0 / delta + 1.0) / 2.0) ** (1.0 / 3.0)
        self.alpha2 = (delta * (delta + 1.0) / 2.0) ** (1.0 / 3.0)

    @classmethod
    def from_energies(cls, e1, e2, beta):
        return cls(math.exp(beta * (e2 - e1)))

    @property
    def weights(self):
        """ (p1, p2) with p1 / p2 = delta. """
        p1 = self.delta / (1.0 + self.delta)
        return p1, 1.0 - p1

    def rho(self):
        return DensityMatrix.diagonal(self.weights)

    def __repr__(self):
        return f'TwoLevelSpec(delta={self.delta})'


def joint_ga_moduli_density(s1, s2, p1, p2):
    """ Joint density of (|Z_1|^2, |Z_2|^2) under GA(diag(p1, p2)). """
    if p1 <= 0 or p2 <= 0:
        raise DomainError('Weights must be positive')
    s1 = numpy.asarray(s1, dtype=float)
    s2 = numpy.asarray(s2, dtype=float)
    if numpy.any(s1 < 0) or numpy.any(s2 < 0):
        raise DomainError('Squared moduli must be nonnegative')
    return (s1 + s2) / (p1 * p2) * numpy.exp(-s1 / p1 - s2 / p2)


def _profile(s, spec):
    return spec.alpha1 * s + spec.alpha2 * (1.0 - s)


def _require_open_interval(s):
    s = numpy.asarray(s, dtype=float)
    if numpy.any(s <= 0) or numpy.any(s >= 1):
        raise DomainError('s must lie in the open interval (0, 1)')
    return s


def f_density(s, spec):
    s = _require_open_interval(s)
    return _profile(s, spec) ** -3


def f_closed(s, spec):
    """ f extended by continuity to [0, 1]. """
    s = numpy.asarray(s, dtype=float)
    if numpy.any(s < 0) or numpy.any(s > 1):
        raise DomainError('s must lie in [0, 1]')
    return _profile(s, spec) ** -3


def f_cdf(s, spec):
    """ s (L + alpha2) / (2 alpha2^2 L^2) with L = alpha1 s + alpha2 (1 - s). """
    s = numpy.clip(numpy.asarray(s, dtype=float), 0.0, 1.0)
    profile = _profile(s, spec)
    return s * (profile + spec.alpha2) / (2.0 * spec.alpha2 ** 2 * profile ** 2)


def f_mean(spec):
    value, _ = integrate.quad(lambda s: s * float(f_closed(s, spec)), 0.0, 1.0, epsabs=1e-13, epsrel=1e-12)
    return value


def gap_marginal_density(s, spec):
    """ Density of s obtained from the GAP density itself.

    In coordinates (s, theta1, theta2) the surface measure of the unit sphere in C^2 is
    ds dtheta1 dtheta2 / 2, and the GAP density does not depend on the phases.
    """
    s = _require_open_interval(s)
    rho = spec.rho()
    values = [density_gap(rho, numpy.array([math.sqrt(x), math.sqrt(1.0 - x)], dtype=numpy.complex128)).value
              for x in numpy.atleast_1d(s)]
    return 2.0 * math.pi ** 2 * numpy.array(values).reshape(s.shape)


def figure1_data(deltas=DEFAULT_DELTAS, grid=DEFAULT_GRID):
    """ Rows (delta, s, f(s)) on an even grid of [0, 1], endpoints by continuity. """
    if grid < 2:
        raise ValueError('Grid needs at least 2 points')
    points = numpy.linspace(0.0, 1.0, grid)
    rows = []
    for delta in deltas:
        values = f_closed(points, TwoLevelSpec(delta))
        rows.extend((float(delta), float(s), float(f)) for s, f in zip(points, values))
    return rows


def write_figure1_csv(rows, stream):
    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(FIGURE1_HEADER)
    for delta, s, f in rows:
        writer.writerow((repr(delta), repr(s), repr(f)))
