from dataclasses import dataclass, field

import numpy

from gapsphere.hilbert.state import RawVector, StateVector, as_entries
from gapsphere.util.error import DomainError
from gapsphere.util.rng import as_stream

LEBESGUE_SUPPORT = 'lebesgue-support'
SURFACE_SUPPORT = 'surface-support'


@dataclass(frozen=True)
class DensityValue:
    value: float
    log_value: float
    reference: str
    in_support: bool = True


@dataclass(frozen=True)
class MeasureSpec:
    tag: str
    params: dict = field(default_factory=dict)

    def build(self):
        from gapsphere.measures.factory import build_measure
        return build_measure(self)

    def to_json(self):
        return {'tag': self.tag, **self.params}


class WeightedSample:

    def __init__(self, vector, weight=1.0):
        if not isinstance(vector, RawVector):
            vector = RawVector(vector)
        weight = float(weight)
        if not numpy.isfinite(weight) or weight < 0:
            raise ValueError('Sample weight must be finite and nonnegative')
        self.vector = vector
        self.weight = weight

    def __repr__(self):
        return f'WeightedSample(dimension={self.vector.dimension}, weight={self.weight})'


class SampleBatch:
    """ Draws from one measure, stored as an (n, d) complex array, with provenance. """

    def __init__(self, vectors, tag, seed=None, key=None, weights=None, on_sphere=True, diagnostics=None):
        self._vectors = numpy.array(vectors, dtype=numpy.complex128)
        if self._vectors.ndim != 2 or self._vectors.shape[0] == 0:
            raise ValueError('Sample batch needs a nonempty (n, d) array')
        self._vectors.flags.writeable = False

        if weights is not None:
            weights = numpy.array(weights, dtype=float)
            if weights.shape != (self._vectors.shape[0],) or numpy.any(weights < 0) \
                    or not numpy.all(numpy.isfinite(weights)):
                raise ValueError('Weights must be finite, nonnegative and one per sample')
            weights.flags.writeable = False

        self._weights = weights
        self.tag = tag
        self.seed = seed
        self.key = tuple(key) if key is not None else None
        self.on_sphere = on_sphere
        self.diagnostics = dict(diagnostics or {})

    @property
    def vectors(self):
        return self._vectors

    @property
    def weights(self):
        return self._weights

    @property
    def dimension(self):
        return self._vectors.shape[1]

    def __len__(self):
        return self._vectors.shape[0]

    def __getitem__(self, item):
        if item not in range(-len(self), len(self)):
            raise IndexError('Sample index out of range')
        if self.on_sphere:
            return StateVector(self._vectors[item], tol=1e-10)
        return RawVector(self._vectors[item])

    def weighted_samples(self):
        weights = self._weights if self._weights is not None else numpy.ones(len(self))
        return [WeightedSample(RawVector(v), w) for v, w in zip(self._vectors, weights)]

    def transformed(self, vectors, tag=None):
        return SampleBatch(vectors, tag or self.tag, seed=self.seed, key=self.key, weights=self._weights,
                           on_sphere=self.on_sphere, diagnostics=self.diagnostics)

    def provenance(self):
        return {'tag': self.tag, 'seed': self.seed, 'key': list(self.key) if self.key else None,
                'size': len(self), 'dimension': self.dimension}

    def to_rows(self):
        """ (n, 2d) real array, columns re0, im0, re1, im1, ... """
        rows = numpy.empty((len(self), 2 * self.dimension))
        rows[:, 0::2] = self._vectors.real
        rows[:, 1::2] = self._vectors.imag
        return rows

    def __repr__(self):
        return f'SampleBatch(tag={self.tag!r}, size={len(self)}, dimension={self.dimension})'


class Measure:

    tag = None
    on_sphere = True

    def __init__(self, dimension):
        if dimension < 1:
            raise ValueError('Measure dimension must be at least 1')
        self.dimension = dimension

    def sample(self, rng, n=1):
        if n < 1:
            raise ValueError('Sample count must be at least 1')
        stream = as_stream(rng)
        vectors = self._sample_self(stream.generator, n)
        return SampleBatch(vectors, self.tag, seed=stream.seed, key=stream.key, on_sphere=self.on_sphere,
                           diagnostics=self._diagnostics())

    def draw(self, rng):
        return self.sample(rng, 1)[0]

    def density_matrix(self):
        raise NotImplementedError(f"Measure '{self.tag}' has no closed-form density matrix")

    def describe(self):
        return MeasureSpec(self.tag, self._params())

    def _sample_self(self, generator, n):
        raise NotImplementedError("Abstract Measure class does not implement '_sample_self'")

    def _params(self):
        return {'dimension': self.dimension}

    def _diagnostics(self):
        return {}

    def __repr__(self):
        return f'{type(self).__name__}(dimension={self.dimension})'


def matrix_to_json(matrix):
    matrix = as_entries(matrix)
    return {'real': matrix.real.tolist(), 'imag': matrix.imag.tolist()}


def matrix_from_json(value):
    if isinstance(value, dict) and 'diagonal' in value:
        return numpy.diag(numpy.asarray(value['diagonal'], dtype=numpy.complex128))
    if isinstance(value, dict) and 'real' in value:
        real = numpy.asarray(value['real'], dtype=float)
        imag = numpy.asarray(value.get('imag', numpy.zeros_like(real)), dtype=float)
        return real + 1j * imag
    if isinstance(value, list):
        return numpy.asarray(value, dtype=numpy.complex128)
    raise DomainError(f'Cannot read a matrix from {type(value).__name__}')
