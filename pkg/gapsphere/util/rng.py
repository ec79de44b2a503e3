import logging

import numpy

logger = logging.getLogger(__name__)

_MAX_SEED = 2 ** 64


class RngStream:
    """ Deterministic random stream addressed by (master seed, stream key).

    The key is a tuple of nonnegative integers; ``RngStream(seed, i)`` has key
    ``(i,)`` and ``child(j)`` appends ``j``. Identical (seed, key) pairs give
    identical draws within one build of NumPy.
    """

    def __init__(self, seed, index=0, _parent_key=()):
        if isinstance(seed, bool) or not isinstance(seed, (int, numpy.integer)) \
                or not 0 <= int(seed) < _MAX_SEED:
            raise ValueError('Seed must be an integer in [0, 2**64)')
        if int(index) < 0:
            raise ValueError('Stream index must be nonnegative')

        self._seed = int(seed)
        self._key = tuple(_parent_key) + (int(index),)
        sequence = numpy.random.SeedSequence(self._seed, spawn_key=self._key)
        self._generator = numpy.random.Generator(numpy.random.PCG64(sequence))
        logger.debug('stream seed=%d key=%s', self._seed, self._key)

    @property
    def seed(self):
        return self._seed

    @property
    def index(self):
        return self._key[-1]

    @property
    def key(self):
        return self._key

    @property
    def generator(self):
        return self._generator

    def child(self, index):
        return RngStream(self._seed, index, _parent_key=self._key)

    def children(self, count):
        return [self.child(i) for i in range(count)]

    def __repr__(self):
        return f'RngStream(seed={self._seed}, key={self._key})'


def as_stream(rng):
    if isinstance(rng, RngStream):
        return rng
    if isinstance(rng, int):
        return RngStream(rng)
    raise TypeError('Expected an RngStream or an integer seed')
