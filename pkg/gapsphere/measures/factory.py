import numpy

from gapsphere.hilbert.state import OrthonormalSystem
from gapsphere.measures.chain import BrodyHughstonChain
from gapsphere.measures.ensembles import EigMeasure, ExtremalMeasure, ExtremalSpec
from gapsphere.measures.gap import (AdjustedGaussianMeasure, GapMeasure, GaussianMeasure, ProjectedGaussianMeasure,
                                    UniformSphereMeasure)
from gapsphere.measures.measure import MeasureSpec, matrix_from_json
from gapsphere.measures.oscillator import GuerraLoffredoMeasure, OscillatorParams
from gapsphere.util.error import ConfigError

_RHO_MEASURES = {
    'G': GaussianMeasure,
    'GA': AdjustedGaussianMeasure,
    'GAP': GapMeasure,
    'PG': ProjectedGaussianMeasure,
    'EIG': EigMeasure,
}

_CHAIN_KEYS = ('step_size', 'burn_in', 'thinning', 'chains', 'target_acceptance')


def _require(params, *keys):
    missing = [key for key in keys if key not in params]
    if missing:
        raise ConfigError(f'Measure parameters missing: {", ".join(missing)}')


def _integer(params, key, default=None):
    value = params.get(key, default)
    if isinstance(value, bool) or not isinstance(value, (int, float)) or value != int(value) or value < 1:
        raise ConfigError(f'Measure parameter {key} must be a positive integer, got {value!r}')
    return int(value)


def _uniform(params):
    if 'subspace' in params:
        return UniformSphereMeasure(OrthonormalSystem(matrix_from_json(params['subspace'])))
    _require(params, 'dimension')
    dimension = _integer(params, 'dimension')
    count = _integer(params, 'count', dimension)
    if count == dimension:
        return UniformSphereMeasure(dimension)
    return UniformSphereMeasure(OrthonormalSystem(numpy.eye(dimension, count, dtype=numpy.complex128)))


def _extremal(params):
    if 'H' in params:
        _require(params, 'beta')
        return ExtremalMeasure(ExtremalSpec.thermal(matrix_from_json(params['H']), params['beta']))
    if 'rho' in params:
        return ExtremalMeasure(ExtremalSpec.from_density(matrix_from_json(params['rho'])))
    _require(params, 'weights', 'bases')
    return ExtremalMeasure(ExtremalSpec(params['weights'], [matrix_from_json(b) for b in params['bases']]))


def _fixed_reduced(params):
    from gapsphere.subsystem import FixedReducedMeasure
    _require(params, 'rho1', 'd2')
    return FixedReducedMeasure(matrix_from_json(params['rho1']), _integer(params, 'd2'))


def _product_eigenstate(params):
    from gapsphere.subsystem import ProductEigenstateMeasure
    _require(params, 'rho1', 'd2')
    basis = matrix_from_json(params['bath_basis']) if 'bath_basis' in params else None
    return ProductEigenstateMeasure(matrix_from_json(params['rho1']), _integer(params, 'd2'), basis)


def _microcanonical(params):
    from gapsphere.subsystem import MicrocanonicalMeasure, microcanonical_spec
    _require(params, 'H', 'E', 'delta')
    return MicrocanonicalMeasure(microcanonical_spec(matrix_from_json(params['H']), params['E'], params['delta']))


def _guerra_loffredo(params):
    _require(params, 'beta')
    oscillator = OscillatorParams(**{k: params[k] for k in ('mass', 'frequency', 'hbar', 'cutoff') if k in params})
    return GuerraLoffredoMeasure(params['beta'], oscillator)


def _brody_hughston(params):
    _require(params, 'H', 'beta')
    config = {key: params[key] for key in _CHAIN_KEYS if key in params}
    return BrodyHughstonChain(matrix_from_json(params['H']), params['beta'], **config)


_BUILDERS = {
    'uniform': _uniform,
    'extremal': _extremal,
    'fixed-reduced': _fixed_reduced,
    'product-eigenstate': _product_eigenstate,
    'microcanonical': _microcanonical,
    'guerra-loffredo': _guerra_loffredo,
    'brody-hughston': _brody_hughston,
}


def measure_tags():
    return sorted(set(_RHO_MEASURES) | set(_BUILDERS))


def build_measure(spec):
    """ Rebuild a measure from its tag and JSON parameters.

    Parameters the measure constructors refuse surface as ConfigError.
    """
    if isinstance(spec, dict):
        params = dict(spec)
        spec = MeasureSpec(params.pop('tag', None), params)
    if spec.tag not in _RHO_MEASURES and spec.tag not in _BUILDERS:
        raise ConfigError(f'Unknown measure tag {spec.tag!r}; expected one of {", ".join(measure_tags())}')
    try:
        if spec.tag in _RHO_MEASURES:
            _require(spec.params, 'rho')
            return _RHO_MEASURES[spec.tag](matrix_from_json(spec.params['rho']))
        return _BUILDERS[spec.tag](spec.params)
    except (ValueError, TypeError, KeyError, IndexError) as error:
        raise ConfigError(f'Invalid {spec.tag} measure parameters: {error}') from error
