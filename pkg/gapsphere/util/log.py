import logging
import sys

_FORMAT = '%(asctime)s %(levelname)s %(name)s: %(message)s'
_LEVELS = [logging.WARNING, logging.INFO, logging.DEBUG]


def configure_logging(verbosity=0, stream=None):
    """ Route package logging to stderr; stdout is reserved for CSV/JSON output. """
    level = _LEVELS[min(max(verbosity, 0), len(_LEVELS) - 1)]
    handler = logging.StreamHandler(stream if stream is not None else sys.stderr)
    handler.setFormatter(logging.Formatter(_FORMAT))

    root = logging.getLogger('gapsphere')
    root.handlers[:] = [handler]
    root.setLevel(level)
    root.propagate = False
    return root
