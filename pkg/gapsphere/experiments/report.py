import json
import math

import numpy


class CheckResult:

    def __init__(self, name, passed, details=None, report=None):
        self.name = name
        self.passed = bool(passed)
        self.details = dict(details or {})
        self.report = report

    def to_json(self):
        values = {'name': self.name, 'passed': self.passed, 'details': _plain(self.details)}
        if self.report is not None:
            values['report'] = _plain(self.report.to_json())
        return values

    def __repr__(self):
        return f'CheckResult({self.name!r}, passed={self.passed})'


class RunReport:

    def __init__(self, experiment, config):
        self.experiment = experiment
        self.config = config
        self.checks = []
        self.tables = {}
        self.wall_time = None

    def add_check(self, check):
        if check is not None:
            self.checks.append(check)
        return check

    def check_count(self):
        return len(self.checks)

    def add_table(self, name, rows):
        self.tables[name] = rows

    def check(self, name):
        for check in self.checks:
            if check.name == name:
                return check
        raise KeyError(name)

    @property
    def passed(self):
        return all(check.passed for check in self.checks)

    def failed_checks(self):
        return [check.name for check in self.checks if not check.passed]

    def to_json(self, timing=False):
        values = {'experiment': self.experiment, 'config': _plain(self.config), 'passed': self.passed,
                  'checks': [check.to_json() for check in self.checks], 'tables': _plain(self.tables)}
        if timing:
            values['wall_time'] = self.wall_time
        return values

    def dumps(self, timing=False):
        return json.dumps(self.to_json(timing), sort_keys=True, indent=2)

    def __repr__(self):
        return f'RunReport({self.experiment!r}, checks={self.check_count()}, passed={self.passed})'


def _plain(value):
    """ JSON-safe copy: numpy scalars and arrays become Python values, non-finite floats become None. """
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, numpy.ndarray):
        return _plain(value.tolist())
    if isinstance(value, (bool, numpy.bool_)):
        return bool(value)
    if isinstance(value, (int, numpy.integer)):
        return int(value)
    if isinstance(value, (float, numpy.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value
