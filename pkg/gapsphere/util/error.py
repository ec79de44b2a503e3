import inspect


class GapSphereError(Exception):
    pass


class ContractViolation(GapSphereError, ValueError):
    pass


class DomainError(GapSphereError, ValueError):
    pass


class EmptyWindowError(DomainError):
    pass


class CutoffError(DomainError):
    pass


class ConfigError(GapSphereError):
    pass


def contract_check(condition, message, error=ContractViolation):
    if condition:
        return
    caller_frame_record = inspect.stack()[1]  # line from caller
    frame = caller_frame_record[0]
    info = inspect.getframeinfo(frame)
    raise error(f'{info.function} (line {info.lineno}): {message}')
