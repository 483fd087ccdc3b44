"""Exception hierarchy shared by every module."""


class LinespecError(Exception):
    """Base class for all toolkit errors."""


class DegenerateInstance(LinespecError):
    pass


class OverlappingIntervals(LinespecError):
    pass


class DomainError(LinespecError, ValueError):
    pass


class RankDeficient(LinespecError):
    pass


class SingularMatrix(LinespecError):
    pass


class DuplicateNodes(LinespecError, ValueError):
    pass


class BudgetExceeded(LinespecError):
    pass


class PreconditionUnmet(LinespecError):
    pass


class TooFewSamples(LinespecError, ValueError):
    pass


class ConvergenceFailure(LinespecError):
    pass


class SupportsOutsideInterval(LinespecError, ValueError):
    pass


class DegenerateNodes(LinespecError):
    pass


class VerificationFailed(LinespecError):
    pass


class ConfigError(LinespecError, ValueError):
    pass


class DegenerateData(LinespecError, ValueError):
    pass
