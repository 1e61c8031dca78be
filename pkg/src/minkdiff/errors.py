"""Exception hierarchy. Each class maps to a CLI exit code."""


class MinkdiffError(Exception):
    exit_code = 3


class InvalidArgument(MinkdiffError, ValueError):
    exit_code = 4


class SpecError(InvalidArgument):
    """Malformed or schema-violating spec file."""


class NumericFailure(MinkdiffError, ArithmeticError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class NotAdmissible(NumericFailure):
    def __init__(self, message, location=None, residual=None):
        super().__init__(message, residual)
        self.location = location


class NotImmersed(NumericFailure):
    pass


class OrientationError(NumericFailure):
    pass


class HypothesisViolated(MinkdiffError):
    exit_code = 2


class EpsilonTooLarge(MinkdiffError):
    exit_code = 2

    def __init__(self, message, max_epsilon=None):
        super().__init__(message)
        self.max_epsilon = max_epsilon


class NoPath(NumericFailure):
    pass
