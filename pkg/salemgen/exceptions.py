"""salemgen.exceptions

This module contains the set of salemgen's exceptions.
"""


class SalemgenError(Exception):
    """
    Base class for all salemgen exceptions.
    """

    def __init__(self, message: str = "An error occurred", cause=None):
        super(SalemgenError, self).__init__(message)
        self.cause = cause

    def __str__(self):
        message = super(SalemgenError, self).__str__()
        if self.cause:
            return f"{message} caused by {self.cause}"
        return message


class DomainError(SalemgenError):
    """
    Raised when an argument lies outside the mathematical domain of an operation.
    """

    def __init__(self, message, cause=None):
        super(DomainError, self).__init__(message, cause)


class InconsistencyError(SalemgenError):
    """
    Raised when a value and the digit string claimed to represent it disagree.
    """

    def __init__(self, message, value=None, expected=None):
        super(InconsistencyError, self).__init__(message)
        self.value = value
        self.expected = expected


class DuplicateTargetError(SalemgenError):
    """
    Raised when a deletion plan names the same position twice.
    """

    def __init__(self, message, target=None):
        super(DuplicateTargetError, self).__init__(message)
        self.target = target


class UnsupportedPermutationError(SalemgenError):
    """
    Raised when an operation is not defined for the given index sequence.
    """

    def __init__(self, message):
        super(UnsupportedPermutationError, self).__init__(message)


class UnclassifiedError(SalemgenError):
    """
    Raised when a parameter mix falls outside the monotonicity case analysis.
    """

    def __init__(self, message):
        super(UnclassifiedError, self).__init__(message)


class DistributionError(SalemgenError):
    """
    Raised when R is not a probability vector but a distribution is required.
    """

    def __init__(self, message):
        super(DistributionError, self).__init__(message)


class ConfigError(SalemgenError):
    """
    Raised when a run configuration is missing or invalid.
    """

    def __init__(self, message, field=None, cause=None):
        super(ConfigError, self).__init__(message, cause)
        self.field = field


class PointParseError(SalemgenError):
    """
    Raised when a point argument or digit literal cannot be parsed.
    """

    def __init__(self, message, text=None):
        super(PointParseError, self).__init__(message)
        self.text = text
