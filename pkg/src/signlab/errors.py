"""Exception hierarchy; the CLI maps each class to an exit code."""


class SignlabError(Exception):
    exit_code = 1


class ConfigError(SignlabError, ValueError):
    """Invalid parameters or inputs supplied by the caller."""

    exit_code = 2


class DataError(SignlabError):
    """Coefficient data is missing, corrupt, or inconsistent."""

    exit_code = 3


class UnknownFormError(DataError, KeyError):
    exit_code = 3


class MissingCoefficientError(DataError, KeyError):
    exit_code = 3


class DeligneViolation(DataError):
    exit_code = 3


class BadReductionError(ConfigError):
    pass


class BoundError(SignlabError, IndexError):
    """A requested index lies beyond a table's bound."""

    exit_code = 5


class DegenerateAngleError(ConfigError):
    """An angle is 0, 1/2, or otherwise rational where irrationality is required."""


class PrecisionBudgetError(SignlabError):
    exit_code = 2


class BudgetExhausted(SignlabError):
    exit_code = 4
