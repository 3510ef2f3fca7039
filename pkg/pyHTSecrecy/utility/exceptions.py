"""
Exceptions specific to the pyHTSecrecy package.
"""


class HTSecrecyError(Exception):
    """
    Base class for every error raised by ``pyHTSecrecy``.
    """

    def __init__(self, message):
        self.message = message
        super().__init__(self.message)


class ProbabilityError(HTSecrecyError, ValueError):
    """
    Error raised when an array fails to be a valid probability mass function.
    """


class DimensionError(HTSecrecyError, ValueError):
    """
    Error raised when alphabets, matrices or sequences have incompatible shapes.
    """


class ModelModeError(HTSecrecyError):
    """
    Error raised when an operation needs the full eavesdropper law :math:`P_{Z|XY}`
    but the source model only carries its marginals.
    """

    def __init__(self, operation):
        self.operation = operation
        super().__init__(
            f"{operation} requires a FULL-mode source model (P_Z|XY). "
            "Use scheme.construct_full_joint to lift a MARGINAL model."
        )


class SizeGuardError(HTSecrecyError):
    """
    Error raised when an exact enumeration (or a codebook) would exceed its size guard.
    """

    def __init__(self, what, size, limit):
        self.size = size
        self.limit = limit
        super().__init__(f"{what}: {size:.4g} exceeds the limit of {limit:.4g}.")


class OperatingConditionError(HTSecrecyError):
    """
    Error raised when a scheme or typicality parameter is outside its operating range:
    a rate :math:`R \\le I_P(U;X)` or a non-positive typicality radius.
    """

    @classmethod
    def rate_below_bound(cls, rate, bound):
        er = cls(f"Scheme rate R={rate:.9g} must exceed I_P(U;X)={bound:.9g} bits/symbol.")
        er.rate = rate
        er.bound = bound
        return er


class NumericalError(HTSecrecyError):
    """
    Error raised when a NaN (or other non-finite value) escapes a numerical routine.
    """


class ConfigError(HTSecrecyError):
    """
    Error raised when a run configuration cannot be parsed or validated.

    Parameters
    ----------
    field: str
        Dotted path of the offending field (``"model.pyx[1]"``).
    message: str
        What went wrong.
    line: int, optional
        1-based source line of the field, when known.
    """

    def __init__(self, field, message, line=None):
        self.field = field
        self.line = line
        where = f"{field}" if line is None else f"{field} (line {line})"
        super().__init__(f"Invalid configuration at {where}: {message}")
