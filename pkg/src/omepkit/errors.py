"""Exception types raised by the library. The CLI maps all of them to exit status 2."""

from __future__ import annotations


class OmepError(Exception):
    pass


class DimensionError(OmepError, ValueError):
    pass


class SingularMatrixError(OmepError, ValueError):
    pass


class FieldError(OmepError, ValueError):
    pass


class UnknownFactorError(OmepError, KeyError):
    def __str__(self) -> str:
        # KeyError repr-quotes its message
        return str(self.args[0]) if self.args else ""


class PlanError(OmepError, ValueError):
    pass


class DesignError(OmepError, ValueError):
    pass


class ConstructionError(OmepError, ValueError):
    pass


class PlanFormatError(OmepError, ValueError):
    pass


class NotPositiveSemidefiniteError(OmepError, ValueError):
    pass
