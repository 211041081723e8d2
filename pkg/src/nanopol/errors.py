"""Exception hierarchy shared by all nanopol modules."""


class NanopolError(Exception):
    """Base class for every error raised by the package."""


class DomainError(NanopolError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class RangeError(NanopolError, ValueError):
    """A query falls outside the range covered by tabulated data."""


class GeometryError(NanopolError, ValueError):
    """Two members of a cluster overlap."""

    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class InputError(NanopolError, ValueError):
    """Inconsistent or malformed user input (incidence vectors, configs)."""


class NumericalError(NanopolError, ArithmeticError):
    """A linear solve failed or produced an unacceptable residual."""

    def __init__(self, message, condition=None, energy=None):
        super().__init__(message)
        self.condition = condition
        self.energy = energy
