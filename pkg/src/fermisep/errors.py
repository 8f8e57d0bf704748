"""Exception hierarchy shared by all fermisep modules."""


class FermisepError(Exception):
    """Base class for every error raised by this package."""


class DomainError(FermisepError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class CapacityError(FermisepError):
    """Dense representation requested beyond the supported size."""


class EmptySpaceError(DomainError):
    """A requested antisymmetric space has dimension zero."""


class SupportError(DomainError):
    """A vector or operator is not supported where it is required to be."""


class ClosureError(DomainError):
    """A product of observables left the self-adjoint class."""


class SingularOverlapError(DomainError):
    """A weak value was requested with a vanishing denominator."""


class ContractError(FermisepError, TypeError):
    """Inputs lack the certification an operation relies on."""
