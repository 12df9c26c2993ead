"""Exception types shared across the package."""


class FrugalDPError(Exception):
    """Base class for all package-specific errors."""


class EntropySourceError(FrugalDPError):
    """The OS entropy backend failed; the tape cannot continue."""


class ParameterDomainError(FrugalDPError, ValueError):
    """Mechanism parameters violate a validity precondition."""


class MathDomainError(FrugalDPError, ValueError):
    """Input outside the mathematical domain of an enclosure function."""


class SampleBudgetError(FrugalDPError, RuntimeError):
    """A rejection loop exceeded its diagnostic attempt cap.

    At valid mechanism parameters the cap is unreachable except with
    probability far below 2**-40; hitting it indicates a misconfigured
    sampler rather than bad luck.
    """


class EnclosureContractError(FrugalDPError, RuntimeError):
    """A probability oracle violated monotone refinement or ordering."""


class DatasetFormatError(FrugalDPError, ValueError):
    """The input dataset could not be parsed as binary predicate rows."""

    def __init__(self, message: str, row: int | None = None, column: int | None = None):
        super().__init__(message)
        self.row = row
        self.column = column
