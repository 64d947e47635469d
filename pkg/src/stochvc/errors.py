"""Exception types shared across the package."""


class StochVcError(Exception):
    """Base class for all package-specific errors."""


class GraphParseError(StochVcError):
    """Malformed edge-list input; carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class ValidationError(StochVcError):
    """Structurally invalid data (self-loop, duplicate edge, bad index)."""


class ParameterError(StochVcError):
    """Numeric parameter outside its allowed range."""


class CapacityError(StochVcError):
    """Instance exceeds an exact-computation cap."""


class ContractError(StochVcError):
    """Caller violated an operation precondition."""


class QueryModelError(StochVcError):
    """Edge query outside the pre-declared non-adaptive query set."""


class QueryBudgetError(StochVcError):
    """Edge query past the query budget."""


class DomainError(StochVcError):
    """Formula evaluated outside its stated domain."""
