"""Exception hierarchy. The CLI maps each class to an exit code."""


class DomainError(ValueError):
    """Input outside an operation's domain (exit code 2)."""


class AssumptionViolated(DomainError):
    """The model does not satisfy a required regularity assumption."""


class NumericalError(ArithmeticError):
    """A numerical routine failed to reach its stated accuracy (exit code 3)."""
