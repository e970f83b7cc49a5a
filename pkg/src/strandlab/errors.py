"""Exception types shared across the package."""


class StrandlabError(Exception):
    """Base class for all errors raised by strandlab."""


class InputError(StrandlabError, ValueError):
    """A caller supplied a value that violates an operation's precondition."""


class SchemaError(StrandlabError, ValueError):
    """A document could not be parsed against the model-file schema."""


class BudgetExceededError(StrandlabError, RuntimeError):
    """An enumeration exceeded the global state budget (STRANDLAB_MAX_STATES)."""
