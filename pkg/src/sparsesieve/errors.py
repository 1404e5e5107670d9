"""Exception taxonomy shared by the whole package.

Three failure classes, matching the CLI exit codes:
  ValidationError -> exit 2 (bad parameters, domain/precondition violations)
  CapacityError   -> exit 3 (work budget or size cap exceeded)
  PrecisionError  -> exit 4 (a result could not be certified numerically)
"""


class SparseSieveError(Exception):
    """Base class for all package errors."""


class ValidationError(SparseSieveError):
    """A precondition, domain restriction, or input schema was violated."""


class CapacityError(SparseSieveError):
    """A configured work or memory budget would be exceeded."""


class PrecisionError(SparseSieveError):
    """A floating-point result could not be certified exact/correctly rounded."""
