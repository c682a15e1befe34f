"""Exception types shared across the package."""


class KsdiffError(Exception):
    """Base class for all ksdiff errors."""


class DataValidationError(KsdiffError):
    """Invalid input data: malformed files, non-finite values, shape mismatches."""


class SolverLimitError(KsdiffError):
    """Problem size exceeds the configured limit of an exact solver."""
