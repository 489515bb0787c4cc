class ToyTaskError(Exception):
    """Base class for task-corpus errors."""


class UnknownTask(ToyTaskError):
    """No generator registered under that name."""


class SchemaMismatch(ToyTaskError):
    """Submission header or row IDs do not match the sample submission."""


class MissingRows(ToyTaskError):
    """Submission lacks predictions for some required row IDs."""
