"""toytasks: desk-scale benchmark tasks with generators, graders, leaderboards."""

from .errors import MissingRows, SchemaMismatch, ToyTaskError, UnknownTask
from .generators import generate_task, task_names
from .grader import grade

__version__ = "0.1.0"

__all__ = [
    "MissingRows",
    "SchemaMismatch",
    "ToyTaskError",
    "UnknownTask",
    "generate_task",
    "grade",
    "task_names",
    "__version__",
]
