"""codetree: tree search over candidate programs (draft, debug, improve)."""

from .core import (
    ExecutionResult,
    ExitStatus,
    MetricValue,
    Node,
    ProviderSpec,
    RunConfig,
    SolutionTree,
    Stage,
    compare,
)
from .policy import PolicyAction, select

__version__ = "0.1.0"

__all__ = [
    "ExecutionResult",
    "ExitStatus",
    "MetricValue",
    "Node",
    "PolicyAction",
    "ProviderSpec",
    "RunConfig",
    "SolutionTree",
    "Stage",
    "compare",
    "select",
    "__version__",
]
