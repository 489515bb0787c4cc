"""Exception types shared across the package."""


class CodeTreeError(Exception):
    """Base class for all errors raised by this package."""


class DirectionMismatch(CodeTreeError):
    """Two metric values with opposite optimization directions were compared."""


class UnknownNode(CodeTreeError):
    """A node id was referenced that is not present in the tree."""


class TreeInvariantError(CodeTreeError):
    """An insertion would violate a solution-tree invariant."""


class CorruptJournal(CodeTreeError):
    """A journal file failed to parse or violates tree invariants on load."""


class EmptyResponse(CodeTreeError):
    """The provider returned whitespace-only text."""


class PreconditionViolation(CodeTreeError):
    """An operation was called with arguments outside its contract."""


class ProviderUnavailable(CodeTreeError):
    """The completion provider could not serve a request (retries exhausted)."""


class AuthError(CodeTreeError):
    """The provider rejected our credentials."""


class ContractViolation(CodeTreeError):
    """A counterpart returned a payload that does not match its documented shape."""


class PlaybookMismatch(CodeTreeError):
    """A scripted reply's assertion (mode or prompt substring) failed."""


class PlaybookExhausted(ProviderUnavailable):
    """The playbook script ran out of replies."""


class SpawnError(CodeTreeError):
    """The interpreter command could not be started."""


class WorkspaceError(CodeTreeError):
    """Workspace directories could not be prepared."""


class FormatError(CodeTreeError):
    """An input file does not match its documented format."""


class RangeError(CodeTreeError):
    """A numeric argument is outside its documented range."""


class EmptyInput(CodeTreeError):
    """An aggregate operation received an empty collection."""
