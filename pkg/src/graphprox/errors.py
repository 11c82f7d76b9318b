"""Exception hierarchy shared by every module.

InputError and its subclasses map to exit code 2 in the CLI (HTTP 400),
ResourceBoundError to exit code 3 (HTTP 409).
"""


class GraphproxError(Exception):
    """Base class for all errors raised by this package."""


class InputError(GraphproxError):
    """Invalid arguments: unknown vertices, malformed specs, bad words."""


class ValidationError(InputError):
    """A constructed object violates its invariants (bad table, bad graph)."""


class ConsistencyError(InputError):
    """Contradictory fact flags on a group (e.g. finite but flagged non-PP
    while the conventions say finite groups count as PP)."""


class UnsupportedOperationError(InputError):
    """Operation needs element enumeration but a group is abstract/infinite."""


class ResourceBoundError(GraphproxError):
    """A configured bound (word length, transversal scale, ball radius)
    was exceeded before the answer was certain."""


class OutOfBallError(ResourceBoundError):
    """A group action landed outside the computed tree ball."""


class InternalError(GraphproxError):
    """Precondition broken by calling code (e.g. classify on unclosed facts)."""
