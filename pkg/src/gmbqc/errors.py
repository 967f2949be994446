class GMBQCError(Exception):
    """Base class for errors raised by this package."""


class InvariantError(GMBQCError, ValueError):
    """An input or intermediate object violates a structural invariant."""


class SizeGuardError(GMBQCError):
    """A computation was refused because it exceeds a desk-scale limit."""
