"""Root of the secregen exception hierarchy.

Modules define their specific errors next to the code that raises them and
derive from these bases, so the CLI can map whole families to exit codes.
"""


class SecregenError(Exception):
    """Base class for every error raised by secregen."""


class ValidationError(SecregenError, ValueError):
    """Inputs or parameters violate a documented precondition."""


class VerificationError(SecregenError):
    """Data failed an integrity or correctness check (corrupt shares, leakage)."""
