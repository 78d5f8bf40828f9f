"""Resource bounds and error types shared across the package."""

from __future__ import annotations

from dataclasses import dataclass


class VfoutError(Exception):
    """Base class for all errors raised by this package."""


class BoundExceeded(VfoutError):
    """A configured resource bound was exceeded; the computation aborts loudly."""


class InvalidInput(VfoutError):
    """Malformed data: bad tables, non-homomorphic maps, endpoint mismatches."""


class WitnessSearchFailed(VfoutError):
    """A bounded witness search ran out of budget.

    This is always an error, never a silent change of verdict.
    """


@dataclass(frozen=True)
class Limits:
    """Knobs for the desk-scale guarantees.

    All enumeration-style computations check these and raise
    :class:`BoundExceeded` instead of guessing.
    """

    max_group_order: int = 5040
    max_subgroups: int = 1024
    max_word_length: int = 24
    max_enumeration: int = 20000
    certificate_steps: int = 10


DEFAULT_LIMITS = Limits()
