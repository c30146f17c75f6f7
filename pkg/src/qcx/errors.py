"""Exception types shared across the package.

Most of these derive from ValueError so that callers who do not care about
the fine-grained taxonomy can still catch bad input generically.  Errors that
carry a certificate of *why* something failed (a norm, a gap, an index) store
it as an attribute.
"""

from __future__ import annotations


class QcxError(Exception):
    """Base class for all package-specific errors."""


class OutOfRangeError(QcxError, ValueError):
    """A structural parameter (m, sign, depth, digit count) is outside its domain."""


class RingMismatchError(QcxError, ValueError):
    """Two operands belong to different rings."""


class ParseError(QcxError, ValueError):
    """Malformed textual input.  ``position`` is the offset of the offending character."""

    def __init__(self, message: str, position: int | None = None):
        super().__init__(message)
        self.position = position


class NonPositiveError(QcxError, ValueError):
    """A strictly positive argument was required."""


class NotFiniteError(QcxError):
    """The greedy expansion did not terminate within the depth bound.

    ``norm`` records the field norm of the argument as a diagnostic: for the
    minus-sign family a negative norm proves no finite expansion exists.
    """

    def __init__(self, message: str, norm: int):
        super().__init__(message)
        self.norm = norm


class DigitRangeError(QcxError, ValueError):
    """A digit lies outside 0..floor(beta)."""


class TooFewPointsError(QcxError, ValueError):
    """An operation on consecutive points needs at least two of them."""


class ParameterNotAdmissibleError(QcxError, ValueError):
    """The convexity parameter's conjugate lies outside the unit interval."""


class MissingSeedsError(QcxError, ValueError):
    """Window reconstruction needs both 0 and 1 among the input points."""


class ChainBrokenError(QcxError):
    """A unit-interval chain cannot bridge a gap.  ``gap`` is the first blocking gap."""

    def __init__(self, message: str, gap=None):
        super().__init__(message)
        self.gap = gap


class BudgetExceededError(QcxError, RuntimeError):
    """A search or closure exceeded its node budget."""


class OutOfWindowError(QcxError, ValueError):
    """A witness target lies outside the seed interval."""


class NotInRingError(QcxError, ValueError):
    """A value that must be a ring integer has a nontrivial denominator."""


class NoRewriteError(QcxError):
    """No rewrite bringing an operation index below the cap is known.  ``index`` is the culprit."""

    def __init__(self, message: str, index: int):
        super().__init__(message)
        self.index = index


class MixedParameterError(QcxError, ValueError):
    """A single-parameter operation received a witness mixing several op indices."""


class DepthTooSmallError(QcxError, ValueError):
    """The requested flattening depth is smaller than the witness depth."""
