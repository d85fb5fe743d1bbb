"""Exception hierarchy shared across the package."""


class RotorTreeError(Exception):
    """Base class for all library errors."""


class DegenerateK(RotorTreeError):
    """Degree k < 3; the tree machinery needs at least three directions."""


class LetterOutOfRange(RotorTreeError):
    """A direction letter is not in {0, ..., k-1}."""


class RepeatedLetter(RotorTreeError):
    """Two adjacent letters of a vertex word coincide (word not reduced)."""


class AtOrigin(RotorTreeError):
    """Asked for the inward direction of the origin, which has none."""


class MixedBase(RotorTreeError):
    """Arithmetic between exact amounts with different bases k."""


class NotEvenlyDivisible(RotorTreeError):
    """A pile cannot be split evenly the requested number of times."""


class ParityViolation(RotorTreeError):
    """A residue is prescribed at a vertex-time pair of mismatched parity."""


class SchedulePastHorizon(RotorTreeError):
    """A schedule entry lies at or beyond the trajectory horizon."""


class OddHorizon(RotorTreeError):
    """The divergence construction is defined for even horizons only."""


class BudgetExceeded(RotorTreeError):
    """A computation would exceed the configured size budget."""
