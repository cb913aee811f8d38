"""Exception hierarchy shared by all mcmckit modules.

Two bases matter for callers: `PreconditionError` (the inputs violate a
documented contract) and `ComputationError` (the inputs were fine but a
numeric procedure failed or hit its cap). The CLI maps them to exit codes
2 and 3 respectively.
"""


class McmcKitError(Exception):
    """Base class for every error raised by this package."""


class PreconditionError(McmcKitError):
    """An input violates a documented precondition or invariant."""


class ComputationError(McmcKitError):
    """A numeric procedure failed to converge or exceeded its cap."""


# -- chain validation -------------------------------------------------------

class NonSquareError(PreconditionError):
    """Transition matrix is not square."""


class NegativeEntryError(PreconditionError):
    def __init__(self, row: int, col: int, value: float):
        self.row, self.col, self.value = row, col, value
        super().__init__(f"negative entry {value!r} at ({row}, {col})")


class RowSumViolationError(PreconditionError):
    def __init__(self, row: int, row_sum: float):
        self.row, self.row_sum = row, row_sum
        super().__init__(f"row {row} sums to {row_sum!r}, expected 1")


class DuplicateLabelError(PreconditionError):
    """State labels are not unique."""


class DimensionMismatchError(PreconditionError):
    """Two objects that must share a state set or dimension do not."""


class NotIrreducibleError(PreconditionError):
    """The chain's support digraph is not strongly connected."""


class PeriodicError(PreconditionError):
    """The chain has a state with period greater than one."""


class NoReturnPathError(PreconditionError):
    def __init__(self, state):
        self.state = state
        super().__init__(f"state {state!r} has no return path; period undefined")


class PowerIterationDivergedError(ComputationError):
    def __init__(self, iterations: int):
        self.iterations = iterations
        super().__init__(f"power iteration did not converge in {iterations} steps")


class CapExceededError(ComputationError):
    def __init__(self, cap: int, message: str = ""):
        self.cap = cap
        super().__init__(message or f"scan cap of {cap} steps exceeded")


# -- sampling ----------------------------------------------------------------

class NaNDensityError(ComputationError):
    """A density evaluation returned NaN."""


class InitFailureError(ComputationError):
    """No positive-density initial point found within the retry budget."""


class ZeroWeightError(PreconditionError):
    """A finite target weight is zero or negative where positivity is required."""


class EmptyTraceError(PreconditionError):
    """Operation requires a trace with at least one proposal or sample."""


class NonPositiveScaleError(PreconditionError):
    """Proposal scale must be strictly positive."""


# -- estimation --------------------------------------------------------------

class OutOfDomainError(PreconditionError):
    """Parameter point lies outside the model's declared space."""


class EmptyGridError(PreconditionError):
    """Grid search requires a nonempty grid."""


class AllDegenerateError(PreconditionError):
    """Every grid point has log-density minus infinity."""


class UnknownLossError(PreconditionError):
    """Loss name is not one of the supported losses."""


class NonNormalizedPosteriorError(PreconditionError):
    """Posterior grid weights do not sum to one."""


# -- counting ----------------------------------------------------------------

class EmptySolutionSetError(PreconditionError):
    """The instance has no solutions; there is nothing to sample."""


class NodeCapExceededError(ComputationError):
    def __init__(self, cap: int):
        self.cap = cap
        super().__init__(f"derivation tree exceeds the node cap of {cap}")


class ParseError(PreconditionError):
    """An input file failed to parse; the message carries the line number."""
