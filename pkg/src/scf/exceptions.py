"""Exception hierarchy.

Every failure mode that callers are expected to handle gets its own class;
the CLI maps these to exit code 1 with the class name as diagnostic.
"""


class ScfError(Exception):
    """Base class for all package-specific errors."""


class NonFinite(ScfError):
    """Input contains NaN or Inf entries."""


class NonConvergence(ScfError):
    """Eigensolver failed to converge within its iteration budget."""


class DimensionMismatch(ScfError):
    """Operands have incompatible dimensions."""


class NotCP(ScfError):
    """Choi matrix has an eigenvalue below the completely-positive cutoff."""


class NotQubit(ScfError):
    """Operation requires system dimension 2."""


class NotHermitian(ScfError):
    """Matrix is not Hermitian within tolerance."""


class NotUnitalForm(ScfError):
    """Pauli transfer matrix lacks the unital trace-preserving border."""


class NotChannel(ScfError):
    """Map fails the required channel certificates."""


class NotGKSL(ScfError):
    """Map fails the generator (GKSL) certificates."""


class OutOfRange(ScfError):
    """Scalar parameter outside its admissible interval."""


class InfeasiblePTM(ScfError):
    """Requested Pauli transfer matrix violates complete positivity."""


class ZeroGenerator(ScfError):
    """Procedure requires a nonzero generator."""


class BudgetTooTight(ScfError):
    """Perturbation budget too small for the mixing weight to be representable."""


class ScheduleExhausted(ScfError):
    """Every mixing weight in the schedule produced a degenerate spectrum."""


class ScanExhausted(ScfError):
    """Every time factor in the scan window produced a degenerate spectrum."""
