"""Exception hierarchy. Every error carries a stable ``code`` used by the CLI."""


class HardyCertError(Exception):
    code = "HardyCertError"


class CapExceeded(HardyCertError):
    code = "CapExceeded"


class DimensionMismatch(HardyCertError, ValueError):
    code = "DimensionMismatch"


class OutOfRange(HardyCertError, ValueError):
    code = "OutOfRange"


class NotNormalized(HardyCertError, ValueError):
    code = "NotNormalized"


class DegenerateReduction(HardyCertError, ValueError):
    code = "DegenerateReduction"


class SingularW(HardyCertError, ValueError):
    code = "SingularW"


class NonConvergence(HardyCertError):
    code = "NonConvergence"


class RootNotBracketed(HardyCertError):
    code = "RootNotBracketed"


class ConsistencyError(HardyCertError):
    """Two independent routes to the same quantity disagree."""

    code = "ConsistencyError"


class UnsupportedScenario(HardyCertError, ValueError):
    code = "UnsupportedScenario"


class SolverError(HardyCertError):
    code = "SolverError"


class Infeasible(HardyCertError):
    code = "Infeasible"


class SearchBoundExceeded(HardyCertError):
    code = "SearchBoundExceeded"


class OrthogonalityFailure(HardyCertError):
    code = "OrthogonalityFailure"


class CliqueCompletionFailure(HardyCertError):
    code = "CliqueCompletionFailure"
