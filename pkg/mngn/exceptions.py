"""
Error types raised by the numerical services and the command line.

Every error carries a stable `code` tag and a human readable `detail`,
so callers can branch on the tag and print the detail.
"""


class SolverError(Exception):
    code = "solver-error"

    def __init__(self, detail: str, code: str | None = None):
        super().__init__(detail)
        self.detail = detail
        if code is not None:
            self.code = code

    def __str__(self) -> str:
        return f"{self.code}: {self.detail}"


class InvalidInputError(SolverError):
    code = "invalid-input"


class FactorizationError(SolverError):
    code = "factorization-error"


class DegeneratePairError(FactorizationError):
    code = "degenerate-pair"


class InconsistentRankError(FactorizationError):
    code = "inconsistent-rank"


class UsageError(SolverError):
    code = "usage"
