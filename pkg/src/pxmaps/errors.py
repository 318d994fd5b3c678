"""Exception hierarchy shared by the library and the CLI.

Every class carries an ``exit_code`` and a short ``reason`` token so the
command-line front end can map failures to a stable, machine-parsable line.
"""


class PXMapsError(Exception):
    exit_code = 1
    reason = "error"


class ParameterDomainError(PXMapsError, ValueError):
    """Inputs outside the standing hypotheses (p odd prime, r >= 3, p does not divide r)."""

    exit_code = 2
    reason = "domain"


class BudgetExceededError(PXMapsError):
    exit_code = 3
    reason = "budget"


class VerificationError(PXMapsError):
    """A cross-check between independent routes disagreed.

    ``report`` holds a JSON-serializable description of the discrepancy.
    """

    exit_code = 1
    reason = "verification"

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report or {}


class InternalError(PXMapsError):
    """An arithmetic or modeling invariant failed; indicates a bug."""

    exit_code = 1
    reason = "internal"


class StructuralError(PXMapsError):
    exit_code = 1
    reason = "structure"


class CensusFormatError(PXMapsError):
    exit_code = 2
    reason = "format"
