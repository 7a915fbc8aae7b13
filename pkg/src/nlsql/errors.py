"""Exception types shared across the pipeline."""


class NlsqlError(Exception):
    """Base class for all errors raised by this package."""

    kind = "error"


class OnboardingError(NlsqlError):
    """A database could not be onboarded (bad identifier, duplicate name, bad config)."""

    kind = "onboarding_error"


class AmbiguityError(OnboardingError):
    """A synonym would collide with a token of another column's final name."""

    kind = "ambiguity_error"


class FormatMismatch(OnboardingError):
    """A datetime value did not match its declared format descriptor."""

    kind = "format_mismatch"

    def __init__(self, message: str, row_index: int | None = None):
        super().__init__(message)
        self.row_index = row_index


class UnterminatedLiteral(NlsqlError):
    """A quoted SQL literal was opened but never closed."""

    kind = "unterminated_literal"


class UnsupportedSyntax(NlsqlError):
    """SQL uses a construct outside the supported SELECT grammar."""

    kind = "unsupported_syntax"


class UnknownIdentifier(NlsqlError):
    """A table or column in the SQL does not exist in the schema."""

    kind = "unknown_identifier"


class BackendUnavailable(NlsqlError):
    """The remote translation backend could not be reached in time."""

    kind = "backend_unavailable"


class NoTranslation(NlsqlError):
    """The fixture backend has no SQL for this query; the user should check the query."""

    kind = "no_translation"


class RejectedStatement(NlsqlError):
    """A statement outside the SELECT whitelist was blocked before reaching the store."""

    kind = "rejected_statement"


class ExecutionError(NlsqlError):
    """The store failed while running an otherwise acceptable statement."""

    kind = "execution_error"


class NoCandidates(NlsqlError):
    """No chart candidate is valid for this result table."""

    kind = "no_candidates"


class CycleDetected(NlsqlError):
    """The partial-order rule set produced a cyclic preference graph."""

    kind = "cycle_detected"


class DegenerateInput(NlsqlError):
    """A training pair claims a strict order between identical feature vectors."""

    kind = "degenerate_input"


class UnknownDatabase(NlsqlError):
    """No onboarded database with this id."""

    kind = "unknown_database"


class UnknownResult(NlsqlError):
    """No stored result with this id (never existed, or its TTL lapsed)."""

    kind = "unknown_result"
