"""Exception hierarchy shared across the package.

Every error raised by library code derives from OumwozError so callers
(CLI, service) can map failures to exit codes / wire error frames in one
place.
"""


class OumwozError(Exception):
    """Base class for all package errors."""

    code = "error"


class MalformedInput(OumwozError):
    """Input document violates its declared format."""

    code = "malformed_input"

    def __init__(self, message, line=None, position=None):
        self.line = line
        self.position = position
        loc = ""
        if line is not None:
            loc = f" (line {line}" + (f", col {position}" if position is not None else "") + ")"
        super().__init__(f"{message}{loc}")


class DuplicateId(OumwozError):
    code = "duplicate_id"


class IoError(OumwozError):
    code = "io_error"


class SchemaVersionMismatch(OumwozError):
    code = "schema_version_mismatch"

    def __init__(self, expected, found):
        self.expected = expected
        self.found = found
        super().__init__(f"schema version mismatch: expected {expected}, found {found}")


class EmptyBase(OumwozError):
    code = "empty_base"


class ValidationError(OumwozError):
    code = "validation_error"


class WrongPhase(OumwozError):
    code = "wrong_phase"

    def __init__(self, expected, actual):
        self.expected = expected
        self.actual = actual
        super().__init__(f"operation requires phase {expected}, session is in {actual}")


class AlternationViolation(OumwozError):
    code = "alternation_violation"


class TooEarly(OumwozError):
    """Close attempted before the minimum duration elapsed."""

    code = "too_early"

    def __init__(self, remaining_seconds):
        self.remaining_seconds = remaining_seconds
        super().__init__(f"cannot close yet: {remaining_seconds:.0f}s remaining")


class NoCandidates(OumwozError):
    code = "no_candidates"


class ZeroVariance(OumwozError):
    code = "zero_variance"


class ConstantInput(OumwozError):
    """Rank correlation is undefined for a constant vector."""

    code = "constant_input"


class UnknownSession(OumwozError):
    code = "unknown_session"


class BadToken(OumwozError):
    code = "bad_token"
