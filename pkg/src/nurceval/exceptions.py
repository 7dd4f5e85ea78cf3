"""Exception and warning types raised by nurceval."""


class NurcEvalError(Exception):
    """Base class for all errors raised by this package."""


class InputFormatError(NurcEvalError):
    """Input files do not follow the expected format (CLI exit code 2)."""


class MalformedManifest(InputFormatError):
    pass


class EmptyFile(InputFormatError):
    pass


class MalformedHypothesisFile(InputFormatError):
    pass


class UnknownUnitId(InputFormatError):
    def __init__(self, inquiry_id, unit_ids):
        self.inquiry_id = inquiry_id
        self.unit_ids = sorted(unit_ids)
        shown = ", ".join(self.unit_ids[:5])
        more = "" if len(self.unit_ids) <= 5 else f" (+{len(self.unit_ids) - 5} more)"
        super().__init__(f"{inquiry_id}: hypotheses for unknown unit ids: {shown}{more}")


class UnknownInquiryInRecords(InputFormatError):
    pass


class NumberOutOfRange(NurcEvalError):
    """A digit string is too large to be spelled out (>= 10**9)."""

    def __init__(self, digits):
        self.digits = digits
        super().__init__(f"number out of range for expansion: {digits}")


class EmptyReference(NurcEvalError):
    """WER/CER requested for a reference with no tokens or characters."""


class InvariantViolation(NurcEvalError):
    """An internal consistency check failed (CLI exit code 3)."""


class UnbalancedDelimiterWarning(UserWarning):
    """An opening mark has no matching close; the span runs to end of unit."""


class IoFailure(NurcEvalError):
    """Reading or writing a file failed (CLI exit code 1)."""
