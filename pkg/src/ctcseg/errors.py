"""Exception hierarchy for the ctcseg package."""


class CtcSegError(Exception):
    """Base class for all ctcseg errors."""


class EmptyStream(CtcSegError):
    """A posterior stream with zero frames was given where frames are required."""


class EmptyAudio(CtcSegError):
    """An audio buffer with zero samples was given."""


class InvalidConfig(CtcSegError):
    """A configuration value violates its domain or is inconsistent with the data."""


class InvalidState(CtcSegError):
    """An online segmenter was stepped or finished again after finish() without reset()."""


class FormatError(CtcSegError):
    """Base class for CTCP / file format violations."""


class BadMagic(FormatError):
    """The stream does not start with the CTCP magic bytes."""


class VersionMismatch(FormatError):
    """The CTCP header declares an unsupported format version."""


class TruncatedFile(FormatError):
    """The stream ended before the declared number of rows was read."""


class RowSumViolation(FormatError):
    """A probability row does not sum to 1 within tolerance."""


class SinkError(CtcSegError):
    """Writing segment output to a sink failed."""
