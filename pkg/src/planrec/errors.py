"""Exception types shared across the toolkit."""


class PlanRecError(Exception):
    """Base class for all toolkit errors."""


class CorpusFormatError(PlanRecError):
    """A corpus or observation file violates the on-disk format."""


class EmptyCorpusError(PlanRecError):
    """A corpus contains no plans."""


class EmptyLibraryError(PlanRecError):
    """An operation requires a library with at least one plan."""


class InvalidConfigError(PlanRecError):
    """A configuration value is out of its allowed range."""


class DegenerateVocabularyError(PlanRecError):
    """The vocabulary is too small to build a code tree over."""


class UnknownActionError(PlanRecError):
    """An action token is not present in the vocabulary in use."""


class TooLargeError(PlanRecError):
    """An exhaustive search would exceed its enumeration guard."""


class NumericError(PlanRecError):
    """A numeric value is not finite where a finite one is required."""
