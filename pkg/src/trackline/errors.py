"""Exception types shared across the package."""


class TracklineError(Exception):
    """Base class for all errors raised by this package."""


class PresentationError(TracklineError, ValueError):
    """Base class for presentation parsing/validation errors."""


class UnknownGenerator(PresentationError):
    pass


class DuplicateGenerator(PresentationError):
    pass


class EmptyRelator(PresentationError):
    pass


class MalformedToken(PresentationError):
    pass


class DimensionMismatch(TracklineError, ValueError):
    pass


class NotASolution(TracklineError, ValueError):
    pass


class NegativeEntry(TracklineError, ValueError):
    pass


class TwistedInput(TracklineError, ValueError):
    """An operation that requires an untwisted track was given a twisted one."""


class TwistedTrack(TwistedInput):
    """A twisted track was offered to an arrangement."""


class InvalidRegion(TracklineError, ValueError):
    pass


class PathNotComposable(TracklineError, ValueError):
    pass


class AllZero(TracklineError, ValueError):
    pass


class ResolutionFailed(TracklineError):
    """The bounded mixed-sign pairing search did not eliminate returning arcs."""


class InternalInvariant(TracklineError, AssertionError):
    """A structural self-check failed; indicates a bug, reported as exit code 3."""
