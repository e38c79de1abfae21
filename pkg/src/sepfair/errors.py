"""Exception types shared across the library."""


class SepfairError(Exception):
    """Base class for all library errors."""


class InputError(SepfairError):
    """Invalid coordinates, parameters, or instance data."""


class ProtocolError(SepfairError):
    """A protocol could not serve some agent (e.g. a threshold was too high).

    The offending agent index, when known, is stored in ``agent``.
    """

    def __init__(self, message, agent=None):
        super().__init__(message)
        self.agent = agent


class InternalError(SepfairError):
    """An invariant that should be unreachable was violated."""
