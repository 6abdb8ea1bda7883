"""Exception types raised by the library."""


class FbasError(Exception):
    """Base class for all library errors."""


class FbasParseError(FbasError, ValueError):
    """An FBAS document could not be turned into a model.

    ``kind`` is one of ``malformed-json``, ``duplicate-public-key``,
    ``invalid-threshold`` or ``invalid-document``.
    """

    def __init__(self, kind: str, message: str):
        super().__init__(f"{kind}: {message}")
        self.kind = kind


class NoQuorumIntersection(FbasError):
    """The FBAS has two disjoint quorums."""


class NoQuorums(FbasError):
    """The FBAS has no quorum at all."""


class EnumerationCapExceeded(FbasError):
    """Exact enumeration was requested for a player set above the cap."""

    def __init__(self, players: int, cap: int):
        super().__init__(
            f"exact enumeration over {players} players exceeds the cap of {cap}; "
            "use the approximate method instead")
        self.players = players
        self.cap = cap


class NoWinningCoalition(FbasError):
    """The grand coalition of the game is losing, so nobody can be pivotal."""
