"""Exception types shared across the package."""


class DominoError(Exception):
    """Base class for all domino101 errors."""


class DataError(DominoError):
    """Malformed or inconsistent game data (conservation violated, duplicate tile, ...)."""


class TurnError(DominoError):
    """An action was attempted by a seat that is not to move."""


class IllegalMove(DominoError):
    """A play that violates the rules (tile not in hand, no matching end, wrong opener)."""


class IllegalPass(DominoError):
    """A pass declared while a legal move exists (strict pass mode)."""


class StateError(DominoError):
    """An operation called in the wrong round/match phase."""


class Unsatisfiable(DominoError):
    """Hidden-hand constraints admit no assignment; indicates a rule violation upstream."""


class EncodeError(DominoError):
    """A wire message could not be encoded (oversize payload)."""


class ProtocolError(DominoError):
    """A wire message failed validation.

    ``code`` is a short machine-readable tag ("malformed", "version", "seq",
    "bad_tile", "unknown_type", ...).
    """

    def __init__(self, code: str, message: str = ""):
        super().__init__(message or code)
        self.code = code
