"""Exception hierarchy shared by every module."""


class FutsError(Exception):
    """Base class; ``kind`` is a stable machine-readable tag."""

    kind = "error"


class SemiringMismatch(FutsError, TypeError):
    kind = "semiring-mismatch"


class PairingCollision(FutsError, ValueError):
    kind = "pairing-collision"


class ModelError(FutsError, ValueError):
    """Invalid FuTS model, partition, or document."""

    def __init__(self, kind: str, message: str):
        super().__init__(f"{kind}: {message}")
        self.kind = kind
        self.message = message


class StateCapExceeded(FutsError, RuntimeError):
    kind = "state-cap-exceeded"

    def __init__(self, cap: int, explored: int):
        super().__init__(f"state cap {cap} exceeded after exploring {explored} states")
        self.cap = cap
        self.explored = explored


class ParseError(FutsError, ValueError):
    def __init__(self, kind: str, message: str, line: int = 0, col: int = 0):
        where = f"{line}:{col}: " if line else ""
        super().__init__(f"{where}{kind}: {message}")
        self.kind = kind
        self.message = message
        self.line = line
        self.col = col
