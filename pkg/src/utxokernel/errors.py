"""Exception hierarchy shared by both ledger models.

Every rejection raised by a ``check_*`` function is a :class:`Violation`.
Violations carry an optional ``index`` (the offending input) and an optional
``position`` (the offending transaction or block), filled in by the outer
check that replays a whole chain.
"""

from __future__ import annotations


class IndexOutOfBounds(IndexError):
    """An index or selection step falls outside its list."""


class Violation(Exception):
    """Base class for every validation failure."""

    def __init__(self, message: str = "", *, index: int | None = None):
        super().__init__(message or self.__class__.__name__)
        self.index = index
        self.position: int | None = None

    @property
    def kind(self) -> str:
        return type(self).__name__

    def at(self, position: int) -> "Violation":
        self.position = position
        return self

    def to_json(self) -> dict:
        out = {"type": self.kind, "detail": str(self)}
        if self.index is not None:
            out["index"] = self.index
        return out


class AmountOverflow(Violation):
    """A sum of amounts does not fit in 64 bits."""


class BalanceUnderflow(Violation):
    """An address was debited more than it holds."""


class EmptyInputs(Violation):
    pass


class EmptyOutputs(Violation):
    pass


class OutputsExceedInputs(Violation):
    pass


class InsufficientBalance(Violation):
    pass


class BadAddress(Violation):
    """The public key presented for an input does not hash to its address."""


class AddressMismatch(Violation):
    """The public key presented for an input does not hash to the spent output's address."""


class BadSignature(Violation):
    pass


class ImmatureInput(Violation):
    pass


class _Mismatch(Violation):
    def __init__(self, expected: int, got: int, *, index: int | None = None):
        super().__init__(f"expected {expected}, got {got}", index=index)
        self.expected = expected
        self.got = got

    def to_json(self) -> dict:
        out = super().to_json()
        out.update(expected=self.expected, got=self.got)
        return out


class WrongCoinbaseAmount(_Mismatch):
    pass


class WrongCoinbaseTime(_Mismatch):
    pass


class WrongMinerAmount(_Mismatch):
    pass


class UnknownOutpoint(Violation):
    """No unspent output has the referenced (txid, output number)."""


class DuplicateOutpoint(Violation):
    """The same outpoint is claimed twice by one transaction."""


class AmbiguousOutpoint(Violation):
    """More than one unspent output has the referenced (txid, output number)."""
