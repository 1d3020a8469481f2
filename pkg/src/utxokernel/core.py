"""Messages, canonical encoding, hashing, signature schemes and the reward schedule.

Everything that gets hashed or signed is first turned into a :class:`Msg`
tree built from three constructors: :class:`Nat`, :class:`Pair` and
:class:`MsgList`.  Byte strings (keys, signatures, digests, addresses) enter a
message as ``Nat`` of their big-endian integer value, see :func:`nat_bytes`.
"""

from __future__ import annotations

import abc
import hashlib
import random
from dataclasses import dataclass, field
from typing import Iterable, Union

from .errors import AmountOverflow, BalanceUnderflow

MAX_AMOUNT = 2**64 - 1
COIN = 100_000_000

DIGEST_SIZE = 32
ADDRESS_SIZE = 20


# -- amounts -----------------------------------------------------------------


def check_amount(value: int) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise TypeError(f"amount must be an int, got {type(value).__name__}")
    if value < 0:
        raise ValueError(f"amount must be non-negative, got {value}")
    if value > MAX_AMOUNT:
        raise AmountOverflow(f"amount {value} exceeds 64 bits")
    return value


def add_amounts(a: int, b: int) -> int:
    total = a + b
    if total > MAX_AMOUNT:
        raise AmountOverflow(f"{a} + {b} exceeds 64 bits")
    return total


def sub_amounts(a: int, b: int) -> int:
    if b > a:
        raise BalanceUnderflow(f"{a} - {b} is negative")
    return a - b


def sum_amounts(values: Iterable[int]) -> int:
    total = 0
    for v in values:
        total = add_amounts(total, v)
    return total


def check_bytes(value: bytes, size: int, what: str) -> bytes:
    if not isinstance(value, (bytes, bytearray)):
        raise TypeError(f"{what} must be bytes, got {type(value).__name__}")
    if len(value) != size:
        raise ValueError(f"{what} must be {size} bytes, got {len(value)}")
    return bytes(value)


# -- messages ----------------------------------------------------------------


@dataclass(frozen=True)
class Nat:
    n: int

    def __post_init__(self):
        if not isinstance(self.n, int) or isinstance(self.n, bool) or self.n < 0:
            raise ValueError(f"Nat requires a non-negative int, got {self.n!r}")


@dataclass(frozen=True)
class Pair:
    left: "Msg"
    right: "Msg"


@dataclass(frozen=True)
class MsgList:
    items: tuple = ()

    def __init__(self, items: Iterable["Msg"] = ()):
        object.__setattr__(self, "items", tuple(items))


Msg = Union[Nat, Pair, MsgList]


def nat_bytes(b: bytes) -> Nat:
    return Nat(int.from_bytes(b, "big"))


def _leb128(n: int, out: bytearray) -> None:
    while True:
        byte = n & 0x7F
        n >>= 7
        if n:
            out.append(byte | 0x80)
        else:
            out.append(byte)
            return


def encode_msg(m: Msg) -> bytes:
    """Prefix-free encoding: 0x00 varint | 0x01 left right | 0x02 count items..."""
    out = bytearray()
    stack = [m]
    while stack:
        node = stack.pop()
        if isinstance(node, Nat):
            out.append(0x00)
            _leb128(node.n, out)
        elif isinstance(node, Pair):
            out.append(0x01)
            stack.append(node.right)
            stack.append(node.left)
        elif isinstance(node, MsgList):
            out.append(0x02)
            _leb128(len(node.items), out)
            stack.extend(reversed(node.items))
        else:
            raise TypeError(f"not a Msg: {node!r}")
    return bytes(out)


def sha256d(data: bytes) -> bytes:
    return hashlib.sha256(hashlib.sha256(data).digest()).digest()


# -- signature schemes -------------------------------------------------------


class CryptoScheme(abc.ABC):
    """Hashing, addressing and signature verification used by the validators.

    ``hash_msg`` and ``pubkey_to_address`` must be deterministic.  Schemes
    that can also produce keys and signatures (test schemes) implement
    ``keygen`` and ``sign``.
    """

    scheme_id: str = ""
    pubkey_size: int = 32
    signature_size: int = 32

    def hash_msg(self, m: Msg) -> bytes:
        return sha256d(encode_msg(m))

    def pubkey_to_address(self, pk: bytes) -> bytes:
        label = b"addr" + bytes(pk)
        return self.hash_msg(nat_bytes(label))[:ADDRESS_SIZE]

    def __eq__(self, other):
        return type(self) is type(other)

    def __hash__(self):
        return hash(type(self))

    def __repr__(self):
        return f"{type(self).__name__}()"

    @abc.abstractmethod
    def verify(self, m: Msg, pk: bytes, sig: bytes) -> bool:
        ...

    def keygen(self, rng: random.Random):
        raise NotImplementedError(f"{type(self).__name__} cannot generate keys")

    def public_key(self, secret: bytes) -> bytes:
        raise NotImplementedError(f"{type(self).__name__} cannot derive keys")

    def sign(self, m: Msg, secret: bytes) -> bytes:
        raise NotImplementedError(f"{type(self).__name__} cannot sign")


class ToyScheme(CryptoScheme):
    """Insecure test scheme: the public key *is* the secret.

    A signature is ``hash_msg(Pair(Nat(pk), m))``, so anyone who sees a public
    key can sign for it.  Good enough to exercise every validation path.
    """

    scheme_id = "toy-v1"

    def keygen(self, rng: random.Random) -> tuple[bytes, bytes]:
        secret = rng.getrandbits(8 * self.pubkey_size).to_bytes(self.pubkey_size, "big")
        return secret, secret

    def public_key(self, secret: bytes) -> bytes:
        return bytes(secret)

    def sign(self, m: Msg, secret: bytes) -> bytes:
        return self.hash_msg(Pair(nat_bytes(secret), m))

    def verify(self, m: Msg, pk: bytes, sig: bytes) -> bool:
        if len(pk) != self.pubkey_size or len(sig) != self.signature_size:
            return False
        return self.sign(m, pk) == bytes(sig)


SCHEMES: dict[str, type[CryptoScheme]] = {ToyScheme.scheme_id: ToyScheme}


def scheme_by_id(scheme_id: str) -> CryptoScheme:
    try:
        return SCHEMES[scheme_id]()
    except KeyError:
        raise ValueError(f"unknown crypto scheme {scheme_id!r}") from None


DEFAULT_SCHEME = ToyScheme()


def hash_msg(m: Msg, scheme: CryptoScheme = DEFAULT_SCHEME) -> bytes:
    return scheme.hash_msg(m)


def pubkey_to_address(pk: bytes, scheme: CryptoScheme = DEFAULT_SCHEME) -> bytes:
    return scheme.pubkey_to_address(pk)


def verify(m: Msg, pk: bytes, sig: bytes, scheme: CryptoScheme = DEFAULT_SCHEME) -> bool:
    return scheme.verify(m, pk, sig)


# -- rewards and maturation --------------------------------------------------


@dataclass(frozen=True)
class RewardSchedule:
    initial_reward: int = 50 * COIN
    halving_interval: int = 52_500
    cutoff_height: int = 6_930_000

    def __post_init__(self):
        check_amount(self.initial_reward)
        if self.halving_interval <= 0:
            raise ValueError("halving_interval must be positive")
        if self.cutoff_height < 0:
            raise ValueError("cutoff_height must be non-negative")


def block_reward(schedule: RewardSchedule, t: int) -> int:
    if t >= schedule.cutoff_height:
        return 0
    return schedule.initial_reward >> (t // schedule.halving_interval)


DEFAULT_MATURATION = 100


@dataclass(frozen=True)
class ChainParams:
    """Everything a validator needs besides the transactions themselves."""

    schedule: RewardSchedule = field(default_factory=RewardSchedule)
    maturation: int = DEFAULT_MATURATION
    scheme: CryptoScheme = DEFAULT_SCHEME

    def __post_init__(self):
        if self.maturation < 0:
            raise ValueError("maturation must be non-negative")

    def reward(self, t: int) -> int:
        return block_reward(self.schedule, t)


DEFAULT_PARAMS = ChainParams()


def maturation_window(params: ChainParams = DEFAULT_PARAMS) -> int:
    return params.maturation
