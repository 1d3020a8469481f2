"""Account-balance model: addresses hold amounts, signed transactions move them.

Blocks group transactions and pay the miner the block reward plus the fees of
the block's transactions.  This model is deliberately the weaker of the two:
a verbatim copy of an earlier transaction validates again as long as the
spender's balance still covers it.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from . import core
from .core import MsgList, Nat, Pair, RewardSchedule, nat_bytes
from .errors import (
    BadAddress,
    BadSignature,
    EmptyInputs,
    EmptyOutputs,
    InsufficientBalance,
    OutputsExceedInputs,
    Violation,
    WrongMinerAmount,
)


class Balances(Mapping):
    """Immutable address -> amount map.  Missing addresses hold 0; zeros are never stored."""

    __slots__ = ("_data",)

    def __init__(self, data: Mapping[bytes, int] | Iterable[tuple[bytes, int]] = ()):
        items = data.items() if isinstance(data, Mapping) else data
        self._data = {bytes(a): core.check_amount(v) for a, v in items if v}

    def __getitem__(self, address: bytes) -> int:
        return self._data.get(bytes(address), 0)

    def __iter__(self) -> Iterator[bytes]:
        return iter(self._data)

    def __len__(self) -> int:
        return len(self._data)

    def __contains__(self, address) -> bool:
        return address in self._data

    def __eq__(self, other):
        if isinstance(other, Balances):
            return self._data == other._data
        if isinstance(other, Mapping):
            return self._data == {a: v for a, v in other.items() if v}
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._data.items()))

    def __repr__(self):
        inner = ", ".join(f"{a.hex()[:8]}: {v}" for a, v in sorted(self._data.items()))
        return f"Balances({{{inner}}})"

    def total(self) -> int:
        return core.sum_amounts(self._data.values())

    def credit(self, address: bytes, amount: int) -> "Balances":
        new = dict(self._data)
        new[address] = core.add_amounts(new.get(address, 0), amount)
        return Balances(new)

    def debit(self, address: bytes, amount: int) -> "Balances":
        new = dict(self._data)
        new[address] = core.sub_amounts(new.get(address, 0), amount)
        return Balances(new)

    def sorted_items(self) -> list[tuple[bytes, int]]:
        return sorted(self._data.items())


@dataclass(frozen=True)
class TxField:
    amount: int
    address: bytes

    def __post_init__(self):
        core.check_amount(self.amount)
        object.__setattr__(self, "address", core.check_bytes(self.address, core.ADDRESS_SIZE, "address"))


def _fields(xs: Iterable[TxField]) -> tuple[TxField, ...]:
    return tuple(xs)


@dataclass(frozen=True)
class UnsignedTx:
    inputs: tuple[TxField, ...] = ()
    outputs: tuple[TxField, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "inputs", _fields(self.inputs))
        object.__setattr__(self, "outputs", _fields(self.outputs))


@dataclass(frozen=True)
class SignatureBundle:
    pubkey: bytes
    signature: bytes


@dataclass(frozen=True)
class LedgerTx:
    tx: UnsignedTx
    sigs: tuple[SignatureBundle, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "sigs", tuple(self.sigs))

    @property
    def inputs(self) -> tuple[TxField, ...]:
        return self.tx.inputs

    @property
    def outputs(self) -> tuple[TxField, ...]:
        return self.tx.outputs


@dataclass(frozen=True)
class Block:
    miner_outputs: tuple[TxField, ...] = ()
    txs: tuple[LedgerTx, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "miner_outputs", _fields(self.miner_outputs))
        object.__setattr__(self, "txs", tuple(self.txs))


@dataclass(frozen=True)
class Chain:
    blocks: tuple[Block, ...] = ()
    schedule: RewardSchedule = field(default_factory=RewardSchedule)
    start_time: int = 0

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.blocks))


# -- messages ----------------------------------------------------------------


def field_msg(f: TxField) -> Pair:
    return Pair(Nat(f.amount), nat_bytes(f.address))


def fields_msg(fields: Sequence[TxField]) -> MsgList:
    return MsgList(field_msg(f) for f in fields)


def unsigned_tx_msg(tx: UnsignedTx) -> Pair:
    return Pair(fields_msg(tx.inputs), fields_msg(tx.outputs))


def input_signing_msg(inp: TxField, outputs: Sequence[TxField]) -> Pair:
    """What the owner of ``inp`` signs: their own input plus every output."""
    return Pair(field_msg(inp), fields_msg(outputs))


def sign_tx(
    tx: UnsignedTx, secrets: Sequence[bytes], scheme: core.CryptoScheme = core.DEFAULT_SCHEME
) -> LedgerTx:
    """Sign every input of ``tx``; ``secrets[k]`` belongs to input ``k``."""
    sigs = []
    for inp, secret in zip(tx.inputs, secrets, strict=True):
        pk = scheme.public_key(secret)
        sigs.append(SignatureBundle(pk, scheme.sign(input_signing_msg(inp, tx.outputs), secret)))
    return LedgerTx(tx, tuple(sigs))


# -- amounts -----------------------------------------------------------------


def total_amount(fields: Iterable[TxField]) -> int:
    return core.sum_amounts(f.amount for f in fields)


def tx_fee(tx: LedgerTx) -> int:
    ins, outs = total_amount(tx.inputs), total_amount(tx.outputs)
    if outs > ins:
        raise OutputsExceedInputs(f"outputs {outs} exceed inputs {ins}")
    return ins - outs


def block_fee(block: Block) -> int:
    return core.sum_amounts(tx_fee(tx) for tx in block.txs)


# -- validation and application ----------------------------------------------


def check_tx(
    balances: Balances, tx: LedgerTx, scheme: core.CryptoScheme = core.DEFAULT_SCHEME
) -> None:
    """Raise the first violation of ``tx`` against ``balances``, in field order."""
    if not tx.inputs:
        raise EmptyInputs()
    if not tx.outputs:
        raise EmptyOutputs()
    ins, outs = total_amount(tx.inputs), total_amount(tx.outputs)
    if ins < outs:
        raise OutputsExceedInputs(f"outputs {outs} exceed inputs {ins}")
    for k, inp in enumerate(tx.inputs):
        if k >= len(tx.sigs):
            raise BadSignature(f"input {k} is unsigned", index=k)
        bundle = tx.sigs[k]
        if scheme.pubkey_to_address(bundle.pubkey) != inp.address:
            raise BadAddress(f"public key of input {k} does not hash to its address", index=k)
        if not scheme.verify(input_signing_msg(inp, tx.outputs), bundle.pubkey, bundle.signature):
            raise BadSignature(f"input {k} signature does not verify", index=k)
    # inputs are covered one at a time; two inputs from one address both draw on it
    running = dict(balances.items())
    for k, inp in enumerate(tx.inputs):
        have = running.get(inp.address, 0)
        if have < inp.amount:
            raise InsufficientBalance(
                f"input {k} spends {inp.amount} but address holds {have}", index=k
            )
        running[inp.address] = have - inp.amount


def apply_tx(balances: Balances, tx: LedgerTx) -> Balances:
    data = dict(balances.items())
    for inp in tx.inputs:
        data[inp.address] = core.sub_amounts(data.get(inp.address, 0), inp.amount)
    for out in tx.outputs:
        data[out.address] = core.add_amounts(data.get(out.address, 0), out.amount)
    return Balances(data)


def credit_all(balances: Balances, fields: Iterable[TxField]) -> Balances:
    data = dict(balances.items())
    for f in fields:
        data[f.address] = core.add_amounts(data.get(f.address, 0), f.amount)
    return Balances(data)


def check_block(
    balances: Balances,
    block: Block,
    t: int,
    schedule: RewardSchedule = RewardSchedule(),
    scheme: core.CryptoScheme = core.DEFAULT_SCHEME,
) -> None:
    for k, tx in enumerate(block.txs):
        try:
            check_tx(balances, tx, scheme)
        except Violation as e:
            e.tx_index = k
            raise
        balances = apply_tx(balances, tx)
    expected = core.add_amounts(core.block_reward(schedule, t), block_fee(block))
    got = total_amount(block.miner_outputs)
    if got != expected:
        raise WrongMinerAmount(expected, got)


def apply_block(balances: Balances, block: Block) -> Balances:
    for tx in block.txs:
        balances = apply_tx(balances, tx)
    return credit_all(balances, block.miner_outputs)


def check_chain(chain: Chain, scheme: core.CryptoScheme = core.DEFAULT_SCHEME) -> None:
    """Check every block in order from the empty ledger; violations carry ``position`` = block index."""
    balances = Balances()
    for k, block in enumerate(chain.blocks):
        try:
            check_block(balances, block, chain.start_time + k, chain.schedule, scheme)
        except Violation as e:
            raise e.at(k)
        balances = apply_block(balances, block)


def final_ledger(chain: Chain) -> Balances:
    balances = Balances()
    for block in chain.blocks:
        balances = apply_block(balances, block)
    return balances


def is_correct_chain(chain: Chain, scheme: core.CryptoScheme = core.DEFAULT_SCHEME) -> bool:
    try:
        check_chain(chain, scheme)
    except Violation:
        return False
    return True
