"""Transaction-tree model: a linear chain of normal and coinbase transactions.

A :class:`TxTree` is either the genesis tree or a parent tree extended by one
transaction.  The set of unspent outputs, the fees waiting for the next
coinbase and the height of the next block are all functions of the tree;
each node caches them, and :func:`recompute_state` rebuilds them from the
transactions alone so the caches can be checked.

A :class:`Normal` transaction spends entries of its parent's UTXO list through
a :class:`~utxokernel.indexed_list.TrackedSelection` whose annotations are the
``(public key, signature)`` pairs of the inputs.  A :class:`Coinbase` has no
inputs and mints the block reward plus pending fees.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence, Union

from . import core
from .account_ledger import Balances
from .core import ChainParams, Msg, MsgList, Nat, Pair, nat_bytes
from .errors import (
    AddressMismatch,
    BadSignature,
    EmptyInputs,
    EmptyOutputs,
    ImmatureInput,
    IndexOutOfBounds,
    OutputsExceedInputs,
    Violation,
    WrongCoinbaseAmount,
    WrongCoinbaseTime,
)
from .indexed_list import (
    TrackedSelection,
    concat_index_map,
    enumerate_indices,
    remainder,
    remainder_index_to_orig,
    selected,
    selected_with_orig_indices,
)


@dataclass(frozen=True)
class OutputField:
    amount: int
    address: bytes

    def __post_init__(self):
        core.check_amount(self.amount)
        object.__setattr__(
            self, "address", core.check_bytes(self.address, core.ADDRESS_SIZE, "address")
        )


def _outputs(xs: Iterable[OutputField]) -> tuple[OutputField, ...]:
    return tuple(xs)


@dataclass(frozen=True)
class Normal:
    inputs: TrackedSelection
    outputs: tuple[OutputField, ...] = ()

    def __post_init__(self):
        if not isinstance(self.inputs, TrackedSelection):
            object.__setattr__(self, "inputs", TrackedSelection(self.inputs))
        object.__setattr__(self, "outputs", _outputs(self.outputs))


@dataclass(frozen=True)
class Coinbase:
    time: int
    outputs: tuple[OutputField, ...] = ()

    def __post_init__(self):
        if self.time < 0:
            raise ValueError("coinbase time must be non-negative")
        object.__setattr__(self, "outputs", _outputs(self.outputs))


TreeTx = Union[Normal, Coinbase]


@dataclass(frozen=True)
class OutputRef:
    tx_position: int
    output_index: int


@dataclass(frozen=True)
class UtxoEntry:
    ref: OutputRef
    field: OutputField
    producing_txid: bytes
    maturation: int
    msg: Msg

    @property
    def amount(self) -> int:
        return self.field.amount

    @property
    def address(self) -> bytes:
        return self.field.address

    @property
    def outpoint(self) -> tuple[bytes, int]:
        return self.producing_txid, self.ref.output_index


@dataclass(frozen=True)
class TreeState:
    """The quantities a tree determines; compared against node caches in tests."""

    utxo: tuple[UtxoEntry, ...]
    pending_fees: int
    next_block_time: int
    txids: tuple[bytes, ...]


class TxTree:
    """Immutable chain node.  ``TxTree.genesis(params)`` starts one; ``extend`` appends without checking."""

    __slots__ = ("parent", "tx", "params", "length", "txid", "msg", "utxo", "pending_fees", "next_block_time")

    def __init__(self, parent: "TxTree | None", tx: TreeTx | None, params: ChainParams):
        self.parent = parent
        self.tx = tx
        self.params = params
        if parent is None:
            self.length = 0
            self.txid = None
            self.msg = None
            self.utxo: tuple[UtxoEntry, ...] = ()
            self.pending_fees = 0
            self.next_block_time = 0
        else:
            self.length = parent.length + 1
            self.msg = tx_msg(parent, tx)
            self.txid = params.scheme.hash_msg(self.msg)
            self.utxo = _child_utxo(parent, tx, self.txid)
            self.pending_fees = _child_fees(parent, tx)
            self.next_block_time = (
                tx.time + 1 if isinstance(tx, Coinbase) else parent.next_block_time
            )

    @classmethod
    def genesis(cls, params: ChainParams = core.DEFAULT_PARAMS) -> "TxTree":
        return cls(None, None, params)

    def extend(self, tx: TreeTx) -> "TxTree":
        if isinstance(tx, Normal):
            tx.inputs.check(len(self.utxo))
        elif not isinstance(tx, Coinbase):
            raise TypeError(f"not a tree transaction: {tx!r}")
        return TxTree(self, tx, self.params)

    @classmethod
    def from_txs(cls, txs: Iterable[TreeTx], params: ChainParams = core.DEFAULT_PARAMS) -> "TxTree":
        tree = cls.genesis(params)
        for tx in txs:
            tree = tree.extend(tx)
        return tree

    @property
    def is_genesis(self) -> bool:
        return self.parent is None

    def nodes(self) -> list["TxTree"]:
        """Non-genesis nodes from the first transaction to this one."""
        out = []
        node = self
        while node.parent is not None:
            out.append(node)
            node = node.parent
        out.reverse()
        return out

    def __iter__(self) -> Iterator[tuple["TxTree", TreeTx]]:
        """Yield ``(prefix, tx)`` pairs: each transaction with the tree it extends."""
        for node in self.nodes():
            yield node.parent, node.tx

    @property
    def txs(self) -> list[TreeTx]:
        return [n.tx for n in self.nodes()]

    def prefix(self, length: int) -> "TxTree":
        if not 0 <= length <= self.length:
            raise IndexOutOfBounds(f"prefix length {length} out of range 0..{self.length}")
        node = self
        while node.length > length:
            node = node.parent
        return node

    def __len__(self) -> int:
        return self.length

    def __repr__(self):
        return f"TxTree(length={self.length}, utxo={len(self.utxo)}, next_block_time={self.next_block_time})"


# -- structure ---------------------------------------------------------------


def nr_outputs(tx: TreeTx) -> int:
    return len(tx.outputs)


def tx_outputs(tree: TxTree, tx: TreeTx) -> list[OutputRef]:
    return [OutputRef(tree.length, i) for i in enumerate_indices(nr_outputs(tx))]


def utxo(tree: TxTree) -> tuple[UtxoEntry, ...]:
    return tree.utxo


def utxo_minus_new_inputs(tree: TxTree, tx: TreeTx) -> list[UtxoEntry]:
    if isinstance(tx, Coinbase):
        return list(tree.utxo)
    return remainder(tree.utxo, tx.inputs)


def maturation_time(tx: TreeTx, params: ChainParams = core.DEFAULT_PARAMS) -> int:
    if isinstance(tx, Coinbase):
        return tx.time + params.maturation
    return 0


def _fresh_entries(tree: TxTree, tx: TreeTx, txid: bytes) -> list[UtxoEntry]:
    maturation = maturation_time(tx, tree.params)
    return [
        UtxoEntry(ref, tx.outputs[ref.output_index], txid, maturation, Pair(nat_bytes(txid), Nat(ref.output_index)))
        for ref in tx_outputs(tree, tx)
    ]


def _child_utxo(tree: TxTree, tx: TreeTx, txid: bytes) -> tuple[UtxoEntry, ...]:
    return tuple(utxo_minus_new_inputs(tree, tx) + _fresh_entries(tree, tx, txid))


def resolve_inputs(tree: TxTree, inputs: TrackedSelection) -> list[tuple[UtxoEntry, bytes, bytes]]:
    return [(entry, pk, sig) for entry, (pk, sig) in selected(tree.utxo, inputs)]


# -- amounts and time --------------------------------------------------------


def sum_outputs(tx: TreeTx) -> int:
    return core.sum_amounts(o.amount for o in tx.outputs)


def sum_inputs(tree: TxTree, inputs: TrackedSelection) -> int:
    return core.sum_amounts(entry.amount for entry, _, _ in resolve_inputs(tree, inputs))


def next_block_time(tree: TxTree) -> int:
    return tree.next_block_time


def pending_fees(tree: TxTree) -> int:
    return tree.pending_fees


def _child_fees(tree: TxTree, tx: TreeTx) -> int:
    if isinstance(tx, Coinbase):
        return 0
    # truncated like the recursive definition; equal to the real fee on accepted txs
    fee = max(sum_inputs(tree, tx.inputs) - sum_outputs(tx), 0)
    return core.add_amounts(tree.pending_fees, fee)


def tx_sum_inputs(tree: TxTree, tx: TreeTx) -> int:
    if isinstance(tx, Coinbase):
        return core.add_amounts(tree.pending_fees, tree.params.reward(tree.next_block_time))
    return sum_inputs(tree, tx.inputs)


# -- messages and ids --------------------------------------------------------


def outputs_msg(outputs: Sequence[OutputField]) -> MsgList:
    return MsgList(Pair(Nat(o.amount), nat_bytes(o.address)) for o in outputs)


def tx_msg(tree: TxTree, tx: TreeTx) -> Msg:
    if isinstance(tx, Coinbase):
        return Pair(Nat(tx.time), outputs_msg(tx.outputs))
    per_input = [
        Pair(utxo_msg(tree, orig), Pair(nat_bytes(pk), nat_bytes(sig)))
        for orig, _, (pk, sig) in selected_with_orig_indices(tree.utxo, tx.inputs)
    ]
    return Pair(MsgList(per_input), outputs_msg(tx.outputs))


def tx_id(tree: TxTree, tx: TreeTx) -> bytes:
    return tree.params.scheme.hash_msg(tx_msg(tree, tx))


def utxo_msg(tree: TxTree, i: int) -> Msg:
    """Message identifying UTXO entry ``i``, computed by walking back through the tree.

    Indices into the surviving part of a node's UTXO list are mapped to the
    parent's list and the walk continues; an index into the node's own fresh
    outputs yields ``Pair(Nat txid, Nat output number)``.
    """
    node = tree
    while True:
        if node.parent is None:
            raise IndexOutOfBounds(f"utxo index {i} out of range for the genesis tree")
        parent, tx = node.parent, node.tx
        survivors = len(parent.utxo) - (len(tx.inputs) if isinstance(tx, Normal) else 0)
        fresh = nr_outputs(tx)
        step = concat_index_map(
            survivors,
            fresh,
            lambda j: ("parent", j),
            lambda j: ("fresh", j),
            i,
        )
        kind, j = step
        if kind == "fresh":
            return Pair(nat_bytes(node.txid), Nat(j))
        i = j if isinstance(tx, Coinbase) else remainder_index_to_orig(len(parent.utxo), tx.inputs, j)
        node = parent


def msg_to_sign(entry: UtxoEntry, outputs: Sequence[OutputField]) -> Msg:
    """What the owner of ``entry`` signs: the outpoint, its address and all outputs."""
    spent = Pair(Pair(nat_bytes(entry.producing_txid), Nat(entry.ref.output_index)), nat_bytes(entry.address))
    return Pair(spent, outputs_msg(outputs))


def sign_input(
    entry: UtxoEntry, outputs: Sequence[OutputField], secret: bytes, scheme: core.CryptoScheme
) -> tuple[bytes, bytes]:
    return scheme.public_key(secret), scheme.sign(msg_to_sign(entry, outputs), secret)


# -- correctness -------------------------------------------------------------


def check_tx(tree: TxTree, tx: TreeTx) -> "CorrectTx":
    """Return a certificate for ``tx`` extending ``tree`` or raise its first violation."""
    params = tree.params
    if isinstance(tx, Coinbase):
        if not tx.outputs:
            raise EmptyOutputs()
        expected_time = tree.next_block_time
        if tx.time != expected_time:
            raise WrongCoinbaseTime(expected_time, tx.time)
        expected = core.add_amounts(tree.pending_fees, params.reward(tx.time))
        got = sum_outputs(tx)
        if got != expected:
            raise WrongCoinbaseAmount(expected, got)
        return CorrectTx(tree, tx, _token=_TOKEN)

    if not isinstance(tx, Normal):
        raise TypeError(f"not a tree transaction: {tx!r}")
    resolved = resolve_inputs(tree, tx.inputs)
    if not resolved:
        raise EmptyInputs()
    if not tx.outputs:
        raise EmptyOutputs()
    ins, outs = sum_inputs(tree, tx.inputs), sum_outputs(tx)
    if ins < outs:
        raise OutputsExceedInputs(f"outputs {outs} exceed inputs {ins}")
    now = tree.next_block_time
    for k, (entry, _, _) in enumerate(resolved):
        if entry.maturation > now:
            raise ImmatureInput(
                f"input {k} matures at {entry.maturation}, next block is {now}", index=k
            )
    for k, (entry, pk, sig) in enumerate(resolved):
        if params.scheme.pubkey_to_address(pk) != entry.address:
            raise AddressMismatch(f"public key of input {k} does not hash to its address", index=k)
        if not params.scheme.verify(msg_to_sign(entry, tx.outputs), pk, sig):
            raise BadSignature(f"input {k} signature does not verify", index=k)
    return CorrectTx(tree, tx, _token=_TOKEN)


def check_tree(tree: TxTree) -> None:
    """Replay every transaction against its prefix; violations carry ``position``."""
    for position, (prefix, tx) in enumerate(tree):
        try:
            check_tx(prefix, tx)
        except Violation as e:
            raise e.at(position)


def is_correct(tree: TxTree) -> bool:
    try:
        check_tree(tree)
    except Violation:
        return False
    return True


_TOKEN = object()


class CorrectTx:
    """A transaction together with the tree it was checked against."""

    __slots__ = ("tree", "tx")

    def __init__(self, tree: TxTree, tx: TreeTx, *, _token=None):
        if _token is not _TOKEN:
            raise TypeError("CorrectTx is only produced by check_tx")
        self.tree = tree
        self.tx = tx

    def __repr__(self):
        return f"CorrectTx({type(self.tx).__name__} at position {self.tree.length})"


class CorrectTree:
    """A tree every transaction of which passed :func:`check_tx`.

    Only :meth:`genesis` and :func:`extend` create instances.
    """

    __slots__ = ("tree",)

    def __init__(self, tree: TxTree, *, _token=None):
        if _token is not _TOKEN:
            raise TypeError("use CorrectTree.genesis() or extend()")
        self.tree = tree

    @classmethod
    def genesis(cls, params: ChainParams = core.DEFAULT_PARAMS) -> "CorrectTree":
        return cls(TxTree.genesis(params), _token=_TOKEN)

    @classmethod
    def certify(cls, tree: TxTree) -> "CorrectTree":
        check_tree(tree)
        return cls(tree, _token=_TOKEN)

    @property
    def params(self) -> ChainParams:
        return self.tree.params

    def __len__(self) -> int:
        return self.tree.length

    def __repr__(self):
        return f"CorrectTree({self.tree!r})"


def genesis(params: ChainParams = core.DEFAULT_PARAMS) -> CorrectTree:
    return CorrectTree.genesis(params)


def extend(ct: CorrectTree, tx: TreeTx | CorrectTx) -> CorrectTree:
    if isinstance(tx, CorrectTx):
        if tx.tree is not ct.tree:
            raise ValueError("certificate was issued against a different tree")
        certified = tx
    else:
        if isinstance(tx, Normal):
            tx.inputs.check(len(ct.tree.utxo))
        certified = check_tx(ct.tree, tx)
    return CorrectTree(ct.tree.extend(certified.tx), _token=_TOKEN)


# -- reporting and reference recomputation -----------------------------------


def balances_from_utxo(tree: TxTree) -> Balances:
    totals: dict[bytes, int] = {}
    for entry in tree.utxo:
        totals[entry.address] = core.add_amounts(totals.get(entry.address, 0), entry.amount)
    return Balances(totals)


def utxo_total(tree: TxTree) -> int:
    return core.sum_amounts(e.amount for e in tree.utxo)


def minted_rewards(tree: TxTree) -> int:
    return core.sum_amounts(
        tree.params.reward(tx.time) for tx in tree.txs if isinstance(tx, Coinbase)
    )


def recompute_state(tree: TxTree) -> TreeState:
    """Rebuild UTXO list, fees, next block time and txids from the transactions alone."""
    params = tree.params
    entries: list[UtxoEntry] = []
    fees = 0
    next_time = 0
    txids: list[bytes] = []
    for position, tx in enumerate(tree.txs):
        if isinstance(tx, Normal):
            picked = selected_with_orig_indices(entries, tx.inputs)
            msg = Pair(
                MsgList(Pair(e.msg, Pair(nat_bytes(pk), nat_bytes(sig))) for _, e, (pk, sig) in picked),
                outputs_msg(tx.outputs),
            )
            spent = core.sum_amounts(e.amount for _, e, _ in picked)
            fees = core.add_amounts(fees, max(spent - sum_outputs(tx), 0))
            entries = remainder(entries, tx.inputs)
            maturation = 0
        else:
            msg = Pair(Nat(tx.time), outputs_msg(tx.outputs))
            fees = 0
            next_time = tx.time + 1
            maturation = tx.time + params.maturation
        txid = params.scheme.hash_msg(msg)
        txids.append(txid)
        for i, out in enumerate(tx.outputs):
            entries.append(
                UtxoEntry(OutputRef(position, i), out, txid, maturation, Pair(nat_bytes(txid), Nat(i)))
            )
    return TreeState(tuple(entries), fees, next_time, tuple(txids))


def cached_state(tree: TxTree) -> TreeState:
    return TreeState(
        tree.utxo, tree.pending_fees, tree.next_block_time, tuple(n.txid for n in tree.nodes())
    )
