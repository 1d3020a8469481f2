"""Wire-form transactions that reference spent outputs by ``(txid, output number)``.

A tree transaction points into its parent's UTXO list by position; on the
wire an input instead names the outpoint it spends.  :func:`resolve` turns a
wire transaction back into a tree transaction by looking each outpoint up in
the current UTXO list, and :func:`apply_merkle` validates and appends it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from . import core
from .errors import AmbiguousOutpoint, DuplicateOutpoint, UnknownOutpoint
from .indexed_list import TrackedSelection
from .utxo_tree import (
    Coinbase,
    CorrectTree,
    CorrectTx,
    Normal,
    OutputField,
    TreeTx,
    TxTree,
    check_tx,
    extend,
    resolve_inputs,
    tx_id,
)


@dataclass(frozen=True)
class MerkleInput:
    txid: bytes
    output_nr: int
    pubkey: bytes
    signature: bytes

    def __post_init__(self):
        object.__setattr__(self, "txid", core.check_bytes(self.txid, core.DIGEST_SIZE, "txid"))
        if self.output_nr < 0:
            raise ValueError("output_nr must be non-negative")

    @property
    def outpoint(self) -> tuple[bytes, int]:
        return self.txid, self.output_nr


@dataclass(frozen=True)
class MerkleCoinbase:
    time: int
    outputs: tuple[OutputField, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "outputs", tuple(self.outputs))


@dataclass(frozen=True)
class MerkleStandard:
    inputs: tuple[MerkleInput, ...] = ()
    outputs: tuple[OutputField, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "outputs", tuple(self.outputs))


MerkleTx = Union[MerkleCoinbase, MerkleStandard]


def _tree(tree: TxTree | CorrectTree) -> TxTree:
    return tree.tree if isinstance(tree, CorrectTree) else tree


def merkle_inputs(tree: TxTree, inputs: TrackedSelection) -> tuple[MerkleInput, ...]:
    return tuple(
        MerkleInput(entry.producing_txid, entry.ref.output_index, pk, sig)
        for entry, pk, sig in resolve_inputs(tree, inputs)
    )


def to_merkle(tree: TxTree | CorrectTree, tx: TreeTx) -> MerkleTx:
    tree = _tree(tree)
    if isinstance(tx, Coinbase):
        return MerkleCoinbase(tx.time, tx.outputs)
    return MerkleStandard(merkle_inputs(tree, tx.inputs), tx.outputs)


def corresponds(m: MerkleTx, tree: TxTree | CorrectTree, tx: TreeTx) -> bool:
    tree = _tree(tree)
    if isinstance(m, MerkleCoinbase) and isinstance(tx, Coinbase):
        return m.time == tx.time and m.outputs == tx.outputs
    if isinstance(m, MerkleStandard) and isinstance(tx, Normal):
        return m.inputs == merkle_inputs(tree, tx.inputs) and m.outputs == tx.outputs
    return False


def resolve(tree: TxTree | CorrectTree, m: MerkleTx) -> TreeTx:
    """Find the tree transaction ``m`` stands for, or raise an outpoint error."""
    tree = _tree(tree)
    if isinstance(m, MerkleCoinbase):
        return Coinbase(m.time, m.outputs)
    remaining = list(tree.utxo)
    claimed: set[tuple[bytes, int]] = set()
    steps = []
    for k, inp in enumerate(m.inputs):
        if inp.outpoint in claimed:
            raise DuplicateOutpoint(
                f"input {k} claims {inp.txid.hex()}:{inp.output_nr} a second time", index=k
            )
        matches = [j for j, e in enumerate(remaining) if e.outpoint == inp.outpoint]
        if not matches:
            raise UnknownOutpoint(
                f"input {k}: no unspent output {inp.txid.hex()}:{inp.output_nr}", index=k
            )
        if len(matches) > 1:
            raise AmbiguousOutpoint(
                f"input {k}: {len(matches)} unspent outputs match {inp.txid.hex()}:{inp.output_nr}",
                index=k,
            )
        j = matches[0]
        claimed.add(inp.outpoint)
        del remaining[j]
        steps.append((j, (inp.pubkey, inp.signature)))
    return Normal(TrackedSelection(steps), m.outputs)


class CorrespondenceCertificate:
    """A checked transaction together with the wire form it was resolved from."""

    __slots__ = ("merkle", "correct_tx")

    def __init__(self, merkle: MerkleTx, correct_tx: CorrectTx):
        if not corresponds(merkle, correct_tx.tree, correct_tx.tx):
            raise ValueError("wire transaction does not correspond to the tree transaction")
        self.merkle = merkle
        self.correct_tx = correct_tx

    @property
    def tree_tx(self) -> TreeTx:
        return self.correct_tx.tx


def certify(ct: CorrectTree, m: MerkleTx) -> CorrespondenceCertificate:
    tx = resolve(ct, m)
    return CorrespondenceCertificate(m, check_tx(ct.tree, tx))


def apply_merkle(ct: CorrectTree, m: MerkleTx) -> CorrectTree:
    cert = certify(ct, m)
    return extend(ct, cert.correct_tx)


def merkle_tx_id(tree: TxTree | CorrectTree, m: MerkleTx) -> bytes:
    tree = _tree(tree)
    return tx_id(tree, resolve(tree, m))
