"""Executable validation kernel for two Bitcoin ledger models.

``account_ledger``
    balances per address, signed multi-input/multi-output transactions, blocks.
``utxo_tree``
    a linear transaction tree with unspent outputs, fees, coinbase maturation
    and transaction ids.
``merkle``
    the wire form, where inputs name the ``(txid, output number)`` they spend.
"""

from .core import (
    COIN,
    ChainParams,
    CryptoScheme,
    Msg,
    MsgList,
    Nat,
    Pair,
    RewardSchedule,
    ToyScheme,
    block_reward,
    encode_msg,
    hash_msg,
    maturation_window,
    pubkey_to_address,
    verify,
)
from .errors import IndexOutOfBounds, Violation
from .indexed_list import TrackedSelection
from .merkle import MerkleCoinbase, MerkleInput, MerkleStandard, apply_merkle, resolve, to_merkle
from .utxo_tree import Coinbase, CorrectTree, Normal, OutputField, TxTree, check_tree, check_tx, extend

__version__ = "0.1.0"

__all__ = [
    "apply_merkle",
    "block_reward",
    "ChainParams",
    "check_tree",
    "check_tx",
    "COIN",
    "Coinbase",
    "CorrectTree",
    "CryptoScheme",
    "encode_msg",
    "extend",
    "hash_msg",
    "IndexOutOfBounds",
    "maturation_window",
    "MerkleCoinbase",
    "MerkleInput",
    "MerkleStandard",
    "Msg",
    "MsgList",
    "Nat",
    "Normal",
    "OutputField",
    "Pair",
    "pubkey_to_address",
    "resolve",
    "RewardSchedule",
    "to_merkle",
    "ToyScheme",
    "TrackedSelection",
    "TxTree",
    "verify",
    "Violation",
]
