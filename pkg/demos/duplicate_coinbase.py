"""
Why a coinbase message carries its block time
=============================================

Two coinbases paying the same miner the same amount at consecutive heights
would share an id if the time were left out of the hashed message.  We show
the ids with the real scheme and with a variant hash that drops the time.
"""

from utxokernel import core
from utxokernel.core import MsgList, Nat, Pair
from utxokernel.utxo_tree import Coinbase, CorrectTree, OutputField, extend

miner = bytes(20)
outputs = (OutputField(core.RewardSchedule().initial_reward, miner),)


class TimeBlind(core.ToyScheme):
    scheme_id = "time-blind"

    def hash_msg(self, m):
        if isinstance(m, Pair) and isinstance(m.left, Nat) and isinstance(m.right, MsgList):
            m = m.right
        return super().hash_msg(m)


for scheme in (core.ToyScheme(), TimeBlind()):
    ct = CorrectTree.genesis(core.ChainParams(scheme=scheme))
    first = extend(ct, Coinbase(0, outputs))
    second = extend(first, Coinbase(1, outputs))
    a, b = first.tree.txid.hex(), second.tree.txid.hex()
    print(f"{scheme.scheme_id:>10}: {a[:16]}.. {b[:16]}..  same id: {a == b}")
