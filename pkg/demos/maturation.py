"""
Coinbase maturation
===================

A coinbase output minted at time t can be spent once the next block time
reaches t + 100.  We mint at time 0 and try to spend after every block.
"""

from utxokernel import core
from utxokernel.errors import ImmatureInput
from utxokernel.indexed_list import TrackedSelection
from utxokernel.utxo_tree import Coinbase, CorrectTree, Normal, OutputField, check_tx, extend, sign_input

scheme = core.ToyScheme()
secret = bytes(range(32))
owner = scheme.pubkey_to_address(scheme.public_key(secret))
params = core.ChainParams()

ct = extend(CorrectTree.genesis(params), Coinbase(0, (OutputField(params.reward(0), owner),)))
entry = ct.tree.utxo[0]
outputs = (OutputField(entry.amount, bytes(20)),)
print("output matures at", entry.maturation)

t = 1
while True:
    spend = Normal(TrackedSelection([(0, sign_input(entry, outputs, secret, scheme))]), outputs)
    try:
        check_tx(ct.tree, spend)
        break
    except ImmatureInput:
        pass
    # an empty block: a coinbase paying the reward to someone else
    ct = extend(ct, Coinbase(t, (OutputField(params.reward(t), bytes(20)),)))
    t += 1

print("first accepted spend at next_block_time", ct.tree.next_block_time)
