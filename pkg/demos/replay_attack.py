"""
Replaying a payment in both ledger models
=========================================

The same signed payment is submitted twice.  The account model has no way to
tell the copies apart; the transaction tree does, because the second copy
names an output that is already spent.
"""

import random

from utxokernel import core
from utxokernel.account_ledger import Block, Chain, TxField, UnsignedTx, final_ledger, is_correct_chain, sign_tx
from utxokernel.errors import UnknownOutpoint
from utxokernel.indexed_list import TrackedSelection
from utxokernel.merkle import apply_merkle, to_merkle
from utxokernel.utxo_tree import Coinbase, CorrectTree, Normal, OutputField, extend, sign_input

scheme = core.ToyScheme()
rng = random.Random(0)
alice_secret, alice_pk = scheme.keygen(rng)
bob_secret, bob_pk = scheme.keygen(rng)
alice, bob = scheme.pubkey_to_address(alice_pk), scheme.pubkey_to_address(bob_pk)
reward = core.RewardSchedule().initial_reward

# account model: alice mines block 0, then pays bob 10 coins in blocks 1 and 2
payment = sign_tx(UnsignedTx((TxField(10 * core.COIN, alice),), (TxField(10 * core.COIN, bob),)), [alice_secret])
chain = Chain((
    Block((TxField(reward, alice),)),
    Block((TxField(reward, bob),), (payment,)),
    Block((TxField(reward, bob),), (payment,)),
))
print("account model accepts the replay:", is_correct_chain(chain))
print("bob received", (final_ledger(chain)[bob] - 2 * reward) // core.COIN, "coins from alice")

# tree model: alice's coinbase output is spent once
params = core.ChainParams(maturation=0)
ct = extend(CorrectTree.genesis(params), Coinbase(0, (OutputField(reward, alice),)))
outputs = (OutputField(10 * core.COIN, bob), OutputField(reward - 10 * core.COIN, alice))
spend = Normal(TrackedSelection([(0, sign_input(ct.tree.utxo[0], outputs, alice_secret, scheme))]), outputs)
wire = to_merkle(ct, spend)
ct = apply_merkle(ct, wire)

try:
    apply_merkle(ct, wire)
except UnknownOutpoint as e:
    print("tree model rejects the replay:", e.kind, "-", e)
