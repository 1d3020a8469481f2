"""
Where the coins are
===================

On any valid chain every minted coin is either unspent or is a fee waiting
for the next coinbase.  We check this on a few generated chains.
"""

from utxokernel.chainfile import parse_chain
from utxokernel.generate import generate
from utxokernel.merkle import apply_merkle
from utxokernel.utxo_tree import CorrectTree, minted_rewards, utxo_total

for seed in range(5):
    chain = parse_chain(generate(seed, 40))
    ct = CorrectTree.genesis(chain.header.params())
    for m in chain.txs:
        ct = apply_merkle(ct, m)
    tree = ct.tree
    held = utxo_total(tree) + tree.pending_fees
    print(f"seed {seed}: utxo {utxo_total(tree):>13} + fees {tree.pending_fees:>6} = {held}  minted {minted_rewards(tree)}")
