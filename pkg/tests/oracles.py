"""Reference implementations used only by the tests.

Each oracle recomputes a quantity by a different route than the package:
brute-force bookkeeping on marked lists, a from-scratch encoder, or a
provenance tracker that never looks at the tree's own recursion.
"""

import hashlib

from utxokernel.core import MsgList, Nat, Pair


# -- encoding / hashing ------------------------------------------------------


def leb128(n):
    out = b""
    while True:
        b = n & 0x7F
        n >>= 7
        if n:
            out += bytes([b | 0x80])
        else:
            return out + bytes([b])


def ref_encode(m):
    if isinstance(m, Nat):
        return b"\x00" + leb128(m.n)
    if isinstance(m, Pair):
        return b"\x01" + ref_encode(m.left) + ref_encode(m.right)
    return b"\x02" + leb128(len(m.items)) + b"".join(ref_encode(x) for x in m.items)


def ref_hash(m):
    return hashlib.sha256(hashlib.sha256(ref_encode(m)).digest()).digest()


# -- indexed lists -----------------------------------------------------------


def brute_selection(l, steps):
    """Replay a selection on (orig index, value) pairs; return (picked, remainder)."""
    marked = list(enumerate(l))
    picked = []
    for i, ann in steps:
        orig, value = marked.pop(i)
        picked.append((orig, value, ann))
    return picked, marked


# -- transaction trees -------------------------------------------------------


class ProvenanceTracker:
    """Follows outputs through a tree using only outpoints, not the tree caches.

    ``live`` maps position in the current UTXO list order to the
    ``(txid, output number)`` that created the entry.
    """

    def __init__(self):
        self.live = []
        self.consumed = set()
        self.double_spends = 0

    def apply(self, tree_before, tx, txid):
        from utxokernel.utxo_tree import Normal

        if isinstance(tx, Normal):
            picked, rest = brute_selection(self.live, tx.inputs.steps)
            for _, outpoint, _ in picked:
                if outpoint in self.consumed:
                    self.double_spends += 1
                self.consumed.add(outpoint)
            self.live = [op for _, op in rest]
        self.live += [(txid, i) for i in range(len(tx.outputs))]

    def expected_msgs(self):
        return [Pair(Nat(int.from_bytes(t, "big")), Nat(i)) for t, i in self.live]


def conservation_sides(tree):
    """(sum of UTXO amounts + pending fees, sum of rewards over coinbase heights) by direct folding."""
    from utxokernel.utxo_tree import Coinbase

    minted = 0
    fees = 0
    held = {}
    for prefix, tx in tree:
        if isinstance(tx, Coinbase):
            minted += tree.params.reward(tx.time)
            fees = 0
        else:
            spent = [prefix.utxo[orig] for orig in _orig_positions(len(prefix.utxo), tx.inputs.steps)]
            for e in spent:
                del held[e.outpoint]
            fees += sum(e.amount for e in spent) - sum(o.amount for o in tx.outputs)
        txid = tree.prefix(prefix.length + 1).txid
        for i, o in enumerate(tx.outputs):
            held[(txid, i)] = o.amount
    return sum(held.values()) + fees, minted


def _orig_positions(n, steps):
    picked, _ = brute_selection(list(range(n)), steps)
    return [orig for orig, _, _ in picked]


def msg_of(value):
    """Tiny helper to make distinct Msg trees from plain Python data."""
    if isinstance(value, int):
        return Nat(value)
    if isinstance(value, tuple):
        return Pair(msg_of(value[0]), msg_of(value[1]))
    return MsgList(msg_of(v) for v in value)
