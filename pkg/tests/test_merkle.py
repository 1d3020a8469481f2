import pytest

from conftest import Key, corpus
from utxokernel import core
from utxokernel.core import COIN
from utxokernel.errors import AmbiguousOutpoint, DuplicateOutpoint, ImmatureInput, UnknownOutpoint
from utxokernel.indexed_list import TrackedSelection
from utxokernel.merkle import (
    CorrespondenceCertificate,
    MerkleCoinbase,
    MerkleInput,
    MerkleStandard,
    apply_merkle,
    certify,
    corresponds,
    merkle_tx_id,
    resolve,
    to_merkle,
)
from utxokernel.utxo_tree import Coinbase, CorrectTree, Normal, OutputField, TxTree, check_tx, extend, sign_input, tx_id

A, B = Key(20), Key(21)
R = 50 * COIN


def out(n, key):
    return OutputField(n, key.address)


def chain(maturation=0):
    ct = CorrectTree.genesis(core.ChainParams(maturation=maturation))
    return apply_merkle(ct, MerkleCoinbase(0, (out(R - 11, A), out(10, A), out(1, A))))


def pay(ct, positions, outputs):
    tree = ct.tree
    anns = [(i, sign_input(tree.utxo[i], outputs, A.secret, tree.params.scheme)) for i in positions]
    return Normal(TrackedSelection.from_orig_indices(anns, len(tree.utxo)), tuple(outputs))


def test_coinbase_identity():
    cb = Coinbase(3, (out(R, A),))
    assert to_merkle(TxTree.genesis(), cb) == MerkleCoinbase(3, (out(R, A),))


def test_one_input():
    ct = chain()
    tx = pay(ct, [1], [out(10, B)])
    m = to_merkle(ct, tx)
    (inp,) = m.inputs
    entry = ct.tree.utxo[1]
    pk, sig = tx.inputs.steps[0][1]
    assert (inp.txid, inp.output_nr, inp.pubkey, inp.signature) == (entry.producing_txid, 1, pk, sig)


def test_input_count_and_round_trip():
    ct = chain()
    tx = pay(ct, [2, 0, 1], [out(10, B)])
    m = to_merkle(ct, tx)
    assert len(m.inputs) == 3
    assert corresponds(m, ct, tx)
    assert resolve(ct, m) == tx
    assert merkle_tx_id(ct, m) == tx_id(ct.tree, tx)


def test_corresponds_negative():
    ct = chain()
    tx = pay(ct, [0], [out(10, B)])
    m = to_merkle(ct, tx)
    assert not corresponds(MerkleCoinbase(1, tx.outputs), ct, tx)
    assert not corresponds(m, ct, Coinbase(1, tx.outputs))
    assert not corresponds(MerkleStandard(m.inputs, (out(11, B),)), ct, tx)
    with pytest.raises(ValueError):
        CorrespondenceCertificate(MerkleStandard(m.inputs, (out(11, B),)), check_tx(ct.tree, tx))


def test_replay_rejected():
    ct = chain()
    m = to_merkle(ct, pay(ct, [0], [out(1, B)]))
    ct2 = apply_merkle(ct, m)
    with pytest.raises(UnknownOutpoint) as e:
        apply_merkle(ct2, m)
    assert e.value.index == 0


def test_unknown_txid():
    ct = chain()
    good = to_merkle(ct, pay(ct, [0], [out(1, B)])).inputs[0]
    bogus = MerkleInput(bytes(32), 0, good.pubkey, good.signature)
    with pytest.raises(UnknownOutpoint):
        resolve(ct, MerkleStandard((bogus,), (out(1, B),)))
    with pytest.raises(UnknownOutpoint):
        resolve(ct, MerkleStandard((MerkleInput(good.txid, 7, good.pubkey, good.signature),), (out(1, B),)))


def test_duplicate_outpoint():
    ct = chain()
    inp = to_merkle(ct, pay(ct, [0], [out(1, B)])).inputs[0]
    with pytest.raises(DuplicateOutpoint) as e:
        resolve(ct, MerkleStandard((inp, inp), (out(1, B),)))
    assert e.value.index == 1


def test_ambiguous_outpoint():
    # a raw tree with two identical coinbases at the same time has two entries per outpoint
    outs = (out(R, A),)
    tree = TxTree.genesis(core.ChainParams(maturation=0)).extend(Coinbase(0, outs))
    tree = tree.extend(Coinbase(0, outs))
    inp = MerkleInput(tree.utxo[0].producing_txid, 0, A.pk, bytes(32))
    with pytest.raises(AmbiguousOutpoint):
        resolve(tree, MerkleStandard((inp,), outs))


def test_premature_spend():
    ct = chain(maturation=100)
    with pytest.raises(ImmatureInput):
        apply_merkle(ct, to_merkle(ct, pay(ct, [0], [out(1, B)])))


def test_valid_coinbase_on_genesis():
    ct = apply_merkle(CorrectTree.genesis(), MerkleCoinbase(0, (out(R, A),)))
    assert len(ct) == 1
    assert certify(extend(CorrectTree.genesis(), Coinbase(0, (out(R, A),))), MerkleCoinbase(1, (out(R, A),))).tree_tx == Coinbase(1, (out(R, A),))


def test_round_trip_over_corpus():
    for _, ct in corpus(range(20), 40):
        for prefix, tx in ct.tree:
            m = to_merkle(prefix, tx)
            assert corresponds(m, prefix, tx)
            assert resolve(prefix, m) == tx
