import os
import random
import sys

import pytest
from hypothesis import settings

sys.path.insert(0, os.path.dirname(__file__))

from utxokernel import core  # noqa: E402
from utxokernel.chainfile import parse_chain  # noqa: E402
from utxokernel.generate import generate  # noqa: E402
from utxokernel.merkle import apply_merkle  # noqa: E402
from utxokernel.utxo_tree import CorrectTree  # noqa: E402

settings.register_profile("default", deadline=None, max_examples=200)
settings.load_profile("default")

SCHEME = core.ToyScheme()


class Key:
    def __init__(self, seed):
        self.secret, self.pk = SCHEME.keygen(random.Random(seed))
        self.address = SCHEME.pubkey_to_address(self.pk)

    def __repr__(self):
        return f"Key({self.address.hex()[:8]})"


@pytest.fixture(scope="session")
def keys():
    return [Key(1000 + i) for i in range(4)]


def build_chain(seed, n_txs, params=None):
    """Generate a chain and fold it into a CorrectTree."""
    text = generate(seed, n_txs, params=params)
    chain = parse_chain(text)
    ct = CorrectTree.genesis(chain.header.params())
    for m in chain.txs:
        ct = apply_merkle(ct, m)
    return chain, ct


_CORPUS = {}


def corpus(seeds=range(100), n_txs=50):
    out = []
    for seed in seeds:
        key = (seed, n_txs)
        if key not in _CORPUS:
            _CORPUS[key] = build_chain(seed, n_txs)
        out.append(_CORPUS[key])
    return out


@pytest.fixture(scope="session")
def small_corpus():
    return corpus(range(10), 30)
