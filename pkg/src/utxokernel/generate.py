"""Deterministic test-chain generation with optional injected faults.

The generator keeps a :class:`~utxokernel.utxo_tree.CorrectTree` of everything
it has emitted and only ever emits honest transactions through
:func:`~utxokernel.merkle.apply_merkle`, so a fault-free chain validates by
construction.  A faulty transaction is written to its target line but never
added to the generator's own state; the honest chain simply continues on the
next line.

Fault targets are file line numbers: line 1 is the header, so the first
transaction sits on line 2.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass
from typing import Iterable

from . import core
from .chainfile import Header, write_chain
from .merkle import MerkleCoinbase, MerkleInput, MerkleStandard, MerkleTx, apply_merkle, to_merkle
from .utxo_tree import (
    Coinbase,
    CorrectTree,
    Normal,
    OutputField,
    UtxoEntry,
    msg_to_sign,
)
from .indexed_list import TrackedSelection

GEN_MATURATION = 2
N_KEYS = 6


class FaultKind(enum.Enum):
    DOUBLE_SPEND = "DoubleSpend"
    BAD_SIGNATURE = "BadSignature"
    PREMATURE_SPEND = "PrematureSpend"
    WRONG_COINBASE_AMOUNT = "WrongCoinbaseAmount"
    WRONG_COINBASE_TIME = "WrongCoinbaseTime"
    DUPLICATE_COINBASE_OUTPUTS = "DuplicateCoinbaseOutputs"


# the violation each fault is expected to trigger
EXPECTED_VIOLATION = {
    FaultKind.DOUBLE_SPEND: "UnknownOutpoint",
    FaultKind.BAD_SIGNATURE: "BadSignature",
    FaultKind.PREMATURE_SPEND: "ImmatureInput",
    FaultKind.WRONG_COINBASE_AMOUNT: "WrongCoinbaseAmount",
    FaultKind.WRONG_COINBASE_TIME: "WrongCoinbaseTime",
    FaultKind.DUPLICATE_COINBASE_OUTPUTS: "WrongCoinbaseTime",
}


@dataclass(frozen=True)
class FaultSpec:
    kind: FaultKind
    line: int

    @classmethod
    def parse(cls, text: str) -> "FaultSpec":
        """Parse ``Kind@line``, e.g. ``BadSignature@5``."""
        kind, sep, line = text.partition("@")
        if not sep:
            raise ValueError(f"fault {text!r} must look like Kind@line")
        try:
            return cls(FaultKind(kind), int(line))
        except ValueError:
            names = ", ".join(k.value for k in FaultKind)
            raise ValueError(f"bad fault {text!r}; kinds are {names}") from None

    def __str__(self):
        return f"{self.kind.value}@{self.line}"


class FaultNotApplicable(ValueError):
    """The chain state at the target line cannot host the requested fault."""


class _Wallet:
    def __init__(self, rng: random.Random, scheme: core.CryptoScheme):
        self.scheme = scheme
        self.secrets: dict[bytes, bytes] = {}
        for _ in range(N_KEYS):
            secret, pk = scheme.keygen(rng)
            self.secrets[scheme.pubkey_to_address(pk)] = secret
        self.addresses = sorted(self.secrets)

    def sign(self, entry: UtxoEntry, outputs) -> tuple[bytes, bytes]:
        secret = self.secrets[entry.address]
        return self.scheme.public_key(secret), self.scheme.sign(msg_to_sign(entry, outputs), secret)


def _split(rng: random.Random, total: int, parts: int) -> list[int]:
    """Split ``total`` into ``parts`` positive amounts (fewer if ``total`` is too small)."""
    parts = max(1, min(parts, total))
    if parts == 1:
        return [total]
    cuts = sorted(rng.sample(range(1, total), parts - 1))
    bounds = [0, *cuts, total]
    return [b - a for a, b in zip(bounds, bounds[1:])]


class ChainGenerator:
    def __init__(self, seed: int, params: core.ChainParams | None = None):
        self.rng = random.Random(seed)
        self.params = params or core.ChainParams(maturation=GEN_MATURATION)
        self.wallet = _Wallet(self.rng, self.params.scheme)
        self.ct = CorrectTree.genesis(self.params)
        self.emitted: list[MerkleTx] = []
        self.honest: list[MerkleTx] = []
        self.standards_since_coinbase = 0
        self.burst = self.rng.randint(1, 4)

    # -- honest transactions -------------------------------------------------

    def _spendable(self) -> list[int]:
        now = self.ct.tree.next_block_time
        return [i for i, e in enumerate(self.ct.tree.utxo) if e.maturation <= now and e.amount > 0]

    def _immature(self) -> list[int]:
        now = self.ct.tree.next_block_time
        return [i for i, e in enumerate(self.ct.tree.utxo) if e.maturation > now and e.amount > 0]

    def _outputs(self, total: int, max_parts: int) -> tuple[OutputField, ...]:
        parts = self.rng.randint(1, max_parts)
        amounts = _split(self.rng, total, parts)
        return tuple(OutputField(a, self.rng.choice(self.wallet.addresses)) for a in amounts)

    def coinbase(self, time: int | None = None, extra: int = 0) -> Coinbase:
        tree = self.ct.tree
        t = tree.next_block_time if time is None else time
        total = core.add_amounts(tree.pending_fees, self.params.reward(t)) + extra
        return Coinbase(t, self._outputs(total, 2))

    def standard(self, positions: list[int]) -> Normal:
        tree = self.ct.tree
        entries = [tree.utxo[i] for i in positions]
        total_in = core.sum_amounts(e.amount for e in entries)
        fee = self.rng.randint(0, min(total_in // 10, 10_000))
        outputs = self._outputs(total_in - fee, 3)
        picks = [(i, self.wallet.sign(tree.utxo[i], outputs)) for i in positions]
        return Normal(TrackedSelection.from_orig_indices(picks, len(tree.utxo)), outputs)

    def _pick(self, candidates: list[int], most: int) -> list[int]:
        k = self.rng.randint(1, min(most, len(candidates)))
        return self.rng.sample(candidates, k)

    def next_honest(self) -> MerkleTx:
        spendable = self._spendable()
        if not spendable or self.standards_since_coinbase >= self.burst:
            tx = self.coinbase()
            self.standards_since_coinbase = 0
            self.burst = self.rng.randint(1, 4)
        else:
            tx = self.standard(self._pick(spendable, 3))
            self.standards_since_coinbase += 1
        m = to_merkle(self.ct, tx)
        self.ct = apply_merkle(self.ct, m)
        self.honest.append(m)
        return m

    # -- faults --------------------------------------------------------------

    def faulty(self, kind: FaultKind, line: int) -> MerkleTx:
        tree = self.ct.tree
        if kind is FaultKind.DOUBLE_SPEND:
            prior = [m for m in self.honest if isinstance(m, MerkleStandard)]
            if not prior:
                raise FaultNotApplicable(f"no earlier standard transaction to replay before line {line}")
            return prior[-1]
        if kind is FaultKind.BAD_SIGNATURE:
            spendable = self._spendable()
            if not spendable:
                raise FaultNotApplicable(f"nothing spendable at line {line}")
            m = to_merkle(tree, self.standard(self._pick(spendable, 3)))
            first = m.inputs[0]
            sig = bytes([first.signature[0] ^ 0x01]) + first.signature[1:]
            bad = MerkleInput(first.txid, first.output_nr, first.pubkey, sig)
            return MerkleStandard((bad, *m.inputs[1:]), m.outputs)
        if kind is FaultKind.PREMATURE_SPEND:
            immature = self._immature()
            if not immature:
                raise FaultNotApplicable(f"no immature output at line {line}")
            return to_merkle(tree, self.standard([self.rng.choice(immature)]))
        if kind is FaultKind.WRONG_COINBASE_AMOUNT:
            return to_merkle(tree, self.coinbase(extra=1))
        if kind is FaultKind.WRONG_COINBASE_TIME:
            return to_merkle(tree, self.coinbase(time=tree.next_block_time + 1))
        if kind is FaultKind.DUPLICATE_COINBASE_OUTPUTS:
            prior = [m for m in self.honest if isinstance(m, MerkleCoinbase)]
            if not prior:
                raise FaultNotApplicable(f"no earlier coinbase to duplicate before line {line}")
            return prior[-1]
        raise ValueError(f"unknown fault {kind!r}")

    def run(self, n_txs: int, faults: Iterable[FaultSpec] = ()) -> list[MerkleTx]:
        by_line: dict[int, FaultSpec] = {}
        for f in faults:
            if f.line in by_line:
                raise ValueError(f"two faults target line {f.line}")
            by_line[f.line] = f
        total = n_txs + len(by_line)
        for f in by_line.values():
            if not 2 <= f.line <= total + 1:
                raise ValueError(f"fault {f} outside transaction lines 2..{total + 1}")
        for line in range(2, total + 2):
            if line in by_line:
                self.emitted.append(self.faulty(by_line[line].kind, line))
            else:
                self.emitted.append(self.next_honest())
        return self.emitted


def generate(
    seed: int,
    n_txs: int,
    faults: Iterable[FaultSpec] = (),
    params: core.ChainParams | None = None,
) -> str:
    """Chain file text for ``seed``: ``n_txs`` honest transactions plus one line per fault."""
    gen = ChainGenerator(seed, params)
    txs = gen.run(n_txs, faults)
    return write_chain(Header.from_params(gen.params), txs)

