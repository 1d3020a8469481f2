"""JSON-lines chain files.

Line 1 is a header naming the format version, the reward schedule, the
maturation window and the crypto scheme.  Every following line is one wire
transaction::

    {"format":1,"reward_initial":5000000000,"halving":52500,"cutoff":6930000,"maturation":100,"scheme":"toy-v1"}
    {"type":"coinbase","time":0,"outputs":[{"amount":5000000000,"address":"<hex20>"}]}
    {"type":"standard","inputs":[{"txid":"<hex32>","output_nr":0,"pubkey":"<hex>","signature":"<hex>"}],"outputs":[...]}

Byte strings are lowercase hex, amounts are integers in atomic units.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Iterable

from . import core
from .merkle import MerkleCoinbase, MerkleInput, MerkleStandard, MerkleTx
from .utxo_tree import OutputField

FORMAT_VERSION = 1


class ChainFileError(ValueError):
    """Malformed chain file; ``line`` and ``column`` are 1-based."""

    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Header:
    reward_initial: int = core.RewardSchedule().initial_reward
    halving: int = core.RewardSchedule().halving_interval
    cutoff: int = core.RewardSchedule().cutoff_height
    maturation: int = core.DEFAULT_MATURATION
    scheme: str = core.ToyScheme.scheme_id
    format: int = FORMAT_VERSION

    def params(self) -> core.ChainParams:
        schedule = core.RewardSchedule(self.reward_initial, self.halving, self.cutoff)
        return core.ChainParams(schedule, self.maturation, core.scheme_by_id(self.scheme))

    @classmethod
    def from_params(cls, params: core.ChainParams) -> "Header":
        s = params.schedule
        return cls(s.initial_reward, s.halving_interval, s.cutoff_height, params.maturation, params.scheme.scheme_id)

    def with_overrides(self, **overrides: int | None) -> "Header":
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})

    def to_json(self) -> dict:
        return {
            "format": self.format,
            "reward_initial": self.reward_initial,
            "halving": self.halving,
            "cutoff": self.cutoff,
            "maturation": self.maturation,
            "scheme": self.scheme,
        }


@dataclass(frozen=True)
class ChainFile:
    header: Header
    txs: tuple[MerkleTx, ...]
    line_numbers: tuple[int, ...] = ()

    def numbered(self) -> list[tuple[int, MerkleTx]]:
        numbers = self.line_numbers or range(2, len(self.txs) + 2)
        return list(zip(numbers, self.txs))


def dumps_line(obj: dict) -> str:
    return json.dumps(obj, separators=(",", ":"))


# -- encoding ----------------------------------------------------------------


def output_to_json(o: OutputField) -> dict:
    return {"amount": o.amount, "address": o.address.hex()}


def tx_to_json(m: MerkleTx) -> dict:
    if isinstance(m, MerkleCoinbase):
        return {"type": "coinbase", "time": m.time, "outputs": [output_to_json(o) for o in m.outputs]}
    return {
        "type": "standard",
        "inputs": [
            {
                "txid": i.txid.hex(),
                "output_nr": i.output_nr,
                "pubkey": i.pubkey.hex(),
                "signature": i.signature.hex(),
            }
            for i in m.inputs
        ],
        "outputs": [output_to_json(o) for o in m.outputs],
    }


def write_chain(header: Header, txs: Iterable[MerkleTx]) -> str:
    lines = [dumps_line(header.to_json())]
    lines.extend(dumps_line(tx_to_json(m)) for m in txs)
    return "\n".join(lines) + "\n"


# -- decoding ----------------------------------------------------------------


class _Schema(Exception):
    pass


def _get(obj: Any, key: str, kind: type) -> Any:
    if not isinstance(obj, dict):
        raise _Schema(f"expected an object, got {type(obj).__name__}")
    if key not in obj:
        raise _Schema(f"missing field {key!r}")
    value = obj[key]
    if kind is int and (isinstance(value, bool) or not isinstance(value, int)):
        raise _Schema(f"field {key!r} must be an integer")
    if kind is not int and not isinstance(value, kind):
        raise _Schema(f"field {key!r} must be {kind.__name__}")
    if kind is int and value < 0:
        raise _Schema(f"field {key!r} must be non-negative")
    return value


def _hex(obj: dict, key: str, size: int | None) -> bytes:
    text = _get(obj, key, str)
    if text != text.lower():
        raise _Schema(f"field {key!r} must be lowercase hex")
    try:
        raw = bytes.fromhex(text)
    except ValueError:
        raise _Schema(f"field {key!r} is not valid hex") from None
    if size is not None and len(raw) != size:
        raise _Schema(f"field {key!r} must be {size} bytes, got {len(raw)}")
    return raw


def _outputs(obj: dict) -> tuple[OutputField, ...]:
    items = _get(obj, "outputs", list)
    out = []
    for item in items:
        amount = _get(item, "amount", int)
        if amount > core.MAX_AMOUNT:
            raise _Schema("output amount exceeds 64 bits")
        out.append(OutputField(amount, _hex(item, "address", core.ADDRESS_SIZE)))
    return tuple(out)


def tx_from_json(obj: Any, scheme: core.CryptoScheme) -> MerkleTx:
    kind = _get(obj, "type", str)
    if kind == "coinbase":
        return MerkleCoinbase(_get(obj, "time", int), _outputs(obj))
    if kind == "standard":
        inputs = []
        for item in _get(obj, "inputs", list):
            inputs.append(
                MerkleInput(
                    _hex(item, "txid", core.DIGEST_SIZE),
                    _get(item, "output_nr", int),
                    _hex(item, "pubkey", scheme.pubkey_size),
                    _hex(item, "signature", scheme.signature_size),
                )
            )
        return MerkleStandard(tuple(inputs), _outputs(obj))
    raise _Schema(f"unknown transaction type {kind!r}")


def header_from_json(obj: Any) -> Header:
    fmt = _get(obj, "format", int)
    if fmt != FORMAT_VERSION:
        raise _Schema(f"unsupported format version {fmt}")
    scheme = _get(obj, "scheme", str)
    if scheme not in core.SCHEMES:
        raise _Schema(f"unknown crypto scheme {scheme!r}")
    halving = _get(obj, "halving", int)
    if halving == 0:
        raise _Schema("halving interval must be positive")
    return Header(
        reward_initial=_get(obj, "reward_initial", int),
        halving=halving,
        cutoff=_get(obj, "cutoff", int),
        maturation=_get(obj, "maturation", int),
        scheme=scheme,
        format=fmt,
    )


def _load(text: str, lineno: int) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ChainFileError(e.msg, lineno, e.colno) from None


def parse_tx_line(text: str, lineno: int, scheme: core.CryptoScheme) -> MerkleTx:
    obj = _load(text, lineno)
    try:
        return tx_from_json(obj, scheme)
    except (_Schema, ValueError) as e:
        raise ChainFileError(str(e), lineno) from None


def parse_header_line(text: str, lineno: int = 1) -> Header:
    obj = _load(text, lineno)
    try:
        return header_from_json(obj)
    except (_Schema, ValueError) as e:
        raise ChainFileError(str(e), lineno) from None


def is_header(obj: Any) -> bool:
    return isinstance(obj, dict) and "format" in obj and "type" not in obj


def read_lines(text: str) -> list[tuple[int, str]]:
    """Non-blank lines with their 1-based line numbers."""
    return [(n, line) for n, line in enumerate(text.splitlines(), start=1) if line.strip()]


def parse_chain(text: str) -> ChainFile:
    lines = read_lines(text)
    if not lines:
        raise ChainFileError("empty chain file: header missing", 1)
    header_no, header_text = lines[0]
    header = parse_header_line(header_text, header_no)
    scheme = core.scheme_by_id(header.scheme)
    txs = tuple(parse_tx_line(t, n, scheme) for n, t in lines[1:])
    return ChainFile(header, txs, tuple(n for n, _ in lines[1:]))


def read_chain(path: str | Path) -> ChainFile:
    return parse_chain(Path(path).read_text(encoding="utf-8"))
