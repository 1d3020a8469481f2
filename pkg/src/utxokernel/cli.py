"""Command-line entry point: ``utxokernel {validate,report,txid,gen}``.

Exit codes: 0 valid, 1 invalid (first violation reported with its line),
2 malformed input or usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, TextIO

from . import core
from .chainfile import (
    ChainFile,
    ChainFileError,
    Header,
    is_header,
    parse_chain,
    parse_header_line,
    parse_tx_line,
    read_lines,
)
from .errors import Violation
from .generate import FaultNotApplicable, FaultSpec, generate
from .merkle import MerkleStandard, apply_merkle, resolve
from .utxo_tree import Coinbase, CorrectTree, TxTree, balances_from_utxo, minted_rewards, tx_id, utxo_total

EXIT_VALID = 0
EXIT_INVALID = 1
EXIT_MALFORMED = 2


@dataclass
class ValidationReport:
    accepted: bool
    tree: TxTree
    line: int | None = None
    violation: Violation | None = None

    @property
    def status(self) -> str:
        return "accepted" if self.accepted else "rejected"

    def conservation(self) -> dict:
        held = core.add_amounts(utxo_total(self.tree), self.tree.pending_fees)
        minted = minted_rewards(self.tree)
        return {"holds": held == minted, "utxo_plus_pending_fees": held, "minted": minted}

    def to_json(self) -> dict:
        tree = self.tree
        out: dict = {"status": self.status}
        if not self.accepted:
            out["line"] = self.line
            out["violation"] = self.violation.to_json()
        out.update(
            tx_count=tree.length,
            coinbase_count=sum(isinstance(tx, Coinbase) for tx in tree.txs),
            rewards_minted=minted_rewards(tree),
            pending_fees=tree.pending_fees,
            next_block_time=tree.next_block_time,
            utxo={"count": len(tree.utxo), "total": utxo_total(tree)},
            balances={a.hex(): v for a, v in balances_from_utxo(tree).sorted_items()},
            conservation=self.conservation(),
        )
        return out


def validate_chain(chain: ChainFile, header: Header | None = None) -> ValidationReport:
    """Fold every transaction of ``chain`` onto the genesis tree, stopping at the first violation."""
    params = (header or chain.header).params()
    ct = CorrectTree.genesis(params)
    for line, m in chain.numbered():
        try:
            ct = apply_merkle(ct, m)
        except Violation as e:
            return ValidationReport(False, ct.tree, line, e)
    return ValidationReport(True, ct.tree)


def _overrides(args: argparse.Namespace) -> dict:
    return {
        "reward_initial": getattr(args, "schedule_initial", None),
        "halving": getattr(args, "schedule_halving", None),
        "cutoff": getattr(args, "schedule_cutoff", None),
        "maturation": getattr(args, "maturation", None),
    }


def load_and_validate(path: str | Path, overrides: dict | None = None) -> ValidationReport:
    """Raises :class:`ChainFileError` for malformed input."""
    text = Path(path).read_text(encoding="utf-8")
    chain = parse_chain(text)
    header = chain.header.with_overrides(**(overrides or {}))
    try:
        header.params()
    except ValueError as e:
        raise ChainFileError(f"invalid override: {e}", 1) from None
    return validate_chain(chain, header)


# -- output helpers ----------------------------------------------------------


def coins(amount: int) -> str:
    whole, frac = divmod(amount, core.COIN)
    return f"{whole}.{frac:08d}"


def emit(obj, out: TextIO) -> None:
    out.write(json.dumps(obj, indent=2, sort_keys=False) + "\n")


def _malformed(e: ChainFileError | OSError, out: TextIO, err: TextIO) -> int:
    if isinstance(e, ChainFileError):
        emit({"status": "malformed", "line": e.line, "column": e.column, "error": str(e)}, out)
    else:
        emit({"status": "malformed", "error": str(e)}, out)
    err.write(f"error: {e}\n")
    return EXIT_MALFORMED


def _human_summary(report: ValidationReport, out: TextIO) -> None:
    data = report.to_json()
    if report.accepted:
        out.write(f"accepted: {data['tx_count']} transactions, {data['coinbase_count']} coinbases\n")
    else:
        v = data["violation"]
        out.write(f"rejected at line {data['line']}: {v['type']} ({v['detail']})\n")
    out.write(f"minted       {coins(data['rewards_minted'])}\n")
    out.write(f"pending fees {coins(data['pending_fees'])}\n")
    out.write(f"utxo         {data['utxo']['count']} entries, {coins(data['utxo']['total'])}\n")
    holds = "holds" if data["conservation"]["holds"] else "BROKEN"
    out.write(f"conservation {holds}\n")


# -- commands ----------------------------------------------------------------


def cmd_validate(args, out: TextIO = sys.stdout, err: TextIO = sys.stderr) -> int:
    try:
        report = load_and_validate(args.path, _overrides(args))
    except (ChainFileError, OSError) as e:
        return _malformed(e, out, err)
    if args.human:
        _human_summary(report, out)
    else:
        emit(report.to_json(), out)
    return EXIT_VALID if report.accepted else EXIT_INVALID


def utxo_rows(tree: TxTree) -> list[dict]:
    rows = [
        {
            "txid": e.producing_txid.hex(),
            "output_nr": e.ref.output_index,
            "amount": e.amount,
            "address": e.address.hex(),
            "maturation": e.maturation,
        }
        for e in tree.utxo
    ]
    rows.sort(key=lambda r: (r["txid"], r["output_nr"]))
    return rows


def report_view(tree: TxTree, which: str) -> dict:
    if which == "utxo":
        rows = utxo_rows(tree)
        return {"utxo": rows, "count": len(rows), "total": utxo_total(tree)}
    if which == "balances":
        balances = balances_from_utxo(tree)
        return {"balances": [{"address": a.hex(), "amount": v} for a, v in balances.sorted_items()], "total": balances.total()}
    if which == "fees":
        return {"pending_fees": tree.pending_fees, "next_block_time": tree.next_block_time}
    raise ValueError(f"unknown report {which!r}")


def cmd_report(args, out: TextIO = sys.stdout, err: TextIO = sys.stderr) -> int:
    try:
        report = load_and_validate(args.path, _overrides(args))
    except (ChainFileError, OSError) as e:
        return _malformed(e, out, err)
    if not report.accepted:
        emit(report.to_json(), out)
        return EXIT_INVALID
    view = report_view(report.tree, args.which)
    if not args.human:
        emit(view, out)
    elif args.which == "utxo":
        for r in view["utxo"]:
            out.write(f"{r['txid']}:{r['output_nr']}  {coins(r['amount']):>20}  {r['address']}\n")
        out.write(f"total {coins(view['total'])}\n")
    elif args.which == "balances":
        for r in view["balances"]:
            out.write(f"{r['address']}  {coins(r['amount']):>20}\n")
        out.write(f"total {coins(view['total'])}\n")
    else:
        out.write(f"pending fees {coins(view['pending_fees'])}\n")
    return EXIT_VALID


def _read_single_tx(path: str | Path, scheme_header: Header | None):
    lines = read_lines(Path(path).read_text(encoding="utf-8"))
    if not lines:
        raise ChainFileError("no transaction in file", 1)
    header = scheme_header
    try:
        first = json.loads(lines[0][1])
    except json.JSONDecodeError:
        first = None
    if is_header(first):
        header = parse_header_line(lines[0][1], lines[0][0])
        lines = lines[1:]
    if len(lines) != 1:
        raise ChainFileError(f"expected exactly one transaction, found {len(lines)}", lines[-1][0] if lines else 1)
    header = header or Header()
    lineno, text = lines[0]
    return header, parse_tx_line(text, lineno, core.scheme_by_id(header.scheme))


def cmd_txid(args, parser: argparse.ArgumentParser | None = None, out: TextIO = sys.stdout, err: TextIO = sys.stderr) -> int:
    try:
        context_report = None
        context_header = None
        if args.context:
            context_report = load_and_validate(args.context, _overrides(args))
            context_header = Header.from_params(context_report.tree.params)
        header, m = _read_single_tx(args.path, context_header)
    except (ChainFileError, OSError) as e:
        return _malformed(e, out, err)
    if isinstance(m, MerkleStandard) and context_report is None:
        message = "a standard transaction needs --context CHAIN to resolve its inputs"
        if parser is not None:
            parser.error(message)
        err.write(f"error: {message}\n")
        return EXIT_MALFORMED
    if context_report is not None and not context_report.accepted:
        emit(context_report.to_json(), out)
        return EXIT_INVALID
    tree = context_report.tree if context_report else TxTree.genesis(header.params())
    try:
        txid = tx_id(tree, resolve(tree, m))
    except Violation as e:
        emit({"status": "unresolved", "violation": e.to_json()}, out)
        return EXIT_INVALID
    out.write(txid.hex() + "\n")
    return EXIT_VALID


def cmd_gen(args, out: TextIO = sys.stdout, err: TextIO = sys.stderr) -> int:
    header = Header(maturation=2).with_overrides(**_overrides(args))
    try:
        params = header.params()
        faults = [FaultSpec.parse(f) for f in args.fault]
        text = generate(args.seed, args.txs, faults, params)
    except (FaultNotApplicable, ValueError) as e:
        err.write(f"error: {e}\n")
        return EXIT_MALFORMED
    out.write(text)
    return EXIT_VALID


# -- argument parsing --------------------------------------------------------


def _add_config(p: argparse.ArgumentParser) -> None:
    p.add_argument("--schedule-initial", type=int, metavar="UNITS", help="initial block reward (atomic units)")
    p.add_argument("--schedule-halving", type=int, metavar="BLOCKS", help="blocks between reward halvings")
    p.add_argument("--schedule-cutoff", type=int, metavar="HEIGHT", help="height from which the reward is zero")
    p.add_argument("--maturation", type=int, metavar="BLOCKS", help="coinbase maturation window")


def _add_format(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--json", dest="human", action="store_false", help="machine-readable JSON (default)")
    g.add_argument("--human", dest="human", action="store_true", help="human-readable text, amounts in coins")
    p.set_defaults(human=False)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="utxokernel", description="Validate, inspect and generate UTXO chain files.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate a chain file")
    p.add_argument("path")
    _add_config(p)
    _add_format(p)

    p = sub.add_parser("report", help="show the UTXO set, balances or pending fees of a valid chain")
    p.add_argument("path")
    p.add_argument("which", choices=["utxo", "balances", "fees"])
    _add_config(p)
    _add_format(p)

    p = sub.add_parser("txid", help="print the id of a single transaction")
    p.add_argument("path")
    p.add_argument("--context", metavar="CHAIN", help="chain file the transaction spends from")
    _add_config(p)
    p.set_defaults(subparser=p)

    p = sub.add_parser("gen", help="generate a deterministic test chain")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--txs", type=int, default=20, help="number of honest transactions")
    p.add_argument("--fault", action="append", default=[], metavar="KIND@LINE",
                   help="inject a fault at a file line (repeatable), e.g. BadSignature@5")
    _add_config(p)
    return parser


def main(argv: Sequence[str] | None = None, out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "validate":
        return cmd_validate(args, out, err)
    if args.command == "report":
        return cmd_report(args, out, err)
    if args.command == "txid":
        return cmd_txid(args, args.subparser, out, err)
    return cmd_gen(args, out, err)


if __name__ == "__main__":
    sys.exit(main())
