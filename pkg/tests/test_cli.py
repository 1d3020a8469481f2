import io
import json

import pytest

from conftest import SCHEME, Key
from oracles import ref_hash
from utxokernel.chainfile import Header, write_chain
from utxokernel.merkle import MerkleCoinbase, MerkleInput, MerkleStandard, apply_merkle
from utxokernel.utxo_tree import CorrectTree, OutputField, sign_input
from utxokernel.chainfile import parse_chain
from utxokernel.cli import EXIT_INVALID, EXIT_MALFORMED, EXIT_VALID, main
from utxokernel.core import COIN, MsgList, Nat, Pair
from utxokernel.generate import EXPECTED_VIOLATION, FaultKind, FaultSpec, generate

HEADER = '{"format":1,"reward_initial":5000000000,"halving":52500,"cutoff":6930000,"maturation":100,"scheme":"toy-v1"}'
ADDR = "b3bbd7e7d0c0d19b7e837f72c9b051c6a86f6f58"
COINBASE_TXID = "d158d7487ac1f49d44865d7efcdcf20d887ed36e618daef55fdfe5cb8e84651e"
COINBASE_TXID_T8 = "10d22eba939a8c3e25ca5225fde8e37314e3ccfe2f3f13ae08ba47b2b2880fad"


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    try:
        code = main(list(argv), out, err)
    except SystemExit as e:
        code = e.code
    return code, out.getvalue(), err.getvalue()


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def coinbase_line(time, amount=50 * COIN, addr=ADDR):
    return json.dumps({"type": "coinbase", "time": time, "outputs": [{"amount": amount, "address": addr}]})


class TestValidate:
    def test_generated_valid(self, tmp_path):
        path = write(tmp_path, "c.jsonl", generate(1, 20))
        code, out, _ = run("validate", path)
        report = json.loads(out)
        assert code == EXIT_VALID
        assert report["status"] == "accepted"
        assert report["tx_count"] == 20
        assert report["conservation"]["holds"]

    def test_double_spend_line_7(self, tmp_path):
        path = write(tmp_path, "c.jsonl", generate(1, 20, [FaultSpec(FaultKind.DOUBLE_SPEND, 7)]))
        code, out, _ = run("validate", path)
        report = json.loads(out)
        assert code == EXIT_INVALID
        assert report["line"] == 7
        assert report["violation"]["type"] == "UnknownOutpoint"

    def test_truncated_json(self, tmp_path):
        text = generate(1, 5)
        path = write(tmp_path, "c.jsonl", text[: len(text) - 10])
        code, out, _ = run("validate", path)
        assert code == EXIT_MALFORMED
        assert json.loads(out)["line"] == 6

    def test_missing_file(self, tmp_path):
        code, _, _ = run("validate", str(tmp_path / "absent"))
        assert code == EXIT_MALFORMED

    def test_human(self, tmp_path):
        path = write(tmp_path, "c.jsonl", generate(1, 20))
        code, out, _ = run("validate", path, "--human")
        assert code == 0
        assert out.startswith("accepted: 20 transactions")

    def test_maturation_override(self, tmp_path):
        # the generator's window is 2; forcing 100 makes the first spend premature
        path = write(tmp_path, "c.jsonl", generate(1, 20))
        code, out, _ = run("validate", path, "--maturation", "100")
        assert code == EXIT_INVALID
        assert json.loads(out)["violation"]["type"] == "ImmatureInput"

    def test_schedule_override(self, tmp_path):
        path = write(tmp_path, "c.jsonl", HEADER + "\n" + coinbase_line(0, 7) + "\n")
        assert run("validate", path)[0] == EXIT_INVALID
        assert run("validate", path, "--schedule-initial", "7")[0] == EXIT_VALID

    def test_usage_error(self):
        assert run("validate")[0] == 2
        assert run("frobnicate")[0] == 2


class TestReport:
    def test_single_coinbase(self, tmp_path):
        path = write(tmp_path, "c.jsonl", HEADER + "\n" + coinbase_line(0) + "\n")
        code, out, _ = run("report", path, "utxo")
        view = json.loads(out)
        assert code == 0
        assert len(view["utxo"]) == 1
        assert view["utxo"][0]["amount"] == 50 * COIN

    def test_sorted_and_consistent(self, tmp_path):
        path = write(tmp_path, "c.jsonl", generate(5, 40))
        utxo = json.loads(run("report", path, "utxo")[1])
        bal = json.loads(run("report", path, "balances")[1])
        keys = [(r["txid"], r["output_nr"]) for r in utxo["utxo"]]
        assert keys == sorted(keys)
        addrs = [r["address"] for r in bal["balances"]]
        assert addrs == sorted(addrs)
        assert bal["total"] == utxo["total"] == sum(r["amount"] for r in utxo["utxo"])

    def test_deterministic(self, tmp_path):
        path = write(tmp_path, "c.jsonl", generate(5, 40))
        for which in ("utxo", "balances", "fees"):
            for fmt in ("--json", "--human"):
                assert run("report", path, which, fmt) == run("report", path, which, fmt)

    def test_fees_before_coinbase(self, tmp_path):
        key = Key(30)
        header = Header(maturation=0)
        ct = CorrectTree.genesis(header.params())
        cb = MerkleCoinbase(0, (OutputField(50 * COIN, key.address),))
        ct = apply_merkle(ct, cb)
        entry = ct.tree.utxo[0]
        outputs = (OutputField(50 * COIN - 5, key.address),)
        pay = MerkleStandard(
            (MerkleInput(entry.producing_txid, 0, key.pk, sign_input(entry, outputs, key.secret, SCHEME)[1]),),
            outputs,
        )
        path = write(tmp_path, "c.jsonl", write_chain(header, [cb, pay]))
        code, out, _ = run("report", path, "fees")
        assert code == 0
        assert json.loads(out)["pending_fees"] == 5

    def test_invalid_chain(self, tmp_path):
        path = write(tmp_path, "c.jsonl", generate(1, 20, [FaultSpec(FaultKind.BAD_SIGNATURE, 5)]))
        assert run("report", path, "utxo")[0] == EXIT_INVALID


class TestTxid:
    def test_vector(self, tmp_path):
        path = write(tmp_path, "tx.jsonl", coinbase_line(7) + "\n")
        code, out, _ = run("txid", path)
        assert code == 0
        assert out.strip() == COINBASE_TXID
        m = Pair(Nat(7), MsgList([Pair(Nat(50 * COIN), Nat(int(ADDR, 16)))]))
        assert ref_hash(m).hex() == COINBASE_TXID

    def test_time_plus_one(self, tmp_path):
        path = write(tmp_path, "tx.jsonl", HEADER + "\n" + coinbase_line(8) + "\n")
        out = run("txid", path)[1].strip()
        assert out == COINBASE_TXID_T8 != COINBASE_TXID

    def test_standard_needs_context(self, tmp_path, capsys):
        chain = parse_chain(generate(1, 10))
        lines = generate(1, 10).splitlines()
        k = next(i for i, m in enumerate(chain.txs) if hasattr(m, "inputs"))
        path = write(tmp_path, "tx.jsonl", lines[k + 1] + "\n")
        code, _, _ = run("txid", path)
        assert code == EXIT_MALFORMED
        assert "--context" in capsys.readouterr().err
        ctx = write(tmp_path, "ctx.jsonl", "\n".join(lines[: k + 1]) + "\n")
        code, out, _ = run("txid", path, "--context", ctx)
        assert code == 0 and len(out.strip()) == 64
        # the spent output is gone in the full chain
        full = write(tmp_path, "full.jsonl", "\n".join(lines) + "\n")
        code, out, _ = run("txid", path, "--context", full)
        assert code == EXIT_INVALID
        assert json.loads(out)["violation"]["type"] == "UnknownOutpoint"

    def test_matches_chain_txids(self, tmp_path):
        from utxokernel.cli import load_and_validate

        text = generate(2, 12)
        lines = text.splitlines()
        report = load_and_validate(write(tmp_path, "full.jsonl", text))
        txids = [n.txid.hex() for n in report.tree.nodes()]
        for k in range(len(lines) - 1):
            ctx = write(tmp_path, f"ctx{k}.jsonl", "\n".join(lines[: k + 1]) + "\n")
            tx = write(tmp_path, f"tx{k}.jsonl", lines[0] + "\n" + lines[k + 1] + "\n")
            assert run("txid", tx, "--context", ctx)[1].strip() == txids[k]


class TestGen:
    def test_deterministic(self):
        assert run("gen", "--seed", "9", "--txs", "30") == run("gen", "--seed", "9", "--txs", "30")
        assert run("gen", "--seed", "9")[1] != run("gen", "--seed", "10")[1]

    def test_seed_1_validates(self, tmp_path):
        code, text, _ = run("gen", "--seed", "1", "--txs", "20")
        assert code == 0
        assert run("validate", write(tmp_path, "c.jsonl", text))[0] == 0

    def test_bad_signature_at_5(self, tmp_path):
        _, text, _ = run("gen", "--seed", "1", "--txs", "20", "--fault", "BadSignature@5")
        code, out, _ = run("validate", write(tmp_path, "c.jsonl", text))
        report = json.loads(out)
        assert (code, report["line"], report["violation"]["type"]) == (1, 5, "BadSignature")

    @pytest.mark.parametrize("seed", range(100))
    def test_closure(self, seed, tmp_path):
        assert run("validate", write(tmp_path, "c.jsonl", generate(seed, 30)))[0] == 0

    @pytest.mark.parametrize("kind", list(FaultKind))
    def test_each_fault(self, kind, tmp_path):
        line = 9
        text = generate(3, 20, [FaultSpec(kind, line)])
        code, out, _ = run("validate", write(tmp_path, "c.jsonl", text))
        report = json.loads(out)
        assert code == EXIT_INVALID
        assert report["line"] == line
        assert report["violation"]["type"] == EXPECTED_VIOLATION[kind]

    def test_two_faults(self, tmp_path):
        faults = [FaultSpec(FaultKind.WRONG_COINBASE_TIME, 6), FaultSpec(FaultKind.BAD_SIGNATURE, 12)]
        lines = generate(1, 20, faults).splitlines()
        first = json.loads(run("validate", write(tmp_path, "a.jsonl", "\n".join(lines) + "\n"))[1])
        assert first["line"] == 6
        del lines[5]
        second = json.loads(run("validate", write(tmp_path, "b.jsonl", "\n".join(lines) + "\n"))[1])
        assert (second["line"], second["violation"]["type"]) == (11, "BadSignature")

    def test_bad_fault_specs(self):
        assert run("gen", "--fault", "Nonsense@3")[0] == EXIT_MALFORMED
        assert run("gen", "--fault", "BadSignature")[0] == EXIT_MALFORMED
        assert run("gen", "--txs", "5", "--fault", "BadSignature@99")[0] == EXIT_MALFORMED
        # nothing to replay on the first line
        assert run("gen", "--fault", "DoubleSpend@2")[0] == EXIT_MALFORMED
