"""
Injecting faults into a generated chain
=======================================

The generator can replace any line with a broken transaction.  The validator
stops at that line and names the violation.
"""

import io
import json
import tempfile

from utxokernel.cli import main
from utxokernel.generate import FaultKind, FaultSpec, generate

with tempfile.NamedTemporaryFile("w+", suffix=".jsonl") as f:
    for kind in FaultKind:
        f.seek(0)
        f.truncate()
        f.write(generate(1, 20, [FaultSpec(kind, 8)]))
        f.flush()
        out = io.StringIO()
        code = main(["validate", f.name], out)
        report = json.loads(out.getvalue())
        print(f"{kind.value:>25}@8 -> exit {code}, line {report['line']}, {report['violation']['type']}")
