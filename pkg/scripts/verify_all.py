"""Run every CLI suite on the shipped fixtures and print a status table."""
import argparse
import json
import tempfile
from pathlib import Path

from moyal_kahler import cli

RUNS = [
    ["--command", "verify-brackets"],
    ["--command", "verify-heavenly", "--potential", "flat"],
    ["--command", "verify-heavenly", "--potential", "flat-plus-holo"],
    ["--command", "verify-heavenly", "--potential", "scaled"],
    ["--command", "solve-first-order", "--params", "case_I"],
    ["--command", "solve-first-order", "--params", "case_II"],
    ["--command", "solve-first-order", "--params", "case_II_inconsistent"],
    ["--command", "verify-pipeline", "--params", "case_I_generic"],
    ["--command", "verify-pipeline", "--params", "case_II"],
    ["--command", "ah-sweep"],
    ["--command", "ah-deformed"],
]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    with tempfile.TemporaryDirectory() as tmp:
        for i, argv in enumerate(RUNS):
            out = Path(tmp) / f"{i}.json"
            code = cli.main([*argv, "--seed", str(args.seed), "--out", str(out)])
            rep = json.loads(out.read_text())
            failed = [c["name"] for c in rep["checks"] if c["status"] == "fail"]
            print(f"exit {code}  {' '.join(argv[1:]):55s} {'ok' if not failed else 'failed: ' + ', '.join(failed)}")


if __name__ == "__main__":
    main()
