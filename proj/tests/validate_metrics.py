"""Run `ptrack eval` in a few configurations and validate each output against the metrics schema."""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema


def main() -> int:
    cli, schema_path = sys.argv[1], sys.argv[2]
    schema = json.loads(Path(schema_path).read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)

    runs = [
        ["--trials", "1", "--timing", "true"],
        ["--trials", "2", "--timing", "false", "--snr-list", "clean,-6"],
        ["--trials", "1", "--num-paths", "40"],
    ]
    failures = 0
    with tempfile.TemporaryDirectory() as tmp:
        for i, extra in enumerate(runs):
            out = Path(tmp) / f"metrics_{i}.json"
            proc = subprocess.run([cli, "eval", "--out", str(out), *extra], capture_output=True, text=True)
            if proc.returncode != 0:
                print(f"eval {extra} exited {proc.returncode}: {proc.stderr}")
                failures += 1
                continue
            doc = json.loads(out.read_text())
            errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.path))
            for e in errors:
                print(f"eval {extra}: {list(e.path)}: {e.message}")
            failures += bool(errors)
            print(f"eval {extra}: {'ok' if not errors else 'INVALID'}")

        bad = {"schema_version": 1, "config": {}, "trials": [], "summary": []}
        if validator.is_valid(bad):
            print("schema accepted a document with an empty config")
            failures += 1
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
