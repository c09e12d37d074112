"""Run each subcommand with --format json and validate output and manifest."""
import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema

CASES = [
    ("instance", ["gen", "--n", "40", "--k", "2", "--C", "1.5", "--format", "json"]),
    ("mcmc_trace", ["mcmc", "--n", "100", "--k", "2", "--C", "1.5", "--beta", "1", "--steps", "20"]),
    ("mcmc_ensemble", ["mcmc", "--n", "100", "--k", "2", "--C", "1.5", "--beta", "1",
                       "--steps", "20", "--chains", "3"]),
    ("landscape_phi", ["landscape", "--n", "60", "--k", "3", "--C", "1.5", "--mode", "phi"]),
    ("fmf", ["fmf", "--n", "1e10", "--alpha", "0.1", "--C", "1.2", "--grid", "0:0.1:0.05",
             "--compare-unconditional"]),
    ("region", ["region", "--alpha-lo", "0.001", "--alpha-hi", "0.01", "--alpha-n", "2",
                "--C-lo", "1.1", "--C-hi", "1.6", "--C-n", "2"]),
    ("critical_c", ["critical-c", "--alpha", "1e-8"]),
    ("cover", ["cover", "--P", "12", "--M", "30", "--k", "3", "--flat-y", "0.3"]),
    ("gfun", ["gfun", "--y", "0.2", "0.3", "--points", "101"]),
]


def main():
    exe, schema_dir = sys.argv[1], pathlib.Path(sys.argv[2])
    load = lambda name: json.loads((schema_dir / f"{name}.schema.json").read_text())
    manifest = load("manifest")
    failed = 0
    with tempfile.TemporaryDirectory() as tmp:
        for name, args in CASES:
            out = pathlib.Path(tmp) / f"{name}.json"
            cmd = [exe, *args, "--out", str(out)]
            if "--format" not in args:
                cmd += ["--format", "json"]
            subprocess.run(cmd, check=True)
            try:
                jsonschema.validate(json.loads(out.read_text()), load(name))
                jsonschema.validate(json.loads(pathlib.Path(f"{out}.manifest.json").read_text()), manifest)
                print(f"ok   {name}")
            except jsonschema.ValidationError as e:
                failed += 1
                print(f"FAIL {name}: {e.message}")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
