"""The whole pipeline through the command-line interface.

Writes a working directory with the bundled fixture and a JSON config,
then drives `groupanon run` and `groupanon verify` exactly as an operator
would, and checks the published table realizes the modified signal.
"""

import json
import shutil
import subprocess
import sys
from pathlib import Path

import numpy as np

from groupanon.microfile import load_microfile
from groupanon.reference import (
    AREA_CODES,
    FIXTURE_SCHEMA,
    QUANTITY_FINAL,
    QUANTITY_SOLUTION,
    QUANTITY_SYSTEM,
    fixture_group,
    fixture_path,
)
from groupanon.signals import quantity_signal

workdir = Path(__file__).parent / "output" / "pipeline"
workdir.mkdir(parents=True, exist_ok=True)
shutil.copy(fixture_path(), workdir / "military.csv")

config = {
    "input": "military.csv",
    "output": "modified.csv",
    "report_dir": "report",
    "seed": 20100923,
    "schema": [
        {"name": "area", "kind": "nominal", "role": "parameter"},
        {"name": "military_service", "kind": "nominal", "role": "vital", "weight": 1.0},
        {"name": "sex", "kind": "nominal", "role": "plain"},
        {"name": "age", "kind": "ordinal", "role": "influential", "weight": 1.0},
        {"name": "income", "kind": "ordinal", "role": "influential", "weight": 1.0},
    ],
    "groups": [
        {
            "name": "active-duty",
            "vital": {"military_service": ["1"]},
            "parameter": "area",
            "parameter_order": list(AREA_CODES),
            "superset": {"sex": ["1"]},
            "signal": "quantity",
            "wavelet": {"family": "db2", "level": 2},
            "constraints": {
                "rows": [
                    {"position": p, "relation": rel, "bound": bound}
                    for p, rel, bound, _ in QUANTITY_SYSTEM
                ],
                "objective": "feasibility",
            },
            "solution": [float(v) for v in QUANTITY_SOLUTION],
            "shift": 2150,
            "repair": "mean_fix",
        }
    ],
}
(workdir / "config.json").write_text(json.dumps(config, indent=2))


def run(*args):
    print("$", "groupanon", *args)
    result = subprocess.run([sys.executable, "-m", "groupanon.cli", *args],
                            cwd=workdir, text=True, capture_output=True)
    print(result.stdout, end="")
    if result.returncode:
        print(result.stderr, end="")
    return result.returncode


assert run("signal", "--config", "config.json", "--group", "active-duty") == 0
assert run("run", "--config", "config.json") == 0
assert run("verify") == 0

modified = load_microfile(workdir / "modified.csv", FIXTURE_SCHEMA)
counts = quantity_signal(modified, fixture_group())
print("\npublished table realizes the modified signal:",
      np.array_equal(counts.values, QUANTITY_FINAL))
report = json.loads((workdir / "report" / "report.json").read_text())
print("report timings:", report["groups"][0]["timings"])
