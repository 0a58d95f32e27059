"""Regression harness against frozen CLI artifacts.

Each manifest entry replays a CLI invocation into a temp directory and
compares the parsed JSON against the checked-in copy.  Numbers compare at
1e-9 so a BLAS or compiler change does not spuriously fail; structure and
strings compare exactly.
"""

import json
import math
from pathlib import Path

import pytest

from schurdil.cli import main

GOLDEN = Path(__file__).parent / "golden"
MANIFEST = json.loads((GOLDEN / "manifest.json").read_text())


def close(a, b):
    if isinstance(a, dict) and isinstance(b, dict):
        return a.keys() == b.keys() and all(close(a[k], b[k]) for k in a)
    if isinstance(a, list) and isinstance(b, list):
        return len(a) == len(b) and all(close(x, y) for x, y in zip(a, b))
    if isinstance(a, bool) or isinstance(b, bool):
        return a is b
    if isinstance(a, (int, float)) and isinstance(b, (int, float)):
        return math.isclose(a, b, rel_tol=1e-9, abs_tol=1e-9)
    return a == b


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    d = tmp_path_factory.mktemp("golden_replay")
    for entry in MANIFEST["entries"]:
        argv = [a.replace("{D}", str(d)) for a in entry["argv"]]
        assert main(argv) == 0, f"golden replay failed: {argv}"
    return d


@pytest.mark.parametrize(
    "name",
    [f for entry in MANIFEST["entries"] for f in entry["files"]],
)
def test_golden_artifact(workdir, name):
    got = json.loads((workdir / name).read_text())
    want = json.loads((GOLDEN / name).read_text())
    assert close(got, want), f"{name} drifted from its frozen artifact"
