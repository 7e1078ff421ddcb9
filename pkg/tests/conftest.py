import struct

import numpy as np
import pytest


def write_fvecs(path, arr):
    """Independent fvecs writer used to build test fixtures."""
    arr = np.asarray(arr, dtype="<f4")
    with open(path, "wb") as f:
        for row in arr:
            f.write(struct.pack("<i", row.shape[0]))
            f.write(row.tobytes())


def write_bvecs(path, arr):
    arr = np.asarray(arr, dtype=np.uint8)
    with open(path, "wb") as f:
        for row in arr:
            f.write(struct.pack("<i", row.shape[0]))
            f.write(row.tobytes())


@pytest.fixture
def fvecs_writer():
    return write_fvecs


@pytest.fixture
def bvecs_writer():
    return write_bvecs


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    entries = []
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            if "test_acceptance" in rep.nodeid and getattr(rep, "when", "call") == "call":
                entries.append((rep.nodeid.split("::")[-1], outcome))
    if entries:
        terminalreporter.write_sep("=", "acceptance criteria")
        for name, outcome in sorted(entries):
            mark = "PASS" if outcome == "passed" else "FAIL"
            terminalreporter.write_line(f"{mark}  {name}")
