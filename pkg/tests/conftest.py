import json
from pathlib import Path

import numpy as np
import pytest

from fbmac import DmMac, adder_mac, load_channel, parallel_mac

ROOT = Path(__file__).resolve().parents[1]
CHANNELS = ROOT / "channels"

_acceptance = []


@pytest.fixture
def adder():
    return adder_mac()


@pytest.fixture
def noisy_adder():
    return load_channel(CHANNELS / "noisy_adder.json")


@pytest.fixture
def noisy_identity():
    return load_channel(CHANNELS / "noisy_identity.json")


@pytest.fixture
def flat_channel():
    # output law does not depend on the inputs
    q = np.array([0.2, 0.5, 0.3])
    return DmMac.from_array(np.broadcast_to(q, (2, 3, 3)))


@pytest.fixture
def adder_file(tmp_path):
    path = tmp_path / "adder.json"
    path.write_text(json.dumps(adder_mac().to_dict()))
    return path


def bsc(p):
    return np.array([[1 - p, p], [p, 1 - p]])


def z_channel(p):
    return np.array([[1.0, 0.0], [p, 1 - p]])


@pytest.fixture
def parallel_z_bsc():
    return parallel_mac(z_channel(0.5), bsc(0.11))


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        _acceptance.append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _acceptance:
        mark = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"[{mark}] {name}")
