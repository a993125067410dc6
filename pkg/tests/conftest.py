import numpy as np
import pytest

from sketchparts import datasets as ds
from sketchparts.synthetic import (
    FIXED_BIRD_ORDER,
    make_corpus,
    make_toy_model_dir,
    toy_generator_config,
)


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running training/inference checks")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One PASS/FAIL line per acceptance criterion."""
    rows = {}
    for status in ("passed", "failed", "error", "skipped"):
        for report in terminalreporter.stats.get(status, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance.py" in nodeid and getattr(report, "when", "call") == "call":
                rows[nodeid.split("::")[-1]] = status.upper()
    if not rows:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for name, status in rows.items():
        terminalreporter.write_line(f"[{status:>7}] {name}")


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture(scope="session")
def bird_corpus_small():
    return make_corpus(ds.BIRDS, 12, seed=11)


@pytest.fixture(scope="session")
def creature_corpus_small():
    return make_corpus(ds.CREATURES, 8, seed=12)


@pytest.fixture(scope="session")
def fixed_order_corpus():
    return make_corpus(ds.BIRDS, 150, seed=21, part_order=FIXED_BIRD_ORDER)


@pytest.fixture(scope="session")
def toy_model_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("models")
    make_toy_model_dir(root, ds.BIRDS, seed=5)
    return root


@pytest.fixture(scope="session")
def toy_bundles(toy_model_dir):
    from sketchparts.registry import ModelRegistry

    return ModelRegistry(toy_model_dir)


@pytest.fixture(scope="session")
def toy_cfg():
    return toy_generator_config()
