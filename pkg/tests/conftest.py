import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from geks import SimConfig, fit_null, simulate  # noqa: E402
from geks.io import load_dataset  # noqa: E402

DATA = Path(__file__).parent / "data"


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)


@pytest.fixture(scope="session")
def worked():
    return load_dataset(DATA / "worked_n8_pheno.tsv", DATA / "worked_n8_geno.tsv")


@pytest.fixture(scope="session")
def worked_fit(worked):
    return fit_null(worked)


@pytest.fixture(scope="session")
def sim50():
    return simulate(SimConfig(n=50, q=2, p=3, seed=3))


@pytest.fixture(scope="session")
def sim200():
    return simulate(SimConfig(n=200, q=3, p=4, seed=5, env="normal", beta_true=(-0.4, 0.3, 0.2)))


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok, detail in sorted(RESULTS, key=lambda r: r[0]):
        terminalreporter.write_line(f"[criterion {number}] {'PASS' if ok else 'FAIL'}: {title} -- {detail}")
