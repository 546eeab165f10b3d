import numpy as np
import pytest

from fairgroup.dataset import BINARY, PROTECTED, TARGET, Dataset, FeatureSpec


def make_dataset(features: dict, target, protected=None, protected_name="flag"):
    """Small helper: numeric unprotected features plus a binary target (and optional protected flag)."""
    specs = [FeatureSpec(name) for name in features]
    cols = {name: np.asarray(v, dtype=float) for name, v in features.items()}
    if protected is not None:
        specs.append(FeatureSpec(protected_name, PROTECTED, BINARY))
        cols[protected_name] = np.asarray(protected, dtype=float)
    specs.append(FeatureSpec("y", TARGET, BINARY))
    cols["y"] = np.asarray(target, dtype=float)
    return Dataset(tuple(specs), cols)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# acceptance criteria lines, printed after the run by pytest_terminal_summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
