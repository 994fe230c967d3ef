"""Shared fixtures: small fitted estimators and the acceptance summary hook."""

import numpy as np
import pytest

from gaitindex import (
    GaitAnomalyScorer,
    SynthConfig,
    preprocess_sequence,
    synth_gait,
)

# a narrow topology that trains in well under a second but keeps the
# sigmoid / tanh x4 / sigmoid layer structure of the full model
SMALL_HIDDEN = (16, 8, 4, 8, 16)


def make_postures(n_frames=240, seed=11, noise_sigma=0.004, **kw):
    """Preprocessed normal-gait postures, shape (n_frames, 3, 17)."""
    cfg = SynthConfig(seed=seed, n_frames=n_frames, noise_sigma=noise_sigma, **kw)
    return preprocess_sequence(synth_gait(cfg).joint_array())


@pytest.fixture(scope="session")
def posture_batch():
    return make_postures(n_frames=60, seed=77)


@pytest.fixture(scope="session")
def fitted_scorer():
    """A quickly trained three-axis scorer shared by read-only tests."""
    X = make_postures()
    scorer = GaitAnomalyScorer(
        hidden_dims=SMALL_HIDDEN, epochs=25, learning_rate=1e-2,
        batch_size=32, seed=3,
    )
    return scorer.fit(X)


@pytest.fixture
def rng():
    # function scoped: every test draws from its own fresh stream, so
    # failures reproduce in isolation regardless of test order
    return np.random.default_rng(20260823)


# ----------------------------------------------------------------------
# acceptance verdict lines
#
# test_acceptance records one PASS/FAIL line per criterion through this
# fixture; the terminal-summary hook replays them after the test run so
# they stay visible even though pytest captures stdout of passing tests.

_acceptance_lines: list[str] = []


@pytest.fixture(scope="session")
def record_criterion():
    def record(ok: bool, name: str, detail: str) -> bool:
        line = f"{'PASS' if ok else 'FAIL'} {name}: {detail}"
        print(line)
        _acceptance_lines.append(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in _acceptance_lines:
        terminalreporter.write_line(line)
