"""Shared test helpers: random gates/circuits and backend parametrization."""

import numpy as np
import pytest

from svsim import Circuit, Gate2x2, GateOp, available_backends

# pass/fail lines appended by the acceptance tests, echoed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def acceptance_report():
    return ACCEPTANCE_LINES


def random_unitary2(rng: np.random.Generator) -> Gate2x2:
    """Haar-ish random 2x2 unitary via QR with phase-fixed diagonal."""
    m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, r = np.linalg.qr(m)
    d = np.diagonal(r)
    return Gate2x2.from_matrix(q * (d / np.abs(d)))


def random_circuit(
    rng: np.random.Generator, n: int, n_ops: int, p_controlled: float = 0.35
) -> Circuit:
    ops = []
    for _ in range(n_ops):
        g = random_unitary2(rng)
        if n >= 2 and rng.random() < p_controlled:
            c, t = rng.choice(n, size=2, replace=False)
            ops.append(GateOp("controlled", g, int(t), int(c)))
        else:
            ops.append(GateOp("single", g, int(rng.integers(n))))
    return Circuit(n, tuple(ops))


def random_state_array(rng: np.random.Generator, n: int) -> np.ndarray:
    v = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return (v / np.linalg.norm(v)).astype(np.complex128)


@pytest.fixture(params=available_backends())
def backend(request):
    return request.param
