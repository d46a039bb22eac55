import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, max_examples=25,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def kron_chain(ops):
    out = np.array([[1.0 + 0j]])
    for op in ops:
        out = np.kron(out, op)
    return out


LOWER = np.array([[0, 1], [0, 0]], dtype=complex)   # |g><e| with |g> = index 0
EYE2 = np.eye(2, dtype=complex)


def dense_lowering(site, n):
    """b_site on n atoms by explicit Kronecker products (site 0 leftmost)."""
    return kron_chain([LOWER if k == site else EYE2 for k in range(n)])


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


def random_density(rng, dim, rank=None):
    rank = rank or dim
    a = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


# -- acceptance reporting: one PASS/FAIL line per criterion in the summary --

CRITERIA = {}


class criterion:
    """Context manager recording the outcome of one acceptance criterion."""

    def __init__(self, number, title):
        self.number, self.title = number, title
        self.notes = []

    def note(self, text):
        self.notes.append(text)

    def __enter__(self):
        return self

    def __exit__(self, kind, exc, tb):
        status = "PASS" if kind is None else "FAIL"
        detail = "; ".join(self.notes)
        if kind is not None:
            detail = (detail + "; " if detail else "") + f"{kind.__name__}: {exc}".strip()
        CRITERIA[self.number] = (status, self.title, detail)
        return False


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(CRITERIA):
        status, title, detail = CRITERIA[k]
        terminalreporter.write_line(f"criterion {k:2d} {status}: {title} | {detail}")
