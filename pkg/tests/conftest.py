import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from qnll import make_config

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# acceptance results: criterion number -> {clause: (passed, detail)}
ACCEPTANCE: dict[int, dict[str, tuple[bool, str]]] = {}
TITLES: dict[int, str] = {}


def record(k: int, title: str, clause: str, ok: bool, detail: str) -> None:
    TITLES[k] = title
    ACCEPTANCE.setdefault(k, {})[clause] = (bool(ok), detail)
    print(f"criterion {k} [{clause}]: {'PASS' if ok else 'FAIL'} {detail}")


def acceptance_line(k: int) -> str:
    parts = ACCEPTANCE[k]
    ok = all(p for p, _ in parts.values())
    detail = "; ".join(f"{c}: {'ok' if p else 'FAIL'} ({d})" for c, (p, d) in parts.items())
    return f"[{'PASS' if ok else 'FAIL'}] {k:2d}. {TITLES[k]} | {detail}"


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(acceptance_line(k))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def small_cfg():
    return make_config(16, 3, 8)


def random_displacement(rng, n, scale=0.05):
    """Clamped random displacement with ``n`` nodal values."""
    u = np.zeros(n)
    u[1:-1] = scale * rng.standard_normal(n - 2)
    return u
