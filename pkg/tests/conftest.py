import functools

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from ruledrel import RuledSurface

settings.register_profile(
    "ruledrel",
    deadline=None,
    max_examples=40,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("ruledrel")


# (delta, kappa, lambda, u_domain)
BATTERY = {
    "helicoid": ("1", "0", "0", (0.0, 2.0)),
    "conoidal": ("1 + 0.2*sin(u)", "0", "0.3*cos(u)", (0.0, 2.0)),
    "kappa_const": ("1", "1", "0.5", (0.0, 2.0)),
    "kappa_u": ("1", "u", "0.2", (0.5, 2.0)),
    "edlinger": ("1", "1", "-1", (0.0, 2.0)),
}

KINDS = {
    "euclidean": {},
    "central": {"g": "1.5 + sin(u)"},
    "polar": {"f": "2 + cos(V)"},
    "right": {"f": "1 + 0.5*sin(u)", "g": 0.3},
}


@functools.cache
def make_surface(name):
    d, k, lam, dom = BATTERY[name]
    return RuledSurface(d, k, lam, dom)


@pytest.fixture(scope="session")
def battery():
    return {name: make_surface(name) for name in BATTERY}


@pytest.fixture(scope="session")
def helicoid():
    return RuledSurface(1.0, 0.0, 0.0, (0.0, 2.0))


def sample_points(surface, n, seed, v_range=(0.1, 2.0), margin=1e-3):
    rng = np.random.default_rng(seed)
    a, b = surface.u_domain
    us = rng.uniform(a + margin, b - margin, n)
    vs = rng.uniform(*v_range, n) * rng.choice([-1.0, 1.0], n)
    return list(zip(us.tolist(), vs.tolist()))


ACCEPTANCE: dict[int, str] = {}


def record(number: int, ok: bool, detail: str) -> None:
    ACCEPTANCE[number] = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[number])
