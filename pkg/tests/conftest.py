import math

import numpy as np
import pytest

HALF_PI = 0.5 * math.pi


def guarded_points(rng, n, guard=1e-4):
    """Uniform random sphere points kept ``guard`` radians away from the poles
    and from the interrupted (southern quadrant) meridians."""
    phi_out, lam_out = [], []
    have = 0
    while have < n:
        m = 2 * (n - have) + 16
        phi = np.arcsin(rng.uniform(-1.0, 1.0, m))
        lam = rng.uniform(0.0, 2.0 * math.pi, m)
        off = np.mod(lam, HALF_PI)
        near_cut = (phi < 0.0) & (np.minimum(off, HALF_PI - off) < guard)
        near_pole = np.abs(phi) > HALF_PI - guard
        keep = ~(near_cut | near_pole)
        phi_out.append(phi[keep])
        lam_out.append(lam[keep])
        have += int(keep.sum())
    return np.concatenate(phi_out)[:n], np.concatenate(lam_out)[:n]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in RESULTS:
        terminalreporter.write_line(line)
