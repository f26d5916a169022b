import numpy as np
import pytest

from psima import Tick
from psima.synth import uniform01


def make_stream(seed: int, n_ticks: int, *, dt_lo=0.2, dt_hi=1.8,
                p0=100.0, p_amp=4.0, dv_lo=10.0, dv_hi=100.0,
                t0=0.0) -> list[Tick]:
    """Deterministic irregular tick stream driven by the counter RNG."""
    ticks = []
    t = t0
    for i in range(n_ticks):
        t += dt_lo + (dt_hi - dt_lo) * uniform01(seed, 3 * i)
        p = p0 + p_amp * (uniform01(seed, 3 * i + 1) - 0.5)
        dV = dv_lo + (dv_hi - dv_lo) * uniform01(seed, 3 * i + 2)
        ticks.append(Tick(t=t, p=p, dV=dV))
    return ticks


def regular_stream(gap: float, duration: float, flow: float,
                   price=100.0) -> list[Tick]:
    """Evenly spaced ticks; each trade integrates the flow over one gap."""
    ts = np.arange(gap, duration, gap)
    return [Tick(t=float(t), p=float(price), dV=float(flow * gap))
            for t in ts]


@pytest.fixture
def stream400():
    return make_stream(11, 400)


def rel_err(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    scale = np.maximum(np.maximum(np.abs(a), np.abs(b)), 1e-300)
    return np.max(np.abs(a - b) / scale)
