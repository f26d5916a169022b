"""Window measures and the streaming moment engine.

Every indicator in this package is a ratio of moments

    <Q_m f> = sum_l f(t_l) Q_m(x(t_l)) omega(t_l) w_l

taken over the trade tape against the exponential window
omega(t) = exp(-(t_now - t)/tau). The per-tick weight w_l is dt for the
time measure (first tick of a stream counts as a zero-length interval) and
dV for the volume family. Four public measures exist; a fifth internal row
carries p^2 dV so the CLI can emit a variance column without a second pass.

Two ways to obtain moments at a timestamp:

* ``resample_full`` walks the whole tape; the reference path.
* ``MomentEngine`` / ``advance_incremental`` shift an existing moment state
  from t_now to a later timestamp without touching old ticks. Shifting the
  reference time rescales every omega by s = exp(-delta/tau) and moves the
  window coordinate affinely (x' = s*x for the exponential coordinate,
  y' = y + delta/tau for the linear one), so Q_m at the new coordinate is an
  exact linear combination of Q_0..Q_m at the old one. The combination
  matrix G comes from the three-term recurrences; no per-tick history is
  needed. The age measure additionally couples to volume since
  (t_new - t) = (t_old_now - t) + delta.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from . import _kernels
from .basis import BasisId, max_model_order
from .errors import CapabilityError, EmptyWindowError, InputError

__all__ = [
    "Tick",
    "MeasureKind",
    "MomentVector",
    "MomentEngine",
    "x_of_t",
    "omega",
    "resample_full",
    "advance_incremental",
    "tick_arrays",
    "PRUNE_HORIZON",
]

# Ticks older than this many tau carry omega < 1e-16 and are dropped.
PRUNE_HORIZON = -np.log(_kernels.PRUNE_OMEGA)


class Tick(NamedTuple):
    t: float   # seconds, nondecreasing across a stream
    p: float   # execution price, positive
    dV: float  # shares traded, nonnegative


class MeasureKind(enum.Enum):
    TIME_DT = "time_dt"
    VOLUME_DV = "volume_dv"
    PRICE_VOLUME = "price_volume"
    AGE_VOLUME = "age_volume"


_ROW = {
    MeasureKind.TIME_DT: 0,
    MeasureKind.VOLUME_DV: 1,
    MeasureKind.PRICE_VOLUME: 2,
    MeasureKind.AGE_VOLUME: 3,
}
_ROW_P2 = 4


@dataclass(frozen=True)
class MomentVector:
    basis: BasisId
    tau: float
    t_now: float
    measure: MeasureKind
    values: np.ndarray  # <Q_m f>, m = 0..order_count-1

    @property
    def order_count(self) -> int:
        return len(self.values)


def tick_arrays(ticks) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(t, p, dV) float64 arrays from a Tick sequence or an array triple."""
    if isinstance(ticks, tuple) and len(ticks) == 3:
        t, p, dV = (np.asarray(a, dtype=np.float64) for a in ticks)
    else:
        if len(ticks) == 0:
            return (np.empty(0), np.empty(0), np.empty(0))
        arr = np.asarray(ticks, dtype=np.float64)
        t, p, dV = arr[:, 0].copy(), arr[:, 1].copy(), arr[:, 2].copy()
    if not (len(t) == len(p) == len(dV)):
        raise InputError("tick columns differ in length")
    return t, p, dV


def x_of_t(basis: BasisId, t, t_now: float, tau: float):
    """Window coordinate of a timestamp; linear for laguerre, else exponential."""
    if tau <= 0:
        raise InputError("tau must be positive")
    t = np.asarray(t, dtype=np.float64)
    if basis is BasisId.LAGUERRE:
        return (t - t_now) / tau
    return np.exp((t - t_now) / tau)


def omega(t, t_now: float, tau: float):
    if tau <= 0:
        raise InputError("tau must be positive")
    return np.exp(-(t_now - np.asarray(t, dtype=np.float64)) / tau)


def _check_orders(basis: BasisId, orders: int) -> None:
    if orders < 1:
        raise InputError("order_count must be >= 1")
    limit = 2 * max_model_order(basis) - 1
    if orders > limit:
        raise CapabilityError(
            f"{basis.value}: {orders} moment orders exceed the stable "
            f"limit {limit}")


def resample_full(ticks, t_now: float, tau: float, basis: BasisId,
                  orders: int, measure: MeasureKind) -> MomentVector:
    """Moments at t_now computed from scratch over the whole tape.

    Only ticks with t <= t_now participate; older ticks than the pruning
    horizon contribute nothing. Raises EmptyWindowError when no tick lies
    at or before t_now.
    """
    _check_orders(basis, orders)
    if tau <= 0:
        raise InputError("tau must be positive")
    t, p, dV = tick_arrays(ticks)
    if len(t) > 1 and np.any(np.diff(t) < 0):
        raise InputError("tick times must be nondecreasing")
    idx = int(np.searchsorted(t, t_now, side="right"))
    if idx == 0:
        raise EmptyWindowError(f"no ticks at or before t_now={t_now}")
    out = np.zeros((5, orders))
    _kernels.accumulate_block_np(t, p, dV, 0, idx, t[0], t_now, tau,
                                 _kernels.BASIS_CODE[basis], out)
    return MomentVector(basis=basis, tau=tau, t_now=float(t_now),
                        measure=measure, values=out[_ROW[measure]].copy())


# ---------------------------------------------------------------------------
# reference-time shift
# ---------------------------------------------------------------------------

@lru_cache(maxsize=512)
def _shift_matrix(basis: BasisId, delta_over_tau: float, orders: int) -> np.ndarray:
    """G with Q_m(x') = sum_i G[m,i] Q_i(x) for a reference shift delta."""
    return _kernels.shift_matrix(_kernels.BASIS_CODE[basis],
                                 float(delta_over_tau), orders)


def advance_incremental(state: MomentVector, new_ticks, new_t_now: float, *,
                        volume: MomentVector | None = None,
                        t_prev: float | None = None) -> MomentVector:
    """Shift a moment vector to a later reference time and absorb new ticks.

    The age measure needs the volume moments taken at the same old t_now
    (``volume=``) because ages of existing mass grow by the shift. For the
    time measure, ``t_prev`` supplies the timestamp of the last tick already
    absorbed so the first new tick gets its true interval; without it the
    first new interval counts as zero.
    """
    delta = float(new_t_now) - state.t_now
    if delta < 0:
        raise InputError("new_t_now must not precede the state's t_now")
    vals = state.values
    if state.measure is MeasureKind.AGE_VOLUME:
        if volume is None:
            raise InputError("age advance needs the companion volume moments")
        if volume.t_now != state.t_now or volume.measure is not MeasureKind.VOLUME_DV:
            raise InputError("companion volume moments must share t_now")
        vals = vals + delta * volume.values
    if delta > 0:
        G = _shift_matrix(state.basis, delta / state.tau, state.order_count)
        vals = np.exp(-delta / state.tau) * (G @ vals)
    else:
        vals = vals.copy()

    t, p, dV = tick_arrays(new_ticks)
    if len(t):
        if np.any(np.diff(t) < 0) or t[-1] > new_t_now:
            raise InputError("new ticks must be nondecreasing and <= new_t_now")
        scratch = np.zeros((5, state.order_count))
        prev = t[0] if t_prev is None else float(t_prev)
        _kernels.accumulate_block_np(t, p, dV, 0, len(t), prev, new_t_now,
                                     state.tau,
                                     _kernels.BASIS_CODE[state.basis], scratch)
        vals += scratch[_ROW[state.measure]]
    return MomentVector(basis=state.basis, tau=state.tau,
                        t_now=float(new_t_now), measure=state.measure,
                        values=vals)


class MomentEngine:
    """Streaming accumulator for all five moment rows of one (basis, n, tau).

    Feed it tick arrays in time order via advance_to(); read moments() or
    hand the whole engine to indicators.evaluate_at. State advances are
    O(orders^2) per call plus O(orders) per tick, independent of history
    length.
    """

    def __init__(self, basis: BasisId, n: int, tau: float):
        if n < 1:
            raise InputError("model dimension n must be >= 1")
        if n > max_model_order(basis):
            raise CapabilityError(
                f"{basis.value}: n={n} exceeds the stable model order "
                f"{max_model_order(basis)}")
        if tau <= 0:
            raise InputError("tau must be positive")
        self.basis = basis
        self.n = int(n)
        self.tau = float(tau)
        self.orders = 2 * self.n - 1
        self.state = np.zeros((5, self.orders))
        self.t_now: float | None = None
        self.last_t: float | None = None
        self.p_last: float | None = None
        self.tick_count = 0
        self._code = _kernels.BASIS_CODE[basis]

    def advance_to(self, t_new: float, t: np.ndarray | None = None,
                   p: np.ndarray | None = None, dV: np.ndarray | None = None,
                   i0: int = 0, i1: int = 0) -> None:
        """Move the reference time to t_new, absorbing ticks t[i0:i1]."""
        t_new = float(t_new)
        if self.t_now is not None:
            delta = t_new - self.t_now
            if delta < 0:
                raise InputError("engine time must be nondecreasing")
            if delta > 0 and self.tick_count:
                G = _shift_matrix(self.basis, delta / self.tau, self.orders)
                st = self.state
                st[3] += delta * st[1]          # ages grow with the shift
                self.state = np.exp(-delta / self.tau) * (st @ G.T)
        self.t_now = t_new
        if i1 > i0:
            if t[i1 - 1] > t_new:
                raise InputError("cannot absorb ticks after t_new")
            prev = self.last_t if self.last_t is not None else t[i0]
            _kernels.accumulate_block(t, p, dV, i0, i1, prev, t_new,
                                      self.tau, self._code, self.state)
            self.last_t = float(t[i1 - 1])
            self.p_last = float(p[i1 - 1])
            self.tick_count += i1 - i0

    def window_empty(self) -> bool:
        if self.tick_count == 0 or self.t_now is None:
            return True
        return (self.t_now - self.last_t) > PRUNE_HORIZON * self.tau

    def check_window(self) -> None:
        if self.window_empty():
            raise EmptyWindowError(
                f"no unpruned ticks at t_now={self.t_now}")

    def moments(self, measure: MeasureKind) -> MomentVector:
        self.check_window()
        return MomentVector(basis=self.basis, tau=self.tau, t_now=self.t_now,
                            measure=measure,
                            values=self.state[_ROW[measure]].copy())

    def raw_rows(self) -> np.ndarray:
        """All five moment rows (time, volume, price, age, p^2); no copy."""
        return self.state
