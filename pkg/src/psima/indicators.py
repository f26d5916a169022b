"""Observables per evaluation time: classical averages and spectral ones.

Classical row: P_tau = <pI>/<I> (the plain exponential moving average),
T_tau = <(t_now-t)I>/<I> (mean age of traded volume). Spectral row: solve
the flow pencil, take the top eigenstate psi, and read price and age
through its squared weight: X_IH = <psi|X I|psi>/<psi|I|psi>. P_aver
duplicates P_IH by construction (the weight-function form of the same
quadratic-form ratio) and is emitted separately because downstream
consumers treat it as the adaptive moving average output.

The engine carries moments, this module turns one engine snapshot into one
IndicatorSample and batches that over a tape.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .basis import BasisId, linearization_table, matrix_from_moments
from .errors import (DegenerateStateError, EmptyWindowError, InputError,
                     NoVolumeError)
from .gev import SpectralDecomposition, WaveFunction, solve_pencil
from .measure import MeasureKind, MomentEngine, tick_arrays
from .operators import OperatorMatrix, flow, gram, weighted

__all__ = [
    "IndicatorSample",
    "ema_price",
    "age_tau",
    "f_psi",
    "price_IH",
    "age_IH",
    "phi_average",
    "evaluate_at",
    "run_over",
]

log = logging.getLogger("psima")


@dataclass(frozen=True)
class IndicatorSample:
    t_now: float
    p_last: float
    P_tau: float
    P_IH: float
    lambda_IH: float
    lambda_IL: float
    T_IH: float
    T_tau: float
    P_aver: float
    effective_n: int
    p_std: float = float("nan")  # EMA deviation, optional CLI column


def _entries(M) -> np.ndarray:
    return np.asarray(getattr(M, "entries", M), dtype=np.float64)


def ema_price(moments_price, moments_volume) -> float:
    """P_tau = <pI>/<I> from the zeroth-order moments."""
    num = np.asarray(getattr(moments_price, "values", moments_price))
    den = np.asarray(getattr(moments_volume, "values", moments_volume))
    if den[0] <= 0.0:
        raise NoVolumeError("window holds no traded volume")
    return float(num[0] / den[0])


def age_tau(moments_age, moments_volume) -> float:
    """T_tau = <(t_now - t) I>/<I>."""
    num = np.asarray(getattr(moments_age, "values", moments_age))
    den = np.asarray(getattr(moments_volume, "values", moments_volume))
    if den[0] <= 0.0:
        raise NoVolumeError("window holds no traded volume")
    return float(num[0] / den[0])


def f_psi(psi: WaveFunction, M_num, M_den) -> float:
    """<psi|f|psi>/<psi|I|psi> as a ratio of quadratic forms."""
    a = np.asarray(psi.alpha, dtype=np.float64)
    num = _entries(M_num)
    den = _entries(M_den)
    if a.shape[0] != num.shape[0] or num.shape != den.shape:
        raise InputError("dimension mismatch in f_psi")
    d = float(a @ den @ a)
    if d == 0.0:
        raise DegenerateStateError("f_psi denominator vanished")
    return float(a @ num @ a) / d


def price_IH(dec: SpectralDecomposition, M_pI, M_I) -> float:
    return f_psi(dec.states[dec.i_IH], M_pI, M_I)


def age_IH(dec: SpectralDecomposition, M_ageI, M_I) -> float:
    return f_psi(dec.states[dec.i_IH], M_ageI, M_I)


def phi_average(dec: SpectralDecomposition, M_pI, M_I) -> float:
    # The weight-function moving average; algebraically the same ratio as
    # price_IH, kept as its own output field.
    return price_IH(dec, M_pI, M_I)


def evaluate_at(t_now: float, engine: MomentEngine) -> IndicatorSample:
    """One IndicatorSample from an engine positioned at t_now."""
    if engine.t_now is None or engine.t_now != t_now:
        raise InputError(f"engine is at t_now={engine.t_now}, asked {t_now}")
    engine.check_window()
    rows = engine.raw_rows()
    vol0 = rows[1, 0]
    if vol0 <= 0.0:
        raise NoVolumeError("window holds no traded volume")
    P_tau = rows[2, 0] / vol0
    T_tau = rows[3, 0] / vol0
    var = rows[4, 0] / vol0 - P_tau * P_tau
    p_std = float(np.sqrt(var)) if var > 0.0 else 0.0

    n = engine.n
    table = linearization_table(engine.basis, n - 1)
    meta = dict(measure=MeasureKind.TIME_DT, basis=engine.basis,
                t_now=engine.t_now, tau=engine.tau)
    B = OperatorMatrix(n=n, entries=matrix_from_moments(rows[0], n, table), **meta)
    meta["measure"] = MeasureKind.VOLUME_DV
    A = OperatorMatrix(n=n, entries=matrix_from_moments(rows[1], n, table), **meta)
    meta["measure"] = MeasureKind.PRICE_VOLUME
    Mp = OperatorMatrix(n=n, entries=matrix_from_moments(rows[2], n, table), **meta)
    meta["measure"] = MeasureKind.AGE_VOLUME
    Ma = OperatorMatrix(n=n, entries=matrix_from_moments(rows[3], n, table), **meta)

    try:
        dec = solve_pencil(A, B, tie_breaker=Ma)
    except (DegenerateStateError, EmptyWindowError):
        # No time mass in the window (single tick, or every tick at one
        # timestamp): the spectral machinery has nothing to resolve. Fall
        # back to the classical scalar readings and flag effective_n = 0;
        # lambda has no finite value over a zero-length window, emitted as 0.
        return IndicatorSample(
            t_now=float(t_now), p_last=float(engine.p_last), P_tau=P_tau,
            P_IH=P_tau, lambda_IH=0.0, lambda_IL=0.0, T_IH=T_tau,
            T_tau=T_tau, P_aver=P_tau, effective_n=0, p_std=p_std)
    m = dec.effective_n
    Am = A.entries[:m, :m]
    P_IH = f_psi(dec.states[dec.i_IH], Mp.entries[:m, :m], Am)
    T_IH = f_psi(dec.states[dec.i_IH], Ma.entries[:m, :m], Am)
    P_aver = phi_average(dec, Mp.entries[:m, :m], Am)
    return IndicatorSample(
        t_now=float(t_now),
        p_last=float(engine.p_last),
        P_tau=P_tau,
        P_IH=P_IH,
        lambda_IH=float(dec.lambdas[dec.i_IH]),
        lambda_IL=float(dec.lambdas[dec.i_IL]),
        T_IH=T_IH,
        T_tau=T_tau,
        P_aver=P_aver,
        effective_n=m,
        p_std=p_std,
    )


def run_over(ticks, basis: BasisId, n: int, tau: float,
             grid: float | None = None) -> tuple[list[IndicatorSample], int]:
    """Indicator series over a tape; returns (samples, degenerate_count).

    Sampling is per tick by default, or on a fixed grid anchored at the
    first tick when ``grid`` is given. Samples where the window is empty,
    volume-free, or spectrally degenerate are skipped and counted.
    """
    t, p, dV = tick_arrays(ticks)
    if len(t) == 0:
        raise InputError("empty tick stream")
    if np.any(np.diff(t) < 0):
        raise InputError("tick times must be nondecreasing")
    engine = MomentEngine(basis, n, tau)
    samples: list[IndicatorSample] = []
    degenerate = 0

    def emit(ts: float) -> None:
        nonlocal degenerate
        try:
            samples.append(evaluate_at(ts, engine))
        except (EmptyWindowError, NoVolumeError, DegenerateStateError):
            degenerate += 1

    if grid is None:
        for l in range(len(t)):
            engine.advance_to(t[l], t, p, dV, l, l + 1)
            emit(float(t[l]))
    else:
        if grid <= 0:
            raise InputError("grid step must be positive")
        i = 0
        ts = float(t[0])
        last = float(t[-1])
        while ts <= last:
            j = int(np.searchsorted(t, ts, side="right"))
            engine.advance_to(ts, t, p, dV, i, j)
            i = j
            emit(ts)
            ts += grid
    if degenerate:
        log.info("skipped %d degenerate samples of %d", degenerate,
                 degenerate + len(samples))
    return samples, degenerate
