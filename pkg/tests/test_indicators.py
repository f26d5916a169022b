import numpy as np
import pytest

import oracles
from conftest import make_stream, regular_stream, rel_err
from psima import (BasisId, MeasureKind, MomentEngine, NoVolumeError, Tick,
                   WaveFunction, ema_price, age_tau, evaluate_at, f_psi, flow,
                   gram, phi_average, resample_full, run_over, solve_pencil,
                   tick_arrays, weighted)


def _run_engine(ticks, basis=BasisId.SHIFTED_LEGENDRE, n=8, tau=64.0):
    t, p, dV = tick_arrays(ticks)
    eng = MomentEngine(basis, n, tau)
    eng.advance_to(t[-1], t, p, dV, 0, len(t))
    return eng


def test_scalar_averages_match_raw_sums(stream400):
    tau = 64.0
    t_now = stream400[-1].t
    basis = BasisId.CHEBYSHEV
    mats = {k: resample_full(stream400, t_now, tau, basis, 1, k)
            for k in MeasureKind}
    p_ref = oracles.raw_moments(stream400, t_now, tau, basis, 1,
                                MeasureKind.PRICE_VOLUME)[0]
    v_ref = oracles.raw_moments(stream400, t_now, tau, basis, 1,
                                MeasureKind.VOLUME_DV)[0]
    a_ref = oracles.raw_moments(stream400, t_now, tau, basis, 1,
                                MeasureKind.AGE_VOLUME)[0]
    assert ema_price(mats[MeasureKind.PRICE_VOLUME],
                     mats[MeasureKind.VOLUME_DV]) == pytest.approx(
                         p_ref / v_ref, rel=1e-10)
    assert age_tau(mats[MeasureKind.AGE_VOLUME],
                   mats[MeasureKind.VOLUME_DV]) == pytest.approx(
                       a_ref / v_ref, rel=1e-10)


def test_scalar_averages_need_volume(stream400):
    tau = 64.0
    t_now = stream400[-1].t
    pv = resample_full(stream400, t_now, tau, BasisId.CHEBYSHEV, 1,
                       MeasureKind.PRICE_VOLUME)
    zero = resample_full([Tick(t_now, 100.0, 0.0)], t_now, tau,
                         BasisId.CHEBYSHEV, 1, MeasureKind.VOLUME_DV)
    with pytest.raises(NoVolumeError):
        ema_price(pv, zero)


@pytest.mark.parametrize("basis", list(BasisId))
def test_f_psi_on_first_axis_is_the_ema(stream400, basis):
    n = 6
    tau = 64.0
    t_now = stream400[-1].t
    orders = 2 * n - 1
    vol = resample_full(stream400, t_now, tau, basis, orders,
                        MeasureKind.VOLUME_DV)
    pv = resample_full(stream400, t_now, tau, basis, orders,
                       MeasureKind.PRICE_VOLUME)
    psi0 = WaveFunction(alpha=np.eye(n)[0], basis=basis)
    got = f_psi(psi0, weighted(pv, n), flow(vol, n))
    assert got == pytest.approx(pv.values[0] / vol.values[0], rel=1e-13)
    # identical numerator and denominator read exactly one
    assert f_psi(psi0, flow(vol, n), flow(vol, n)) == 1.0


def test_top_state_reading_matches_pointwise_weights(stream400):
    # psi^2-weighted price, recomputed tick by tick from the raw window
    n = 8
    tau = 64.0
    basis = BasisId.SHIFTED_LEGENDRE
    t_now = stream400[-1].t
    orders = 2 * n - 1
    tim = resample_full(stream400, t_now, tau, basis, orders,
                        MeasureKind.TIME_DT)
    vol = resample_full(stream400, t_now, tau, basis, orders,
                        MeasureKind.VOLUME_DV)
    pv = resample_full(stream400, t_now, tau, basis, orders,
                       MeasureKind.PRICE_VOLUME)
    dec = solve_pencil(flow(vol, n), gram(tim, n))
    m = dec.effective_n
    psi = dec.states[dec.i_IH]
    got = f_psi(psi, weighted(pv, n).entries[:m, :m],
                flow(vol, n).entries[:m, :m])
    ref = oracles.psi_weighted_average(stream400, t_now, tau, basis,
                                       psi.alpha,
                                       [tk.p for tk in stream400])
    assert got == pytest.approx(ref, rel=1e-8)


def test_spike_price_dominates_the_top_state():
    # overwhelming recent burst at a shifted price: P_IH locks onto it
    # while the EMA still blends the old level
    base = regular_stream(1.0, 2000.0, 10.0, 100.0)
    t, p, dV = tick_arrays(base)
    sel = (t >= 1950.0) & (t < 1960.0)
    dV = np.where(sel, dV * 400.0, dV)
    p = np.where(sel, 105.0, p)
    eng = MomentEngine(BasisId.SHIFTED_LEGENDRE, 12, 256.0)
    eng.advance_to(t[-1], t, p, dV, 0, len(t))
    s = evaluate_at(t[-1], eng)
    assert abs(s.P_IH - 105.0) < 0.01 * 105.0
    # the top state tracks the burst far tighter than the blended EMA
    assert abs(s.P_tau - 105.0) > 5.0 * abs(s.P_IH - 105.0)


def test_isolated_spike_age_is_read_back():
    # a lone burst of age a on quiet background: T_IH reports a
    tau = 256.0
    a = 2.0 * tau
    base = regular_stream(1.0, 4000.0, 1.0, 100.0)
    t, p, dV = tick_arrays(base)
    t_end = t[-1]
    sel = (t >= t_end - a - 8.0) & (t < t_end - a)
    dV = np.where(sel, dV * 3000.0, dV)
    eng = MomentEngine(BasisId.SHIFTED_LEGENDRE, 12, tau)
    eng.advance_to(t_end, t, p, dV, 0, len(t))
    s = evaluate_at(t_end, eng)
    assert abs(s.T_IH - a) < 0.05 * tau


def test_steady_flow_age_settles_at_tau():
    ticks = regular_stream(0.5, 4000.0, 20.0, 100.0)
    eng = _run_engine(ticks, n=10, tau=128.0)
    s = evaluate_at(ticks[-1].t, eng)
    assert abs(s.T_tau - 128.0) < 0.03 * 128.0


def test_average_price_column_mirrors_top_state(stream400):
    eng = _run_engine(stream400)
    s = evaluate_at(stream400[-1].t, eng)
    assert s.P_aver == s.P_IH


def test_single_tick_history_degrades_gracefully():
    eng = MomentEngine(BasisId.SHIFTED_LEGENDRE, 8, 64.0)
    t = np.array([5.0]); p = np.array([101.5]); dV = np.array([30.0])
    eng.advance_to(5.0, t, p, dV, 0, 1)
    s = evaluate_at(5.0, eng)
    assert s.effective_n == 0
    assert s.P_IH == s.P_tau == 101.5
    assert s.T_IH == s.T_tau == 0.0
    assert s.lambda_IH == s.lambda_IL == 0.0


def test_run_over_per_tick_and_grid():
    ticks = make_stream(19, 500)
    samples, dropped = run_over(ticks, BasisId.SHIFTED_LEGENDRE, 8, 64.0)
    assert dropped == 0
    assert len(samples) == 500
    assert [s.t_now for s in samples] == [tk.t for tk in ticks]
    gs, gdrop = run_over(ticks, BasisId.SHIFTED_LEGENDRE, 8, 64.0, grid=10.0)
    times = np.array([s.t_now for s in gs])
    assert np.allclose(np.diff(times), 10.0)
    assert times[0] == ticks[0].t
    assert times[-1] <= ticks[-1].t + 10.0


def test_zero_volume_stream_yields_no_samples():
    ticks = [Tick(float(i), 100.0, 0.0) for i in range(1, 40)]
    samples, dropped = run_over(ticks, BasisId.CHEBYSHEV, 6, 32.0)
    assert samples == []
    assert dropped == len(ticks)


def test_readings_stay_inside_the_window_hull():
    # every price indicator is a convex combination of window prices and
    # every age lies inside [0, window span]
    ticks = make_stream(29, 4000, dt_lo=0.05, dt_hi=1.2, p_amp=9.0)
    tau = 32.0
    horizon = 36.85 * tau
    samples, _ = run_over(ticks, BasisId.SHIFTED_LEGENDRE, 8, tau)
    t, p, _ = tick_arrays(ticks)
    j0 = 0
    for s in samples:
        while t[j0] < s.t_now - horizon:
            j0 += 1
        j1 = int(np.searchsorted(t, s.t_now, side="right"))
        lo = float(np.min(p[j0:j1])) - 1e-9
        hi = float(np.max(p[j0:j1])) + 1e-9
        for val in (s.P_tau, s.P_IH, s.P_aver):
            assert lo <= val <= hi
        span = s.t_now - t[j0] + 1e-9
        assert -1e-9 <= s.T_tau <= span
        assert -1e-9 <= s.T_IH <= span
        assert s.lambda_IL <= s.lambda_IH + 1e-12


def test_extreme_flows_bracket_the_plain_rate():
    # lambda_IH >= total flow / total time >= lambda_IL, all EMA weighted
    ticks = make_stream(31, 1500)
    eng = _run_engine(ticks, n=10, tau=96.0)
    rows = eng.raw_rows()
    mean_rate = rows[1][0] / rows[0][0]
    s = evaluate_at(ticks[-1].t, eng)
    assert s.lambda_IL <= mean_rate * (1 + 1e-9)
    assert s.lambda_IH >= mean_rate * (1 - 1e-9)


def test_exponential_bases_agree_on_every_field():
    ticks = make_stream(37, 1200)
    tau = 64.0
    out = {}
    for basis in (BasisId.SHIFTED_LEGENDRE, BasisId.CHEBYSHEV):
        samples, _ = run_over(ticks, basis, 8, tau)
        out[basis] = samples
    a, b = out[BasisId.SHIFTED_LEGENDRE], out[BasisId.CHEBYSHEV]
    assert len(a) == len(b)
    skip = 50  # early sparse windows may solve at different effective_n
    for sa, sb in zip(a[skip:], b[skip:]):
        if sa.effective_n != sb.effective_n:
            continue
        for field in ("P_tau", "P_IH", "lambda_IH", "lambda_IL", "T_IH",
                      "T_tau", "P_aver"):
            va, vb = getattr(sa, field), getattr(sb, field)
            assert rel_err(np.array([va]), np.array([vb])) < 1e-7, field


def test_deviation_column_for_constant_price_is_zero():
    ticks = regular_stream(1.0, 500.0, 10.0, 100.0)
    eng = _run_engine(ticks, n=6, tau=64.0)
    s = evaluate_at(ticks[-1].t, eng)
    assert s.p_std == pytest.approx(0.0, abs=1e-5)


def test_phi_average_is_price_reading(stream400):
    n = 8
    tau = 64.0
    basis = BasisId.SHIFTED_LEGENDRE
    t_now = stream400[-1].t
    orders = 2 * n - 1
    tim = resample_full(stream400, t_now, tau, basis, orders,
                        MeasureKind.TIME_DT)
    vol = resample_full(stream400, t_now, tau, basis, orders,
                        MeasureKind.VOLUME_DV)
    pv = resample_full(stream400, t_now, tau, basis, orders,
                       MeasureKind.PRICE_VOLUME)
    dec = solve_pencil(flow(vol, n), gram(tim, n))
    m = dec.effective_n
    Mp = weighted(pv, n).entries[:m, :m]
    Mv = flow(vol, n).entries[:m, :m]
    assert phi_average(dec, Mp, Mv) == f_psi(dec.states[dec.i_IH], Mp, Mv)
