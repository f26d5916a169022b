import numpy as np
import pytest

import oracles
from conftest import make_stream
from psima import (BasisId, InputError, MeasureKind, flow,
                   gram, resample_full, weighted)

ALL_BASES = list(BasisId)


def _moments(ticks, basis, n, measure, tau=64.0):
    return resample_full(ticks, ticks[-1].t, tau, basis, 2 * n - 1, measure)


@pytest.mark.parametrize("basis", ALL_BASES)
@pytest.mark.parametrize("measure", list(MeasureKind))
def test_matrices_match_tickwise_outer_products(stream400, basis, measure):
    n = 6
    tau = 64.0
    mom = _moments(stream400, basis, n, measure, tau)
    if measure is MeasureKind.TIME_DT:
        mat = gram(mom, n)
    elif measure is MeasureKind.VOLUME_DV:
        mat = flow(mom, n)
    else:
        mat = weighted(mom, n)
    ref = oracles.quad_matrix(stream400, stream400[-1].t, tau, basis, n,
                              measure)
    scale = max(np.max(np.abs(ref)), 1e-30)
    assert np.max(np.abs(mat.entries - ref)) < 1e-10 * scale
    assert mat.n == n and mat.basis is basis and mat.measure is measure


@pytest.mark.parametrize("basis", ALL_BASES)
def test_entries_are_exactly_symmetric(stream400, basis):
    mom = _moments(stream400, basis, 8, MeasureKind.PRICE_VOLUME)
    mat = weighted(mom, 8)
    assert np.array_equal(mat.entries, mat.entries.T)


@pytest.mark.parametrize("basis", ALL_BASES)
def test_gram_admits_cholesky_on_rich_window(basis):
    # plenty of well-spread ticks: the time operator must be positive
    ticks = make_stream(17, 500)
    mom = _moments(ticks, basis, 10, MeasureKind.TIME_DT)
    np.linalg.cholesky(gram(mom, 10).entries)


def test_measure_kind_is_enforced(stream400):
    vol = _moments(stream400, BasisId.CHEBYSHEV, 6, MeasureKind.VOLUME_DV)
    tim = _moments(stream400, BasisId.CHEBYSHEV, 6, MeasureKind.TIME_DT)
    with pytest.raises(InputError):
        gram(vol, 6)
    with pytest.raises(InputError):
        flow(tim, 6)


def test_rank_needs_enough_moments(stream400):
    mom = _moments(stream400, BasisId.CHEBYSHEV, 4, MeasureKind.TIME_DT)
    with pytest.raises(InputError):
        gram(mom, 5)  # needs order 2*5-2 = 8, only have 7
    gram(mom, 4)
