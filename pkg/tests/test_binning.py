"""Bin construction and the categorize conventions."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from survent import (
    Dataset,
    DegenerateRangeError,
    InfeasibleBinningError,
    categorize,
    equal_width_bins,
    explicit_bins,
    km_estimate,
    km_quantile_bins,
)

from conftest import make_random_dataset


def test_equal_width_unit_interval():
    scheme = equal_width_bins([0.0, 0.3, 1.0], 4)
    np.testing.assert_allclose(scheme.edges, [0, 0.25, 0.5, 0.75, 1.0])
    codes, clamped = categorize([0.0, 0.25, 0.99, 1.0], scheme)
    assert codes.tolist() == [1, 2, 4, 4]
    assert clamped == 0


def test_equal_width_degenerate():
    with pytest.raises(DegenerateRangeError):
        equal_width_bins([2.0, 2.0, 2.0], 4)


def test_explicit_time_bins_conventions():
    scheme = explicit_bins([6, 46, 85, 139, 163])
    codes, clamped = categorize([46.0, 162.0, 200.0, 138.0, 6.0], scheme)
    assert codes.tolist() == [2, 4, 4, 3, 1]
    assert clamped == 1  # only the 200
    codes2, clamped2 = categorize([5.0], scheme)
    assert codes2.tolist() == [1] and clamped2 == 1


@given(st.lists(st.floats(-50, 50), min_size=2, max_size=40).filter(
    lambda v: max(v) > min(v)))
@settings(max_examples=60, deadline=None)
def test_categorize_total_and_monotone(values):
    scheme = equal_width_bins(values, 4)
    v = np.sort(np.asarray(values))
    codes, _ = categorize(v, scheme)
    assert np.all((codes >= 1) & (codes <= 4))
    assert np.all(np.diff(codes) >= 0)


@given(st.integers(2, 7), st.integers(0, 1000))
@settings(max_examples=40, deadline=None)
def test_equal_width_assigns_every_value_once(k, seed):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=30)
    if v.max() == v.min():
        return
    scheme = equal_width_bins(v, k)
    codes, clamped = categorize(v, scheme)
    assert clamped == 0
    assert codes.shape == v.shape
    assert np.bincount(codes, minlength=k + 1)[1:].sum() == v.size


def test_km_quantile_fully_uncensored_quartiles():
    y = np.arange(1.0, 101.0)
    ds = Dataset(y=y, delta=np.ones(100, dtype=int))
    scheme = km_quantile_bins(ds, 4)
    codes, _ = categorize(y, scheme)
    counts = np.bincount(codes)[1:]
    np.testing.assert_array_equal(counts, [25, 25, 25, 25])
    assert scheme.edges[0] == -np.inf and scheme.edges[-1] == np.inf
    # interior edges sit at observed event times
    assert all(e in set(y) for e in scheme.edges[1:-1])


@pytest.mark.parametrize("seed", range(3))
def test_km_quantile_masses_near_target(seed):
    ds = make_random_dataset(seed, n=400, censor_frac=0.3)
    k = 5
    scheme = km_quantile_bins(ds, k)
    km = km_estimate(ds)
    codes, _ = categorize(np.asarray(km.jump_times), scheme)
    masses = np.zeros(k)
    for code, size in zip(codes, km.jump_sizes):
        masses[code - 1] += size
    np.testing.assert_allclose(masses.sum(), 1.0, atol=1e-12)
    assert np.all(np.abs(masses - 1 / k) < 0.05)


def test_km_quantile_infeasible():
    ds = Dataset(y=[1.0, 2.0, 3.0, 4.0, 5.0], delta=[1, 1, 1, 0, 0])
    with pytest.raises(InfeasibleBinningError):
        km_quantile_bins(ds, 10)


def test_scheme_validation():
    with pytest.raises(ValueError):
        explicit_bins([1.0, 1.0, 2.0])
    with pytest.raises(ValueError):
        explicit_bins([1.0, 2.0])
