"""Classical decomposition: exactness fixtures, gaps, volume series."""

from datetime import date

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from newsmonitor.corpus import Article, Corpus
from newsmonitor.tsdecomp import (TsError, build_volume_series, decompose,
                                  reconstruct)


def article(i, day, district=None):
    return Article(id=f"a{i}", body="b", published_date=day, district=district)


class TestVolumeSeries:
    def test_daily_counts_with_zero_days(self):
        arts = [article(0, date(2020, 3, 1)), article(1, date(2020, 3, 1)),
                article(2, date(2020, 3, 4))]
        series = build_volume_series(Corpus(arts))
        assert series.start == date(2020, 3, 1)
        assert series.values.tolist() == [2.0, 0.0, 0.0, 1.0]
        assert series.dates()[-1] == date(2020, 3, 4)

    def test_values_conserve_corpus(self):
        arts = [article(i, date(2020, 3, 1 + i % 5)) for i in range(23)]
        series = build_volume_series(Corpus(arts))
        assert series.values.sum() == 23


class TestCenteredMa:
    def test_even_period_edges_are_gaps(self):
        y = np.arange(20, dtype=np.float64)
        dec = decompose(y, model="additive", period=4)
        # period 4 drops 2 points per edge
        assert np.isnan(dec.trend[:2]).all() and np.isnan(dec.trend[-2:]).all()
        assert not np.isnan(dec.trend[2:-2]).any()

    def test_linear_trend_recovered_exactly_inside(self):
        y = 3.0 + 0.5 * np.arange(30)
        dec = decompose(y, model="additive", period=5)
        inner = ~np.isnan(dec.trend)
        assert np.abs(dec.trend[inner] - y[inner]).max() < 1e-12


class TestExactFixtures:
    SEAS_M = np.array([1.3, 0.7, 1.1, 0.9, 1.25, 0.8, 0.95])  # mean exactly 1
    SEAS_A = np.array([3.0, -2.0, 1.0, -1.0, 2.5, -3.0, -0.5])  # mean exactly 0

    def test_multiplicative_noiseless(self):
        t = np.arange(70, dtype=np.float64)
        y = (5.0 + 1e-6 * t) * self.SEAS_M[np.arange(70) % 7]
        dec = decompose(y, model="multiplicative", period=7)
        assert np.abs(dec.seasonal_indices - self.SEAS_M).max() < 1e-6
        recon = reconstruct(dec)
        ok = ~np.isnan(recon)
        assert np.abs(recon[ok] - y[ok]).max() < 1e-12

    def test_additive_noiseless(self):
        t = np.arange(70, dtype=np.float64)
        y = (2.0 + 0.3 * t) + self.SEAS_A[np.arange(70) % 7]
        dec = decompose(y, model="additive", period=7)
        assert np.abs(dec.seasonal_indices - self.SEAS_A).max() < 1e-12
        recon = reconstruct(dec)
        ok = ~np.isnan(recon)
        assert np.abs(recon[ok] - y[ok]).max() < 1e-12

    def test_seasonal_indices_normalized(self):
        t = np.arange(70, dtype=np.float64)
        y = (5.0 + 0.1 * t) * self.SEAS_M[np.arange(70) % 7]
        dec = decompose(y, model="multiplicative", period=7)
        assert dec.seasonal_indices.mean() == pytest.approx(1.0, abs=1e-12)
        y2 = (2.0 + 0.3 * t) + self.SEAS_A[np.arange(70) % 7]
        dec2 = decompose(y2, model="additive", period=7)
        assert dec2.seasonal_indices.mean() == pytest.approx(0.0, abs=1e-12)


class TestGuards:
    def test_unknown_model(self):
        with pytest.raises(TsError):
            decompose(np.ones(30), model="magic")

    def test_too_short(self):
        with pytest.raises(TsError):
            decompose(np.ones(13), period=7)

    def test_period_lower_bound(self):
        with pytest.raises(TsError):
            decompose(np.ones(30), period=1)

    def test_multiplicative_zero_needs_offset(self):
        y = np.ones(30)
        y[4] = 0.0
        with pytest.raises(TsError, match="offset"):
            decompose(y, model="multiplicative", period=7)

    def test_offset_must_be_positive(self):
        with pytest.raises(TsError):
            decompose(np.ones(30), model="multiplicative", period=7, offset=-1.0)


class TestOffset:
    def test_offset_applied_and_removed(self):
        rng = np.random.default_rng(0)
        y = np.maximum(rng.poisson(3.0, 40).astype(np.float64), 0.0)
        y[5] = 0.0
        dec = decompose(y, model="multiplicative", period=7, offset=1.0)
        assert dec.offset == 1.0
        recon = reconstruct(dec)
        ok = ~np.isnan(recon)
        # reconstruction returns to the original scale, offset subtracted
        assert np.abs(recon[ok] - y[ok]).max() < 1e-9

    def test_observed_keeps_raw_values(self):
        y = np.ones(30)
        y[3] = 0.0
        dec = decompose(y, model="multiplicative", period=7, offset=1.0)
        assert np.array_equal(dec.observed, y)


class TestGapsAndDates:
    def test_gap_mask_marks_undefined_points(self):
        dec = decompose(np.arange(30, dtype=np.float64), model="additive", period=7)
        mask = dec.gap_mask()
        assert mask[:3].all() and mask[-3:].all()
        assert not mask[3:-3].any()

    def test_dates_follow_series_start(self):
        arts = [article(i, date(2020, 3, 1 + i)) for i in range(15)]
        series = build_volume_series(Corpus(arts))
        dec = decompose(series, model="additive", period=7)
        dates = dec.dates()
        assert dates[0] == date(2020, 3, 1)
        assert dates[-1] == date(2020, 3, 15)

    def test_indexless_input_gets_positions(self):
        dec = decompose(np.arange(30, dtype=np.float64), model="additive", period=7)
        assert dec.dates() == list(range(30))


class TestProperties:
    @given(st.integers(0, 2 ** 32 - 1), st.sampled_from([4, 5, 7]))
    @settings(max_examples=30, deadline=None)
    def test_property_additive_reconstruction_identity(self, seed, period):
        rng = np.random.default_rng(seed)
        y = rng.normal(10.0, 2.0, 3 * period + 5)
        dec = decompose(y, model="additive", period=period)
        recon = reconstruct(dec)
        ok = ~np.isnan(recon)
        assert np.abs(recon[ok] - y[ok]).max() < 1e-9
        assert np.isnan(recon) .tolist() == dec.gap_mask().tolist()

    @given(st.integers(0, 2 ** 32 - 1))
    @settings(max_examples=30, deadline=None)
    def test_property_multiplicative_reconstruction_identity(self, seed):
        rng = np.random.default_rng(seed)
        y = rng.uniform(1.0, 20.0, 25)
        dec = decompose(y, model="multiplicative", period=7)
        recon = reconstruct(dec)
        ok = ~np.isnan(recon)
        assert np.abs(recon[ok] - y[ok]).max() < 1e-9


class TestDivisionFilter:
    def test_volume_series_filters_by_division(self, gazetteer):
        arts = [article(0, date(2020, 3, 1), district="Dhaka"),
                article(1, date(2020, 3, 1), district="Khulna"),
                article(2, date(2020, 3, 2), district="Gazipur")]
        series = build_volume_series(Corpus(arts), division="Dhaka",
                                     gazetteer=gazetteer)
        # Gazipur sits in Dhaka division; the axis still spans the corpus
        assert series.values.tolist() == [1.0, 1.0]

    def test_region_filter_requires_gazetteer(self):
        arts = [article(0, date(2020, 3, 1), district="Dhaka")]
        with pytest.raises(TsError):
            build_volume_series(Corpus(arts), division="Dhaka")
