"""Classical additive / multiplicative decomposition of daily volume series.

trend = centered moving average (even periods use the standard 2 x period
double average); seasonal indices = per-phase means of the detrended series,
re-centered to sum 0 (additive) or re-normalized to mean 1 (multiplicative);
residual closes the identity exactly at every non-gap point.  The series
mean is reported as a descriptive `level` scalar; reconstruction uses the
three varying components only.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date, timedelta
from typing import Optional

import numpy as np

from .corpus import Corpus
from .textprep import resolve_article_region


class TsError(Exception):
    pass


@dataclass(frozen=True)
class VolumeSeries:
    start: date
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.ndim != 1 or vals.size < 1:
            raise TsError("series must be a non-empty 1-D array")
        if (vals < 0).any():
            raise TsError("volume counts must be non-negative")
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return len(self.values)

    def dates(self):
        return [self.start + timedelta(days=i) for i in range(len(self.values))]


def build_volume_series(corpus: Corpus, division: Optional[str] = None,
                        district: Optional[str] = None, class_label: Optional[str] = None,
                        topic: Optional[int] = None, sentiment: Optional[str] = None,
                        gazetteer=None) -> VolumeSeries:
    """Daily article counts over the corpus date range (missing days = 0).

    Filters restrict which articles are counted but the date axis always
    spans the whole corpus, so filtered series stay aligned.  Region filters
    need a gazetteer.
    """
    if len(corpus) == 0:
        raise TsError("empty corpus")
    if (division or district) and gazetteer is None:
        raise TsError("region filters need a gazetteer")
    start, end = corpus.start_date, corpus.end_date
    values = np.zeros((end - start).days + 1, dtype=np.float64)
    for art in corpus:
        if class_label is not None and art.class_label != class_label:
            continue
        if topic is not None and art.topic_label != topic:
            continue
        if sentiment is not None and art.sentiment_label != sentiment:
            continue
        if division is not None or district is not None:
            region = resolve_article_region(art, gazetteer)
            if division is not None and (not isinstance(region, tuple) or region[1] != division):
                continue
            if district is not None and (not isinstance(region, tuple) or region[0] != district):
                continue
        values[(art.published_date - start).days] += 1
    return VolumeSeries(start, values)


@dataclass(frozen=True)
class Decomposition:
    model: str
    level: float
    trend: np.ndarray
    seasonal: np.ndarray
    seasonal_indices: np.ndarray
    residual: np.ndarray
    observed: np.ndarray
    period: int
    start: Optional[date] = None
    offset: float = 0.0

    def gap_mask(self) -> np.ndarray:
        """True where the trend (hence residual) is undefined."""
        return np.isnan(self.trend)

    def dates(self):
        """Calendar axis when the series carried a start date, else indices."""
        if self.start is None:
            return list(range(len(self.observed)))
        return [self.start + timedelta(days=i) for i in range(len(self.observed))]


def _centered_ma(y: np.ndarray, period: int) -> np.ndarray:
    n = len(y)
    trend = np.full(n, np.nan)
    if period % 2 == 1:
        half = (period - 1) // 2
        kern = np.full(period, 1.0 / period)
        trend[half:n - half] = np.convolve(y, kern, mode="valid")
    else:
        # standard 2 x period double moving average
        half = period // 2
        kern = np.empty(period + 1)
        kern[0] = kern[-1] = 0.5 / period
        kern[1:-1] = 1.0 / period
        trend[half:n - half] = np.convolve(y, kern, mode="valid")
    return trend


def decompose(series, model: str = "multiplicative", period: int = 7,
              offset: Optional[float] = None) -> Decomposition:
    """Classical decomposition with explicit edge gaps (no extrapolation).

    Multiplicative decomposition needs strictly positive values; series with
    zeros fail with instructions to pass `offset` (added to the series first
    and subtracted again during reconstruction).
    """
    if model not in ("additive", "multiplicative"):
        raise TsError(f"unknown model {model!r}")
    if isinstance(series, VolumeSeries):
        y, start = series.values, series.start
    else:
        y, start = np.asarray(series, dtype=np.float64), None
    if period < 2:
        raise TsError("period must be >= 2")
    if len(y) < 2 * period:
        raise TsError(f"series length {len(y)} < 2 x period {period}")
    level = float(np.mean(y))
    used_offset = 0.0
    work = y
    if model == "multiplicative":
        if offset is not None:
            if offset <= 0:
                raise TsError("offset must be positive")
            used_offset = float(offset)
            work = y + used_offset
        if (work <= 0).any():
            raise TsError(
                "multiplicative model needs strictly positive values; "
                "rerun with offset=1.0 to shift the series (the offset is "
                "removed again on reconstruction)")
    trend = _centered_ma(work, period)
    with np.errstate(invalid="ignore", divide="ignore"):
        detrended = work - trend if model == "additive" else work / trend
    phases = np.arange(len(y)) % period
    idx = np.empty(period)
    for p in range(period):
        vals = detrended[phases == p]
        vals = vals[~np.isnan(vals)]
        if vals.size == 0:
            raise TsError(f"no interior points at phase {p}; series too gappy")
        idx[p] = vals.mean()
    if model == "additive":
        idx = idx - idx.mean()
    else:
        idx = idx / idx.mean()
    seasonal = idx[phases]
    with np.errstate(invalid="ignore", divide="ignore"):
        if model == "additive":
            residual = work - trend - seasonal
        else:
            residual = work / (trend * seasonal)
    return Decomposition(model=model, level=level, trend=trend, seasonal=seasonal,
                         seasonal_indices=idx, residual=residual, observed=y,
                         period=period, start=start, offset=used_offset)


def reconstruct(dec: Decomposition) -> np.ndarray:
    """trend + seasonal + residual (additive) or trend * seasonal * residual
    (multiplicative, minus any offset); NaN at gap points."""
    if dec.model == "additive":
        return dec.trend + dec.seasonal + dec.residual
    return dec.trend * dec.seasonal * dec.residual - dec.offset
