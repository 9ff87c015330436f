"""
Loading a corpus and decomposing its daily volume
=================================================

Walks the first half of the monitoring workflow: read a dated news corpus,
look at what is in it, turn it into a daily article-count series, and split
that series into trend, weekly seasonality, and residual.
"""

from pathlib import Path

from newsmonitor.corpus import default_gazetteer, load_corpus
from newsmonitor.report import svg_decomposition, write_svg
from newsmonitor.tsdecomp import build_volume_series, decompose

# The package ships a small synthetic corpus in the same JSONL layout real
# exports use: one article per line with id, source, date, Bengali body,
# location, and optional labels.
SAMPLE = Path(__file__).resolve().parents[1] / "src" / "newsmonitor" / \
    "resources" / "mini_corpus.jsonl"

corpus = load_corpus(SAMPLE)
print(f"{len(corpus)} articles, {len(corpus.rejects)} rejected records")
print(f"date range: {corpus.start_date} .. {corpus.end_date}")

# counts_by tallies any article attribute; here: which outlets wrote most.
for source, n in sorted(corpus.counts_by("source").items(),
                        key=lambda kv: -kv[1]):
    print(f"  {source:<22} {n}")

# Daily counts with gaps filled by zeros, so the axis is a true calendar.
series = build_volume_series(corpus)
print(f"\nvolume series: {len(series.values)} days, "
      f"total {int(series.values.sum())} articles")

# Filters keep the same date axis, which makes regional series comparable.
gaz = default_gazetteer()
dhaka = build_volume_series(corpus, division="Dhaka", gazetteer=gaz)
print(f"Dhaka division alone: {int(dhaka.values.sum())} articles")

# Classical decomposition with period 7 captures the weekly publishing
# rhythm. Multiplicative needs positive values; days with zero counts are
# handled by an additive offset that is removed again on reconstruction.
dec = decompose(series, model="multiplicative", period=7, offset=1.0)
print(f"\ndecomposition: model={dec.model}, period={dec.period}")
print("seasonal indices (mean 1.0, one per weekday phase):")
for phase, idx in enumerate(dec.seasonal_indices):
    bar = "#" * int(round(idx * 20))
    print(f"  phase {phase}: {idx:6.3f} {bar}")

# The decomposition multiplies back to the observed series exactly
# (trend * seasonal * residual, minus the offset), away from the edge gaps.
check = dec.trend * dec.seasonal * dec.residual - dec.offset
import numpy as np
inner = ~np.isnan(dec.trend)
print(f"\nreconstruction max error: "
      f"{np.abs(check[inner] - dec.observed[inner]).max():.2e}")

out = Path("demo_out")
out.mkdir(exist_ok=True)
write_svg(out / "volume_decomposition.svg",
          svg_decomposition(dec, title="Daily volume, decomposed"))
print(f"wrote {out / 'volume_decomposition.svg'}")
