"""Deterministic CSV/SVG/JSON emission and model containers.

Every writer here is pure content-in, bytes-out: floats are written with
repr (shortest round-trip), rows end with a bare newline, SVG coordinates
are rounded to fixed precision, and zip members carry pinned timestamps.
Rerunning with identical inputs reproduces every file byte for byte;
wall-clock timestamps appear only in the run manifest.

Each chart embeds its source table inside an SVG <metadata> block as CSV,
so figures stay self-describing without an interactive viewer.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import asdict
from datetime import date
from pathlib import Path

import numpy as np

from . import serialize
from .neural.models import (ClassifierSpec, Net, SentimentSpec,
                            build_classifier, build_sentiment)
from .topics import LdaConfig, TopicModel


class ReportError(ValueError):
    pass


# -------------------------------------------------------------------- CSV

def _cell(value):
    if value is None:
        return ""
    if isinstance(value, (np.floating, float)):
        v = float(value)
        return "" if math.isnan(v) else repr(v)
    if isinstance(value, (np.integer, int)) and not isinstance(value, bool):
        return str(int(value))
    if isinstance(value, date):
        return value.isoformat()
    return str(value)


def write_csv(path, rows, header=None) -> None:
    """Write rows (header first if given) with repr-exact floats."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if header is not None:
            writer.writerow([_cell(c) for c in header])
        for row in rows:
            writer.writerow([_cell(c) for c in row])


def file_sha256(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_manifest(out_dir, files, seed, config_snapshot=None,
                   started=None, finished=None) -> Path:
    """List every emitted file with its content hash.

    The manifest is the only artifact that may contain wall-clock times, so
    reruns produce byte-identical data files and a manifest that differs
    only in its timestamp fields.
    """
    out_dir = Path(out_dir)
    entries = []
    for f in sorted(Path(p) for p in files):
        try:
            rel = f.relative_to(out_dir)
        except ValueError:
            rel = f
        full = f if f.is_absolute() else out_dir / rel
        entries.append({"path": rel.as_posix(),
                        "sha256": file_sha256(full),
                        "bytes": full.stat().st_size})
    payload = {"seed": seed, "config": config_snapshot or {},
               "started": started, "finished": finished, "files": entries}
    target = out_dir / "manifest.json"
    target.write_text(json.dumps(payload, indent=2, sort_keys=True,
                                 ensure_ascii=False) + "\n", encoding="utf-8")
    return target


# -------------------------------------------------------------------- SVG

_PALETTE = ("#2b6cb0", "#c05621", "#2f855a", "#b83280", "#6b46c1",
            "#c53030", "#2c7a7b", "#975a16", "#4a5568")

_FONT = 'font-family="DejaVu Sans, Helvetica, sans-serif"'


def _esc(text) -> str:
    return (str(text).replace("&", "&amp;").replace("<", "&lt;")
            .replace(">", "&gt;"))


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _tick_label(v: float) -> str:
    return f"{v:.6g}"


def _metadata_table(header, rows) -> str:
    lines = [",".join(_cell(c) for c in header)]
    for row in rows:
        lines.append(",".join(_cell(c) for c in row))
    body = "\n".join(lines)
    body = body.replace("]]>", "]] >")
    return f"<metadata><![CDATA[\n{body}\n]]></metadata>"


def _y_scale(values):
    finite = [float(v) for v in values if v is not None and math.isfinite(float(v))]
    if not finite:
        return 0.0, 1.0
    lo, hi = min(finite), max(finite)
    if lo == hi:
        pad = abs(lo) * 0.1 or 1.0
        return lo - pad, hi + pad
    pad = (hi - lo) * 0.05
    return lo - pad, hi + pad


def _polylines(xs, ys, to_px):
    """Split a series at NaN gaps; returns svg path fragments."""
    frags, seg = [], []
    for x, y in zip(xs, ys):
        fy = float(y) if y is not None else math.nan
        if math.isfinite(fy):
            seg.append(to_px(x, fy))
        else:
            if seg:
                frags.append(seg)
            seg = []
    if seg:
        frags.append(seg)
    parts = []
    for seg in frags:
        if len(seg) == 1:
            cx, cy = seg[0]
            parts.append(f'<circle cx="{cx}" cy="{cy}" r="2.5"/>')
        else:
            pts = " ".join(f"{cx},{cy}" for cx, cy in seg)
            parts.append(f'<polyline fill="none" stroke-width="1.6" points="{pts}"/>')
    return parts


def _panel(x0, y0, w, h, series, colors, x_count):
    """Axes plus one or more line series inside the given pixel box."""
    all_vals = [v for ys in series.values() for v in ys]
    lo, hi = _y_scale(all_vals)
    span = hi - lo

    def to_px(i, v):
        px = x0 + (w * i / max(x_count - 1, 1))
        py = y0 + h - (h * (v - lo) / span)
        return _fmt(px), _fmt(py)

    out = [f'<rect x="{_fmt(x0)}" y="{_fmt(y0)}" width="{_fmt(w)}" '
           f'height="{_fmt(h)}" fill="none" stroke="#888" stroke-width="0.8"/>']
    for j in range(5):
        v = lo + span * j / 4
        py = _fmt(y0 + h - h * j / 4)
        out.append(f'<line x1="{_fmt(x0 - 3)}" y1="{py}" x2="{_fmt(x0)}" '
                   f'y2="{py}" stroke="#888" stroke-width="0.8"/>')
        out.append(f'<text x="{_fmt(x0 - 6)}" y="{py}" {_FONT} font-size="9" '
                   f'fill="#444" text-anchor="end" dominant-baseline="middle">'
                   f'{_esc(_tick_label(v))}</text>')
    for name, color in zip(series, colors):
        frags = _polylines(range(x_count), series[name], to_px)
        out.append(f'<g stroke="{color}" fill="{color}">' + "".join(frags) + "</g>")
    return out


def svg_line_chart(series: dict, title: str, x_labels=None,
                   width: int = 760, height: int = 380) -> str:
    """Multi-series line chart; NaN values become visible gaps."""
    if not series:
        raise ReportError("no series to plot")
    x_count = max(len(ys) for ys in series.values())
    ml, mr, mt, mb = 64, 16, 48, 44
    pw, ph = width - ml - mr, height - mt - mb

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
             f'height="{height}" viewBox="0 0 {width} {height}">']
    header = ["x"] + list(series)
    rows = []
    for i in range(x_count):
        label = x_labels[i] if x_labels and i < len(x_labels) else i
        rows.append([label] + [ys[i] if i < len(ys) else None
                               for ys in series.values()])
    parts.append(_metadata_table(header, rows))
    parts.append(f'<rect width="{width}" height="{height}" fill="white"/>')
    parts.append(f'<text x="{width // 2}" y="20" {_FONT} font-size="14" '
                 f'fill="#222" text-anchor="middle">{_esc(title)}</text>')

    parts += _panel(ml, mt, pw, ph, series, _PALETTE, x_count)

    if x_labels:
        step = max(1, math.ceil(len(x_labels) / 10))
        for i in range(0, x_count, step):
            px = _fmt(ml + pw * i / max(x_count - 1, 1))
            parts.append(f'<text x="{px}" y="{height - mb + 14}" {_FONT} '
                         f'font-size="9" fill="#444" text-anchor="middle">'
                         f'{_esc(x_labels[i])}</text>')
    for j, name in enumerate(series):
        color = _PALETTE[j % len(_PALETTE)]
        lx, ly = ml + 8, mt + 14 + 14 * j
        parts.append(f'<line x1="{lx}" y1="{ly - 3}" x2="{lx + 16}" '
                     f'y2="{ly - 3}" stroke="{color}" stroke-width="2"/>')
        parts.append(f'<text x="{lx + 20}" y="{ly}" {_FONT} font-size="10" '
                     f'fill="#333">{_esc(name)}</text>')
    parts.append("</svg>")
    return "\n".join(parts)


def svg_bar_chart(labels, values, title: str, width: int = 760,
                  height: int = 380) -> str:
    if len(labels) != len(values) or not labels:
        raise ReportError("labels and values must align and be non-empty")
    ml, mr, mt, mb = 64, 16, 48, 84
    pw, ph = width - ml - mr, height - mt - mb
    vals = [float(v) for v in values]
    lo, hi = min(0.0, min(vals)), max(0.0, max(vals))
    if lo == hi:
        hi = lo + 1.0
    span = hi - lo

    def ypix(v):
        return mt + ph - ph * (v - lo) / span

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
             f'height="{height}" viewBox="0 0 {width} {height}">']
    parts.append(_metadata_table(["label", "value"], list(zip(labels, vals))))
    parts.append(f'<rect width="{width}" height="{height}" fill="white"/>')
    parts.append(f'<text x="{width // 2}" y="20" {_FONT} font-size="14" '
                 f'fill="#222" text-anchor="middle">{_esc(title)}</text>')
    parts.append(f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" '
                 f'fill="none" stroke="#888" stroke-width="0.8"/>')
    for j in range(5):
        v = lo + span * j / 4
        py = _fmt(ypix(v))
        parts.append(f'<text x="{ml - 6}" y="{py}" {_FONT} font-size="9" '
                     f'fill="#444" text-anchor="end" '
                     f'dominant-baseline="middle">{_esc(_tick_label(v))}</text>')

    slot = pw / len(vals)
    bw = slot * 0.7
    zero = ypix(0.0)
    for i, v in enumerate(vals):
        x = ml + slot * i + (slot - bw) / 2
        top = min(ypix(v), zero)
        bh = abs(ypix(v) - zero)
        color = _PALETTE[i % len(_PALETTE)]
        parts.append(f'<rect x="{_fmt(x)}" y="{_fmt(top)}" width="{_fmt(bw)}" '
                     f'height="{_fmt(bh)}" fill="{color}"/>')
        cx = _fmt(x + bw / 2)
        label = str(labels[i])
        if len(label) > 16:
            label = label[:15] + "…"
        parts.append(f'<text x="{cx}" y="{height - mb + 12}" {_FONT} '
                     f'font-size="9" fill="#444" text-anchor="end" '
                     f'transform="rotate(-35 {cx} {height - mb + 12})">'
                     f'{_esc(label)}</text>')
    parts.append("</svg>")
    return "\n".join(parts)


def svg_decomposition(dec, title: str = "Series decomposition",
                      width: int = 760, panel_height: int = 120) -> str:
    """Observed/trend/seasonal/residual stacked panels on a shared x-axis."""
    names = ("observed", "trend", "seasonal", "residual")
    data = {"observed": dec.observed, "trend": dec.trend,
            "seasonal": dec.seasonal, "residual": dec.residual}
    n = len(dec.observed)
    ml, mr, mt, gap, mb = 64, 16, 40, 26, 30
    height = mt + 4 * panel_height + 3 * gap + mb
    pw = width - ml - mr

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
             f'height="{height}" viewBox="0 0 {width} {height}">']
    dates = dec.dates() if hasattr(dec, "dates") else list(range(n))
    rows = [[dates[i]] + [data[name][i] for name in names] for i in range(n)]
    parts.append(_metadata_table(["date"] + list(names), rows))
    parts.append(f'<rect width="{width}" height="{height}" fill="white"/>')
    parts.append(f'<text x="{width // 2}" y="20" {_FONT} font-size="14" '
                 f'fill="#222" text-anchor="middle">{_esc(title)}</text>')

    for p, name in enumerate(names):
        y0 = mt + p * (panel_height + gap)
        parts += _panel(ml, y0, pw, panel_height,
                        {name: list(data[name])}, (_PALETTE[p],), n)
        parts.append(f'<text x="{ml}" y="{y0 - 6}" {_FONT} font-size="11" '
                     f'fill="#333">{_esc(name)}</text>')
    step = max(1, math.ceil(n / 10))
    for i in range(0, n, step):
        px = _fmt(ml + pw * i / max(n - 1, 1))
        parts.append(f'<text x="{px}" y="{height - 8}" {_FONT} font-size="9" '
                     f'fill="#444" text-anchor="middle">{_esc(dates[i])}</text>')
    parts.append("</svg>")
    return "\n".join(parts)


def write_svg(path, svg: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(svg)
        if not svg.endswith("\n"):
            fh.write("\n")


# --------------------------------------------------------- model containers

_TOPIC_FORMAT = "topic-model/1"
_NET_FORMAT = "net-checkpoint/1"


def save_topic_model(path, model: TopicModel) -> None:
    assigns = [np.asarray(a, dtype=np.int32) for a in model.assignments]
    flat = (np.concatenate(assigns) if assigns
            else np.zeros(0, dtype=np.int32))
    offsets = np.zeros(len(assigns) + 1, dtype=np.int64)
    for i, a in enumerate(assigns):
        offsets[i + 1] = offsets[i] + len(a)
    arrays = {"phi": model.phi, "theta": model.theta, "n_kw": model.n_kw,
              "n_dk": model.n_dk, "n_k": model.n_k,
              "assign_flat": flat, "assign_offsets": offsets}
    if model.word_prior is not None:
        arrays["word_prior"] = model.word_prior
    cfg = model.config
    meta = {
        "format": _TOPIC_FORMAT,
        "config": None if cfg is None else {
            "n_topics": cfg.n_topics, "alpha": cfg.alpha, "beta": cfg.beta,
            "iterations": cfg.iterations, "burn_in": cfg.burn_in,
            "seed": cfg.seed, "average_counts": cfg.average_counts,
        },
        "doc_ids": None if model.doc_ids is None else list(model.doc_ids),
        "vocab_hash": model.vocab_hash,
    }
    serialize.save_arrays(path, arrays, meta)


def load_topic_model(path) -> TopicModel:
    arrays, meta = serialize.load_arrays(path)
    if meta.get("format") != _TOPIC_FORMAT:
        raise ReportError(f"{path}: not a topic model "
                          f"(format={meta.get('format')!r})")
    offsets = arrays["assign_offsets"]
    flat = arrays["assign_flat"]
    assigns = tuple(flat[offsets[i]:offsets[i + 1]].copy()
                    for i in range(len(offsets) - 1))
    cfg = None
    if meta.get("config") is not None:
        cfg = LdaConfig(**meta["config"])
    doc_ids = meta.get("doc_ids")
    return TopicModel(
        phi=arrays["phi"], theta=arrays["theta"], assignments=assigns,
        n_kw=arrays["n_kw"], n_dk=arrays["n_dk"], n_k=arrays["n_k"],
        config=cfg, doc_ids=None if doc_ids is None else tuple(doc_ids),
        vocab_hash=meta.get("vocab_hash"),
        word_prior=arrays.get("word_prior"),
    )


_DTM_FORMAT = "dtm-model/1"


def save_dtm_model(path, model) -> None:
    cfg = model.config
    meta = {
        "format": _DTM_FORMAT,
        "config": None if cfg is None else {
            "n_topics": cfg.n_topics, "alpha": cfg.alpha, "beta": cfg.beta,
            "kappa": cfg.kappa, "iterations": cfg.iterations,
            "burn_in": cfg.burn_in, "seed": cfg.seed,
        },
    }
    serialize.save_arrays(path, {"phis": model.phis,
                                 "prevalence": model.prevalence,
                                 "slice_sizes": np.asarray(model.slice_sizes)},
                          meta)


def load_dtm_model(path):
    from .dtm import DtmConfig, DtmModel

    arrays, meta = serialize.load_arrays(path)
    if meta.get("format") != _DTM_FORMAT:
        raise ReportError(f"{path}: not a slice-coupled topic model "
                          f"(format={meta.get('format')!r})")
    cfg = None
    if meta.get("config") is not None:
        cfg = DtmConfig(**meta["config"])
    return DtmModel(phis=arrays["phis"], prevalence=arrays["prevalence"],
                    slice_sizes=tuple(int(v) for v in arrays["slice_sizes"]),
                    config=cfg)


def save_net(path, net: Net, spec, kind: str, vocab_words=None,
             labels=None) -> None:
    """Checkpoint a trained network with its spec and vocabulary."""
    if kind not in ("classifier", "sentiment"):
        raise ReportError(f"unknown net kind {kind!r}")
    params = net.params()
    arrays = {}
    for i, p in enumerate(params):
        safe = p.name.replace("/", "_").replace(" ", "_")
        arrays[f"p{i:03d}_{safe}"] = p.value
    meta = {
        "format": _NET_FORMAT,
        "kind": kind,
        "spec": asdict(spec),
        "vocab_size": int(params[0].value.shape[0]),
        "vocab": None if vocab_words is None else list(vocab_words),
        "labels": None if labels is None else list(labels),
    }
    serialize.save_arrays(path, arrays, meta)


def load_net(path):
    """Rebuild the architecture from the stored spec and restore weights.

    Returns (net, spec, meta); meta keeps the vocabulary words and label
    names when the checkpoint stored them.
    """
    arrays, meta = serialize.load_arrays(path)
    if meta.get("format") != _NET_FORMAT:
        raise ReportError(f"{path}: not a net checkpoint "
                          f"(format={meta.get('format')!r})")
    kind = meta["kind"]
    vocab_size = meta["vocab_size"]
    if kind == "classifier":
        spec = ClassifierSpec(**meta["spec"])
        net = build_classifier(spec, vocab_size=vocab_size)
    else:
        spec = SentimentSpec(**meta["spec"])
        net = build_sentiment(spec, vocab_size=vocab_size)
    params = net.params()
    stored = sorted(arrays)
    if len(stored) != len(params):
        raise ReportError(f"{path}: checkpoint has {len(stored)} arrays, "
                          f"architecture needs {len(params)}")
    for key, p in zip(stored, params):
        value = arrays[key]
        if value.shape != p.value.shape:
            raise ReportError(f"{path}: shape mismatch for {key}: "
                              f"{value.shape} vs {p.value.shape}")
        p.value[...] = value
    return net, spec, meta
