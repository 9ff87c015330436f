"""Load, validate, split, and serve the labeled news-article collection.

The canonical interchange format is JSON-lines, one article per line; CSV is
accepted with the same column names.  Articles are immutable after load and
the corpus is safe for concurrent readers.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from datetime import date
from pathlib import Path
from typing import Iterable, Optional

from .rng import CounterRng

#: The eight article classes used for supervised classification.
CLASS_LABELS = (
    "Statistics",
    "Social Information",
    "COVID-19 Effects",
    "COVID-19 Responses and Preventive Measure",
    "Government Announcement and Responses",
    "Solidarity and Cooperation",
    "International Information",
    "Health Organization Responses",
)

SENTIMENT_LABELS = ("positive", "negative")

#: Region bucket for articles whose location has no gazetteer entry.
UNRESOLVED = "UNRESOLVED"
#: Synthetic region for foreign locations, kept so totals are conserved.
INTERNATIONAL = "INTERNATIONAL"

_JSONL_FIELDS = (
    "id", "source", "language", "title", "body", "summary",
    "published_date", "location", "district", "division",
    "class", "subclass", "sentiment", "topic", "translated_body",
)

_REQUIRED_FIELDS = ("id", "body", "published_date")


class CorpusError(Exception):
    """Unrecoverable data problem (empty file, no valid records, bad input)."""


@dataclass(frozen=True)
class RecordError:
    """One rejected input record."""
    line: int
    message: str

    def __str__(self):
        return f"line {self.line}: {self.message}"


@dataclass(frozen=True)
class Article:
    id: str
    source: str = ""
    language: str = "bn"
    title: str = ""
    body: str = ""
    summary: str = ""
    published_date: date = date(1970, 1, 1)
    location: str = ""
    district: Optional[str] = None
    division: Optional[str] = None
    class_label: Optional[str] = None
    subclass_label: Optional[str] = None
    sentiment_label: Optional[str] = None
    topic_label: Optional[int] = None
    translated_body: Optional[str] = None

    @property
    def text(self) -> str:
        """Body used by text stages: `translated_body` overrides `body`."""
        return self.translated_body if self.translated_body else self.body


@dataclass(frozen=True)
class Gazetteer:
    """district -> division lookup plus the fixed division list.

    Mapping targets must be one of the eight administrative divisions or the
    synthetic INTERNATIONAL region (used for foreign place names so that
    volume totals stay conserved without a world gazetteer).
    """
    district_to_division: dict
    divisions: tuple

    def __post_init__(self):
        if len(self.divisions) != 8:
            raise CorpusError(
                f"gazetteer must list exactly 8 divisions, got {len(self.divisions)}")
        allowed = set(self.divisions) | {INTERNATIONAL}
        for dist, div in self.district_to_division.items():
            if div not in allowed:
                raise CorpusError(f"district {dist!r} maps to unknown division {div!r}")

    def resolve(self, location: str):
        return resolve_region(location, self)


@dataclass(frozen=True)
class DatasetSplit:
    train: frozenset
    validation: frozenset
    test: frozenset
    ratios: tuple

    def __iter__(self):
        return iter((self.train, self.validation, self.test))


class Corpus:
    """Immutable article collection with id lookup and load diagnostics."""

    def __init__(self, articles: Iterable[Article], rejects: Iterable[RecordError] = ()):
        self.articles = tuple(articles)
        self.rejects = tuple(rejects)
        self.by_id = {}
        for a in self.articles:
            if not a.id:
                raise CorpusError("article with empty id")
            if a.id in self.by_id:
                raise CorpusError(f"duplicate article id {a.id!r}")
            self.by_id[a.id] = a

    def __len__(self):
        return len(self.articles)

    def __iter__(self):
        return iter(self.articles)

    def __getitem__(self, article_id: str) -> Article:
        return self.by_id[article_id]

    @property
    def start_date(self) -> date:
        return min(a.published_date for a in self.articles)

    @property
    def end_date(self) -> date:
        return max(a.published_date for a in self.articles)

    def labeled(self, label_field: str = "class_label"):
        """Articles whose `label_field` is present."""
        return [a for a in self.articles if getattr(a, label_field) is not None]

    def counts_by(self, attr: str) -> dict:
        out = {}
        for a in self.articles:
            key = getattr(a, attr)
            out[key] = out.get(key, 0) + 1
        return out


def _parse_record(rec: dict, line: int, class_set, subclass_set) -> Article:
    for f in _REQUIRED_FIELDS:
        if rec.get(f) in (None, ""):
            raise ValueError(f"missing required field {f!r}")
    try:
        pub = date.fromisoformat(str(rec["published_date"]))
    except ValueError:
        raise ValueError(f"bad published_date {rec['published_date']!r}")
    lang = rec.get("language", "bn")
    if lang not in ("bn", "en"):
        raise ValueError(f"language must be 'bn' or 'en', got {lang!r}")
    cls = rec.get("class") or None
    if cls is not None and class_set is not None and cls not in class_set:
        raise ValueError(f"unknown class {cls!r}")
    sub = rec.get("subclass") or None
    if sub is not None and subclass_set is not None and sub not in subclass_set:
        raise ValueError(f"unknown subclass {sub!r}")
    sent = rec.get("sentiment") or None
    if sent is not None and sent not in SENTIMENT_LABELS:
        raise ValueError(f"sentiment must be positive/negative, got {sent!r}")
    topic = rec.get("topic")
    topic = int(topic) if topic not in (None, "") else None
    return Article(
        id=str(rec["id"]),
        source=rec.get("source", ""),
        language=lang,
        title=rec.get("title", ""),
        body=rec["body"],
        summary=rec.get("summary", ""),
        published_date=pub,
        location=rec.get("location", ""),
        district=rec.get("district") or None,
        division=rec.get("division") or None,
        class_label=cls,
        subclass_label=sub,
        sentiment_label=sent,
        topic_label=topic,
        translated_body=rec.get("translated_body") or None,
    )


def load_corpus(path, format: Optional[str] = None,
                class_set=CLASS_LABELS, subclass_set=None) -> Corpus:
    """Read a JSONL or CSV corpus file.

    Malformed records are collected on `corpus.rejects` with line numbers;
    an empty file or a file with no valid record raises CorpusError.
    `class_set`/`subclass_set` bound the accepted label values (pass None to
    accept any; the 19 sub-class names are corpus-specific so the default is
    open).
    """
    path = Path(path)
    if not path.exists():
        raise CorpusError(f"corpus file not found: {path}")
    if format is None:
        format = "csv" if path.suffix.lower() == ".csv" else "jsonl"
    if format not in ("jsonl", "csv"):
        raise CorpusError(f"unknown corpus format {format!r}")

    articles, rejects = [], []
    seen = set()
    raw = path.read_text(encoding="utf-8")
    if not raw.strip():
        raise CorpusError(f"empty corpus file: {path}")

    def add(rec, line):
        try:
            art = _parse_record(rec, line, class_set, subclass_set)
            if art.id in seen:
                raise ValueError(f"duplicate id {art.id!r}")
            seen.add(art.id)
            articles.append(art)
        except ValueError as exc:
            rejects.append(RecordError(line, str(exc)))

    if format == "jsonl":
        for line_no, line in enumerate(raw.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                rejects.append(RecordError(line_no, f"bad JSON: {exc.msg}"))
                continue
            add(rec, line_no)
    else:
        reader = csv.DictReader(io.StringIO(raw))
        for line_no, rec in enumerate(reader, start=2):
            add({k: v for k, v in rec.items() if v not in (None, "")}, line_no)

    if not articles:
        raise CorpusError(
            f"no valid articles in {path} ({len(rejects)} rejected)")
    return Corpus(articles, rejects)


def save_corpus(corpus: Corpus, path) -> None:
    """Write JSONL; `load_corpus(save_corpus(c))` round-trips article content."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for a in corpus:
            rec = {
                "id": a.id, "source": a.source, "language": a.language,
                "title": a.title, "body": a.body, "summary": a.summary,
                "published_date": a.published_date.isoformat(),
                "location": a.location,
            }
            for key, val in (("district", a.district), ("division", a.division),
                             ("class", a.class_label), ("subclass", a.subclass_label),
                             ("sentiment", a.sentiment_label), ("topic", a.topic_label),
                             ("translated_body", a.translated_body)):
                if val is not None:
                    rec[key] = val
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")


def split_dataset(corpus: Corpus, ratios=(0.8, 0.1, 0.1), seed: int = 0,
                  label_field: str = "class_label") -> DatasetSplit:
    """Deterministic train/validation/test partition of the labeled subset.

    Sizes follow the largest-remainder rule: each split gets floor(ratio*n),
    then leftover items go to the splits with the largest fractional
    remainders (ties broken train > validation > test).  The same
    (corpus, ratios, seed) always yields the same split.
    """
    if len(ratios) != 3 or any(r < 0 for r in ratios):
        raise ValueError("ratios must be three non-negative fractions")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"ratios must sum to 1, got {sum(ratios)}")
    ids = sorted(a.id for a in corpus.labeled(label_field))
    if not ids:
        raise ValueError(f"no articles labeled on {label_field!r}")
    n = len(ids)

    floors = [int(r * n) for r in ratios]
    remainders = [r * n - f for r, f in zip(ratios, floors)]
    short = n - sum(floors)
    for idx in sorted(range(3), key=lambda i: (-remainders[i], i))[:short]:
        floors[idx] += 1

    order = CounterRng(seed, "split").permutation(n)
    shuffled = [ids[i] for i in order]
    train = frozenset(shuffled[:floors[0]])
    val = frozenset(shuffled[floors[0]:floors[0] + floors[1]])
    test = frozenset(shuffled[floors[0] + floors[1]:])
    return DatasetSplit(train, val, test, tuple(ratios))


def normalize_place(text: str) -> str:
    """Case-fold and collapse whitespace for gazetteer matching."""
    return " ".join(text.split()).casefold()


def resolve_region(location, gazetteer: Gazetteer):
    """(district, division) for a location string, or None when unknown.

    Pure exact match on the normalized location text; articles with
    unresolved locations are never dropped, callers bucket them under
    UNRESOLVED.
    """
    if isinstance(location, Article):
        location = location.location
    key = normalize_place(location or "")
    if not key:
        return None
    for district, division in gazetteer.district_to_division.items():
        if normalize_place(district) == key:
            return (district, division)
    return None


def load_gazetteer(path) -> Gazetteer:
    """Read `district,division` CSV; divisions are the 8 distinct non-synthetic targets."""
    mapping = {}
    with open(path, encoding="utf-8") as fh:
        for row in csv.reader(fh):
            if not row or row[0].startswith("#"):
                continue
            if len(row) != 2:
                raise CorpusError(f"bad gazetteer row: {row}")
            district, division = row[0].strip(), row[1].strip()
            if row[0].strip().lower() == "district":
                continue
            if district in mapping:
                raise CorpusError(f"district {district!r} listed twice")
            mapping[district] = division
    divisions = []
    for div in mapping.values():
        if div != INTERNATIONAL and div not in divisions:
            divisions.append(div)
    return Gazetteer(mapping, tuple(divisions))


def default_gazetteer() -> Gazetteer:
    """Gazetteer bundled with the package (64 districts, 8 divisions)."""
    from importlib.resources import files
    resource = files("newsmonitor") / "resources" / "gazetteer.csv"
    mapping = {}
    with resource.open("r", encoding="utf-8") as fh:
        for row in csv.reader(fh):
            if not row or row[0].startswith("#") or row[0].strip().lower() == "district":
                continue
            mapping[row[0].strip()] = row[1].strip()
    divisions = []
    for div in mapping.values():
        if div != INTERNATIONAL and div not in divisions:
            divisions.append(div)
    return Gazetteer(mapping, tuple(divisions))
