"""Raw article text -> integer token sequences.

Pipeline order is fixed: normalize -> tokenize -> lemma override ->
suffix strip -> stopword filter -> minimum-length filter -> encode.
Overridden tokens skip suffix stripping, and every override target is also
registered as a fixed point, so curated forms are never re-stripped.
"""

from __future__ import annotations

import hashlib
import html
import re
import unicodedata
from dataclasses import dataclass
from datetime import date
from typing import Iterable, Optional, Sequence

from .corpus import Article, Corpus, Gazetteer, UNRESOLVED, resolve_region

_TAG_RE = re.compile(r"<[^>]*>")


class TextPrepError(Exception):
    pass


def normalize(text: str) -> str:
    """Strip markup, digits, punctuation and extra whitespace; keep letters.

    Keeps Unicode letter and combining-mark code points (Bengali vowel signs
    are marks), deletes format characters (ZWJ/ZWNJ) without splitting the
    word, and replaces everything else with a space.  ASCII letters are
    case-folded so the English stopword list applies.
    """
    text = html.unescape(text)
    text = _TAG_RE.sub(" ", text)
    out = []
    for ch in text:
        cat = unicodedata.category(ch)
        if cat[0] in ("L", "M"):
            out.append(ch)
        elif cat == "Cf":
            continue
        else:
            out.append(" ")
    return " ".join("".join(out).split()).casefold()


def tokenize(text: str) -> list:
    """Whitespace split, order preserved."""
    return text.split()


def letter_count(word: str) -> int:
    """Number of letter code points (category L*); marks and signs don't count."""
    return sum(1 for ch in word if unicodedata.category(ch)[0] == "L")


def strip_suffix(word: str, suffixes: Sequence[str]) -> str:
    """Remove at most one suffix: the first (longest) match in the list.

    The strip applies only when the remaining stem keeps at least 2 letters;
    otherwise the word is returned unchanged.  No fallback to shorter
    suffixes when the longest match fails the stem guard.
    """
    for suf in suffixes:
        if word.endswith(suf) and len(word) > len(suf):
            stem = word[: -len(suf)]
            if letter_count(stem) >= 2:
                return stem
            return word
    return word


@dataclass(frozen=True)
class PrepConfig:
    """Resource lists plus filter thresholds.

    The suffix list is normalized to longest-first order at construction.
    Lemma-override targets are added as identity mappings so a second pass
    over already-clean text cannot rewrite them.
    """
    stopwords: frozenset = frozenset()
    suffixes: tuple = ()
    lemma_overrides: dict = None
    min_letters: int = 6
    max_vocab: Optional[int] = None
    max_doc_len: Optional[int] = None

    def __post_init__(self):
        if self.min_letters < 1:
            raise ValueError("min_letters must be >= 1")
        if self.max_vocab is not None and self.max_vocab < 1:
            raise ValueError("max_vocab must be >= 1")
        ordered = tuple(sorted(set(self.suffixes), key=lambda s: (-len(s), s)))
        object.__setattr__(self, "suffixes", ordered)
        overrides = dict(self.lemma_overrides or {})
        for target in list(overrides.values()):
            overrides.setdefault(target, target)
        object.__setattr__(self, "lemma_overrides", overrides)
        object.__setattr__(self, "stopwords", frozenset(self.stopwords))


def _read_lines(path) -> list:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line and not line.startswith("#"):
                out.append(line)
    return out


def load_prep_config(resource_dir=None, **overrides) -> PrepConfig:
    """Build a PrepConfig from stopwords.txt / suffixes.txt / lemma_overrides.tsv.

    With no directory the lists bundled in the package are used.  Keyword
    overrides (min_letters, max_vocab, max_doc_len) pass through.
    """
    if resource_dir is None:
        from importlib.resources import files
        resource_dir = files("newsmonitor") / "resources"
    else:
        from pathlib import Path
        resource_dir = Path(resource_dir)
    stop = _read_lines(resource_dir / "stopwords.txt")
    suff = _read_lines(resource_dir / "suffixes.txt")
    lemma = {}
    for line in _read_lines(resource_dir / "lemma_overrides.tsv"):
        parts = line.split("\t")
        if len(parts) != 2:
            raise TextPrepError(f"bad lemma override line: {line!r}")
        lemma[parts[0].strip()] = parts[1].strip()
    return PrepConfig(stopwords=frozenset(stop), suffixes=tuple(suff),
                      lemma_overrides=lemma, **overrides)


def prep_tokens(text: str, config: PrepConfig) -> list:
    """Run the string half of the pipeline; returns surviving word forms."""
    out = []
    for word in tokenize(normalize(text)):
        if word in config.lemma_overrides:
            word = config.lemma_overrides[word]
        else:
            word = strip_suffix(word, config.suffixes)
        if word in config.stopwords:
            continue
        if letter_count(word) < config.min_letters:
            continue
        out.append(word)
    if config.max_doc_len is not None:
        out = out[: config.max_doc_len]
    return out


@dataclass(frozen=True)
class Vocabulary:
    """Dense word<->id map with document frequencies.

    Ids are assigned lexicographically over the retained words, so building
    from the same documents in any order yields the same ids.
    """
    word_to_id: dict
    id_to_word: tuple
    doc_freq: tuple
    term_freq: tuple
    total_tokens: int

    def __len__(self):
        return len(self.id_to_word)

    def __contains__(self, word):
        return word in self.word_to_id

    def encode(self, tokens: Iterable[str]) -> list:
        """Frozen-vocabulary encoding; out-of-vocabulary tokens are dropped."""
        w2i = self.word_to_id
        return [w2i[t] for t in tokens if t in w2i]

    def decode(self, ids: Iterable[int]) -> list:
        return [self.id_to_word[i] for i in ids]

    def content_hash(self) -> str:
        payload = "\n".join(self.id_to_word).encode("utf-8")
        return hashlib.sha256(payload).hexdigest()

    @classmethod
    def from_token_lists(cls, token_lists, max_vocab=None) -> "Vocabulary":
        tf, df = {}, {}
        for tokens in token_lists:
            for t in tokens:
                tf[t] = tf.get(t, 0) + 1
            for t in set(tokens):
                df[t] = df.get(t, 0) + 1
        words = sorted(tf)
        if max_vocab is not None and len(words) > max_vocab:
            keep = sorted(tf, key=lambda w: (-tf[w], w))[:max_vocab]
            words = sorted(keep)
        w2i = {w: i for i, w in enumerate(words)}
        dfreq = tuple(df[w] for w in words)
        tfreq = tuple(tf[w] for w in words)
        return cls(w2i, tuple(words), dfreq, tfreq, sum(tfreq))


class VocabBuilder:
    """Incremental vocabulary for build-mode preprocessing.

    `add` assigns ids in arrival order (so single-pass encoding works);
    `freeze` re-assigns canonical lexicographic ids and returns the
    Vocabulary plus an old-id -> new-id remap array.
    """

    def __init__(self, max_vocab=None):
        self.max_vocab = max_vocab
        self._ids = {}
        self._token_lists = []

    def __len__(self):
        return len(self._ids)

    def add(self, tokens) -> list:
        ids = []
        for t in tokens:
            if t not in self._ids:
                self._ids[t] = len(self._ids)
            ids.append(self._ids[t])
        self._token_lists.append(list(tokens))
        return ids

    def freeze(self):
        vocab = Vocabulary.from_token_lists(self._token_lists, self.max_vocab)
        remap = {old: vocab.word_to_id.get(w) for w, old in self._ids.items()}
        return vocab, remap


@dataclass(frozen=True)
class TokenizedDoc:
    article_id: str
    token_ids: tuple
    week_index: int = 0
    region: object = None

    def __len__(self):
        return len(self.token_ids)


def week_index(published: date, origin: date) -> int:
    """Zero-based calendar week relative to the corpus start date."""
    delta = (published - origin).days
    if delta < 0:
        raise ValueError(f"date {published} precedes origin {origin}")
    return delta // 7


def preprocess(article: Article, config: PrepConfig, vocab, mode: str = "frozen",
               origin: Optional[date] = None, gazetteer: Optional[Gazetteer] = None) -> TokenizedDoc:
    """Tokenize and encode one article.

    mode="frozen" drops out-of-vocabulary tokens (vocab must be a non-empty
    Vocabulary); mode="build" extends a VocabBuilder with new words.
    """
    tokens = prep_tokens(article.text, config)
    if mode == "build":
        if not isinstance(vocab, VocabBuilder):
            raise TextPrepError("build mode needs a VocabBuilder")
        ids = vocab.add(tokens)
    elif mode == "frozen":
        if vocab is None or len(vocab) == 0:
            raise TextPrepError("frozen vocabulary is empty")
        ids = vocab.encode(tokens)
    else:
        raise TextPrepError(f"unknown mode {mode!r}")
    week = week_index(article.published_date, origin) if origin is not None else 0
    region = None
    if gazetteer is not None:
        region = resolve_article_region(article, gazetteer)
    return TokenizedDoc(article.id, tuple(ids), week, region)


def resolve_article_region(article: Article, gazetteer: Gazetteer):
    """(district, division) via the district field, else the location text.

    A division field without a resolvable district is not used for
    aggregation (it cannot roll up district->division exactly); such
    articles land in UNRESOLVED like any other miss.
    """
    if article.district:
        hit = resolve_region(article.district, gazetteer)
        if hit is not None:
            return hit
    hit = resolve_region(article.location, gazetteer)
    return hit if hit is not None else UNRESOLVED


@dataclass(frozen=True)
class PreparedCorpus:
    """Encoded documents, the vocabulary behind them, and the week origin."""
    docs: tuple
    vocab: Vocabulary
    origin: date
    n_weeks: int

    def doc_token_lists(self):
        return [list(d.token_ids) for d in self.docs]


def prepare_corpus(corpus: Corpus, config: PrepConfig,
                   gazetteer: Optional[Gazetteer] = None) -> PreparedCorpus:
    """Two-pass build: tokenize everything, fix the canonical vocabulary,
    then encode every article (empty docs are retained with length 0)."""
    articles = list(corpus)
    token_lists = [prep_tokens(a.text, config) for a in articles]
    vocab = Vocabulary.from_token_lists(token_lists, config.max_vocab)
    origin = corpus.start_date
    n_weeks = week_index(corpus.end_date, origin) + 1
    docs = []
    for art, tokens in zip(articles, token_lists):
        region = resolve_article_region(art, gazetteer) if gazetteer is not None else None
        docs.append(TokenizedDoc(art.id, tuple(vocab.encode(tokens)),
                                 week_index(art.published_date, origin), region))
    return PreparedCorpus(tuple(docs), vocab, origin, n_weeks)
