"""Synthetic data generators used by the demos and the test suite.

Four fixtures live here:

  * planted_topic_corpus - documents drawn from known topic-word
    distributions with disjoint interleaved supports, for recovery checks.
  * drift_corpus - time-sliced documents where one topic's support slides
    one word per slice while a second stays put.
  * keyword_toy - a linearly separable two-class token corpus for
    training-convergence checks.
  * mini_corpus - a small self-contained Bengali news corpus with dates,
    regions, labels and realistic text noise, used by the end-to-end
    pipeline. The bundled resources/mini_corpus.jsonl is produced by
    ``python -m newsmonitor.synthetic``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .corpus import CLASS_LABELS
from .rng import CounterRng, derive_seed
from .textprep import letter_count, load_prep_config, strip_suffix


# ---------------------------------------------------------------- planted

@dataclass(frozen=True)
class PlantedCorpus:
    """Documents plus the ground truth that generated them."""
    docs: tuple
    true_phi: np.ndarray
    doc_topics: tuple
    vocab_size: int
    n_topics: int


def planted_topic_corpus(n_docs: int = 200, vocab_size: int = 20,
                         n_topics: int = 2, doc_len: int = 60,
                         seed: int = 0, mode: str = "pure") -> PlantedCorpus:
    """Draw documents from topics with interleaved disjoint supports.

    Topic k owns exactly the words {w : w mod n_topics == k} and is uniform
    over them. In "pure" mode document d uses topic d mod K only; in
    "mixed" mode each document gets its own normalized random mixture.
    """
    if vocab_size < 2 * n_topics:
        raise ValueError("vocab_size too small for disjoint supports")
    if mode not in ("pure", "mixed"):
        raise ValueError(f"unknown mode: {mode!r}")
    supports = [np.arange(vocab_size)[np.arange(vocab_size) % n_topics == k]
                for k in range(n_topics)]
    phi = np.zeros((n_topics, vocab_size))
    for k, sup in enumerate(supports):
        phi[k, sup] = 1.0 / len(sup)

    docs, doc_topics = [], []
    for d in range(n_docs):
        rng = CounterRng(derive_seed(seed, "planted-doc", d))
        if mode == "pure":
            theta = np.zeros(n_topics)
            theta[d % n_topics] = 1.0
        else:
            raw = rng.uniforms(n_topics) + 1e-3
            theta = raw / raw.sum()
        cum = np.cumsum(theta)
        us = rng.uniforms(2 * doc_len)
        ids = []
        for i in range(doc_len):
            k = int(np.searchsorted(cum, us[2 * i], side="right"))
            k = min(k, n_topics - 1)
            sup = supports[k]
            ids.append(int(sup[min(int(us[2 * i + 1] * len(sup)), len(sup) - 1)]))
        docs.append(ids)
        doc_topics.append(int(np.argmax(theta)))
    return PlantedCorpus(tuple(docs), phi, tuple(doc_topics),
                         vocab_size, n_topics)


# ------------------------------------------------------------------ drift

@dataclass(frozen=True)
class DriftCorpus:
    """Per-slice documents with one sliding and one static topic support."""
    slices: tuple
    moving_supports: tuple
    static_support: tuple
    weights: tuple
    vocab_size: int


def drift_corpus(n_slices: int = 8, docs_per_slice: int = 40,
                 doc_len: int = 50, support_size: int = 10,
                 vocab_size=None, seed: int = 0,
                 weights=None) -> DriftCorpus:
    """Two-topic slices where topic 0's support slides one word per slice.

    Topic 0 at slice t is uniform over [t, t + support_size); topic 1 is
    uniform over the last support_size words at every slice so the two
    never overlap. ``weights`` gives topic 0's document share per slice
    (scalar or sequence, default 0.5); counts are rounded so the planted
    prevalence is exact.
    """
    if vocab_size is None:
        vocab_size = (n_slices - 1) + 2 * support_size
    if (n_slices - 1) + support_size > vocab_size - support_size:
        raise ValueError("sliding window would collide with the static support")
    if weights is None:
        weights = [0.5] * n_slices
    elif np.isscalar(weights):
        weights = [float(weights)] * n_slices
    if len(weights) != n_slices:
        raise ValueError("one weight per slice required")

    static = tuple(range(vocab_size - support_size, vocab_size))
    slices, moving = [], []
    for t in range(n_slices):
        sup0 = tuple(range(t, t + support_size))
        moving.append(sup0)
        n0 = int(round(weights[t] * docs_per_slice))
        docs = []
        for d in range(docs_per_slice):
            sup = sup0 if d < n0 else static
            rng = CounterRng(derive_seed(seed, "drift", t, d))
            us = rng.uniforms(doc_len)
            docs.append([int(sup[min(int(u * len(sup)), len(sup) - 1)])
                         for u in us])
        slices.append(tuple(docs))
    return DriftCorpus(tuple(slices), tuple(moving), static,
                       tuple(float(w) for w in weights), vocab_size)


# ------------------------------------------------------------ keyword toy

_TOY_POSITIVE = ("superb", "uplift", "praise", "delight", "brightday",
                 "goodnews", "hopeful", "cheerful")
_TOY_NEGATIVE = ("dreadful", "gloomy", "collapse", "crisis", "darkday",
                 "badnews", "fearful", "grimhour")
_TOY_NEUTRAL = ("report", "city", "office", "market", "street", "meeting",
                "update", "notice", "people", "daily")


def keyword_toy(n_docs: int = 60, seed: int = 0):
    """Separable two-class token corpus: (token_lists, labels).

    Label 1 documents carry only positive keywords, label 0 only negative
    ones, both padded with shared neutral filler. Every document's class
    is decidable from any single keyword.
    """
    docs, labels = [], []
    for d in range(n_docs):
        label = d % 2
        pool = _TOY_POSITIVE if label == 1 else _TOY_NEGATIVE
        rng = CounterRng(derive_seed(seed, "toy-doc", d))
        kw = [pool[i] for i in rng.integers(3, len(pool))]
        filler = [_TOY_NEUTRAL[i] for i in rng.integers(4, len(_TOY_NEUTRAL))]
        docs.append(rng.shuffled(kw + filler))
        labels.append(label)
    return docs, labels


# ------------------------------------------------------------ mini corpus

_CONSONANTS = "কখগঘচছজঝটঠডতথদধনপফবভমরলশষসহ"
_VOWEL_SIGNS = "ািীুূেোৌ"

_TOPICS = ("case-statistics", "public-health", "economy", "education",
           "relief-aid", "government-measures", "international",
           "healthcare-system", "community-response")

_TOPIC_CLASS = {
    "case-statistics": "Statistics",
    "public-health": "COVID-19 Responses and Preventive Measure",
    "economy": "COVID-19 Effects",
    "education": "COVID-19 Effects",
    "relief-aid": "Solidarity and Cooperation",
    "government-measures": "Government Announcement and Responses",
    "international": "International Information",
    "healthcare-system": "Health Organization Responses",
    "community-response": "Social Information",
}

_SUBCLASSES = {
    "Statistics": ("Daily Case Counts", "Death Toll", "Recovery Figures"),
    "Social Information": ("Rumors and Awareness", "Public Events"),
    "COVID-19 Effects": ("Economic Impact", "Education Disruption",
                         "Livelihood Stress"),
    "COVID-19 Responses and Preventive Measure": ("Lockdown Enforcement",
                                                  "Hygiene Campaigns"),
    "Government Announcement and Responses": ("Policy Directives",
                                              "Stimulus Packages"),
    "Solidarity and Cooperation": ("Relief Distribution", "Volunteer Drives"),
    "International Information": ("Global Case Updates",
                                  "Foreign Policy Moves"),
    "Health Organization Responses": ("Hospital Capacity", "Testing Guidance",
                                      "Advisory Bulletins"),
}

_POSITIVE_SHARE = {
    "Statistics": 0.3, "Social Information": 0.5, "COVID-19 Effects": 0.25,
    "COVID-19 Responses and Preventive Measure": 0.55,
    "Government Announcement and Responses": 0.5,
    "Solidarity and Cooperation": 0.8, "International Information": 0.4,
    "Health Organization Responses": 0.6,
}

_OUTLETS = ("dainik-alo", "prothom-barta", "shongbad-24", "desh-khobor",
            "banglar-dak", "city-times")

_DISTRICT_POOL = (("Dhaka",) * 10
                  + ("Narayanganj", "Gazipur", "Tangail", "Chittagong",
                     "Comilla", "Cox's Bazar", "Sylhet", "Khulna", "Jessore",
                     "Rajshahi", "Bogra", "Barisal", "Rangpur", "Mymensingh"))

_INTL_LOCATIONS = ("Wuhan", "New York", "Rome", "Delhi", "London", "Geneva")
_VAGUE_LOCATIONS = ("দেশজুড়ে", "অনলাইন ডেস্ক", "নিজস্ব প্রতিবেদক")

_COVID_FORMS = ("করোনা", "কোভিড", "করোনার", "করোনাভাইরাসের", "করোনায়",
                "কোরোনা", "covid", "corona")
_SHORT_WORDS = ("দেশ", "সময়", "মানুষ", "খবর", "জেলা", "শহর", "আজ", "নতুন")
_NUMERALS = ("২০২০", "১৪", "2020", "19", "৩৫৭")

_EN_TEMPLATES = (
    "The health ministry reported new cases across the country today.",
    "Officials announced fresh measures to slow the outbreak this week.",
    "Hospitals prepared additional beds as admissions kept rising.",
    "Relief workers distributed food packages in affected neighbourhoods.",
    "Schools remained closed while authorities reviewed reopening plans.",
)


def _bengali_stem(rng: CounterRng) -> str:
    cons = rng.integers(6, len(_CONSONANTS))
    vow = rng.integers(6, len(_VOWEL_SIGNS))
    use = rng.uniforms(6)
    chars = []
    for i in range(6):
        chars.append(_CONSONANTS[cons[i]])
        if use[i] < 0.55:
            chars.append(_VOWEL_SIGNS[vow[i]])
    return "".join(chars)


def topic_pools(seed: int = 0, pool_size: int = 12, config=None):
    """Generate one stem pool per topic; stems survive preprocessing intact."""
    config = config or load_prep_config()
    rng = CounterRng(derive_seed(seed, "pools"))
    seen = set()
    pools = {}
    for topic in _TOPICS:
        pool = []
        while len(pool) < pool_size:
            stem = _bengali_stem(rng)
            if (stem in seen or stem in config.stopwords
                    or stem in config.lemma_overrides
                    or strip_suffix(stem, config.suffixes) != stem
                    or letter_count(stem) < config.min_letters):
                continue
            seen.add(stem)
            pool.append(stem)
        pools[topic] = tuple(pool)
    return pools


def _pick(rng_values, pool, i):
    return pool[min(int(rng_values[i] * len(pool)), len(pool) - 1)]


def _bengali_body(rng: CounterRng, pool, other_words, stopword_list, config):
    n_core = 25 + int(rng.uniforms(1)[0] * 21)
    core_u = rng.uniforms(n_core)
    # squared uniform skews toward the first few stems, Zipf-like
    core = [pool[min(int(u * u * len(pool)), len(pool) - 1)] for u in core_u]

    if rng.uniforms(1)[0] < 0.45:
        suffixed = []
        idx = rng.integers(len(core), max(1, len(config.suffixes)))
        use = rng.uniforms(len(core))
        for i, word in enumerate(core):
            if use[i] < 0.35:
                suf = config.suffixes[idx[i]]
                if strip_suffix(word + suf, config.suffixes) == word:
                    word = word + suf
            suffixed.append(word)
        core = suffixed

    n_noise = 3 + int(rng.uniforms(1)[0] * 6)
    noise_u = rng.uniforms(n_noise)
    noise = [_pick(noise_u, other_words, i) for i in range(n_noise)]

    n_stop = 10 + int(rng.uniforms(1)[0] * 11)
    stop_u = rng.uniforms(n_stop)
    stops = [_pick(stop_u, stopword_list, i) for i in range(n_stop)]

    n_short = 2 + int(rng.uniforms(1)[0] * 4)
    short_u = rng.uniforms(n_short)
    shorts = [_pick(short_u, _SHORT_WORDS, i) for i in range(n_short)]

    extras = []
    u = rng.uniforms(4)
    if u[0] < 0.5:
        n_cov = 1 + int(u[1] * 3)
        cov_u = rng.uniforms(n_cov)
        extras += [_pick(cov_u, _COVID_FORMS, i) for i in range(n_cov)]
    if u[2] < 0.4:
        extras.append(_NUMERALS[min(int(u[3] * len(_NUMERALS)),
                                    len(_NUMERALS) - 1)])

    tokens = rng.shuffled(core + noise + stops + shorts + extras)
    parts = []
    for i, tok in enumerate(tokens):
        parts.append(tok)
        if i % 12 == 11:
            parts[-1] = tok + "।"  # danda sentence break
    text = " ".join(parts)

    deco = rng.uniforms(2)
    if deco[0] < 0.25:
        text = "<p>" + text + "</p>"
    if deco[1] < 0.15:
        text = text.replace(" ", "&nbsp;", 1)
    return text


def mini_corpus(n_articles: int = 200, seed: int = 7):
    """Generate the bundled demo corpus as a list of JSON-ready dicts.

    Dates span 2020-01-21 .. 2020-05-19 inclusive (both endpoints forced,
    120 days, 18 calendar weeks) with volume ramping toward later weeks.
    Roughly 15% of articles are English with a Bengali translation; the
    rest are Bengali. Locations are Dhaka-heavy with a sprinkling of
    international and unresolvable places.
    """
    from .corpus import default_gazetteer

    config = load_prep_config()
    gazetteer = default_gazetteer()
    pools = topic_pools(seed=seed, config=config)
    all_words = {t: w for t, w in pools.items()}
    stopword_list = sorted(config.stopwords)

    day_weights = 1.0 + 3.0 * np.arange(120) / 119.0
    day_cum = np.cumsum(day_weights / day_weights.sum())
    base = np.datetime64("2020-01-21")

    articles = []
    for i in range(n_articles):
        rng = CounterRng(derive_seed(seed, "article", i))
        u = rng.uniforms(10)

        if i < 48:
            class_label = CLASS_LABELS[i % 8]
            candidates = [t for t in _TOPICS if _TOPIC_CLASS[t] == class_label]
            topic = _pick(u, candidates, 0)
        else:
            topic = _pick(u, _TOPICS, 0)
            class_label = _TOPIC_CLASS[topic]
            if u[1] < 0.12:
                class_label = _pick(u, CLASS_LABELS, 2)
        subclass = _pick(u, _SUBCLASSES[class_label], 3)

        if i < 4:
            sentiment = "positive" if i % 2 == 0 else "negative"
        else:
            sentiment = ("positive" if u[4] < _POSITIVE_SHARE[class_label]
                         else "negative")

        if i == 0:
            day = 0
        elif i == n_articles - 1:
            day = 119
        else:
            day = int(np.searchsorted(day_cum, u[5], side="right"))
            day = min(day, 119)
        published = str(base + np.timedelta64(day, "D"))

        district = division = location = None
        if topic == "international" or u[6] < 0.06:
            location = _pick(u, _INTL_LOCATIONS, 7)
        elif u[6] < 0.66:
            district = _pick(u, _DISTRICT_POOL, 7)
            if u[8] < 0.5:
                division = gazetteer.district_to_division.get(district)
            location = district if u[9] < 0.6 else None
        elif u[6] < 0.85:
            location = _pick(u, _DISTRICT_POOL, 7)
        else:
            location = _pick(u, _VAGUE_LOCATIONS, 7)

        other = [w for t, ws in all_words.items() if t != topic for w in ws]
        body_rng = CounterRng(derive_seed(seed, "body", i))
        bengali = _bengali_body(body_rng, pools[topic], other,
                                stopword_list, config)

        language = "en" if i % 7 == 3 else "bn"
        if language == "en":
            body = _EN_TEMPLATES[i % len(_EN_TEMPLATES)]
            translated = bengali
        else:
            body, translated = bengali, None

        title_words = [pools[topic][min(int(x * 12), 11)]
                       for x in body_rng.uniforms(3)]
        record = {
            "id": f"art-{i:04d}",
            "source": _OUTLETS[i % len(_OUTLETS)],
            "language": language,
            "title": " ".join(title_words),
            "body": body,
            "published_date": published,
            "class": class_label,
            "subclass": subclass,
            "sentiment": sentiment,
            "topic": _TOPICS.index(topic),
        }
        if translated is not None:
            record["translated_body"] = translated
        if location is not None:
            record["location"] = location
        if district is not None:
            record["district"] = district
        if division is not None:
            record["division"] = division
        articles.append(record)
    return articles


def write_mini_corpus(path, n_articles: int = 200, seed: int = 7):
    records = mini_corpus(n_articles=n_articles, seed=seed)
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, ensure_ascii=False, sort_keys=True))
            fh.write("\n")
    return len(records)


if __name__ == "__main__":
    import sys
    from importlib.resources import files

    target = (sys.argv[1] if len(sys.argv) > 1
              else str(files("newsmonitor") / "resources" / "mini_corpus.jsonl"))
    n = write_mini_corpus(target)
    print(f"wrote {n} articles to {target}")
