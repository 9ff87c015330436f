"""Loading pretrained word vectors into an embedding matrix.

Reads the plain-text word2vec format: an optional first line with two
integers (vocabulary size and dimension), then one word per line followed
by its vector components separated by whitespace. Words present in the
file keep their published vectors; everything else falls back to a small
seeded uniform draw so runs stay reproducible without the vector file
covering the whole vocabulary.
"""

from __future__ import annotations

import numpy as np

from ..rng import CounterRng, derive_seed
from .layers import PAD_ROW_ID


class EmbeddingError(ValueError):
    pass


def _parse_header(line: str):
    parts = line.split()
    if len(parts) == 2:
        try:
            count, dim = int(parts[0]), int(parts[1])
        except ValueError:
            return None
        if count > 0 and dim > 0:
            return count, dim
    return None


def load_word_vectors(path, words, dim: int, seed: int = 0) -> np.ndarray:
    """Build a (len(words), dim) matrix from a word2vec text file.

    ``words`` is the id-ordered vocabulary; row i of the result is the
    vector for words[i]. Row ``PAD_ROW_ID`` is always zero. Words missing
    from the file get a U(-0.05, 0.05) draw seeded by the word itself, so
    the same word maps to the same fallback vector regardless of vocabulary
    order or file coverage.
    """
    words = tuple(words)
    wanted = {w: i for i, w in enumerate(words)}
    if len(wanted) != len(words):
        raise EmbeddingError("duplicate words in vocabulary")
    matrix = np.zeros((len(words), dim), dtype=np.float64)
    seen = np.zeros(len(words), dtype=bool)

    with open(path, "r", encoding="utf-8") as fh:
        first = fh.readline()
        if not first:
            raise EmbeddingError(f"empty vector file: {path}")
        header = _parse_header(first)
        lines = fh if header is not None else _chain_first(first, fh)
        file_dim = header[1] if header is not None else None
        for lineno, raw in enumerate(lines, start=2 if header else 1):
            raw = raw.rstrip("\n")
            if not raw.strip():
                continue
            pieces = raw.split()
            word, comps = pieces[0], pieces[1:]
            if file_dim is None:
                file_dim = len(comps)
            if file_dim != dim:
                raise EmbeddingError(
                    f"vector file has dimension {file_dim}, expected {dim}"
                )
            if len(comps) != file_dim:
                raise EmbeddingError(
                    f"line {lineno}: expected {file_dim} components, got {len(comps)}"
                )
            idx = wanted.get(word)
            if idx is None or seen[idx]:
                continue
            try:
                vec = np.array([float(c) for c in comps], dtype=np.float64)
            except ValueError as exc:
                raise EmbeddingError(f"line {lineno}: bad float ({exc})") from None
            matrix[idx] = vec
            seen[idx] = True

    for i, word in enumerate(words):
        if seen[i] or i == PAD_ROW_ID:
            continue
        rng = CounterRng(derive_seed(seed, "embed", word))
        matrix[i] = rng.uniform(-0.05, 0.05, size=dim)
    matrix[PAD_ROW_ID] = 0.0
    return matrix


def _chain_first(first, fh):
    yield first
    yield from fh
