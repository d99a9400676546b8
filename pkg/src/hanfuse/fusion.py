"""Per-sentence fused embeddings.

Three strategies are supported:

* ``concat``: each row is ``[semantic | glyph | phonetic]``.
* ``concat-linear``: an affine map applied to the concatenated row.
* ``multi-lstm``: the three parts are kept apart and fused inside the tagger,
  one BiLSTM per part.
"""

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import glyph, phonetics
from .errors import EmptySentence, ShapeMismatch

CONCAT = "concat"
CONCAT_LINEAR = "concat-linear"
MULTI_BRANCH = "multi-lstm"
STRATEGIES = (CONCAT, CONCAT_LINEAR, MULTI_BRANCH)

EXTRA_DIM = glyph.DIM + phonetics.DIM  # 64


@dataclass
class FusionStrategy:
    name: str = CONCAT
    weights: Optional[np.ndarray] = None  # concat-linear only, out_dim x in_dim
    bias: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.name not in STRATEGIES:
            raise ValueError(f"unknown fusion strategy {self.name!r}; expected one of {STRATEGIES}")

    @property
    def out_dim(self):
        return None if self.weights is None else self.weights.shape[0]

    @classmethod
    def concat_linear(cls, in_dim, out_dim=None, rng=None):
        """Uniform(-1/sqrt(in_dim), 1/sqrt(in_dim)) initialisation."""
        out_dim = in_dim if out_dim is None else out_dim
        rng = np.random.default_rng(rng)
        bound = 1.0 / np.sqrt(in_dim)
        return cls(
            CONCAT_LINEAR,
            rng.uniform(-bound, bound, (out_dim, in_dim)),
            rng.uniform(-bound, bound, out_dim),
        )


@dataclass
class FusedSequence:
    sentence: Sequence[str]
    matrix: Optional[np.ndarray]
    semantic: Optional[np.ndarray] = None
    glyph: Optional[np.ndarray] = None
    phonetic: Optional[np.ndarray] = None
    strategy: str = CONCAT

    @property
    def parts(self):
        return self.semantic, self.glyph, self.phonetic


def part_rows(char, tables, mode="strict"):
    cache = tables._cache.setdefault(("rows", mode), {})
    rows = cache.get(char)
    if rows is None:
        rows = (
            tables.semantic_vector(char, mode),
            glyph.encode_glyph(char, tables.wubi, mode),
            phonetics.encode_phonetic(char, tables.pinyin, mode, tables.initials, tables.finals),
        )
        cache[char] = rows
    return rows


def embed_parts(sentence, tables, mode="strict"):
    if len(sentence) == 0:
        raise EmptySentence("cannot embed an empty sentence")
    rows = [part_rows(ch, tables, mode) for ch in sentence]
    return tuple(np.array([r[k] for r in rows]).reshape(len(rows), -1) for k in range(3))


def concat_parts(sem, gly, pho):
    return np.concatenate([sem, gly, pho], axis=1)


def embed_sentence(sentence, tables, strategy=None, mode="strict") -> FusedSequence:
    strategy = FusionStrategy() if strategy is None else strategy
    if isinstance(strategy, str):
        strategy = FusionStrategy(strategy)
    sem, gly, pho = embed_parts(sentence, tables, mode)
    if strategy.name == MULTI_BRANCH:
        return FusedSequence(list(sentence), None, sem, gly, pho, MULTI_BRANCH)
    x = concat_parts(sem, gly, pho)
    if strategy.name == CONCAT_LINEAR:
        if strategy.weights is None or strategy.weights.shape[1] != x.shape[1]:
            raise ShapeMismatch(
                f"linear fusion expects input width {x.shape[1]}, weights are "
                f"{None if strategy.weights is None else strategy.weights.shape}"
            )
        bias = 0.0 if strategy.bias is None else strategy.bias
        x = x @ strategy.weights.T + bias
    return FusedSequence(list(sentence), x, sem, gly, pho, strategy.name)
