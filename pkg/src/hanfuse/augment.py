"""Character-substitution variants of labeled corpora.

Characters inside gold entity spans are swapped, independently with
probability ``p``, for one of their nearest neighbors in the glyph or
phonetic space.  Tags are never changed.
"""

import logging
from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Sequence

import numpy as np

from . import similarity
from .errors import UnknownCharacter
from .evaluation import LabeledCorpus, extract_spans
from .similarity import FeatureSpace

log = logging.getLogger(__name__)


@dataclass
class AugmentConfig:
    """Substitution knobs.

    The defaults (``p=0.3``, ``neighbor_pool_k=5``) are operational choices,
    not values taken from any reference experiment.
    """

    spaces: Sequence[str] = ("glyph", "phonetic")
    p: float = 0.3
    neighbor_pool_k: int = 5
    max_distance: Optional[float] = None
    seed: int = 0
    emit_pairs: bool = False

    def __post_init__(self):
        if not self.spaces:
            raise ValueError("at least one feature space is required")
        self.spaces = tuple(FeatureSpace(s) for s in self.spaces)
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")
        if self.neighbor_pool_k < 1:
            raise ValueError("neighbor_pool_k must be at least 1")


class SubstitutionRecord(NamedTuple):
    sentence: int
    position: int
    original: str
    replacement: str
    space: str
    distance: float

    def tsv(self):
        return f"{self.sentence}\t{self.position}\t{self.original}\t{self.replacement}\t{self.space}\t{self.distance:.6f}"


RECORD_HEADER = "sentence\tposition\toriginal\treplacement\tspace\tdistance"


@dataclass
class AugmentStats:
    eligible: int = 0
    uncovered: int = 0
    empty_pool: int = 0
    replaced: int = 0


def neighbor_pool(char, space, tables, k, exclude=(), max_distance=None):
    """Up to ``k`` nearest neighbors of ``char`` not in ``exclude`` and within ``max_distance``."""
    pool = []
    for cand, dist in similarity.ranked_neighbors(char, space, tables):
        if max_distance is not None and dist > max_distance:
            break
        if cand in exclude:
            continue
        pool.append(cand)
        if len(pool) == k:
            break
    return pool


def substitute_corpus(corpus, tables, config: AugmentConfig):
    """Return (augmented corpus, records, stats).

    Every sentence gets its own generator seeded by ``(seed, sentence index)``,
    so output is reproducible and independent of processing order.
    """
    out = LabeledCorpus()
    records: List[SubstitutionRecord] = []
    stats = AugmentStats()
    inventory = tables.inventory
    pools = {}
    for s_idx, (chars, tags) in enumerate(corpus):
        rng = np.random.default_rng([config.seed, s_idx])
        new_chars = list(chars)
        for span in extract_spans(tags):
            entity = set(chars[span.start:span.end + 1])
            for pos in range(span.start, span.end + 1):
                ch = chars[pos]
                stats.eligible += 1
                if ch not in inventory:
                    stats.uncovered += 1
                    continue
                if rng.random() >= config.p:
                    continue
                space = config.spaces[int(rng.integers(len(config.spaces)))]
                key = (ch, space, frozenset(entity))
                if key not in pools:
                    try:
                        pools[key] = neighbor_pool(
                            ch, space, tables, config.neighbor_pool_k, entity, config.max_distance
                        )
                    except UnknownCharacter:
                        pools[key] = None
                pool = pools[key]
                if pool is None:
                    stats.uncovered += 1
                    continue
                if not pool:
                    stats.empty_pool += 1
                    continue
                rep = pool[int(rng.integers(len(pool)))]
                new_chars[pos] = rep
                stats.replaced += 1
                records.append(
                    SubstitutionRecord(s_idx, pos, ch, rep, space.value, similarity.distance(ch, rep, space, tables))
                )
        changed = new_chars != list(chars)
        if changed and config.emit_pairs:
            out.append((list(chars), list(tags)))
        out.append((new_chars, list(tags)))
    if stats.uncovered:
        log.warning("%d entity characters not covered by the inventory were left unchanged", stats.uncovered)
    if stats.empty_pool:
        log.warning("%d characters had no admissible neighbor and were left unchanged", stats.empty_pool)
    return out, records, stats
