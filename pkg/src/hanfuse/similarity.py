"""L2 distances between characters in each feature space, and exhaustive
nearest-neighbor search over the character inventory."""

import enum
from typing import List, NamedTuple, Tuple

import numpy as np

from . import glyph, phonetics
from .errors import KTooLarge, UnknownCharacter


class FeatureSpace(str, enum.Enum):
    SEMANTIC = "semantic"
    GLYPH = "glyph"
    PHONETIC = "phonetic"


class NeighborList(NamedTuple):
    query: str
    space: FeatureSpace
    neighbors: List[Tuple[str, float]]


def encode(char, space, tables, mode="strict") -> np.ndarray:
    space = FeatureSpace(space)
    if space is FeatureSpace.GLYPH:
        return glyph.encode_glyph(char, tables.wubi, mode)
    if space is FeatureSpace.PHONETIC:
        return phonetics.encode_phonetic(char, tables.pinyin, mode, tables.initials, tables.finals)
    return tables.semantic_vector(char, mode)


def l2(diff):
    return np.sqrt(np.sum(diff * diff, axis=-1))


def distance(c1, c2, space, tables) -> float:
    return float(l2(encode(c1, space, tables) - encode(c2, space, tables)))


def space_matrix(space, tables):
    """(characters, matrix) of every inventory character encodable in ``space``.

    Cached on ``tables``; characters are in code-point order.
    """
    space = FeatureSpace(space)
    key = ("space", space)
    if key not in tables._cache:
        chars = []
        rows = []
        for ch in tables.inventory:
            try:
                rows.append(encode(ch, space, tables))
            except UnknownCharacter:
                continue
            chars.append(ch)
        tables._cache[key] = (tuple(chars), np.array(rows))
    return tables._cache[key]


def knn(query, space, k, tables) -> NeighborList:
    """The ``k`` closest inventory characters to ``query``, excluding itself.

    Ties are broken by ascending code point, so results are deterministic.
    """
    space = FeatureSpace(space)
    q = encode(query, space, tables)
    chars, matrix = space_matrix(space, tables)
    available = len(chars) - (1 if query in chars else 0)
    if k < 0 or k > available:
        raise KTooLarge(f"k={k} but only {available} candidate characters in {space.value} space")
    if k == 0:
        return NeighborList(query, space, [])
    dists = l2(matrix - q)
    order = np.lexsort((np.array([ord(c) for c in chars]), dists))
    out = []
    for i in order:
        if chars[i] == query:
            continue
        out.append((chars[i], float(dists[i])))
        if len(out) == k:
            break
    return NeighborList(query, space, out)


def ranked_neighbors(query, space, tables):
    """Every candidate ordered as :func:`knn` would, query excluded (generator)."""
    space = FeatureSpace(space)
    q = encode(query, space, tables)
    chars, matrix = space_matrix(space, tables)
    dists = l2(matrix - q)
    order = np.lexsort((np.array([ord(c) for c in chars]), dists))
    for i in order:
        if chars[i] != query:
            yield chars[i], float(dists[i])
