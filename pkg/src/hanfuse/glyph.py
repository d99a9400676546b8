"""Five-Strokes glyph embedding.

A character's code (up to four letters over a-y) is turned into the sum of
the letters' one-hot vectors.  Summing keeps the vector at 25 dimensions but
throws away root order: anagram codes collide.
"""

import numpy as np

from .errors import InvalidLetter, UnknownCharacter

DIM = 25
ALPHABET = "abcdefghijklmnopqrstuvwxy"


def glyph_alphabet_index(letter: str) -> int:
    if len(letter) != 1 or letter not in ALPHABET:
        raise InvalidLetter(f"not a Five-Strokes key: {letter!r}")
    return ord(letter) - ord("a")


def code_vector(code: str) -> np.ndarray:
    vec = np.zeros(DIM)
    for letter in code:
        vec[glyph_alphabet_index(letter)] += 1.0
    return vec


def encode_glyph(char, table, mode="strict") -> np.ndarray:
    code = table.entries.get(char)
    if code is None:
        if mode == "lenient":
            return np.zeros(DIM)
        raise UnknownCharacter(f"no Five-Strokes code for {char!r}")
    return code_vector(code)
