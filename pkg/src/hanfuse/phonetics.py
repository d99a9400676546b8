"""Pinyin parsing and the 39-d phonetic embedding.

Syllables are first split into initial, final and tone, then rewritten in a
standard phonetic form: each initial becomes at most two base letters plus a
binary weight (so ``c`` and ``z`` both become ``ts`` and differ only in the
weight), each final becomes a multiset of single vowels plus an optional
nasal.  Both mappings are editable TSV files.

Vector layout::

    0-25   initial letters, multi-hot over a-z
    26     phonetic weight
    27-32  vowels, multi-hot over (a, o, e, i, u, v)
    33-34  nasal one-hot (n, ng)
    35-38  tone one-hot (tones 1-4; neutral tone is all zero)

Vowel blocks are summed, so vowel order is lost: ``hao4`` (standard form
``au``) and ``hua4`` (``ua``) encode identically.
"""

import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Dict, NamedTuple, Tuple

import numpy as np

from .errors import InvalidSyllable, MalformedLine, UnknownCharacter, UnknownInitial

DIM = 39
LETTER_OFFSET = 0
WEIGHT_INDEX = 26
VOWEL_OFFSET = 27
NASAL_OFFSET = 33
TONE_OFFSET = 35

VOWELS = "aoeiuv"
NASALS = ("n", "ng")
INITIALS = (
    "b", "p", "m", "f", "d", "t", "n", "l", "g", "k", "h", "j", "q", "x",
    "zh", "ch", "sh", "r", "z", "c", "s", "y", "w",
)

SYLLABLE_RE = re.compile(r"[a-zv]+[0-4]")


class SyllableParts(NamedTuple):
    initial: str
    final: str
    tone: int


@dataclass(frozen=True)
class FinalRecord:
    vowels: str
    nasal: str  # "", "n" or "ng"


def _data_lines(path):
    if path is None:
        raise ValueError("path required")
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line.strip() or line.startswith("#"):
                continue
            yield lineno, line.split("\t")


def load_initial_map(path) -> Dict[str, Tuple[str, float]]:
    """Read ``initial TAB letters TAB weight`` records."""
    mapping = {}
    for lineno, fields in _data_lines(path):
        if len(fields) != 3:
            raise MalformedLine(path, lineno, f"expected 3 fields, got {len(fields)}")
        initial, letters, weight = fields
        if initial not in INITIALS:
            raise MalformedLine(path, lineno, f"not a pinyin initial: {initial!r}")
        if len(letters) > 2 or not re.fullmatch(r"[a-z]*", letters):
            raise MalformedLine(path, lineno, f"bad standard form: {letters!r}")
        if weight not in ("0", "1", "0.0", "1.0"):
            raise MalformedLine(path, lineno, f"weight must be 0 or 1: {weight!r}")
        mapping[initial] = (letters, float(weight))
    missing = set(INITIALS) - set(mapping)
    if missing:
        raise MalformedLine(path, 0, f"initials missing from map: {sorted(missing)}")
    return mapping


def load_final_map(path) -> Dict[str, FinalRecord]:
    """Read ``final TAB vowels TAB nasal`` records (nasal is ``-``, ``n`` or ``ng``)."""
    mapping = {}
    for lineno, fields in _data_lines(path):
        if len(fields) != 3:
            raise MalformedLine(path, lineno, f"expected 3 fields, got {len(fields)}")
        final, vowels, nasal = fields
        if not re.fullmatch(r"[a-z]+", final):
            raise MalformedLine(path, lineno, f"bad final: {final!r}")
        if not vowels or any(v not in VOWELS for v in vowels):
            raise MalformedLine(path, lineno, f"bad vowel list: {vowels!r}")
        if nasal not in ("-", "n", "ng"):
            raise MalformedLine(path, lineno, f"bad nasal: {nasal!r}")
        mapping[final] = FinalRecord(vowels, "" if nasal == "-" else nasal)
    return mapping


@lru_cache(maxsize=None)
def _bundled(name):
    return str(resources.files("hanfuse") / "data" / name)


@lru_cache(maxsize=None)
def default_initial_map():
    return load_initial_map(_bundled("initials.tsv"))


@lru_cache(maxsize=None)
def default_final_map():
    return load_final_map(_bundled("finals.tsv"))


def parse_syllable(syllable: str, finals=None) -> SyllableParts:
    """Split a numbered-tone syllable such as ``"zhuang4"``.

    Two-letter initials win over their one-letter prefixes.
    """
    finals = default_final_map() if finals is None else finals
    if not isinstance(syllable, str) or not SYLLABLE_RE.fullmatch(syllable):
        raise InvalidSyllable(f"not a numbered pinyin syllable: {syllable!r}")
    body, tone = syllable[:-1], int(syllable[-1])
    initial = ""
    if body[:2] in INITIALS:
        initial = body[:2]
    elif body[:1] in INITIALS:
        initial = body[:1]
    final = body[len(initial):]
    if not final:
        raise InvalidSyllable(f"empty final in {syllable!r}")
    if final not in finals:
        raise InvalidSyllable(f"unknown final {final!r} in {syllable!r}")
    return SyllableParts(initial, final, tone)


def map_initial(initial: str, initials=None) -> Tuple[str, float]:
    if initial == "":
        return "", 0.0
    initials = default_initial_map() if initials is None else initials
    try:
        return initials[initial]
    except KeyError:
        raise UnknownInitial(f"unknown initial {initial!r}") from None


def syllable_vector(syllable: str, initials=None, finals=None) -> np.ndarray:
    finals = default_final_map() if finals is None else finals
    parts = parse_syllable(syllable, finals)
    letters, weight = map_initial(parts.initial, initials)
    vec = np.zeros(DIM)
    for ch in letters:
        vec[LETTER_OFFSET + ord(ch) - ord("a")] += 1.0
    vec[WEIGHT_INDEX] = weight
    record = finals[parts.final]
    for v in record.vowels:
        vec[VOWEL_OFFSET + VOWELS.index(v)] += 1.0
    if record.nasal:
        vec[NASAL_OFFSET + NASALS.index(record.nasal)] = 1.0
    if parts.tone:
        vec[TONE_OFFSET + parts.tone - 1] = 1.0
    return vec


def encode_phonetic(char, table, mode="strict", initials=None, finals=None) -> np.ndarray:
    """Phonetic embedding of ``char`` from its canonical (first listed) syllable.

    In lenient mode a character missing from ``table`` encodes as zeros.
    """
    syllables = table.entries.get(char)
    if not syllables:
        if mode == "lenient":
            return np.zeros(DIM)
        raise UnknownCharacter(f"no pinyin for {char!r}")
    return syllable_vector(syllables[0], initials, finals)


def check_layout(vec) -> list:
    """Return the list of violated block constraints (empty when valid)."""
    problems = []
    letters = vec[LETTER_OFFSET:WEIGHT_INDEX]
    if letters.sum() not in (0.0, 1.0, 2.0):
        problems.append("initial letter count not in {0,1,2}")
    if vec[WEIGHT_INDEX] not in (0.0, 1.0):
        problems.append("weight not binary")
    if vec[VOWEL_OFFSET:NASAL_OFFSET].sum() < 1:
        problems.append("no vowel")
    if vec[NASAL_OFFSET:TONE_OFFSET].sum() > 1:
        problems.append("more than one nasal")
    if vec[TONE_OFFSET:].sum() > 1:
        problems.append("more than one tone")
    if (vec < 0).any():
        problems.append("negative entry")
    return problems
