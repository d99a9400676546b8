"""Loaders for the Five-Strokes code table, the pinyin table and static
character vectors, plus the combined character inventory.

All three formats are plain UTF-8 text.  Code and pinyin tables hold one
``character TAB value`` record per line with ``#`` comments; the vector file
uses the common word2vec text layout (``count dim`` header, then one row per
character).
"""

import os
import re
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Optional, Tuple

import numpy as np

from . import phonetics
from .errors import (
    BadHeader,
    DimensionMismatch,
    EmptyIntersection,
    InvalidCode,
    InvalidSyllable,
    MalformedLine,
    NotSingleChar,
    ParseFloatError,
    UnknownCharacter,
)

DATA_ENV = "HANFUSE_DATA_DIR"
DATA_FILES = {
    "wubi": "wubi.tsv",
    "pinyin": "pinyin.tsv",
    "initials": "initials.tsv",
    "finals": "finals.tsv",
    "vectors": "vectors.txt",
}

_CODE_RE = re.compile(r"[a-y]{1,4}")
_CJK_RANGES = (
    (0x3007, 0x3007),
    (0x3400, 0x4DBF),
    (0x4E00, 0x9FFF),
    (0xF900, 0xFAFF),
    (0x20000, 0x323AF),
)


class TableWarning(UserWarning):
    pass


def is_cjk(ch: str) -> bool:
    cp = ord(ch)
    return any(lo <= cp <= hi for lo, hi in _CJK_RANGES)


@dataclass(frozen=True)
class WubiTable:
    entries: Dict[str, str]

    def __contains__(self, ch):
        return ch in self.entries

    def __len__(self):
        return len(self.entries)


@dataclass(frozen=True)
class PinyinTable:
    entries: Dict[str, List[str]]

    def __contains__(self, ch):
        return ch in self.entries

    def __len__(self):
        return len(self.entries)

    def canonical(self, ch):
        return self.entries[ch][0]


@dataclass(frozen=True)
class SemanticTable:
    dimension: int
    vectors: Dict[str, np.ndarray]

    def __contains__(self, ch):
        return ch in self.vectors

    def __len__(self):
        return len(self.vectors)


@dataclass(frozen=True)
class CharacterInventory:
    characters: Tuple[str, ...]
    has_wubi: Dict[str, bool]
    has_pinyin: Dict[str, bool]
    has_semantic: Dict[str, bool]

    def __len__(self):
        return len(self.characters)

    def __contains__(self, ch):
        return ch in self.has_wubi

    def __iter__(self):
        return iter(self.characters)


def _records(path):
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.rstrip("\r\n")
            if not line or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise MalformedLine(path, lineno, f"expected 2 tab-separated fields, got {len(fields)}")
            yield lineno, fields[0], fields[1]


def _check_char(path, lineno, ch):
    if len(ch) != 1 or not is_cjk(ch):
        raise NotSingleChar(f"{path}:{lineno}: key {ch!r} is not a single CJK character")


def load_wubi_table(path) -> WubiTable:
    entries = {}
    for lineno, ch, code in _records(path):
        _check_char(path, lineno, ch)
        if not _CODE_RE.fullmatch(code):
            raise InvalidCode(f"{path}:{lineno}: invalid Five-Strokes code {code!r} for {ch!r}")
        if ch in entries:
            warnings.warn(f"{path}:{lineno}: duplicate entry for {ch!r}, keeping {code!r}", TableWarning, stacklevel=2)
        entries[ch] = code
    return WubiTable(entries)


def load_pinyin_table(path, finals=None) -> PinyinTable:
    """Polyphones list several comma-separated syllables; the first is canonical."""
    entries = {}
    for lineno, ch, value in _records(path):
        _check_char(path, lineno, ch)
        syllables = value.split(",")
        for syl in syllables:
            try:
                phonetics.parse_syllable(syl, finals)
            except InvalidSyllable as exc:
                raise InvalidSyllable(f"{path}:{lineno}: {exc}") from None
        if ch in entries:
            warnings.warn(f"{path}:{lineno}: duplicate entry for {ch!r}", TableWarning, stacklevel=2)
        entries[ch] = syllables
    return PinyinTable(entries)


def load_semantic_table(path) -> SemanticTable:
    """Read a word2vec-style text file.

    Tokens longer than one character are skipped (pre-trained files often mix
    words into a character vocabulary); a header count that disagrees with the
    number of rows is only a warning.
    """
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2 or not all(h.isdigit() for h in header) or int(header[1]) <= 0:
            raise BadHeader(f"{path}: expected '<count> <dimension>' header, got {' '.join(header)!r}")
        count, dim = int(header[0]), int(header[1])
        vectors = {}
        skipped = 0
        for lineno, line in enumerate(fh, 2):
            parts = line.rstrip("\r\n").split(" ")
            parts = [p for p in parts if p != ""]
            if not parts:
                continue
            token, values = parts[0], parts[1:]
            if len(values) != dim:
                raise DimensionMismatch(f"{path}:{lineno}: {len(values)} values, header says {dim}")
            try:
                vec = np.array([float(v) for v in values])
            except ValueError:
                raise ParseFloatError(f"{path}:{lineno}: unparsable float in row for {token!r}") from None
            if len(token) != 1:
                skipped += 1
                continue
            vectors[token] = vec
    if skipped:
        warnings.warn(f"{path}: skipped {skipped} multi-character tokens", TableWarning, stacklevel=2)
    if count != len(vectors) + skipped:
        warnings.warn(f"{path}: header declares {count} rows, found {len(vectors) + skipped}", TableWarning, stacklevel=2)
    return SemanticTable(dim, vectors)


def dump_wubi_table(table: WubiTable, path):
    with open(path, "w", encoding="utf-8") as fh:
        for ch, code in table.entries.items():
            fh.write(f"{ch}\t{code}\n")


def dump_pinyin_table(table: PinyinTable, path):
    with open(path, "w", encoding="utf-8") as fh:
        for ch, syls in table.entries.items():
            fh.write(f"{ch}\t{','.join(syls)}\n")


def dump_semantic_table(table: SemanticTable, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{len(table.vectors)} {table.dimension}\n")
        for ch, vec in table.vectors.items():
            fh.write(ch + " " + " ".join(repr(float(v)) for v in vec) + "\n")


def build_inventory(wubi: WubiTable, pinyin: PinyinTable, semantic: Optional[SemanticTable] = None) -> CharacterInventory:
    chars = sorted(set(wubi.entries) & set(pinyin.entries))
    if not chars:
        raise EmptyIntersection("no character has both a Five-Strokes code and a pinyin reading")
    sem = semantic.vectors if semantic is not None else {}
    return CharacterInventory(
        characters=tuple(chars),
        has_wubi={c: True for c in chars},
        has_pinyin={c: True for c in chars},
        has_semantic={c: c in sem for c in chars},
    )


def resolve_paths(data_dir=None, **overrides):
    """Fill in missing data paths from ``data_dir``, ``$HANFUSE_DATA_DIR``,
    then the bundled tables."""
    base = data_dir or os.environ.get(DATA_ENV)
    paths = {}
    for key, name in DATA_FILES.items():
        if overrides.get(key):
            paths[key] = overrides[key]
        elif base:
            paths[key] = os.path.join(base, name)
        else:
            paths[key] = bundled_path(name)
    return paths


def bundled_path(name):
    from importlib import resources

    return str(resources.files("hanfuse") / "data" / name)


@dataclass
class Tables:
    """Every resource needed to embed characters, loaded once and shared."""

    wubi: WubiTable
    pinyin: PinyinTable
    semantic: Optional[SemanticTable]
    initials: Dict[str, Tuple[str, float]]
    finals: Dict[str, "phonetics.FinalRecord"]
    _cache: dict = field(default_factory=dict, repr=False)

    @classmethod
    def load(cls, data_dir=None, semantic=True, **paths):
        p = resolve_paths(data_dir, **paths)
        finals = phonetics.load_final_map(p["finals"])
        initials = phonetics.load_initial_map(p["initials"])
        return cls(
            wubi=load_wubi_table(p["wubi"]),
            pinyin=load_pinyin_table(p["pinyin"], finals),
            semantic=load_semantic_table(p["vectors"]) if semantic else None,
            initials=initials,
            finals=finals,
        )

    @classmethod
    def bundled(cls):
        key = "_bundled"
        if key not in _SHARED:
            _SHARED[key] = cls.load(data_dir=os.path.dirname(bundled_path("wubi.tsv")))
        return _SHARED[key]

    @property
    def semantic_dim(self):
        return self.semantic.dimension if self.semantic is not None else 0

    @cached_property
    def inventory(self) -> CharacterInventory:
        return build_inventory(self.wubi, self.pinyin, self.semantic)

    def semantic_vector(self, ch, mode="strict"):
        if self.semantic is not None and ch in self.semantic.vectors:
            return self.semantic.vectors[ch]
        if mode == "lenient":
            return np.zeros(self.semantic_dim)
        raise UnknownCharacter(f"no semantic vector for {ch!r}")


_SHARED = {}
