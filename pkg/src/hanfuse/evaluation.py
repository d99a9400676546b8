"""Column-format corpora and entity-level precision / recall / F1."""

from dataclasses import dataclass
from typing import Iterable, List, NamedTuple, Sequence, Tuple

from .errors import EmptyCorpus, LengthMismatch, MalformedLine, UnknownTagFormat


class LabeledCorpus(list):
    """A list of ``(characters, tags)`` pairs, both lists of equal length."""

    @property
    def tag_sequences(self):
        return [tags for _, tags in self]


class EntitySpan(NamedTuple):
    start: int
    end: int  # inclusive
    type: str


@dataclass
class Metrics:
    precision: float
    recall: float
    f1: float
    tp: int
    predicted: int
    gold: int
    repairs: int = 0

    def tsv(self):
        return (
            f"{self.precision:.6f}\t{self.recall:.6f}\t{self.f1:.6f}\t"
            f"{self.tp}\t{self.predicted}\t{self.gold}\t{self.repairs}"
        )


def check_tag(tag):
    if tag == "O":
        return
    if len(tag) > 2 and tag[:2] in ("B-", "I-"):
        return
    raise UnknownTagFormat(f"not a BIO tag: {tag!r}")


def load_corpus(path) -> LabeledCorpus:
    corpus = LabeledCorpus()
    chars, tags = [], []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.rstrip("\r\n")
            if not line.strip():
                if chars:
                    corpus.append((chars, tags))
                    chars, tags = [], []
                continue
            fields = line.split("\t")
            if len(fields) != 2 or len(fields[0]) != 1:
                raise MalformedLine(path, lineno, f"expected 'character<TAB>tag', got {line!r}")
            try:
                check_tag(fields[1])
            except UnknownTagFormat as exc:
                raise UnknownTagFormat(f"{path}:{lineno}: {exc}") from None
            chars.append(fields[0])
            tags.append(fields[1])
    if chars:
        corpus.append((chars, tags))
    if not corpus:
        raise EmptyCorpus(f"{path}: no sentences")
    return corpus


def write_corpus(corpus, path_or_file):
    own = isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__")
    fh = open(path_or_file, "w", encoding="utf-8") if own else path_or_file
    try:
        for chars, tags in corpus:
            for c, t in zip(chars, tags):
                fh.write(f"{c}\t{t}\n")
            fh.write("\n")
    finally:
        if own:
            fh.close()


def extract_spans_counted(tags: Sequence[str]) -> Tuple[List[EntitySpan], int]:
    """Spans plus the number of stray ``I-X`` tags promoted to span starts."""
    spans = []
    repairs = 0
    start = None
    kind = None
    for i, tag in enumerate(tags):
        if tag.startswith("I-") and kind == tag[2:]:
            continue
        if start is not None:
            spans.append(EntitySpan(start, i - 1, kind))
            start = kind = None
        if tag.startswith("B-") or tag.startswith("I-"):
            if tag.startswith("I-"):
                repairs += 1
            start, kind = i, tag[2:]
    if start is not None:
        spans.append(EntitySpan(start, len(tags) - 1, kind))
    return spans, repairs


def extract_spans(tags: Sequence[str]) -> List[EntitySpan]:
    return extract_spans_counted(tags)[0]


def spans_to_tags(spans: Iterable[EntitySpan], length: int) -> List[str]:
    tags = ["O"] * length
    for s in spans:
        tags[s.start] = f"B-{s.type}"
        for i in range(s.start + 1, s.end + 1):
            tags[i] = f"I-{s.type}"
    return tags


def prf(tp, predicted, gold):
    precision = tp / predicted if predicted else 1.0
    recall = tp / gold if gold else 1.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f1


def micro_metrics(gold, predicted) -> Metrics:
    """Exact-match entity metrics pooled over the corpus.

    ``gold`` is a corpus of (characters, tags) pairs, ``predicted`` a list of
    tag sequences aligned with it.
    """
    if len(gold) != len(predicted):
        raise LengthMismatch(f"{len(gold)} gold sentences, {len(predicted)} predictions")
    tp = n_pred = n_gold = repairs = 0
    for k, ((_, gold_tags), pred_tags) in enumerate(zip(gold, predicted)):
        if len(gold_tags) != len(pred_tags):
            raise LengthMismatch(f"sentence {k}: {len(gold_tags)} gold tags, {len(pred_tags)} predicted")
        g = set(extract_spans(gold_tags))
        p, r = extract_spans_counted(pred_tags)
        repairs += r
        p = set(p)
        tp += len(g & p)
        n_pred += len(p)
        n_gold += len(g)
    return Metrics(*prf(tp, n_pred, n_gold), tp, n_pred, n_gold, repairs)
