import numpy as np
import pytest

from hanfuse import similarity
from hanfuse.augment import AugmentConfig, RECORD_HEADER, substitute_corpus
from hanfuse.evaluation import LabeledCorpus, extract_spans
from hanfuse.experiments import synthetic_corpus


@pytest.fixture(scope="module")
def corpus(tables):
    return synthetic_corpus(tables, 60, seed=3).train


def test_p_zero_is_identity(corpus, tables):
    out, records, stats = substitute_corpus(corpus, tables, AugmentConfig(p=0.0))
    assert out == corpus and records == [] and stats.replaced == 0


def test_p_one_nearest_neighbor(corpus, tables):
    cfg = AugmentConfig(spaces=("glyph",), p=1.0, neighbor_pool_k=1)
    out, records, _ = substitute_corpus(corpus, tables, cfg)
    chars, X = similarity.space_matrix("glyph", tables)
    for (src, tags), (dst, _) in zip(corpus, out):
        for span in extract_spans(tags):
            entity = set(src[span.start:span.end + 1])
            for pos in range(span.start, span.end + 1):
                # brute-force: sort all other characters by (distance, code point)
                q = X[chars.index(src[pos])]
                ranked = sorted(
                    (float(np.sqrt(((X[i] - q) ** 2).sum())), ord(c), c)
                    for i, c in enumerate(chars) if c != src[pos] and c not in entity
                )
                assert dst[pos] == ranked[0][2]
    assert len(records) == sum(t != "O" for tags in corpus.tag_sequences for t in tags)


def test_labels_and_context_untouched(corpus, tables):
    out, records, _ = substitute_corpus(corpus, tables, AugmentConfig(p=0.7, seed=1))
    for (src, tags), (dst, out_tags) in zip(corpus, out):
        assert out_tags == tags
        for c, d, t in zip(src, dst, tags):
            if t == "O":
                assert c == d
    for r in records:
        assert r.replacement != r.original
        assert corpus[r.sentence][1][r.position] != "O"
        assert r.distance == similarity.distance(r.original, r.replacement, r.space, tables)


def test_deterministic(corpus, tables):
    cfg = AugmentConfig(p=0.5, seed=9)
    assert substitute_corpus(corpus, tables, cfg)[:2] == substitute_corpus(corpus, tables, cfg)[:2]


def test_replacement_count_binomial(corpus, tables):
    p = 0.3
    for seed in range(10):
        _, _, stats = substitute_corpus(corpus, tables, AugmentConfig(p=p, seed=seed))
        n = stats.eligible - stats.uncovered
        sigma = np.sqrt(n * p * (1 - p))
        assert abs(stats.replaced + stats.empty_pool - n * p) <= 3 * sigma


def test_max_distance_filter(corpus, tables):
    _, records, stats = substitute_corpus(corpus, tables, AugmentConfig(p=1.0, max_distance=1.0))
    assert all(r.distance <= 1.0 for r in records)
    assert stats.replaced + stats.empty_pool == stats.eligible - stats.uncovered


def test_pairs_interleave(tables):
    corpus = LabeledCorpus([(list("浦江路"), ["B-LOC", "I-LOC", "I-LOC"]), (list("好"), ["O"])])
    out, records, _ = substitute_corpus(corpus, tables, AugmentConfig(p=1.0, emit_pairs=True))
    assert out[0] == corpus[0] and out[1][0] != corpus[0][0] and out[2] == corpus[1]
    assert len(out) == 3 and RECORD_HEADER.count("\t") == records[0].tsv().count("\t")


def test_config_validation():
    with pytest.raises(ValueError):
        AugmentConfig(p=1.5)
    with pytest.raises(ValueError):
        AugmentConfig(neighbor_pool_k=0)
    with pytest.raises(ValueError):
        AugmentConfig(spaces=())
