import numpy as np
import pytest

from hanfuse import fusion
from hanfuse.errors import ShapeMismatch, StrategyMismatch, TagNotInTagSet, UnknownTagFormat
from hanfuse.tagger import model as M
from hanfuse.tagger.model import TagSet, TaggerModel
from oracles import model_gradient_errors, random_parts

TAGS = TagSet.from_types(["PER", "LOC"])


def small(strategy, seed=0, **kw):
    return TaggerModel.create(strategy, TAGS, 4, hidden=3, seed=seed, **kw)


def test_tagset_layout():
    assert TAGS.labels[0] == "O"
    assert TAGS.decode(TAGS.encode(["B-LOC", "I-LOC", "O"])) == ["B-LOC", "I-LOC", "O"]
    with pytest.raises(TagNotInTagSet):
        TAGS.encode(["B-ORG"])
    with pytest.raises(UnknownTagFormat):
        TagSet(["O", "X-PER"])


def test_parameter_names_by_strategy():
    assert {k.split(".")[0] for k in small(fusion.CONCAT).params} == {"lstm", "proj", "crf"}
    assert "fuse.W" in small(fusion.CONCAT_LINEAR).params
    names = small(fusion.MULTI_BRANCH).params
    assert {"semantic.lstm.W", "glyph.proj.W", "phonetic.lstm.U", "comb.W"} <= set(names)
    assert small(fusion.CONCAT, features=("semantic",)).params["lstm.W"].shape[2] == 4
    with pytest.raises(StrategyMismatch):
        small(fusion.MULTI_BRANCH, features=("semantic",))


def test_seeded_init_reproducible():
    a, b = small(fusion.CONCAT_LINEAR, seed=7), small(fusion.CONCAT_LINEAR, seed=7)
    assert all(np.array_equal(a.params[k], b.params[k]) for k in a.params)


def test_multi_branch_starts_as_average(tables):
    model = TaggerModel.create(fusion.MULTI_BRANCH, TAGS, tables.semantic_dim, hidden=4)
    seq = fusion.embed_sentence("浦江路", tables, fusion.FusionStrategy(fusion.MULTI_BRANCH))
    combined = M.model_emissions(seq, model)
    _, _, (branches, _) = M.forward(model, [seq.parts])
    mean = sum(br[-1][0] for br in branches) / 3
    np.testing.assert_allclose(combined, mean, atol=1e-14)


def test_glyph_branch_matters(tables):
    model = TaggerModel.create(fusion.MULTI_BRANCH, TAGS, tables.semantic_dim, hidden=4)
    seq = fusion.embed_sentence("浦江路", tables, fusion.FusionStrategy(fusion.MULTI_BRANCH))
    before = M.model_emissions(seq, model)
    model.params["glyph.proj.W"][:] = 0.0
    model.params["glyph.proj.b"][:] = 0.0
    assert not np.allclose(before, M.model_emissions(seq, model))


def test_eval_mode_deterministic_and_dropout_active(tables):
    model = TaggerModel.create(fusion.CONCAT, TAGS, tables.semantic_dim, hidden=4)
    seq = fusion.embed_sentence("浦江路", tables)
    rng = np.random.default_rng(0)
    a = M.model_emissions(seq, model, training=False, rng=rng)
    b = M.model_emissions(seq, model, training=False, rng=rng)
    np.testing.assert_array_equal(a, b)
    assert not np.allclose(a, M.model_emissions(seq, model, training=True, rng=rng))


def test_strategy_mismatch(tables):
    model = TaggerModel.create(fusion.MULTI_BRANCH, TAGS, tables.semantic_dim, hidden=2)
    with pytest.raises(StrategyMismatch):
        M.model_emissions(fusion.embed_sentence("浦", tables), model)


def test_semantic_width_checked():
    model = small(fusion.CONCAT)
    with pytest.raises(ShapeMismatch):
        M.forward(model, random_parts(np.random.default_rng(0), [3], 5))


def test_inverted_dropout_preserves_expectation():
    X = np.ones((100, 100))
    out, mask = M._dropout(X, 0.4, np.random.default_rng(0))
    assert abs(out.mean() - 1.0) < 0.02
    assert set(np.unique(mask)) == {0.0, 1.0 / 0.6}


@pytest.mark.parametrize("strategy", fusion.STRATEGIES)
def test_full_gradients(strategy):
    rng = np.random.default_rng(11)
    model = small(strategy, seed=3)
    for arr in model.params.values():
        arr += rng.normal(scale=0.3, size=arr.shape)
    parts = random_parts(rng, [3, 2], 4)
    tags = [[1, 2, 0], [3, 4]]
    errors = model_gradient_errors(model, parts, tags, M.loss_and_grad, fraction=0.3, rng=0)
    assert max(errors.values()) < 1e-3, errors


def test_gradient_descent_lowers_loss():
    rng = np.random.default_rng(2)
    model = small(fusion.CONCAT)
    parts = random_parts(rng, [4, 3, 5], 4)
    tags = [[1, 2, 0, 0], [0, 3, 4], [1, 0, 0, 3, 4]]
    losses = []
    for _ in range(10):
        loss, grads = M.loss_and_grad(model, parts, tags)
        losses.append(loss)
        for k in model.params:
            model.params[k] -= 0.05 * grads[k]
    assert all(b <= a + 1e-12 for a, b in zip(losses, losses[1:]))
    assert losses[-1] < losses[0]


def test_batched_predict_matches_single(tables):
    model = TaggerModel.create(fusion.CONCAT_LINEAR, TAGS, tables.semantic_dim, hidden=5, seed=1)
    sentences = ["浦江路", "傅", "早上去桥边"]
    batch = M.predict_batch(model, sentences, tables)
    assert batch == [M.predict(model, s, tables) for s in sentences]
    assert [len(t) for t in batch] == [3, 1, 5]
    assert all(t in TAGS.labels for seq in batch for t in seq)
