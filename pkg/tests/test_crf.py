import math

import numpy as np
import pytest

from hanfuse.errors import ShapeMismatch
from hanfuse.tagger.crf import (
    CrfParams,
    crf_log_likelihood,
    crf_log_partition,
    crf_nll_grad,
    crf_score,
    viterbi_decode,
)
from oracles import brute_argmax, brute_log_z, central_difference, enumerate_paths, path_score


def random_instance(rng, n, T, scale=1.0):
    crf = CrfParams(rng.normal(size=(T, T)), rng.normal(size=T), rng.normal(size=T))
    return rng.normal(size=(n, T)) * scale, crf


def test_uniform_two_paths():
    ll = crf_log_likelihood(np.zeros((1, 2)), [0], CrfParams.zeros(2))
    assert ll == pytest.approx(-math.log(2), abs=1e-15)


def test_probabilities_sum_to_one():
    rng = np.random.default_rng(0)
    for _ in range(50):
        n, T = int(rng.integers(1, 5)), int(rng.integers(1, 4))
        em, crf = random_instance(rng, n, T)
        total = math.fsum(math.exp(crf_log_likelihood(em, p, crf)) for p, _ in enumerate_paths(em, crf))
        assert abs(total - 1.0) < 1e-9


def test_score_matches_oracle():
    rng = np.random.default_rng(1)
    em, crf = random_instance(rng, 4, 3)
    for path, s in enumerate_paths(em, crf):
        assert crf_score(em, path, crf) == pytest.approx(s, abs=1e-12)


def test_log_partition_matches_enumeration_and_is_stable():
    rng = np.random.default_rng(2)
    for _ in range(30):
        em, crf = random_instance(rng, int(rng.integers(1, 5)), int(rng.integers(1, 4)))
        assert abs(crf_log_partition(em, crf) - brute_log_z(em, crf)) < 1e-9
        big = crf_log_partition(em * 100, crf)
        assert np.isfinite(big)
        assert abs(big - brute_log_z(em * 100, crf)) < 1e-9 * max(1.0, abs(big))


def test_argmax_path_has_highest_likelihood():
    rng = np.random.default_rng(3)
    em, crf = random_instance(rng, 4, 3)
    best, _ = brute_argmax(em, crf)
    ll_best = crf_log_likelihood(em, best, crf)
    for path, _ in enumerate_paths(em, crf):
        assert ll_best >= crf_log_likelihood(em, path, crf)


def test_viterbi_matches_enumeration():
    rng = np.random.default_rng(4)
    for _ in range(50):
        em, crf = random_instance(rng, int(rng.integers(1, 6)), int(rng.integers(1, 5)))
        path, score = viterbi_decode(em, crf)
        want, want_score = brute_argmax(em, crf)
        assert path == want
        assert score == crf_score(em, path, crf)
        assert score == pytest.approx(want_score, abs=1e-12)


def test_viterbi_sticky_transitions():
    crf = CrfParams(np.array([[5.0, -5.0], [-5.0, 0.0]]), np.zeros(2), np.zeros(2))
    path, _ = viterbi_decode(np.zeros((6, 2)), crf)
    assert path == [0] * 6


def test_viterbi_ties_lowest_index_first():
    path, score = viterbi_decode(np.zeros((4, 3)), CrfParams.zeros(3))
    assert path == [0, 0, 0, 0] and score == 0.0
    # two optimal paths differing at position 1: prefer tag 0 there
    em = np.array([[1.0, 0.0], [0.5, 0.5]])
    assert viterbi_decode(em, CrfParams.zeros(2))[0] == [0, 0]


def test_nll_gradients_finite_difference():
    rng = np.random.default_rng(5)
    em, crf = random_instance(rng, 5, 4)
    tags = [1, 0, 3, 3, 2]
    _, d_em, d_crf = crf_nll_grad(em, tags, crf)
    f = lambda: -crf_log_likelihood(em, tags, crf)
    for arr, grad in [(em, d_em), (crf.transitions, d_crf.transitions), (crf.start, d_crf.start), (crf.end, d_crf.end)]:
        for idx in np.ndindex(arr.shape):
            assert central_difference(f, arr, idx, 1e-5) == pytest.approx(grad[idx], abs=1e-7)


def test_shape_errors():
    crf = CrfParams.zeros(3)
    with pytest.raises(ShapeMismatch):
        crf_log_likelihood(np.zeros((2, 2)), [0, 1], crf)
    with pytest.raises(ShapeMismatch):
        viterbi_decode(np.zeros((0, 3)), crf)
    with pytest.raises(ShapeMismatch):
        crf_score(np.zeros((2, 3)), [0], crf)
