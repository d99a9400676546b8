"""Linear-chain CRF: path scores, log partition, gradients and Viterbi.

A path y over n positions scores

    start[y0] + sum_i E[i, y_i] + sum_i trans[y_{i-1}, y_i] + end[y_{n-1}]

so ``transitions[a, b]`` is the score of tag ``b`` following tag ``a``.
"""

from dataclasses import dataclass

import numpy as np

from ..errors import ShapeMismatch


@dataclass
class CrfParams:
    transitions: np.ndarray
    start: np.ndarray
    end: np.ndarray

    @property
    def num_tags(self):
        return self.start.shape[0]

    @classmethod
    def zeros(cls, num_tags):
        return cls(np.zeros((num_tags, num_tags)), np.zeros(num_tags), np.zeros(num_tags))


def _logsumexp(x, axis):
    m = np.max(x, axis=axis, keepdims=True)
    out = m + np.log(np.sum(np.exp(x - m), axis=axis, keepdims=True))
    return np.squeeze(out, axis=axis)


def _check(emissions, crf):
    emissions = np.asarray(emissions, dtype=float)
    T = crf.num_tags
    if emissions.ndim != 2 or emissions.shape[0] < 1 or emissions.shape[1] != T:
        raise ShapeMismatch(f"emissions must be (n >= 1, {T}), got {emissions.shape}")
    if crf.transitions.shape != (T, T) or crf.end.shape != (T,):
        raise ShapeMismatch("inconsistent CRF parameter shapes")
    return emissions


def crf_score(emissions, tags, crf: CrfParams) -> float:
    emissions = _check(emissions, crf)
    tags = np.asarray(tags, dtype=int)
    if tags.shape != (emissions.shape[0],):
        raise ShapeMismatch(f"{len(tags)} tags for {emissions.shape[0]} positions")
    score = crf.start[tags[0]] + emissions[np.arange(len(tags)), tags].sum()
    score += crf.transitions[tags[:-1], tags[1:]].sum()
    return float(score + crf.end[tags[-1]])


def _forward(emissions, crf):
    n = emissions.shape[0]
    alpha = np.empty_like(emissions)
    alpha[0] = crf.start + emissions[0]
    for i in range(1, n):
        alpha[i] = _logsumexp(alpha[i - 1][:, None] + crf.transitions, axis=0) + emissions[i]
    return alpha


def _backward(emissions, crf):
    n = emissions.shape[0]
    beta = np.empty_like(emissions)
    beta[n - 1] = crf.end
    for i in range(n - 2, -1, -1):
        beta[i] = _logsumexp(crf.transitions + (emissions[i + 1] + beta[i + 1])[None, :], axis=1)
    return beta


def crf_log_partition(emissions, crf: CrfParams) -> float:
    emissions = _check(emissions, crf)
    alpha = _forward(emissions, crf)
    return float(_logsumexp(alpha[-1] + crf.end, axis=0))


def crf_log_likelihood(emissions, tags, crf: CrfParams) -> float:
    return crf_score(emissions, tags, crf) - crf_log_partition(emissions, crf)


def crf_nll_grad(emissions, tags, crf: CrfParams):
    """Negative log-likelihood and its gradients.

    Returns (nll, d_emissions, CrfParams of gradients).
    """
    emissions = _check(emissions, crf)
    tags = np.asarray(tags, dtype=int)
    n, T = emissions.shape
    alpha = _forward(emissions, crf)
    beta = _backward(emissions, crf)
    log_z = _logsumexp(alpha[-1] + crf.end, axis=0)
    nll = log_z - crf_score(emissions, tags, crf)

    marg = np.exp(alpha + beta - log_z)
    d_em = marg.copy()
    d_em[np.arange(n), tags] -= 1.0
    d_trans = np.zeros((T, T))
    if n > 1:
        pair = (
            alpha[:-1, :, None]
            + crf.transitions[None]
            + (emissions[1:] + beta[1:])[:, None, :]
            - log_z
        )
        d_trans = np.exp(pair).sum(axis=0)
        np.add.at(d_trans, (tags[:-1], tags[1:]), -1.0)
    d_start = marg[0].copy()
    d_start[tags[0]] -= 1.0
    d_end = marg[-1].copy()
    d_end[tags[-1]] -= 1.0
    return float(nll), d_em, CrfParams(d_trans, d_start, d_end)


def viterbi_decode(emissions, crf: CrfParams):
    """Highest-scoring path and its score.

    Among equally scoring paths the one with the lowest tag index at the
    earliest differing position is returned: best suffix scores are computed
    right to left, then the path is chosen greedily left to right.
    """
    emissions = _check(emissions, crf)
    n, T = emissions.shape
    best = np.empty((n, T))
    best[n - 1] = crf.end
    for i in range(n - 2, -1, -1):
        best[i] = np.max(crf.transitions + (emissions[i + 1] + best[i + 1])[None, :], axis=1)
    path = [int(np.argmax(crf.start + emissions[0] + best[0]))]
    for i in range(1, n):
        path.append(int(np.argmax(crf.transitions[path[-1]] + emissions[i] + best[i])))
    return path, crf_score(emissions, path, crf)
