"""BiLSTM-CRF tagger over fused character embeddings."""

from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .. import fusion, glyph, phonetics
from ..errors import ShapeMismatch, StrategyMismatch, TagNotInTagSet, UnknownTagFormat
from .crf import CrfParams, crf_nll_grad, viterbi_decode
from .lstm import LstmParams, bilstm_backward, bilstm_forward

BRANCHES = ("semantic", "glyph", "phonetic")


class TagSet:
    """Ordered BIO label inventory; ``O`` is always index 0."""

    def __init__(self, labels):
        labels = list(labels)
        if "O" not in labels:
            raise UnknownTagFormat("tag set must contain 'O'")
        for lab in labels:
            if lab != "O" and not (lab[:2] in ("B-", "I-") and len(lab) > 2):
                raise UnknownTagFormat(f"not a BIO tag: {lab!r}")
            if lab.startswith("I-") and "B-" + lab[2:] not in labels:
                raise UnknownTagFormat(f"{lab} has no matching B- tag")
        self.labels = labels
        self.index = {lab: i for i, lab in enumerate(labels)}

    @classmethod
    def from_types(cls, types):
        labels = ["O"]
        for t in sorted(set(types)):
            labels += [f"B-{t}", f"I-{t}"]
        return cls(labels)

    @classmethod
    def from_sequences(cls, tag_seqs):
        return cls.from_types(t[2:] for seq in tag_seqs for t in seq if t != "O")

    def __len__(self):
        return len(self.labels)

    def __eq__(self, other):
        return isinstance(other, TagSet) and self.labels == other.labels

    def encode(self, tags):
        try:
            return [self.index[t] for t in tags]
        except KeyError as exc:
            raise TagNotInTagSet(f"tag {exc.args[0]!r} not in tag set {self.labels}") from None

    def decode(self, ids):
        return [self.labels[i] for i in ids]


@dataclass
class TaggerModel:
    """All trainable state lives in ``params`` (name -> float64 array).

    Parameter names by strategy::

        concat          lstm.{W,U,b} proj.{W,b} crf.*
        concat-linear   fuse.{W,b} + the concat names
        multi-lstm      {semantic,glyph,phonetic}.lstm.{W,U,b}
                        {semantic,glyph,phonetic}.proj.{W,b}  comb.{W,b}  crf.*
    """

    strategy: str
    tagset: TagSet
    semantic_dim: int
    hidden: int
    dropout: float
    params: Dict[str, np.ndarray] = field(default_factory=dict)
    features: Tuple[str, ...] = BRANCHES

    @property
    def num_tags(self):
        return len(self.tagset)

    @property
    def input_dims(self):
        return (self.semantic_dim, glyph.DIM, phonetics.DIM)

    @property
    def feature_index(self):
        return [BRANCHES.index(f) for f in self.features]

    @classmethod
    def create(cls, strategy, tagset, semantic_dim, hidden=100, dropout=0.4, fuse_dim=None, seed=0,
               features=BRANCHES):
        """Fresh model.  ``features`` selects which embedding parts a concat
        model sees (``("semantic",)`` gives the pure-semantic baseline)."""
        if strategy not in fusion.STRATEGIES:
            raise StrategyMismatch(f"unknown strategy {strategy!r}")
        features = tuple(f for f in BRANCHES if f in features)
        if not features or (strategy == fusion.MULTI_BRANCH and features != BRANCHES):
            raise StrategyMismatch(f"strategy {strategy!r} cannot use features {features}")
        rng = np.random.default_rng(seed)
        model = cls(strategy, tagset, semantic_dim, hidden, dropout, features=features)
        T = len(tagset)
        p = model.params
        in_dim = sum(model.input_dims[k] for k in model.feature_index)

        def linear(name, out_dim, fan_in):
            bound = 1.0 / np.sqrt(fan_in)
            p[name + ".W"] = rng.uniform(-bound, bound, (out_dim, fan_in))
            p[name + ".b"] = rng.uniform(-bound, bound, out_dim)

        def lstm(prefix, d):
            lp = LstmParams.init(d, hidden, rng)
            p[prefix + ".W"], p[prefix + ".U"], p[prefix + ".b"] = lp.W, lp.U, lp.b

        if strategy == fusion.MULTI_BRANCH:
            for name, d in zip(BRANCHES, model.input_dims):
                lstm(f"{name}.lstm", d)
                linear(f"{name}.proj", T, 2 * hidden)
            # start as an exact average of the three branch emissions
            p["comb.W"] = np.tile(np.eye(T), 3) / 3.0
            p["comb.b"] = np.zeros(T)
        else:
            if strategy == fusion.CONCAT_LINEAR:
                out_dim = in_dim if fuse_dim is None else fuse_dim
                linear("fuse", out_dim, in_dim)
                in_dim = out_dim
            lstm("lstm", in_dim)
            linear("proj", T, 2 * hidden)
        p["crf.transitions"] = np.zeros((T, T))
        p["crf.start"] = np.zeros(T)
        p["crf.end"] = np.zeros(T)
        return model

    def lstm_params(self, prefix="lstm"):
        p = self.params
        return LstmParams(p[prefix + ".W"], p[prefix + ".U"], p[prefix + ".b"])

    @property
    def crf(self):
        p = self.params
        return CrfParams(p["crf.transitions"], p["crf.start"], p["crf.end"])

    def fusion_strategy(self):
        if self.strategy == fusion.CONCAT_LINEAR:
            return fusion.FusionStrategy(fusion.CONCAT_LINEAR, self.params["fuse.W"], self.params["fuse.b"])
        return fusion.FusionStrategy(self.strategy)

    def copy(self):
        return TaggerModel(
            self.strategy, self.tagset, self.semantic_dim, self.hidden, self.dropout,
            {k: v.copy() for k, v in self.params.items()}, self.features,
        )


def _pad(mats: Sequence[np.ndarray]):
    lengths = [m.shape[0] for m in mats]
    out = np.zeros((len(mats), max(lengths), mats[0].shape[1]))
    for b, m in enumerate(mats):
        out[b, : m.shape[0]] = m
    return out, lengths


def _dropout(X, rate, rng):
    if rng is None or rate <= 0:
        return X, None
    mask = (rng.random(X.shape) >= rate) / (1.0 - rate)
    return X * mask, mask


def _branch_inputs(model, parts_batch):
    """Padded inputs per branch for a batch of (sem, gly, pho) part tuples."""
    if model.strategy == fusion.MULTI_BRANCH:
        return [_pad([parts[k] for parts in parts_batch]) for k in range(3)]
    keep = model.feature_index
    return [_pad([np.concatenate([parts[k] for k in keep], axis=1) for parts in parts_batch])]


def _check_inputs(model, parts_batch):
    for parts in parts_batch:
        if len(parts) != 3 or parts[0].shape[1] != model.semantic_dim:
            raise ShapeMismatch(
                f"model expects semantic width {model.semantic_dim}, got {parts[0].shape[1]}"
            )


def forward(model: TaggerModel, parts_batch, training=False, rng=None):
    """Emissions for a batch of sentences given as (sem, gly, pho) matrices.

    Returns (emissions, lengths, cache); emissions is (B, n_max, T).  Dropout
    masks are drawn from ``rng`` only when ``training`` is set.
    """
    _check_inputs(model, parts_batch)
    p = model.params
    drop_rng = rng if training else None
    rate = model.dropout
    branches = []
    inputs = _branch_inputs(model, parts_batch)
    prefixes = [f"{b}." for b in BRANCHES] if model.strategy == fusion.MULTI_BRANCH else [""]
    lengths = inputs[0][1]
    for (X, _), prefix in zip(inputs, prefixes):
        Xin = X
        if model.strategy == fusion.CONCAT_LINEAR:
            X = X @ p["fuse.W"].T + p["fuse.b"]
        Xd, m1 = _dropout(X, rate, drop_rng)
        lp = model.lstm_params(prefix + "lstm")
        H, lcache = bilstm_forward(Xd, lengths, lp)
        Hd, m2 = _dropout(H, rate, drop_rng)
        E = Hd @ p[prefix + "proj.W"].T + p[prefix + "proj.b"]
        branches.append((prefix, Xin, m1, lp, lcache, Hd, m2, E))
    if model.strategy == fusion.MULTI_BRANCH:
        stacked = np.concatenate([br[-1] for br in branches], axis=2)
        emissions = stacked @ p["comb.W"].T + p["comb.b"]
    else:
        stacked = None
        emissions = branches[0][-1]
    return emissions, lengths, (branches, stacked)


def backward(model: TaggerModel, d_emissions, cache):
    """Gradients of every parameter given d loss / d emissions (zero past each length)."""
    p = model.params
    branches, stacked = cache
    grads = {}
    if model.strategy == fusion.MULTI_BRANCH:
        B, n, _ = d_emissions.shape
        flat_d = d_emissions.reshape(B * n, -1)
        grads["comb.W"] = flat_d.T @ stacked.reshape(B * n, -1)
        grads["comb.b"] = flat_d.sum(axis=0)
        d_stacked = d_emissions @ p["comb.W"]
        T = model.num_tags
        d_branch = [d_stacked[:, :, k * T:(k + 1) * T] for k in range(3)]
    else:
        d_branch = [d_emissions]
    for (prefix, Xin, m1, lp, lcache, Hd, m2, _), dE in zip(branches, d_branch):
        B, n, _ = dE.shape
        flat_dE = dE.reshape(B * n, -1)
        grads[prefix + "proj.W"] = flat_dE.T @ Hd.reshape(B * n, -1)
        grads[prefix + "proj.b"] = flat_dE.sum(axis=0)
        dH = dE @ p[prefix + "proj.W"]
        if m2 is not None:
            dH = dH * m2
        dX, glp = bilstm_backward(dH, lp, lcache)
        grads[prefix + "lstm.W"], grads[prefix + "lstm.U"], grads[prefix + "lstm.b"] = glp.W, glp.U, glp.b
        if m1 is not None:
            dX = dX * m1
        if model.strategy == fusion.CONCAT_LINEAR:
            flat_dX = dX.reshape(B * n, -1)
            grads["fuse.W"] = flat_dX.T @ Xin.reshape(B * n, -1)
            grads["fuse.b"] = flat_dX.sum(axis=0)
    return grads


def loss_and_grad(model: TaggerModel, parts_batch, tag_batch, training=False, rng=None, need_grad=True):
    """Mean CRF negative log-likelihood over the batch and its gradients."""
    emissions, lengths, cache = forward(model, parts_batch, training, rng)
    crf = model.crf
    B = len(parts_batch)
    d_em = np.zeros_like(emissions)
    d_crf = CrfParams.zeros(model.num_tags)
    total = 0.0
    for b, (L, tags) in enumerate(zip(lengths, tag_batch)):
        nll, de, dc = crf_nll_grad(emissions[b, :L], tags, crf)
        total += nll
        d_em[b, :L] = de
        d_crf.transitions += dc.transitions
        d_crf.start += dc.start
        d_crf.end += dc.end
    loss = total / B
    if not need_grad:
        return loss, None
    d_em /= B
    grads = backward(model, d_em, cache)
    grads["crf.transitions"] = d_crf.transitions / B
    grads["crf.start"] = d_crf.start / B
    grads["crf.end"] = d_crf.end / B
    return loss, grads


def model_emissions(sentence: "fusion.FusedSequence", model: TaggerModel, training=False, rng=None):
    """(n, T) emission scores for one embedded sentence."""
    multi = model.strategy == fusion.MULTI_BRANCH
    if (sentence.strategy == fusion.MULTI_BRANCH) != multi:
        raise StrategyMismatch(
            f"sentence embedded for {sentence.strategy!r}, model uses {model.strategy!r}"
        )
    if sentence.semantic is None:
        raise StrategyMismatch("embedded sentence lacks its per-part matrices")
    emissions, lengths, _ = forward(model, [sentence.parts], training, rng)
    return emissions[0, : lengths[0]]


def decode_batch(model: TaggerModel, parts_batch) -> List[List[int]]:
    emissions, lengths, _ = forward(model, parts_batch)
    crf = model.crf
    return [viterbi_decode(emissions[b, :L], crf)[0] for b, L in enumerate(lengths)]


def predict(model: TaggerModel, sentence, tables, mode="lenient") -> List[str]:
    parts = fusion.embed_parts(sentence, tables, mode)
    return model.tagset.decode(decode_batch(model, [parts])[0])


def predict_batch(model: TaggerModel, sentences, tables, mode="lenient", batch_size=32):
    out = []
    for start in range(0, len(sentences), batch_size):
        chunk = [fusion.embed_parts(s, tables, mode) for s in sentences[start:start + batch_size]]
        out.extend(model.tagset.decode(ids) for ids in decode_batch(model, chunk))
    return out
