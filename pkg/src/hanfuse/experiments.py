"""Desk-scale experiments on a synthetic gazetteer corpus.

The corpus is built so that entity identity is carried by the entity's own
characters rather than by its context: filler text is random characters
from a pool disjoint from every entity character.  Entity characters come
from phono-semantic families (characters sharing a component and a rhyme);
roughly half of each family is held out of training entirely, so substituted
test entities contain characters the tagger has never seen, the situation
character substitution creates in practice.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Sequence

import numpy as np

from . import fusion
from .augment import AugmentConfig, substitute_corpus
from .evaluation import LabeledCorpus, Metrics, micro_metrics
from .tagger.model import BRANCHES, TagSet, TaggerModel, predict_batch
from .tagger.train import TrainConfig, train

log = logging.getLogger(__name__)

FAMILIES = [
    "甫浦傅捕铺辅哺埔圃",
    "乔桥侨娇骄轿",
    "青清情晴请精静睛",
    "包抱跑泡炮饱胞苞",
    "方放房访防芳纺仿",
    "马妈吗骂码玛",
    "巴把爸吧爬疤芭",
    "工江红功攻空贡扛",
    "生性姓星胜牲笙",
    "中钟种忠肿仲",
    "皮坡波破披疲被",
    "令领冷铃零岭龄玲",
    "羊洋样祥详氧",
    "每海梅敏悔霉",
    "林淋琳霖彬",
    "华哗桦骅",
    "安按案鞍氨",
    "长张涨帐账胀",
]
SURNAMES = "李王刘赵周吴郑陈孙朱胡高何罗郭梁宋唐许韩"
LOC_SUFFIXES = ["市", "路", "街", "港", "区"]
ORG_SUFFIXES = ["公司", "银行", "学院"]
ENTITY_TYPES = ("PER", "LOC", "ORG")


@dataclass
class SyntheticCorpus:
    train: LabeledCorpus
    dev: LabeledCorpus
    test: LabeledCorpus
    gazetteer: List[tuple]  # (surface, type)
    seen_chars: str
    held_out_chars: str
    filler_chars: str


def _split_families(tables, rng):
    seen, held = [], []
    for fam in FAMILIES:
        chars = [c for c in fam if c in tables.inventory]
        order = rng.permutation(len(chars))
        half = (len(chars) + 1) // 2
        seen += [chars[i] for i in order[:half]]
        held += [chars[i] for i in order[half:]]
    return seen, held


def make_gazetteer(tables, size=50, rng=None):
    rng = np.random.default_rng(rng)
    seen, held = _split_families(tables, rng)
    surnames = [c for c in SURNAMES if c in tables.inventory and c not in seen + held]
    gaz = set()
    out = []
    while len(out) < size:
        kind = ENTITY_TYPES[len(out) % 3]
        if kind == "PER":
            given = rng.choice(seen, size=int(rng.integers(1, 3)), replace=False)
            surface = rng.choice(surnames) + "".join(given)
        elif kind == "LOC":
            core = rng.choice(seen, size=int(rng.integers(1, 3)), replace=False)
            surface = "".join(core) + rng.choice(LOC_SUFFIXES)
        else:
            core = rng.choice(seen, size=2, replace=False)
            surface = "".join(core) + ORG_SUFFIXES[int(rng.integers(len(ORG_SUFFIXES)))]
        if surface not in gaz:
            gaz.add(surface)
            out.append((surface, kind))
    return out, seen, held


def _sentence(gazetteer, filler, rng):
    chars, tags = [], []

    def fill():
        k = int(rng.integers(1, 5))
        chars.extend(rng.choice(filler, size=k))
        tags.extend(["O"] * k)

    fill()
    for slot in range(int(rng.integers(1, 3))):
        if slot:
            fill()
        surface, kind = gazetteer[int(rng.integers(len(gazetteer)))]
        chars.extend(surface)
        tags.extend([f"B-{kind}"] + [f"I-{kind}"] * (len(surface) - 1))
    fill()
    return list(chars), tags


def synthetic_corpus(tables, n_sentences=1000, gazetteer_size=50, split=(0.6, 0.15, 0.25), seed=0):
    """Random filler + gazetteer entities, split into train / dev / test."""
    rng = np.random.default_rng([seed, 1])
    gazetteer, seen, held = make_gazetteer(tables, gazetteer_size, rng)
    used = set("".join(FAMILIES)) | set(SURNAMES) | set("".join(LOC_SUFFIXES + ORG_SUFFIXES))
    filler = [c for c in tables.inventory if c not in used]
    sentences = [_sentence(gazetteer, filler, rng) for _ in range(n_sentences)]
    n_train = int(round(split[0] * n_sentences))
    n_dev = int(round(split[1] * n_sentences))
    return SyntheticCorpus(
        LabeledCorpus(sentences[:n_train]),
        LabeledCorpus(sentences[n_train:n_train + n_dev]),
        LabeledCorpus(sentences[n_train + n_dev:]),
        gazetteer,
        "".join(seen),
        "".join(held),
        "".join(filler),
    )


def fit_and_score(strategy, corpus: SyntheticCorpus, tests: Dict[str, LabeledCorpus], tables, config: TrainConfig,
                  features=BRANCHES, hidden=100):
    tagset = TagSet.from_types(ENTITY_TYPES)
    model = TaggerModel.create(
        strategy, tagset, tables.semantic_dim, hidden=hidden, dropout=config.dropout,
        seed=config.seed, features=features,
    )
    best, history = train(model, corpus.train, corpus.dev, config, tables)
    scores = {}
    for name, test in tests.items():
        pred = predict_batch(best, [c for c, _ in test], tables)
        scores[name] = micro_metrics(test, pred)
    return best, history, scores


@dataclass
class TrendRow:
    seed: int
    pure: Metrics
    mfe: Metrics
    replaced: int
    pure_epochs: int
    mfe_epochs: int

    @property
    def mfe_wins(self):
        return self.mfe.recall > self.pure.recall


TREND_HEADER = "seed\tpure_precision\tpure_recall\tpure_f1\tmfe_precision\tmfe_recall\tmfe_f1\treplaced\tmfe_higher_recall"


def trend_tsv(rows: Sequence[TrendRow]):
    lines = [TREND_HEADER]
    for r in rows:
        lines.append(
            f"{r.seed}\t{r.pure.precision:.4f}\t{r.pure.recall:.4f}\t{r.pure.f1:.4f}\t"
            f"{r.mfe.precision:.4f}\t{r.mfe.recall:.4f}\t{r.mfe.f1:.4f}\t{r.replaced}\t{int(r.mfe_wins)}"
        )
    return "\n".join(lines) + "\n"


def substituted_test(corpus, tables, seed, p=0.5):
    cfg = AugmentConfig(spaces=("glyph", "phonetic"), p=p, neighbor_pool_k=5, seed=seed)
    return substitute_corpus(corpus.test, tables, cfg)


def substitution_trend(tables, seeds=(0, 1, 2, 3, 4), n_sentences=1000, p=0.5, config=None, hidden=100):
    """Pure-semantic vs fused-concat recall on a substituted test set, per seed."""
    rows = []
    for seed in seeds:
        corpus = synthetic_corpus(tables, n_sentences, seed=seed)
        test, records, _ = substituted_test(corpus, tables, seed, p)
        cfg = TrainConfig(**{**(config or {}), "seed": seed})
        _, h_pure, s_pure = fit_and_score(fusion.CONCAT, corpus, {"sub": test}, tables, cfg,
                                          features=("semantic",), hidden=hidden)
        _, h_mfe, s_mfe = fit_and_score(fusion.CONCAT, corpus, {"sub": test}, tables, cfg, hidden=hidden)
        row = TrendRow(seed, s_pure["sub"], s_mfe["sub"], len(records), len(h_pure.epochs), len(h_mfe.epochs))
        log.info("seed %d: pure recall %.4f, mfe recall %.4f", seed, row.pure.recall, row.mfe.recall)
        rows.append(row)
    return rows


@dataclass
class StrategyResult:
    strategy: str
    scores: Dict[str, Metrics]
    train_losses: List[float] = field(default_factory=list)
    dev_losses: List[float] = field(default_factory=list)


def compare_strategies(tables, seed=0, n_sentences=1000, p=0.5, config=None, hidden=100,
                       strategies=fusion.STRATEGIES):
    """Train every fusion strategy on the same corpus; score on clean and substituted test sets."""
    corpus = synthetic_corpus(tables, n_sentences, seed=seed)
    sub, _, _ = substituted_test(corpus, tables, seed, p)
    tests = {"clean": corpus.test, "substitution": sub}
    cfg = TrainConfig(**{**(config or {}), "seed": seed})
    results = []
    for strategy in strategies:
        _, history, scores = fit_and_score(strategy, corpus, tests, tables, cfg, hidden=hidden)
        results.append(StrategyResult(strategy, scores, history.train_losses, history.dev_losses))
    return results


STRATEGY_LABELS = {
    fusion.CONCAT: "Concat",
    fusion.CONCAT_LINEAR: "Concat+Linear",
    fusion.MULTI_BRANCH: "Multiple LSTMs",
}


def strategy_tsv(results: Sequence[StrategyResult]):
    """F1 per strategy (rows) and test set (columns)."""
    names = list(results[0].scores)
    lines = ["Strategy\t" + "\t".join(names)]
    for r in results:
        lines.append(STRATEGY_LABELS[r.strategy] + "\t" + "\t".join(f"{100 * r.scores[n].f1:.2f}" for n in names))
    return "\n".join(lines) + "\n"
