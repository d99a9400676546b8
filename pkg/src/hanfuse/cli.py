"""``hanfuse`` command line.

Exit status: 0 success, 1 usage error, 2 bad input data, 3 numeric failure.
Data goes to stdout, diagnostics to stderr.
"""

import argparse
import logging
import os
import sys

import numpy as np

from . import __version__, fusion, glyph, phonetics, similarity
from .errors import HanfuseError, NumericError

log = logging.getLogger("hanfuse")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _fmt(values):
    return " ".join(f"{v:g}" for v in values)


# --- shared helpers ------------------------------------------------------

def _mode(args):
    return "lenient" if args.lenient else "strict"


def _tables(args, semantic=True):
    from .tables import Tables

    paths = dict(wubi=args.wubi, pinyin=args.pinyin, vectors=args.vectors,
                 initials=args.initials, finals=args.finals)
    if not any(paths.values()) and not args.data_dir and not os.environ.get("HANFUSE_DATA_DIR"):
        return Tables.bundled()
    return Tables.load(args.data_dir, semantic=semantic, **paths)


def _read_sentences(path):
    fh = sys.stdin if path == "-" else open(path, encoding="utf-8")
    with fh:
        return [line.strip() for line in fh if line.strip()]


def _train_config(args):
    from .tagger import TrainConfig

    return TrainConfig(
        batch_size=args.batch_size, max_epochs=args.max_epochs, learning_rate=args.lr,
        dropout=args.dropout, early_stop_patience=args.patience, seed=args.seed,
    )


# --- subcommands ---------------------------------------------------------

def cmd_inspect(args, out):
    # explicit --wubi/--pinyin without --vectors inspects just those two tables
    explicit = args.wubi or args.pinyin
    tables = _tables(args, semantic=bool(args.vectors or not explicit))
    inv = tables.inventory
    n = len(inv)
    print(f"wubi_entries\t{len(tables.wubi)}", file=out)
    print(f"pinyin_entries\t{len(tables.pinyin)}", file=out)
    if tables.semantic is not None:
        print(f"vector_entries\t{len(tables.semantic)}", file=out)
        print(f"vector_dimension\t{tables.semantic.dimension}", file=out)
    print(f"inventory\t{n}", file=out)
    if tables.semantic is not None:
        covered = sum(inv.has_semantic.values())
        print(f"inventory_with_vectors\t{covered}", file=out)
    multi = sum(len(s) > 1 for s in tables.pinyin.entries.values())
    print(f"polyphonic\t{multi}", file=out)
    lengths = np.bincount([len(c) for c in tables.wubi.entries.values()], minlength=5)[1:]
    print("code_lengths\t" + " ".join(str(int(x)) for x in lengths), file=out)
    return EXIT_OK


def cmd_encode(args, out):
    tables = _tables(args, semantic=args.fused)
    mode = _mode(args)
    text = "".join(args.text)
    if not text:
        raise UsageError("nothing to encode")
    if args.glyph:
        for ch in text:
            code = tables.wubi.entries.get(ch, "-")
            print(f"{ch}\t{code}\t{_fmt(glyph.encode_glyph(ch, tables.wubi, mode))}", file=out)
    elif args.phonetic:
        for ch in text:
            syllables = tables.pinyin.entries.get(ch)
            if syllables:
                syl = syllables[0]
                p = phonetics.parse_syllable(syl, tables.finals)
                parts = f"{p.initial or '-'}\t{p.final}\t{p.tone}"
            else:
                syl, parts = "-", "-\t-\t-"
            vec = phonetics.encode_phonetic(ch, tables.pinyin, mode, tables.initials, tables.finals)
            print(f"{ch}\t{syl}\t{parts}\t{_fmt(vec)}", file=out)
    else:
        strategy = fusion.FusionStrategy(args.strategy)
        if args.strategy == fusion.CONCAT_LINEAR:
            in_dim = tables.semantic_dim + fusion.EXTRA_DIM
            strategy = fusion.FusionStrategy.concat_linear(in_dim, rng=np.random.default_rng(args.seed))
        seq = fusion.embed_sentence(text, tables, strategy, mode)
        if seq.matrix is None:
            for ch, *rows in zip(seq.sentence, *seq.parts):
                print(ch + "\t" + "\t".join(_fmt(r) for r in rows), file=out)
        else:
            for ch, row in zip(seq.sentence, seq.matrix):
                print(f"{ch}\t{_fmt(row)}", file=out)
    return EXIT_OK


def cmd_similar(args, out):
    tables = _tables(args, semantic=args.space == "semantic")
    for ch, dist in similarity.knn(args.char, args.space, args.k, tables).neighbors:
        print(f"{ch}\t{dist:.6f}", file=out)
    return EXIT_OK


def cmd_augment(args, out):
    from .augment import AugmentConfig, RECORD_HEADER, substitute_corpus
    from .evaluation import load_corpus, write_corpus

    tables = _tables(args, semantic="semantic" in args.spaces)
    cfg = AugmentConfig(
        spaces=tuple(s for s in args.spaces.split(",") if s), p=args.p, neighbor_pool_k=args.k,
        max_distance=args.max_distance, seed=args.seed, emit_pairs=args.pairs,
    )
    corpus = load_corpus(args.train)
    augmented, records, stats = substitute_corpus(corpus, tables, cfg)
    if args.out == "-":
        write_corpus(augmented, out)
    else:
        write_corpus(augmented, args.out)
    if args.records:
        with open(args.records, "w", encoding="utf-8") as fh:
            fh.write(RECORD_HEADER + "\n")
            fh.writelines(r.tsv() + "\n" for r in records)
    log.info("replaced %d of %d entity characters", stats.replaced, stats.eligible)
    print(f"sentences\t{len(augmented)}\nreplaced\t{stats.replaced}\neligible\t{stats.eligible}\n"
          f"uncovered\t{stats.uncovered}\nempty_pool\t{stats.empty_pool}",
          file=out if args.out != "-" else sys.stderr)
    return EXIT_OK


def cmd_train(args, out):
    from .evaluation import load_corpus
    from .tagger import TagSet, TaggerModel, save_model, train

    tables = _tables(args)
    corpus, dev = load_corpus(args.train), load_corpus(args.dev)
    tagset = TagSet.from_sequences(corpus.tag_sequences + dev.tag_sequences)
    features = tuple(args.features.split(","))
    model = TaggerModel.create(args.strategy, tagset, tables.semantic_dim, hidden=args.hidden,
                               dropout=args.dropout, seed=args.seed, features=features)
    best, history = train(model, corpus, dev, _train_config(args), tables, _mode(args))
    save_model(best, args.out)
    print("epoch\ttrain_loss\tdev_loss\timproved", file=out)
    for e in history.epochs:
        print(f"{e.epoch}\t{e.train_loss:.6f}\t{e.dev_loss:.6f}\t{int(e.improved)}", file=out)
    if args.figures:
        from . import plotting

        plotting.loss_curves({args.strategy: (history.train_losses, history.dev_losses)},
                             os.path.join(args.figures, "loss.png"))
    log.info("best epoch %d, model written to %s", history.best_epoch, args.out)
    return EXIT_OK


def cmd_tag(args, out):
    from .tagger import load_model, predict_batch

    model = load_model(args.model)
    tables = _tables(args)
    sentences = _read_sentences(args.input)
    for sentence, tags in zip(sentences, predict_batch(model, sentences, tables, _mode(args))):
        for ch, tag in zip(sentence, tags):
            print(f"{ch}\t{tag}", file=out)
        print(file=out)
    return EXIT_OK


def cmd_eval(args, out):
    from .evaluation import load_corpus, micro_metrics
    from .tagger import load_model, predict_batch

    model = load_model(args.model)
    tables = _tables(args)
    test = load_corpus(args.test)
    pred = predict_batch(model, ["".join(c) for c, _ in test], tables, _mode(args))
    m = micro_metrics(test, pred)
    print(m.tsv(), file=out)
    if not args.quiet:
        print(
            f"entities: {m.gold} gold, {m.predicted} predicted, {m.tp} correct\n"
            f"precision {100 * m.precision:.2f}  recall {100 * m.recall:.2f}  F1 {100 * m.f1:.2f}\n"
            f"repaired I- tags: {m.repairs}",
            file=sys.stderr,
        )
    return EXIT_OK


def _experiment_config(args):
    return dict(batch_size=args.batch_size, max_epochs=args.max_epochs, learning_rate=args.lr,
                dropout=args.dropout, early_stop_patience=args.patience)


def cmd_compare(args, out):
    from . import experiments

    tables = _tables(args)
    results = experiments.compare_strategies(
        tables, seed=args.seed, n_sentences=args.sentences, p=args.p,
        config=_experiment_config(args), hidden=args.hidden,
    )
    out.write(experiments.strategy_tsv(results))
    if args.figures:
        from . import plotting

        plotting.strategy_f1(results, os.path.join(args.figures, "strategy_f1.png"), experiments.STRATEGY_LABELS)
        plotting.loss_curves({experiments.STRATEGY_LABELS[r.strategy]: (r.train_losses, r.dev_losses)
                              for r in results}, os.path.join(args.figures, "strategy_loss.png"))
    return EXIT_OK


def cmd_trend(args, out):
    from . import experiments

    tables = _tables(args)
    seeds = [int(s) for s in args.seeds.split(",")]
    rows = experiments.substitution_trend(
        tables, seeds=seeds, n_sentences=args.sentences, p=args.p,
        config=_experiment_config(args), hidden=args.hidden,
    )
    out.write(experiments.trend_tsv(rows))
    if args.figures:
        from . import plotting

        plotting.trend_recall(rows, os.path.join(args.figures, "trend_recall.png"))
    return EXIT_OK


# --- parser --------------------------------------------------------------

def _common():
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("data and run options")
    g.add_argument("--data-dir", help="directory holding wubi.tsv, pinyin.tsv, vectors.txt, "
                   "initials.tsv, finals.tsv (default: $HANFUSE_DATA_DIR, then the bundled tables)")
    g.add_argument("--wubi", help="Five-Strokes code table")
    g.add_argument("--pinyin", help="pinyin table")
    g.add_argument("--vectors", help="character vectors in word2vec text format")
    g.add_argument("--initials", help="initial mapping TSV")
    g.add_argument("--finals", help="final mapping TSV")
    g.add_argument("--lenient", action="store_true", help="encode unknown characters as zeros instead of failing")
    g.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    g.add_argument("-v", "--verbose", action="count", default=0, help="more logging (repeatable)")
    return p


def _training_flags(p, epochs=60):
    g = p.add_argument_group("training")
    g.add_argument("--hidden", type=int, default=100, help="LSTM units per direction (default 100)")
    g.add_argument("--batch-size", type=int, default=12)
    g.add_argument("--max-epochs", type=int, default=epochs)
    g.add_argument("--lr", type=float, default=2e-3, help="Adam learning rate")
    g.add_argument("--dropout", type=float, default=0.4)
    g.add_argument("--patience", type=int, default=5, help="early-stopping patience in epochs")


def build_parser():
    common = _common()
    parser = _Parser(prog="hanfuse", description="Glyph and phonetic character features for Chinese NER.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("inspect", parents=[common], help="load the tables and print coverage statistics")
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser("encode", parents=[common], help="print per-character embeddings")
    which = p.add_mutually_exclusive_group(required=True)
    which.add_argument("--glyph", action="store_true", help="25-d Five-Strokes vectors")
    which.add_argument("--phonetic", action="store_true", help="39-d phonetic vectors")
    which.add_argument("--fused", action="store_true", help="fused input matrix")
    p.add_argument("--strategy", choices=fusion.STRATEGIES, default=fusion.CONCAT)
    p.add_argument("text", nargs="+")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("similar", parents=[common], help="nearest characters in one feature space")
    p.add_argument("--space", choices=[s.value for s in similarity.FeatureSpace], required=True)
    p.add_argument("-k", type=int, default=10)
    p.add_argument("char")
    p.set_defaults(func=cmd_similar)

    p = sub.add_parser("augment", parents=[common], help="substitute similar characters inside entities")
    p.add_argument("--train", required=True, help="input corpus (character TAB tag)")
    p.add_argument("--out", required=True, help="output corpus, or - for stdout")
    p.add_argument("--records", help="write substitution records here")
    p.add_argument("--spaces", default="glyph,phonetic")
    p.add_argument("-p", type=float, default=0.3, help="per-character replacement probability")
    p.add_argument("-k", type=int, default=5, help="neighbor pool size")
    p.add_argument("--max-distance", type=float)
    p.add_argument("--pairs", action="store_true", help="emit the original before each modified sentence")
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("train", parents=[common], help="train a BiLSTM-CRF tagger")
    p.add_argument("--strategy", choices=fusion.STRATEGIES, default=fusion.CONCAT)
    p.add_argument("--features", default="semantic,glyph,phonetic",
                   help="embedding parts fed to a concat model (default all three)")
    p.add_argument("--train", required=True)
    p.add_argument("--dev", required=True)
    p.add_argument("--out", required=True, help="checkpoint path")
    p.add_argument("--figures", help="directory for the loss-curve figure")
    _training_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("tag", parents=[common], help="tag raw text, one sentence per line")
    p.add_argument("--model", required=True)
    p.add_argument("input", help="text file, or - for stdin")
    p.set_defaults(func=cmd_tag)

    p = sub.add_parser("eval", parents=[common], help="entity-level precision, recall and F1")
    p.add_argument("--model", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("-q", "--quiet", action="store_true", help="omit the human-readable summary")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("compare", parents=[common], help="train every fusion strategy on a synthetic corpus")
    p.add_argument("--sentences", type=int, default=1000)
    p.add_argument("-p", type=float, default=0.5, help="substitution probability for the test copy")
    p.add_argument("--figures", help="directory for figures")
    _training_flags(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("trend", parents=[common], help="semantic-only vs fused recall under substitution")
    p.add_argument("--seeds", default="0,1,2,3,4")
    p.add_argument("--sentences", type=int, default=1000)
    p.add_argument("-p", type=float, default=0.5)
    p.add_argument("--figures", help="directory for figures")
    _training_flags(p)
    p.set_defaults(func=cmd_trend)
    return parser


def main(argv=None, out=None):
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    level = [logging.WARNING, logging.INFO, logging.DEBUG][min(args.verbose, 2)]
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args, out)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"hanfuse: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericError as exc:
        print(f"hanfuse: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (HanfuseError, ValueError, OSError) as exc:
        print(f"hanfuse: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
