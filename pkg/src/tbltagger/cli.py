"""Command-line interface.

Subcommands: train, tag, eval, crossval, curve, synth. All randomness flows
from explicit --seed flags (default 0). Exit codes: 0 success, 2 config or
parse error, 3 I/O error, 4 data alignment error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .corpus import (AlignmentError, TaggerError, load_tagset,
                     parse_raw_corpus, parse_tagged_corpus,
                     serialize_tagged_corpus, serialize_tagset)
from .evaluate import (SynthSpec, accuracy, cross_validate,
                       generate_synthetic_corpus, learning_curve,
                       render_confusion_csv, render_folds_csv,
                       render_report_csv, strip_tags)
from .learner import TrainConfig, train_model
from .rules import load_model, save_model, tag_corpus

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_DATA = 4


def _read(path):
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _write(path, text):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _train_config(args) -> TrainConfig:
    return TrainConfig(
        score_threshold=args.threshold,
        max_rules_per_phase=args.max_rules,
        lexicon_split_fraction=args.lexicon_split,
        max_affix_len=args.max_affix_len,
        seed=args.seed,
    )


def _add_train_flags(p):
    p.add_argument("--threshold", type=int, default=2,
                   help="minimum net score for a rule to be accepted")
    p.add_argument("--max-rules", type=int, default=None,
                   help="cap on learned rules per phase (default unlimited)")
    p.add_argument("--lexicon-split", type=float, default=0.5,
                   help="fraction of sentences building the guess lexicon "
                        "during lexical-rule learning")
    p.add_argument("--max-affix-len", type=int, default=4,
                   help="maximum affix length in lexical rule arguments")
    p.add_argument("--seed", type=int, default=0,
                   help="seed for all shuffling and splitting")


def cmd_train(args) -> int:
    tagset = load_tagset(_read(args.tagset))
    train = parse_tagged_corpus(_read(args.corpus), tagset)
    config = _train_config(args)
    model = train_model(train, config=config)
    save_model(model, args.out, manifest_extra={
        "score_threshold": config.score_threshold,
        "max_rules_per_phase": config.max_rules_per_phase,
        "lexicon_split_fraction": config.lexicon_split_fraction,
        "max_affix_len": config.max_affix_len,
        "seed": config.seed,
    })
    predicted = tag_corpus(strip_tags(train), model)
    train_acc, _ = accuracy(predicted, train)
    print("tokens: %d" % train.word_count)
    print("lexical rules: %d" % len(model.lexical_rules))
    print("contextual rules: %d" % len(model.contextual_rules))
    print("training accuracy: %.6f" % train_acc)
    return EXIT_OK


def cmd_tag(args) -> int:
    model = load_model(args.model)
    try:
        text = _read(args.infile)
    except OSError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_IO
    with open(args.out, "w", encoding="utf-8") as out:
        for sent in parse_raw_corpus(text):
            tagged = tag_corpus([sent], model)
            out.write(serialize_tagged_corpus(tagged))
    return EXIT_OK


def cmd_eval(args) -> int:
    model = load_model(args.model)
    gold = parse_tagged_corpus(_read(args.gold), model.tagset)
    predicted = tag_corpus(strip_tags(gold), model)
    acc, confusion = accuracy(predicted, gold)
    print("%.6f" % acc)
    if args.confusion:
        _write(args.confusion, render_confusion_csv(confusion))
    return EXIT_OK


def cmd_crossval(args) -> int:
    tagset = load_tagset(_read(args.tagset))
    corpus = parse_tagged_corpus(_read(args.corpus), tagset)
    report = cross_validate(corpus, k=args.k, config=_train_config(args),
                            seed=args.seed, jobs=args.jobs)
    csv = render_folds_csv(report)
    if args.out:
        _write(args.out, csv)
        print("mean accuracy: %.6f (stddev %.6f)"
              % (report.mean_accuracy, report.stddev_accuracy))
    else:
        sys.stdout.write(csv)
    return EXIT_OK


def cmd_curve(args) -> int:
    tagset = load_tagset(_read(args.tagset))
    corpus = parse_tagged_corpus(_read(args.corpus), tagset)
    sizes = [int(s) for s in args.sizes.split(",") if s]
    rows = learning_curve(corpus, sizes, k=args.k, config=_train_config(args),
                          seed=args.seed, jobs=args.jobs)
    csv = render_report_csv(rows)
    if args.out:
        _write(args.out, csv)
    else:
        sys.stdout.write(csv)
    return EXIT_OK


def cmd_synth(args) -> int:
    raw = json.loads(_read(args.spec))
    if "suffix_paradigms" in raw:
        raw["suffix_paradigms"] = tuple(
            (s, t) for s, t in raw["suffix_paradigms"])
    if "sentence_len_range" in raw:
        raw["sentence_len_range"] = tuple(raw["sentence_len_range"])
    try:
        spec = SynthSpec(**raw)
    except TypeError as exc:
        raise TaggerError("bad synthetic spec: %s" % exc) from exc
    corpus = generate_synthetic_corpus(spec)
    _write(args.out, serialize_tagged_corpus(corpus))
    tagset_path = args.tagset_out or args.out + ".tagset"
    _write(tagset_path, serialize_tagset(corpus.tagset))
    print("wrote %d sentences, %d tokens"
          % (len(corpus.sentences), corpus.word_count))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tbltagger",
        description="Transformation-based part-of-speech tagger")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a model from a tagged corpus")
    p.add_argument("--corpus", required=True, help="tagged corpus file")
    p.add_argument("--tagset", required=True, help="tagset config file")
    p.add_argument("--out", required=True, help="model directory to write")
    _add_train_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("tag", help="tag a raw corpus with a trained model")
    p.add_argument("--model", required=True, help="model directory")
    p.add_argument("--in", dest="infile", required=True,
                   help="raw corpus file, one sentence per line")
    p.add_argument("--out", required=True, help="tagged output file")
    p.set_defaults(func=cmd_tag)

    p = sub.add_parser("eval", help="evaluate a model against a gold corpus")
    p.add_argument("--model", required=True, help="model directory")
    p.add_argument("--gold", required=True, help="gold tagged corpus")
    p.add_argument("--confusion", default=None,
                   help="write the confusion matrix CSV here")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("crossval", help="k-fold cross-validation")
    p.add_argument("--corpus", required=True)
    p.add_argument("--tagset", required=True)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--jobs", type=int, default=1,
                   help="evaluate folds in parallel")
    p.add_argument("--out", default=None, help="report CSV path (default stdout)")
    _add_train_flags(p)
    p.set_defaults(func=cmd_crossval)

    p = sub.add_parser("curve", help="learning curve over corpus sizes")
    p.add_argument("--corpus", required=True)
    p.add_argument("--tagset", required=True)
    p.add_argument("--sizes", required=True,
                   help="comma-separated ascending word counts")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default=None, help="report CSV path (default stdout)")
    _add_train_flags(p)
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("synth", help="generate a synthetic tagged corpus")
    p.add_argument("--spec", required=True, help="JSON spec file")
    p.add_argument("--out", required=True, help="corpus file to write")
    p.add_argument("--tagset-out", default=None,
                   help="tagset file (default: <out>.tagset)")
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except AlignmentError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_DATA
    except TaggerError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_CONFIG
    except (json.JSONDecodeError, ValueError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_IO


def entrypoint():
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
