"""Evaluation protocol: accuracy, k-fold cross-validation with mean and
sample standard deviation, learning curves over corpus sizes, and a
deterministic synthetic inflectional-language generator used where real
hand-tagged corpora are unavailable.
"""

from __future__ import annotations

import random
import statistics
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .corpus import (AlignmentError, TaggedCorpus, TaggerError, Tagset, Token,
                     kfold_split, select_sentences, truncate_to_words)
from .learner import TrainConfig, train_model
from .lexicon import InitialRuleChain, default_greek_chain
from .rules import tag_corpus


@dataclass(frozen=True)
class FoldResult:
    fold_id: int
    accuracy: float
    n_lexical_rules: int
    n_contextual_rules: int
    test_tokens: int
    known_accuracy: float = 1.0
    unknown_accuracy: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.accuracy <= 1.0:
            raise TaggerError("accuracy out of [0, 1]")


@dataclass(frozen=True)
class EvalReport:
    folds: tuple
    mean_accuracy: float
    stddev_accuracy: float
    mean_lexical_rules: float
    mean_contextual_rules: float


@dataclass(frozen=True)
class CurveRow:
    corpus_words: int
    report: EvalReport


@dataclass(frozen=True)
class SynthSpec:
    """Parameters of the synthetic language: word = stem + suffix with the
    suffix fixing the base tag; with probability ambiguity_rate a word type
    gets an alternate tag that is realized, with probability
    context_rule_strength, whenever a determiner-like trigger word is
    inserted before it."""
    n_stems: int = 100
    suffix_paradigms: tuple = (("ος", "NNM"), ("η", "NNF"), ("μα", "NNT"),
                               ("ει", "VRB"), ("ως", "ADV"))
    ambiguity_rate: float = 0.3
    context_rule_strength: float = 1.0
    n_sentences: int = 500
    sentence_len_range: tuple = (5, 12)
    seed: int = 0

    def __post_init__(self):
        if self.n_stems < 1 or self.n_sentences < 1:
            raise TaggerError("n_stems and n_sentences must be >= 1")
        if not self.suffix_paradigms:
            raise TaggerError("need at least one suffix paradigm")
        suffixes = [s for s, _ in self.suffix_paradigms]
        tags = [t for _, t in self.suffix_paradigms]
        if any(not s for s in suffixes) or len(set(tags)) != len(tags):
            raise TaggerError("suffixes must be non-empty and tags distinct")
        for rate in (self.ambiguity_rate, self.context_rule_strength):
            if not 0.0 <= rate <= 1.0:
                raise TaggerError("rates must be in [0, 1]")
        lo, hi = self.sentence_len_range
        if lo < 1 or hi < lo:
            raise TaggerError("bad sentence_len_range")


SYNTH_ALT_TAG = "ALT"
SYNTH_FOREIGN_TAG = "FW"
SYNTH_PROPER_TAG = "PROP"
# Determiner-like trigger words forcing the alternate tag on the following
# ambiguous word. Distinct tags with skewed frequencies, so rules for rare
# triggers only become learnable as the corpus grows.
SYNTH_TRIGGERS = (("το", "DET", 0.6), ("ένα", "DTI", 0.3), ("κάθε", "DTQ", 0.1))
_TRIGGER_PROB = 0.4     # chance an ambiguous token is preceded by a trigger
_FOREIGN_PROB = 0.02
_PROPER_PROB = 0.02
_COMPOUND_PROB = 0.15   # two-stem compounds keep the vocabulary open-ended
_GREEK_LOWER = "αβγδεζηθικλμνξοπρστυφχψω"
_FOREIGN_POOL = ("Microsoft", "Internet", "manager", "Sheffield", "email",
                 "online", "Windows", "Web")
_PROPER_POOL = ("Άννα", "Γιώργος", "Μαρία", "Νίκος", "Ελένη", "Κώστας")


def accuracy(predicted: TaggedCorpus, gold: TaggedCorpus):
    """(fraction of matching tags, Counter[(gold_tag, predicted_tag)]).
    Raises AlignmentError at the first structural divergence."""
    if len(predicted.sentences) != len(gold.sentences):
        raise AlignmentError("sentence counts differ: %d vs %d"
                             % (len(predicted.sentences), len(gold.sentences)))
    confusion = Counter()
    correct = total = 0
    for s_idx, (ps, gs) in enumerate(zip(predicted.sentences, gold.sentences)):
        if len(ps) != len(gs):
            raise AlignmentError("sentence %d length differs: %d vs %d"
                                 % (s_idx, len(ps), len(gs)))
        for p_idx, (pt, gt) in enumerate(zip(ps, gs)):
            if pt.word != gt.word:
                raise AlignmentError(
                    "word mismatch at sentence %d token %d: %r vs %r"
                    % (s_idx, p_idx, pt.word, gt.word))
            confusion[(gt.tag, pt.tag)] += 1
            total += 1
            if pt.tag == gt.tag:
                correct += 1
    if total == 0:
        raise AlignmentError("cannot compute accuracy on an empty corpus")
    return correct / total, confusion


def strip_tags(corpus: TaggedCorpus) -> list:
    return [tuple(Token(tok.word) for tok in sent) for sent in corpus.sentences]


def _summarize(folds) -> EvalReport:
    folds = tuple(sorted(folds, key=lambda f: f.fold_id))
    accs = [f.accuracy for f in folds]
    return EvalReport(
        folds=folds,
        mean_accuracy=statistics.mean(accs),
        stddev_accuracy=statistics.stdev(accs) if len(accs) > 1 else 0.0,
        mean_lexical_rules=statistics.mean(f.n_lexical_rules for f in folds),
        mean_contextual_rules=statistics.mean(f.n_contextual_rules
                                              for f in folds),
    )


def _run_fold(args):
    corpus, plan, fold_id, config, chain = args
    test_idx = plan.fold_indices(fold_id)
    train_idx = [i for i in range(len(corpus.sentences))
                 if plan.assignments[i] != fold_id]
    train = select_sentences(corpus, train_idx)
    test = select_sentences(corpus, test_idx)
    model = train_model(train, chain, config)
    predicted = tag_corpus(strip_tags(test), model)
    acc, _ = accuracy(predicted, test)

    known_correct = known_total = unk_correct = unk_total = 0
    for ps, gs in zip(predicted.sentences, test.sentences):
        for pt, gt in zip(ps, gs):
            if pt.word in model.lexicon:
                known_total += 1
                known_correct += pt.tag == gt.tag
            else:
                unk_total += 1
                unk_correct += pt.tag == gt.tag
    return FoldResult(
        fold_id=fold_id,
        accuracy=acc,
        n_lexical_rules=len(model.lexical_rules),
        n_contextual_rules=len(model.contextual_rules),
        test_tokens=test.word_count,
        known_accuracy=known_correct / known_total if known_total else 1.0,
        unknown_accuracy=unk_correct / unk_total if unk_total else 1.0,
    )


def cross_validate(corpus: TaggedCorpus, k: int = 10,
                   config: TrainConfig = None,
                   chain: InitialRuleChain = None, seed: int = 0,
                   jobs: int = 1) -> EvalReport:
    """Train on k-1 folds and test on the held-out fold, for every rotation.
    Deterministic in (corpus, k, config, seed); jobs > 1 evaluates folds in
    parallel with identical results."""
    if config is None:
        config = TrainConfig()
    if chain is None:
        chain = default_greek_chain()
    plan = kfold_split(corpus, k, seed)
    tasks = [(corpus, plan, fold_id, config, chain) for fold_id in range(k)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            folds = list(pool.map(_run_fold, tasks))
    else:
        folds = [_run_fold(t) for t in tasks]
    return _summarize(folds)


def learning_curve(corpus: TaggedCorpus, word_sizes, k: int = 10,
                   config: TrainConfig = None,
                   chain: InitialRuleChain = None, seed: int = 0,
                   jobs: int = 1) -> list:
    sizes = list(word_sizes)
    if sizes != sorted(sizes):
        raise TaggerError("word sizes must be ascending")
    rows = []
    for size in sizes:
        sub = truncate_to_words(corpus, size)
        if len(sub.sentences) < k:
            raise TaggerError("size %d leaves %d sentences, fewer than k=%d"
                              % (size, len(sub.sentences), k))
        report = cross_validate(sub, k, config, chain, seed, jobs)
        rows.append(CurveRow(sub.word_count, report))
    return rows


def most_frequent_tag_baseline(corpus: TaggedCorpus, k: int = 10,
                               chain: InitialRuleChain = None,
                               seed: int = 0) -> float:
    """Mean cross-validated accuracy of the initial tagger alone (lexicon
    most-frequent tag plus the default rule chain, no learned rules)."""
    config = TrainConfig(max_rules_per_phase=0)
    return cross_validate(corpus, k, config, chain, seed).mean_accuracy


def synth_tagset(spec: SynthSpec) -> Tagset:
    tags = [t for _, t in spec.suffix_paradigms]
    tags += [t for _, t, _ in SYNTH_TRIGGERS]
    tags += [SYNTH_ALT_TAG, SYNTH_FOREIGN_TAG, SYNTH_PROPER_TAG]
    roles = {"FOREIGN": SYNTH_FOREIGN_TAG,
             "PROPER_MASC_SG": SYNTH_PROPER_TAG,
             "NOUN_FEM_SG": spec.suffix_paradigms[0][1]}
    return Tagset(tags, roles)


def generate_synthetic_corpus(spec: SynthSpec):
    """Deterministic (TaggedCorpus, Tagset) realizing the spec. The learnable
    regularities are the suffix -> tag paradigms (lexical) and the forced
    alternate tag after the trigger word (contextual)."""
    rnd = random.Random(spec.seed)
    tagset = synth_tagset(spec)

    stems = set()
    while len(stems) < spec.n_stems:
        stems.add("".join(rnd.choice(_GREEK_LOWER)
                          for _ in range(rnd.randint(3, 6))))
    stems = sorted(stems)

    word_types = []  # (word, base_tag, ambiguous)
    for stem in stems:
        for suffix, tag in spec.suffix_paradigms:
            ambiguous = rnd.random() < spec.ambiguity_rate
            word_types.append((stem + suffix, tag, ambiguous))
    # Zipf-distributed type frequencies: the long tail of rare types is what
    # makes unknown words appear in held-out data.
    cum_weights = []
    total = 0.0
    for rank in range(len(word_types)):
        total += 1.0 / (rank + 1)
        cum_weights.append(total)

    lo, hi = spec.sentence_len_range
    sentences = []
    for _ in range(spec.n_sentences):
        tokens = []
        for _ in range(rnd.randint(lo, hi)):
            r = rnd.random()
            if r < _FOREIGN_PROB:
                tokens.append(Token(rnd.choice(_FOREIGN_POOL),
                                    SYNTH_FOREIGN_TAG))
                continue
            if r < _FOREIGN_PROB + _PROPER_PROB:
                tokens.append(Token(rnd.choice(_PROPER_POOL),
                                    SYNTH_PROPER_TAG))
                continue
            if r < _FOREIGN_PROB + _PROPER_PROB + _COMPOUND_PROB:
                suffix, tag = spec.suffix_paradigms[
                    rnd.randrange(len(spec.suffix_paradigms))]
                word = rnd.choice(stems) + rnd.choice(stems) + suffix
                tokens.append(Token(word, tag))
                continue
            word, base_tag, ambiguous = rnd.choices(
                word_types, cum_weights=cum_weights)[0]
            if ambiguous and rnd.random() < _TRIGGER_PROB:
                trig_word, trig_tag, _ = rnd.choices(
                    SYNTH_TRIGGERS, weights=[w for _, _, w in SYNTH_TRIGGERS])[0]
                tokens.append(Token(trig_word, trig_tag))
                tag = (SYNTH_ALT_TAG
                       if rnd.random() < spec.context_rule_strength
                       else base_tag)
                tokens.append(Token(word, tag))
            else:
                tokens.append(Token(word, base_tag))
        sentences.append(tuple(tokens))
    return TaggedCorpus(tuple(sentences), tagset)


def synthetic_oracle_tags(sentences, spec: SynthSpec) -> TaggedCorpus:
    """Tagger hard-coded with the generating suffix map and context rule;
    on corpora generated with context_rule_strength = 1 it is exact up to
    the trigger coin flips it cannot observe (none at strength 1)."""
    tagset = synth_tagset(spec)
    suffixes = sorted(spec.suffix_paradigms, key=lambda p: -len(p[0]))
    foreign = set(_FOREIGN_POOL)
    proper = set(_PROPER_POOL)
    trigger_tags = {w: t for w, t, _ in SYNTH_TRIGGERS}
    out = []
    for sent in sentences:
        tokens = []
        prev_word = None
        for tok in sent:
            word = tok.word
            if word in trigger_tags:
                tag = trigger_tags[word]
            elif word in foreign:
                tag = SYNTH_FOREIGN_TAG
            elif word in proper:
                tag = SYNTH_PROPER_TAG
            elif prev_word in trigger_tags:
                tag = SYNTH_ALT_TAG
            else:
                tag = next((t for s, t in suffixes if word.endswith(s)),
                           spec.suffix_paradigms[0][1])
            tokens.append(Token(word, tag))
            prev_word = word
        out.append(tuple(tokens))
    return TaggedCorpus(tuple(out), tagset)


def render_report_csv(rows) -> str:
    """Curve rows as CSV matching the learning-curve figures: accuracy and
    rule counts against corpus size."""
    lines = ["corpus_words,mean_accuracy,stddev_accuracy,"
             "mean_lexical_rules,mean_contextual_rules"]
    for row in rows:
        r = row.report
        lines.append("%d,%.6f,%.6f,%.6f,%.6f"
                     % (row.corpus_words, r.mean_accuracy, r.stddev_accuracy,
                        r.mean_lexical_rules, r.mean_contextual_rules))
    return "".join(line + "\n" for line in lines)


def render_folds_csv(report: EvalReport) -> str:
    """Per-fold rows plus a summary row; used by the cross-validation CLI."""
    lines = ["fold_id,accuracy,n_lexical_rules,n_contextual_rules,"
             "test_tokens,known_accuracy,unknown_accuracy"]
    for f in report.folds:
        lines.append("%d,%.6f,%d,%d,%d,%.6f,%.6f"
                     % (f.fold_id, f.accuracy, f.n_lexical_rules,
                        f.n_contextual_rules, f.test_tokens,
                        f.known_accuracy, f.unknown_accuracy))
    lines.append("mean,%.6f,%.6f,%.6f,,," % (
        report.mean_accuracy, report.mean_lexical_rules,
        report.mean_contextual_rules))
    return "".join(line + "\n" for line in lines)


def render_confusion_csv(confusion: Counter) -> str:
    lines = ["gold_tag,predicted_tag,count"]
    for (gold_tag, pred_tag), count in sorted(confusion.items()):
        lines.append("%s,%s,%d" % (gold_tag, pred_tag, count))
    return "".join(line + "\n" for line in lines)
