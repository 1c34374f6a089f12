"""Two-stage greedy error-driven training.

Stage one learns lexical rules over word types: the training corpus is split
in two, one half builds a guess lexicon and the word types of the other half
that the guess lexicon does not know simulate unknown words. Stage two
learns contextual rules over tokens against the full training corpus,
selecting at each step the rule with the highest true (apply-and-count)
error reduction. Both stages stop when no candidate reaches the score
threshold.

The greedy steps are exact but use inverted-index scoring: one pass over
the types (or tokens) accumulates match counts per candidate key instead of
re-scanning the corpus per candidate. For contextual rules the dynamic net
equals the static count except where two potential application sites fall
within the context window of each other; only those sentences are
re-simulated. Equivalence with the direct scorers is covered by tests.
"""

from __future__ import annotations

import bisect
import logging
import math
import random
from collections import Counter, defaultdict
from dataclasses import dataclass, replace
from typing import Optional

from .corpus import TaggedCorpus, TaggerError, select_sentences
from .lexicon import (InitialRuleChain, Lexicon, build_lexicon,
                      default_greek_chain, initial_tag)
from .rules import (ContextualRule, LexicalRule, TaggerModel,
                    apply_contextual_rule, apply_lexical_rules,
                    context_predicate, contextual_rule_matches,
                    lexical_rule_matches)

logger = logging.getLogger(__name__)

CONTEXT_WINDOW = 3  # max tag offset any contextual template reads

_WORD_TEMPLATES = frozenset(("PREVWD", "NEXTWD"))


@dataclass(frozen=True)
class TrainConfig:
    score_threshold: int = 2
    max_rules_per_phase: Optional[int] = None
    lexicon_split_fraction: float = 0.5
    max_affix_len: int = 4
    seed: int = 0

    def __post_init__(self):
        if self.score_threshold < 1:
            raise TaggerError("score_threshold must be >= 1")
        if not 0.0 < self.lexicon_split_fraction < 1.0:
            raise TaggerError("lexicon_split_fraction must be in (0, 1)")
        if self.max_affix_len < 1:
            raise TaggerError("max_affix_len must be >= 1")
        if self.max_rules_per_phase is not None and self.max_rules_per_phase < 0:
            raise TaggerError("max_rules_per_phase must be >= 0")


@dataclass(frozen=True)
class RuleScore:
    good: int
    bad: int

    @property
    def net(self):
        return self.good - self.bad


@dataclass(frozen=True)
class TypeState:
    """Per word type during lexical learning: current guess, target tag and
    how many tokens of the type occur in the rule-learning half."""
    current: str
    gold: str
    count: int


def split_for_unknown_training(corpus: TaggedCorpus, fraction: float,
                               seed: int):
    """Seeded sentence-level split: ceil(fraction * S) sentences build the
    guess lexicon, the rest drive rule learning."""
    n = len(corpus.sentences)
    if n < 2:
        raise TaggerError("need at least 2 sentences to split, got %d" % n)
    order = list(range(n))
    random.Random(seed).shuffle(order)
    n_lex = math.ceil(fraction * n)
    lex_idx = sorted(order[:n_lex])
    rule_idx = sorted(order[n_lex:])
    return select_sentences(corpus, lex_idx), select_sentences(corpus, rule_idx)


def build_unknown_type_states(rule_part: TaggedCorpus, guess_lexicon: Lexicon,
                              chain: InitialRuleChain) -> dict:
    """Initial TypeState per word type of rule_part unknown to the guess
    lexicon. Gold tag of a type is its most frequent gold tag in rule_part,
    ties broken by ascending tag name."""
    gold_counts = defaultdict(Counter)
    for sent in rule_part.sentences:
        for tok in sent:
            if tok.word not in guess_lexicon:
                gold_counts[tok.word][tok.tag] += 1
    states = {}
    for word, counts in gold_counts.items():
        gold = min(counts, key=lambda t: (-counts[t], t))
        current = initial_tag(word, guess_lexicon, chain, rule_part.tagset)
        states[word] = TypeState(current, gold, sum(counts.values()))
    return states


def build_affix_extension_maps(lexicon: Lexicon, max_affix_len: int):
    """(add_suf, add_pref): word -> affixes whose addition lands in the
    lexicon. Lets ADDSUF/ADDPREF features be looked up without scanning the
    lexicon per word."""
    add_suf = defaultdict(list)
    add_pref = defaultdict(list)
    for other in lexicon.entries:
        for k in range(1, min(max_affix_len, len(other) - 1) + 1):
            add_suf[other[:-k]].append(other[-k:])
            add_pref[other[k:]].append(other[:k])
    return dict(add_suf), dict(add_pref)


def lexical_candidate_features(word: str, lexicon: Lexicon,
                               max_affix_len: int,
                               extension_maps=None) -> tuple:
    """All (template, arg) pairs that match this word: its own affixes up to
    max_affix_len, its characters, and the affix edits that land in the
    lexicon. A lexical rule (template, arg) matches the word iff the pair is
    in this list."""
    if extension_maps is None:
        extension_maps = build_affix_extension_maps(lexicon, max_affix_len)
    add_suf, add_pref = extension_maps
    feats = []
    n = len(word)
    for alen in range(1, min(max_affix_len, n) + 1):
        suf, pre = word[-alen:], word[:alen]
        feats.append(("HASSUF", suf))
        feats.append(("HASPREF", pre))
        if n > alen and word[:-alen] in lexicon:
            feats.append(("DELETESUF", suf))
        if n > alen and word[alen:] in lexicon:
            feats.append(("DELETEPREF", pre))
    for ch in sorted(set(word)):
        feats.append(("HASCHAR", ch))
    for suf in add_suf.get(word, ()):
        feats.append(("ADDSUF", suf))
    for pre in add_pref.get(word, ()):
        feats.append(("ADDPREF", pre))
    return tuple(feats)


def generate_lexical_candidates(states: dict, lexicon: Lexicon,
                                max_affix_len: int) -> set:
    """Candidates drawn from currently mis-tagged types, retagging to the
    type's gold tag, optionally conditioned on its current tag."""
    extension_maps = build_affix_extension_maps(lexicon, max_affix_len)
    candidates = set()
    for word, st in states.items():
        if st.current == st.gold:
            continue
        for template, arg in lexical_candidate_features(
                word, lexicon, max_affix_len, extension_maps):
            candidates.add(LexicalRule(template, arg, None, st.gold))
            candidates.add(LexicalRule(template, arg, st.current, st.gold))
    return candidates


def score_lexical_candidate(rule: LexicalRule, states: dict,
                            lexicon: Lexicon) -> RuleScore:
    """Static type-level score weighted by occurrence count."""
    good = bad = 0
    for word, st in states.items():
        if not lexical_rule_matches(rule, word, st.current, lexicon):
            continue
        if st.current != st.gold and rule.to_tag == st.gold:
            good += st.count
        elif st.current == st.gold and rule.to_tag != st.gold:
            bad += st.count
    return RuleScore(good, bad)


def select_best_rule(candidates, scorer, threshold: int):
    """Maximal net score; ties broken by the rule sort key (template, args,
    from_tag, to_tag ascending). None when the best net is below threshold."""
    best = None
    for rule in candidates:
        score = scorer(rule)
        key = (-score.net, rule.sort_key())
        if best is None or key < best[0]:
            best = (key, rule, score)
    if best is None or best[2].net < threshold:
        return None
    return best[1], best[2]


def weighted_type_errors(states: dict) -> int:
    return sum(st.count for st in states.values() if st.current != st.gold)


def apply_lexical_rule_to_states(rule: LexicalRule, states: dict,
                                 lexicon: Lexicon) -> dict:
    return {
        word: (replace(st, current=rule.to_tag)
               if lexical_rule_matches(rule, word, st.current, lexicon) else st)
        for word, st in states.items()
    }


def _lexical_iteration(states: dict, feature_cache: dict, threshold: int):
    """One greedy step: best candidate by net score with the documented
    tie-break, scored via count aggregation per (feature, from_tag[, to])
    key. Equivalent to scoring every generated candidate directly."""
    fix = {}            # (feat, from_tag, to_tag) -> weighted fixes
    correct = {}        # (feat, from_tag) -> weighted matches on correct types
    correct_gold = {}   # (feat, from_tag, gold) -> subset of the above
    for word, st in states.items():
        feats = feature_cache[word]
        if st.current == st.gold:
            for f in feats:
                for ft in (None, st.current):
                    k = (f, ft)
                    correct[k] = correct.get(k, 0) + st.count
                    kg = (f, ft, st.gold)
                    correct_gold[kg] = correct_gold.get(kg, 0) + st.count
        else:
            for f in feats:
                for ft in (None, st.current):
                    k = (f, ft, st.gold)
                    fix[k] = fix.get(k, 0) + st.count
    best = None
    for (feat, ft, to), good in fix.items():
        bad = correct.get((feat, ft), 0) - correct_gold.get((feat, ft, to), 0)
        key = (-(good - bad), (feat[0], feat[1], ft or "", to))
        if best is None or key < best[0]:
            best = (key, (feat, ft, to), good, bad)
    if best is None:
        return None
    _, (feat, ft, to), good, bad = best
    score = RuleScore(good, bad)
    if score.net < threshold:
        return None
    return LexicalRule(feat[0], feat[1], ft, to), score


def learn_lexical_rules(train: TaggedCorpus,
                        chain: InitialRuleChain = None,
                        config: TrainConfig = None):
    """Returns (lexicon built from the FULL training corpus, ordered lexical
    rules learned on the held-out-lexicon split)."""
    if chain is None:
        chain = default_greek_chain()
    if config is None:
        config = TrainConfig()
    if not train.sentences:
        raise TaggerError("cannot train on an empty corpus")
    lex_part, rule_part = split_for_unknown_training(
        train, config.lexicon_split_fraction, config.seed)
    guess = build_lexicon(lex_part)
    states = build_unknown_type_states(rule_part, guess, chain)
    extension_maps = build_affix_extension_maps(guess, config.max_affix_len)
    feature_cache = {
        word: lexical_candidate_features(word, guess, config.max_affix_len,
                                         extension_maps)
        for word in states
    }

    rules = []
    iteration = 0
    while (config.max_rules_per_phase is None
           or len(rules) < config.max_rules_per_phase):
        iteration += 1
        best = _lexical_iteration(states, feature_cache, config.score_threshold)
        if best is None:
            break
        rule, score = best
        states = apply_lexical_rule_to_states(rule, states, guess)
        rules.append(rule)
        logger.info("lexical %d %s net=%d errors_remaining=%d",
                    iteration, rule, score.net, weighted_type_errors(states))
    return build_lexicon(train), tuple(rules)


def initial_contextual_state(train: TaggedCorpus, lexicon: Lexicon,
                             lexical_rules, chain: InitialRuleChain):
    """(state, gold): per-sentence (words, tags) after the initial + lexical
    stages, and the gold tag lists, token-aligned."""
    unknown = {}
    for sent in train.sentences:
        for tok in sent:
            if tok.word not in lexicon and tok.word not in unknown:
                unknown[tok.word] = initial_tag(tok.word, lexicon, chain,
                                                train.tagset)
    unknown = apply_lexical_rules(lexical_rules, unknown, lexicon)
    state, gold = [], []
    for sent in train.sentences:
        words = tuple(tok.word for tok in sent)
        tags = [unknown[w] if w in unknown else lexicon.most_frequent_tag(w)
                for w in words]
        state.append((words, tags))
        gold.append([tok.tag for tok in sent])
    return state, gold


def token_errors(state, gold) -> int:
    return sum(1 for (_, tags), gtags in zip(state, gold)
               for t, g in zip(tags, gtags) if t != g)


def context_instantiations(words, tags, p) -> set:
    """Every (template, args) the contextual catalog can instantiate at this
    position from its actual context."""
    n = len(tags)
    out = set()
    if p >= 1:
        out.add(("PREVTAG", (tags[p - 1],)))
        out.add(("PREVWD", (words[p - 1],)))
        out.add(("PREV1OR2TAG", (tags[p - 1],)))
        out.add(("PREV1OR2OR3TAG", (tags[p - 1],)))
    if p >= 2:
        out.add(("PREV2TAG", (tags[p - 2],)))
        out.add(("PREV1OR2TAG", (tags[p - 2],)))
        out.add(("PREV1OR2OR3TAG", (tags[p - 2],)))
        out.add(("PREVBIGRAM", (tags[p - 2], tags[p - 1])))
    if p >= 3:
        out.add(("PREV1OR2OR3TAG", (tags[p - 3],)))
    if p + 1 < n:
        out.add(("NEXTTAG", (tags[p + 1],)))
        out.add(("NEXTWD", (words[p + 1],)))
        out.add(("NEXT1OR2TAG", (tags[p + 1],)))
        out.add(("NEXT1OR2OR3TAG", (tags[p + 1],)))
    if p + 2 < n:
        out.add(("NEXT2TAG", (tags[p + 2],)))
        out.add(("NEXT1OR2TAG", (tags[p + 2],)))
        out.add(("NEXT1OR2OR3TAG", (tags[p + 2],)))
        out.add(("NEXTBIGRAM", (tags[p + 1], tags[p + 2])))
    if p + 3 < n:
        out.add(("NEXT1OR2OR3TAG", (tags[p + 3],)))
    if 1 <= p < n - 1:
        out.add(("SURROUNDTAG", (tags[p - 1], tags[p + 1])))
    return out


def generate_contextual_candidates(state, gold) -> set:
    """Every template instantiated at every current error site, with args
    read from the site's actual context and to_tag = its gold tag."""
    candidates = set()
    for (words, tags), gtags in zip(state, gold):
        for p in range(len(tags)):
            if tags[p] == gtags[p]:
                continue
            for template, args in context_instantiations(words, tags, p):
                candidates.add(ContextualRule(template, args, tags[p],
                                              gtags[p]))
    return candidates


def score_contextual_candidate(rule: ContextualRule, state, gold) -> RuleScore:
    """Static token-level score: context checked against the pre-application
    state at every position (no cascade effects)."""
    good = bad = 0
    for (words, tags), gtags in zip(state, gold):
        for p in range(len(tags)):
            if contextual_rule_matches(rule, words, tags, p):
                if tags[p] != gtags[p] and rule.to_tag == gtags[p]:
                    good += 1
                elif tags[p] == gtags[p]:
                    bad += 1
    return RuleScore(good, bad)


def build_tag_index(state) -> dict:
    """tag -> sentence index -> ascending positions currently carrying it."""
    index = defaultdict(lambda: defaultdict(list))
    for s_idx, (_, tags) in enumerate(state):
        for p, t in enumerate(tags):
            index[t][s_idx].append(p)
    return index


def dynamic_contextual_score(rule: ContextualRule, state, gold,
                             index: dict = None) -> RuleScore:
    """True error delta of applying the rule: left-to-right with immediate
    effect, simulated on a copy. Only positions whose current tag is
    from_tag can ever match (to_tag != from_tag), so the scan is restricted
    to them."""
    if index is None:
        index = build_tag_index(state)
    sent_map = index.get(rule.from_tag)
    if not sent_map:
        return RuleScore(0, 0)
    good = bad = 0
    for s_idx, positions in sent_map.items():
        g, b = _simulate_sentence(rule.template, rule.args, rule.to_tag,
                                  state[s_idx], gold[s_idx], positions)
        good += g
        bad += b
    return RuleScore(good, bad)


def _simulate_sentence(template, args, to_tag, sent_state, gtags, positions):
    """Apply the rule within one sentence, visiting the given from_tag
    positions left to right with immediate effect; returns (good, bad)."""
    words, tags = sent_state
    modified = None
    good = bad = 0
    for p in positions:
        cur = tags if modified is None else modified
        if context_predicate(template, args, words, cur, p):
            if modified is None:
                modified = list(tags)
            if modified[p] == gtags[p]:
                bad += 1
            elif to_tag == gtags[p]:
                good += 1
            modified[p] = to_tag
    return good, bad


def _has_near(sorted_positions, p, window=CONTEXT_WINDOW):
    """True if another position within `window` of p is in the sorted list."""
    i = bisect.bisect_left(sorted_positions, p - window)
    while i < len(sorted_positions) and sorted_positions[i] <= p + window:
        if sorted_positions[i] != p:
            return True
        i += 1
    return False


def _contextual_iteration(state, gold, threshold):
    """One greedy step with exact dynamic scoring.

    A single pass collects, per (template, args, from_tag) key, every
    position the key matches in the current state. Applying a rule changes
    matched positions from from_tag to to_tag, which can perturb a tag
    predicate only where the predicate's argument equals one of those two
    tags; word predicates are never perturbed. For all other candidates the
    dynamic net equals the static match count. The rare perturbable
    candidates fall back to re-simulating the sentences in which a match
    site has another from_tag position within the context window.
    """
    sites = {}      # ((template, *args), from_tag) -> [(sent, pos), ...]
    tos = {}        # same key -> {gold tags of matching error sites}
    pos_by = {}     # (sent, tag) -> ascending positions
    for s in range(len(state)):
        words, tags = state[s]
        gtags = gold[s]
        n = len(tags)
        for p in range(n):
            frm = tags[p]
            plist = pos_by.get((s, frm))
            if plist is None:
                pos_by[(s, frm)] = [p]
            else:
                plist.append(p)
            inst = []
            if p >= 1:
                t1 = tags[p - 1]
                inst.append(("PREVTAG", t1))
                inst.append(("PREVWD", words[p - 1]))
                inst.append(("PREV1OR2TAG", t1))
                inst.append(("PREV1OR2OR3TAG", t1))
                if p >= 2:
                    t2 = tags[p - 2]
                    inst.append(("PREV2TAG", t2))
                    if t2 != t1:
                        inst.append(("PREV1OR2TAG", t2))
                        inst.append(("PREV1OR2OR3TAG", t2))
                    inst.append(("PREVBIGRAM", t2, t1))
                    if p >= 3:
                        t3 = tags[p - 3]
                        if t3 != t1 and t3 != t2:
                            inst.append(("PREV1OR2OR3TAG", t3))
            if p + 1 < n:
                u1 = tags[p + 1]
                inst.append(("NEXTTAG", u1))
                inst.append(("NEXTWD", words[p + 1]))
                inst.append(("NEXT1OR2TAG", u1))
                inst.append(("NEXT1OR2OR3TAG", u1))
                if p + 2 < n:
                    u2 = tags[p + 2]
                    inst.append(("NEXT2TAG", u2))
                    if u2 != u1:
                        inst.append(("NEXT1OR2TAG", u2))
                        inst.append(("NEXT1OR2OR3TAG", u2))
                    inst.append(("NEXTBIGRAM", u1, u2))
                    if p + 3 < n:
                        u3 = tags[p + 3]
                        if u3 != u1 and u3 != u2:
                            inst.append(("NEXT1OR2OR3TAG", u3))
                if p >= 1:
                    inst.append(("SURROUNDTAG", tags[p - 1], u1))
            err = frm != gtags[p]
            g = gtags[p]
            site = (s, p)
            for it in inst:
                key = (it, frm)
                lst = sites.get(key)
                if lst is None:
                    sites[key] = [site]
                else:
                    lst.append(site)
                if err:
                    to_set = tos.get(key)
                    if to_set is None:
                        tos[key] = {g}
                    else:
                        to_set.add(g)
    best = None
    for key, to_set in tos.items():
        it, frm = key
        template = it[0]
        site_list = sites[key]
        n_correct = 0
        gold_counts = {}
        for s, p in site_list:
            g = gold[s][p]
            if g == frm:
                n_correct += 1
            else:
                gold_counts[g] = gold_counts.get(g, 0) + 1
        word_based = template in _WORD_TEMPLATES
        frm_in_args = not word_based and frm in it[1:]
        interacting = None  # computed lazily, shared across to_tags
        for to in to_set:
            if word_based or not (frm_in_args or to in it[1:]):
                good = gold_counts.get(to, 0)
                bad = n_correct
            else:
                if interacting is None:
                    interacting = {
                        s for s, p in site_list
                        if _has_near(pos_by[(s, frm)], p)
                    }
                if not interacting:
                    good = gold_counts.get(to, 0)
                    bad = n_correct
                else:
                    good = bad = 0
                    for s, p in site_list:
                        if s in interacting:
                            continue
                        g = gold[s][p]
                        if g == frm:
                            bad += 1
                        elif g == to:
                            good += 1
                    for s in interacting:
                        g2, b2 = _simulate_sentence(template, it[1:], to,
                                                    state[s], gold[s],
                                                    pos_by[(s, frm)])
                        good += g2
                        bad += b2
            cand_key = (-(good - bad), (template, it[1:], frm, to))
            if best is None or cand_key < best[0]:
                best = (cand_key, good, bad)
    if best is None:
        return None
    (_, (template, args, frm, to)), good, bad = best[0], best[1], best[2]
    score = RuleScore(good, bad)
    if score.net < threshold:
        return None
    return ContextualRule(template, args, frm, to), score


def learn_contextual_rules(train: TaggedCorpus, lexicon: Lexicon,
                           lexical_rules, chain: InitialRuleChain = None,
                           config: TrainConfig = None) -> tuple:
    if chain is None:
        chain = default_greek_chain()
    if config is None:
        config = TrainConfig()
    if not train.sentences:
        raise TaggerError("cannot train on an empty corpus")
    state, gold = initial_contextual_state(train, lexicon, lexical_rules, chain)
    rules = []
    iteration = 0
    while (config.max_rules_per_phase is None
           or len(rules) < config.max_rules_per_phase):
        iteration += 1
        best = _contextual_iteration(state, gold, config.score_threshold)
        if best is None:
            break
        rule, score = best
        for words, tags in state:
            apply_contextual_rule(rule, words, tags)
        rules.append(rule)
        logger.info("contextual %d %s net=%d errors_remaining=%d",
                    iteration, rule, score.net, token_errors(state, gold))
    return tuple(rules)


def train_model(train: TaggedCorpus, chain: InitialRuleChain = None,
                config: TrainConfig = None) -> TaggerModel:
    """Both training stages in order; deterministic in (train, config.seed)."""
    if chain is None:
        chain = default_greek_chain()
    if config is None:
        config = TrainConfig()
    lexicon, lexical_rules = learn_lexical_rules(train, chain, config)
    contextual_rules = learn_contextual_rules(train, lexicon, lexical_rules,
                                              chain, config)
    return TaggerModel(train.tagset, lexicon, chain, lexical_rules,
                       contextual_rules)
