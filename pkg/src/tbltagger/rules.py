"""Transformation rules: lexical (word-form) and contextual (window) rules,
their application semantics, the tagging pipeline and model persistence.

Lexical rules operate on word types and fire only for words absent from the
lexicon; contextual rules operate on individual tokens, scanning each
sentence left to right with immediate effect, sentences independent.
Out-of-bounds context never matches (no sentinel tags).
"""

from __future__ import annotations

import json
import os
import shutil
import tempfile
from dataclasses import dataclass
from typing import Optional

from .corpus import (ModelError, ParseError, TaggedCorpus, TaggerError, Tagset,
                     TagsetError, Token, load_tagset, serialize_tagset)
from .lexicon import (InitialRuleChain, Lexicon, default_greek_chain,
                      initial_tag, parse_lexicon, serialize_lexicon)

LEXICAL_TEMPLATES = ("ADDPREF", "ADDSUF", "DELETEPREF", "DELETESUF",
                     "HASCHAR", "HASPREF", "HASSUF")

# template -> arity of its argument list
CONTEXTUAL_TEMPLATES = {
    "PREVTAG": 1, "NEXTTAG": 1,
    "PREV2TAG": 1, "NEXT2TAG": 1,
    "PREV1OR2TAG": 1, "NEXT1OR2TAG": 1,
    "PREV1OR2OR3TAG": 1, "NEXT1OR2OR3TAG": 1,
    "PREVWD": 1, "NEXTWD": 1,
    "SURROUNDTAG": 2, "PREVBIGRAM": 2, "NEXTBIGRAM": 2,
}

DEFAULT_MAX_AFFIX_LEN = 4

MODEL_FILES = ("TAGSET", "LEXICON", "LEXRULES", "CTXRULES", "MANIFEST")
MODEL_FORMAT_VERSION = 1


@dataclass(frozen=True)
class LexicalRule:
    template: str
    arg: str
    from_tag: Optional[str]  # None = unconditioned on the current tag
    to_tag: str

    def __post_init__(self):
        if self.template not in LEXICAL_TEMPLATES:
            raise TaggerError("unknown lexical template %r" % self.template)
        if not self.arg:
            raise TaggerError("lexical rule argument must be non-empty")
        if self.template == "HASCHAR" and len(self.arg) != 1:
            raise TaggerError("HASCHAR takes exactly one character")
        if self.from_tag is not None and self.from_tag == self.to_tag:
            raise TaggerError("lexical rule from_tag equals to_tag")

    def sort_key(self):
        return (self.template, self.arg, self.from_tag or "", self.to_tag)


@dataclass(frozen=True)
class ContextualRule:
    template: str
    args: tuple
    from_tag: str
    to_tag: str

    def __post_init__(self):
        arity = CONTEXTUAL_TEMPLATES.get(self.template)
        if arity is None:
            raise TaggerError("unknown contextual template %r" % self.template)
        if len(self.args) != arity:
            raise TaggerError("%s takes %d args, got %d"
                              % (self.template, arity, len(self.args)))
        if self.from_tag == self.to_tag:
            raise TaggerError("contextual rule from_tag equals to_tag")

    def sort_key(self):
        return (self.template, self.args, self.from_tag, self.to_tag)


def lexical_rule_matches(rule: LexicalRule, word: str, current_tag: str,
                         lexicon: Lexicon) -> bool:
    if rule.from_tag is not None and rule.from_tag != current_tag:
        return False
    t, a = rule.template, rule.arg
    if t == "HASSUF":
        return word.endswith(a)
    if t == "HASPREF":
        return word.startswith(a)
    if t == "DELETESUF":
        return (len(word) > len(a) and word.endswith(a)
                and word[:-len(a)] in lexicon)
    if t == "DELETEPREF":
        return (len(word) > len(a) and word.startswith(a)
                and word[len(a):] in lexicon)
    if t == "ADDSUF":
        return word + a in lexicon
    if t == "ADDPREF":
        return a + word in lexicon
    if t == "HASCHAR":
        return a in word
    raise TaggerError("unknown lexical template %r" % t)


def apply_lexical_rules(rules, assignments: dict, lexicon: Lexicon) -> dict:
    """Apply rules in order to a word-type -> tag map for unknown words.
    Later rules see earlier rules' retagging."""
    out = dict(assignments)
    for rule in rules:
        for word, tag in out.items():
            if lexical_rule_matches(rule, word, tag, lexicon):
                out[word] = rule.to_tag
    return out


def context_predicate(template: str, args: tuple, words, tags, pos: int) -> bool:
    """Template predicate only; the from_tag check is the caller's job."""
    n = len(tags)
    t = template
    if t == "PREVTAG":
        return pos >= 1 and tags[pos - 1] == args[0]
    if t == "NEXTTAG":
        return pos + 1 < n and tags[pos + 1] == args[0]
    if t == "PREV2TAG":
        return pos >= 2 and tags[pos - 2] == args[0]
    if t == "NEXT2TAG":
        return pos + 2 < n and tags[pos + 2] == args[0]
    if t == "PREV1OR2TAG":
        return ((pos >= 1 and tags[pos - 1] == args[0])
                or (pos >= 2 and tags[pos - 2] == args[0]))
    if t == "NEXT1OR2TAG":
        return ((pos + 1 < n and tags[pos + 1] == args[0])
                or (pos + 2 < n and tags[pos + 2] == args[0]))
    if t == "PREV1OR2OR3TAG":
        return any(pos >= d and tags[pos - d] == args[0] for d in (1, 2, 3))
    if t == "NEXT1OR2OR3TAG":
        return any(pos + d < n and tags[pos + d] == args[0] for d in (1, 2, 3))
    if t == "PREVWD":
        return pos >= 1 and words[pos - 1] == args[0]
    if t == "NEXTWD":
        return pos + 1 < n and words[pos + 1] == args[0]
    if t == "SURROUNDTAG":
        return (pos >= 1 and pos + 1 < n
                and tags[pos - 1] == args[0] and tags[pos + 1] == args[1])
    if t == "PREVBIGRAM":
        return (pos >= 2 and tags[pos - 2] == args[0]
                and tags[pos - 1] == args[1])
    if t == "NEXTBIGRAM":
        return (pos + 2 < n and tags[pos + 1] == args[0]
                and tags[pos + 2] == args[1])
    raise TaggerError("unknown contextual template %r" % t)


def contextual_rule_matches(rule: ContextualRule, words, tags, pos: int) -> bool:
    if tags[pos] != rule.from_tag:
        return False
    return context_predicate(rule.template, rule.args, words, tags, pos)


def apply_contextual_rule(rule: ContextualRule, words, tags) -> None:
    """One left-to-right pass over a single sentence, mutating ``tags``;
    a change at position i is visible at positions > i."""
    for pos in range(len(tags)):
        if contextual_rule_matches(rule, words, tags, pos):
            tags[pos] = rule.to_tag


def apply_contextual_rules(rules, corpus_state) -> None:
    """Apply rules in order to a list of (words, tags) sentence states,
    mutating the tag lists in place."""
    for rule in rules:
        for words, tags in corpus_state:
            apply_contextual_rule(rule, words, tags)


@dataclass(frozen=True)
class TaggerModel:
    tagset: Tagset
    lexicon: Lexicon
    initial_chain: InitialRuleChain
    lexical_rules: tuple
    contextual_rules: tuple

    def __post_init__(self):
        for rule in self.lexical_rules:
            for tag in (rule.from_tag, rule.to_tag):
                if tag is not None and tag not in self.tagset:
                    raise TagsetError("rule tag %r not in tagset" % tag)
        for rule in self.contextual_rules:
            for tag in (rule.from_tag, rule.to_tag):
                if tag not in self.tagset:
                    raise TagsetError("rule tag %r not in tagset" % tag)


def tag_corpus(raw_sentences, model: TaggerModel) -> TaggedCorpus:
    """Full pipeline: initial tags, lexical rules over unknown word types
    (scoped to this input), then contextual rules over all tokens."""
    unknown = {}
    for sent in raw_sentences:
        for tok in sent:
            if tok.word not in model.lexicon and tok.word not in unknown:
                unknown[tok.word] = initial_tag(
                    tok.word, model.lexicon, model.initial_chain, model.tagset)
    unknown = apply_lexical_rules(model.lexical_rules, unknown, model.lexicon)

    state = []
    for sent in raw_sentences:
        words = tuple(tok.word for tok in sent)
        tags = [unknown[w] if w in unknown
                else model.lexicon.most_frequent_tag(w) for w in words]
        state.append((words, tags))
    apply_contextual_rules(model.contextual_rules, state)

    sentences = tuple(
        tuple(Token(w, t) for w, t in zip(words, tags))
        for words, tags in state)
    return TaggedCorpus(sentences, model.tagset)


def serialize_rules(lexical_rules=(), contextual_rules=()) -> str:
    """One rule per line, file order = application order.

    ``LEX <TEMPLATE> <arg> <from_tag|-> <to_tag>``
    ``CTX <TEMPLATE> <from_tag> <to_tag> <arg1> [arg2]``
    """
    lines = []
    for r in lexical_rules:
        lines.append("LEX %s %s %s %s" % (r.template, r.arg, r.from_tag or "-",
                                          r.to_tag))
    for r in contextual_rules:
        lines.append("CTX %s %s %s %s" % (r.template, r.from_tag, r.to_tag,
                                          " ".join(r.args)))
    return "".join(line + "\n" for line in lines)


def parse_rules(text: str, tagset: Tagset):
    """Returns (lexical_rules, contextual_rules), each in file order."""
    lexical, contextual = [], []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        kind = fields[0]
        try:
            if kind == "LEX":
                if len(fields) != 5:
                    raise ParseError("line %d: LEX rule needs 4 fields" % lineno,
                                     line=lineno)
                template, arg, from_tag, to_tag = fields[1:]
                from_tag = None if from_tag == "-" else from_tag
                for tag in (from_tag, to_tag):
                    if tag is not None and tag not in tagset:
                        raise TagsetError("line %d: tag %r not in tagset"
                                          % (lineno, tag), line=lineno)
                lexical.append(LexicalRule(template, arg, from_tag, to_tag))
            elif kind == "CTX":
                if len(fields) < 5:
                    raise ParseError("line %d: CTX rule needs at least 4 fields"
                                     % lineno, line=lineno)
                template, from_tag, to_tag = fields[1:4]
                args = tuple(fields[4:])
                for tag in (from_tag, to_tag):
                    if tag not in tagset:
                        raise TagsetError("line %d: tag %r not in tagset"
                                          % (lineno, tag), line=lineno)
                contextual.append(ContextualRule(template, args, from_tag, to_tag))
            else:
                raise ParseError("line %d: rule line must start with LEX or CTX"
                                 % lineno, line=lineno)
        except TaggerError as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError("line %d: %s" % (lineno, exc), line=lineno) from exc
    return tuple(lexical), tuple(contextual)


def save_model(model: TaggerModel, path: str, manifest_extra: dict = None) -> None:
    """Write TAGSET/LEXICON/LEXRULES/CTXRULES/MANIFEST atomically: build in a
    temp directory next to ``path`` and rename into place."""
    parent = os.path.dirname(os.path.abspath(path)) or "."
    os.makedirs(parent, exist_ok=True)
    tmp = tempfile.mkdtemp(prefix=".model-", dir=parent)
    try:
        _write(os.path.join(tmp, "TAGSET"), serialize_tagset(model.tagset))
        _write(os.path.join(tmp, "LEXICON"), serialize_lexicon(model.lexicon))
        _write(os.path.join(tmp, "LEXRULES"),
               serialize_rules(lexical_rules=model.lexical_rules))
        _write(os.path.join(tmp, "CTXRULES"),
               serialize_rules(contextual_rules=model.contextual_rules))
        manifest = {"format_version": MODEL_FORMAT_VERSION}
        manifest.update(manifest_extra or {})
        _write(os.path.join(tmp, "MANIFEST"),
               json.dumps(manifest, indent=2, sort_keys=True) + "\n")
        if os.path.isdir(path):
            shutil.rmtree(path)
        os.replace(tmp, path)
    except BaseException:
        shutil.rmtree(tmp, ignore_errors=True)
        raise


def load_model(path: str) -> TaggerModel:
    for name in MODEL_FILES:
        if not os.path.isfile(os.path.join(path, name)):
            raise ModelError("model directory %s is missing %s" % (path, name))
    manifest = json.loads(_read(os.path.join(path, "MANIFEST")))
    if manifest.get("format_version") != MODEL_FORMAT_VERSION:
        raise ModelError("unsupported model format version %r"
                         % manifest.get("format_version"))
    tagset = load_tagset(_read(os.path.join(path, "TAGSET")))
    lexicon = parse_lexicon(_read(os.path.join(path, "LEXICON")), tagset)
    lexical, extra_ctx = parse_rules(_read(os.path.join(path, "LEXRULES")), tagset)
    if extra_ctx:
        raise ModelError("LEXRULES contains contextual rules")
    extra_lex, contextual = parse_rules(_read(os.path.join(path, "CTXRULES")), tagset)
    if extra_lex:
        raise ModelError("CTXRULES contains lexical rules")
    return TaggerModel(tagset, lexicon, default_greek_chain(), lexical, contextual)


def _write(path, text):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _read(path):
    with open(path, encoding="utf-8") as fh:
        return fh.read()
