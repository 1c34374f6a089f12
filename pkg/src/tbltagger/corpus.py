"""Corpus data model: tagsets, tokens, sentences, tagged corpora.

File formats are line oriented and UTF-8 throughout:
  - tagged corpus: one sentence per line, whitespace-separated ``word/TAG``
    items, the tag being everything after the LAST slash;
  - raw corpus: one sentence per line, whitespace-separated words;
  - tagset config: ``tag <NAME>`` and ``role <ROLEKEY> <NAME>`` lines,
    ``#`` starts a comment.
"""

from __future__ import annotations

import random
import re
import unicodedata
from dataclasses import dataclass, field
from typing import Iterable, Optional

REQUIRED_ROLES = ("FOREIGN", "PROPER_MASC_SG", "NOUN_FEM_SG")

_ITEM_RE = re.compile(r"\S+")


class TaggerError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(TaggerError):
    """Malformed input file; carries a 1-based line number when known."""

    def __init__(self, message, line=None, column=None):
        super().__init__(message)
        self.line = line
        self.column = column


class TagsetError(ParseError):
    """A tag or role is missing from / inconsistent with the tagset."""


class AlignmentError(TaggerError):
    """Two corpora that should be token-aligned are not."""


class ModelError(TaggerError):
    """A model directory is missing files or internally inconsistent."""


def _check_tag_name(name):
    if not name or "/" in name or any(c.isspace() for c in name):
        raise TagsetError("invalid tag name %r (empty, whitespace or '/')" % name)


class Tagset:
    """Finite tag inventory plus role bindings for the initial tagging rule.

    All three roles in REQUIRED_ROLES must be bound to declared tags; the
    initial rule chain resolves its branch targets through them.
    """

    def __init__(self, tags: Iterable[str], roles: dict):
        seen = []
        for t in tags:
            _check_tag_name(t)
            if t in seen:
                raise TagsetError("duplicate tag %r" % t)
            seen.append(t)
        self.tags = tuple(seen)
        self._members = frozenset(seen)
        for key in REQUIRED_ROLES:
            if key not in roles:
                raise TagsetError("missing required role %s" % key)
        for key, t in roles.items():
            if key not in REQUIRED_ROLES:
                raise TagsetError("unknown role key %r" % key)
            if t not in self._members:
                raise TagsetError("role %s bound to undeclared tag %r" % (key, t))
        self.roles = dict(roles)

    def __contains__(self, tag):
        return tag in self._members

    def __len__(self):
        return len(self.tags)

    def __eq__(self, other):
        return (
            isinstance(other, Tagset)
            and self.tags == other.tags
            and self.roles == other.roles
        )

    def __repr__(self):
        return "Tagset(%d tags)" % len(self.tags)


@dataclass(frozen=True)
class Token:
    word: str
    tag: Optional[str] = None


# A sentence is a tuple of Token; kept as a plain tuple rather than a class.
Sentence = tuple


@dataclass(frozen=True)
class TaggedCorpus:
    sentences: tuple
    tagset: Tagset = field(compare=False)

    def __post_init__(self):
        for sent in self.sentences:
            if not sent:
                raise TaggerError("empty sentence in corpus")
            for tok in sent:
                if tok.tag is None:
                    raise TaggerError("untagged token %r in tagged corpus" % tok.word)
                if tok.tag not in self.tagset:
                    raise TagsetError("tag %r not in tagset" % tok.tag)

    @property
    def word_count(self):
        return sum(len(s) for s in self.sentences)

    def __len__(self):
        return len(self.sentences)


@dataclass(frozen=True)
class FoldPlan:
    k: int
    assignments: tuple  # sentence index -> fold id

    def __post_init__(self):
        if self.k < 2:
            raise TaggerError("k must be >= 2, got %d" % self.k)
        sizes = self.fold_sizes()
        if self.assignments and max(sizes) - min(sizes) > 1:
            raise TaggerError("fold sizes differ by more than one")

    def fold_sizes(self):
        sizes = [0] * self.k
        for f in self.assignments:
            sizes[f] += 1
        return sizes

    def fold_indices(self, fold_id):
        return [i for i, f in enumerate(self.assignments) if f == fold_id]


def _normalize(word):
    return unicodedata.normalize("NFC", word)


def parse_tagged_corpus(text: str, tagset: Tagset) -> TaggedCorpus:
    """Parse ``word/TAG`` lines into a TaggedCorpus; blank lines are skipped.

    The tag is taken after the last '/', so words may themselves contain
    slashes. Words are NFC-normalized.
    """
    sentences = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        tokens = []
        for m in _ITEM_RE.finditer(line):
            item, col = m.group(0), m.start() + 1
            word, sep, tag = item.rpartition("/")
            if not sep:
                raise ParseError(
                    "line %d col %d: item %r has no '/' separator" % (lineno, col, item),
                    line=lineno, column=col)
            if not word:
                raise ParseError(
                    "line %d col %d: empty word in %r" % (lineno, col, item),
                    line=lineno, column=col)
            if not tag:
                raise ParseError(
                    "line %d col %d: empty tag in %r" % (lineno, col, item),
                    line=lineno, column=col)
            if tag not in tagset:
                raise TagsetError(
                    "line %d: tag %r not in tagset" % (lineno, tag), line=lineno)
            word = _normalize(word)
            if not word:
                raise ParseError(
                    "line %d col %d: word empty after normalization" % (lineno, col),
                    line=lineno, column=col)
            tokens.append(Token(word, tag))
        sentences.append(tuple(tokens))
    return TaggedCorpus(tuple(sentences), tagset)


def serialize_tagged_corpus(corpus: TaggedCorpus) -> str:
    lines = [" ".join("%s/%s" % (t.word, t.tag) for t in s) for s in corpus.sentences]
    return "".join(line + "\n" for line in lines)


def parse_raw_corpus(text: str) -> list:
    """Parse untagged one-sentence-per-line text; no tokenization beyond
    whitespace splitting."""
    sentences = []
    for line in text.splitlines():
        words = [_normalize(w) for w in line.split()]
        if words:
            sentences.append(tuple(Token(w) for w in words))
    return sentences


def serialize_raw_corpus(sentences) -> str:
    return "".join(" ".join(t.word for t in s) + "\n" for s in sentences)


def load_tagset(text: str) -> Tagset:
    tags = []
    roles = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if fields[0] == "tag" and len(fields) == 2:
            if fields[1] in tags:
                raise TagsetError("line %d: duplicate tag %r" % (lineno, fields[1]),
                                  line=lineno)
            tags.append(fields[1])
        elif fields[0] == "role" and len(fields) == 3:
            key, name = fields[1], fields[2]
            if key not in REQUIRED_ROLES:
                raise TagsetError("line %d: unknown role key %r" % (lineno, key),
                                  line=lineno)
            if name not in tags:
                raise TagsetError(
                    "line %d: role %s bound to undeclared tag %r" % (lineno, key, name),
                    line=lineno)
            roles[key] = name
        else:
            raise ParseError("line %d: unrecognized tagset line %r" % (lineno, line),
                             line=lineno)
    return Tagset(tags, roles)


def serialize_tagset(tagset: Tagset) -> str:
    lines = ["tag %s" % t for t in tagset.tags]
    lines += ["role %s %s" % (k, tagset.roles[k]) for k in REQUIRED_ROLES]
    return "".join(line + "\n" for line in lines)


def shuffle_sentences(corpus: TaggedCorpus, seed: int) -> TaggedCorpus:
    """Seeded Fisher-Yates permutation of the sentence order."""
    sents = list(corpus.sentences)
    random.Random(seed).shuffle(sents)
    return TaggedCorpus(tuple(sents), corpus.tagset)


def kfold_split(corpus: TaggedCorpus, k: int, seed: int) -> FoldPlan:
    """Assign sentences to k folds: seeded shuffle of indices, then
    round-robin. Fold sizes differ by at most one."""
    n = len(corpus.sentences)
    if k < 2:
        raise TaggerError("k must be >= 2, got %d" % k)
    if n < k:
        raise TaggerError("corpus has %d sentences, fewer than k=%d" % (n, k))
    order = list(range(n))
    random.Random(seed).shuffle(order)
    assignments = [0] * n
    for pos, idx in enumerate(order):
        assignments[idx] = pos % k
    return FoldPlan(k, tuple(assignments))


def select_sentences(corpus: TaggedCorpus, indices) -> TaggedCorpus:
    return TaggedCorpus(tuple(corpus.sentences[i] for i in indices), corpus.tagset)


def truncate_to_words(corpus: TaggedCorpus, n_words: int) -> TaggedCorpus:
    """Longest sentence prefix with total word count <= n_words; a first
    sentence longer than n_words is returned whole (sentences never split)."""
    if n_words < 1:
        raise TaggerError("n_words must be >= 1, got %d" % n_words)
    out = []
    total = 0
    for sent in corpus.sentences:
        if out and total + len(sent) > n_words:
            break
        out.append(sent)
        total += len(sent)
        if total >= n_words:
            break
    return TaggedCorpus(tuple(out), corpus.tagset)
