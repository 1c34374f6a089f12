"""Frequency lexicon and the initial (default-rule) tagger.

The lexicon maps each word type seen in training to its tags ordered by
descending frequency; the head of that list is the initial tag for known
words. Unknown words fall through an ordered chain of script-based
branches, the last of which always matches.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass

from .corpus import ParseError, TaggedCorpus, TaggerError, Tagset, TagsetError

LATIN_START = "LATIN_START"
GREEK_CAPITAL_START = "GREEK_CAPITAL_START"
OTHER = "OTHER"

STARTS_LATIN = "STARTS_LATIN"
STARTS_GREEK_CAPITAL = "STARTS_GREEK_CAPITAL"
ALWAYS = "ALWAYS"

# Uppercase Greek letters, including accented capitals and dialytika forms.
_GREEK_CAPITALS = frozenset(
    chr(c) for c in range(0x0391, 0x03AA) if c != 0x03A2
) | frozenset("ΆΈΉΊΌΎΏΪΫ")


class Lexicon:
    """word type -> ((tag, count), ...) ordered by count desc, tag name asc."""

    def __init__(self, entries: dict):
        cleaned = {}
        for word, pairs in entries.items():
            pairs = tuple(pairs)
            if not pairs:
                raise TaggerError("empty entry for word %r" % word)
            for _, count in pairs:
                if count <= 0:
                    raise TaggerError("non-positive count in entry for %r" % word)
            if list(pairs) != sorted(pairs, key=lambda p: (-p[1], p[0])):
                raise TaggerError("entry for %r not in frequency order" % word)
            cleaned[word] = pairs
        self.entries = cleaned

    def __contains__(self, word):
        return word in self.entries

    def __len__(self):
        return len(self.entries)

    def __eq__(self, other):
        return isinstance(other, Lexicon) and self.entries == other.entries

    def most_frequent_tag(self, word):
        return self.entries[word][0][0]


@dataclass(frozen=True)
class InitialRuleChain:
    """Ordered (predicate, role-key) branches; the last must be ALWAYS."""

    branches: tuple

    def __post_init__(self):
        if not self.branches or self.branches[-1][0] != ALWAYS:
            raise TaggerError("last branch of the initial rule chain must be ALWAYS")


def default_greek_chain() -> InitialRuleChain:
    """Latin-initial -> foreign word; Greek-capital-initial -> masculine
    proper noun; anything else -> feminine noun."""
    return InitialRuleChain((
        (STARTS_LATIN, "FOREIGN"),
        (STARTS_GREEK_CAPITAL, "PROPER_MASC_SG"),
        (ALWAYS, "NOUN_FEM_SG"),
    ))


def build_lexicon(corpus: TaggedCorpus) -> Lexicon:
    if not corpus.sentences:
        raise TaggerError("cannot build a lexicon from an empty corpus")
    counts = defaultdict(Counter)
    for sent in corpus.sentences:
        for tok in sent:
            counts[tok.word][tok.tag] += 1
    entries = {
        word: tuple(sorted(c.items(), key=lambda p: (-p[1], p[0])))
        for word, c in counts.items()
    }
    return Lexicon(entries)


def classify_script(word: str) -> str:
    if not word:
        raise TaggerError("cannot classify an empty word")
    first = word[0]
    if ("a" <= first <= "z") or ("A" <= first <= "Z"):
        return LATIN_START
    if first in _GREEK_CAPITALS:
        return GREEK_CAPITAL_START
    return OTHER


def initial_tag(word: str, lexicon: Lexicon, chain: InitialRuleChain,
                tagset: Tagset) -> str:
    """Most frequent lexicon tag for known words; first matching chain
    branch's role tag otherwise."""
    if word in lexicon:
        return lexicon.most_frequent_tag(word)
    script = classify_script(word)
    for predicate, role in chain.branches:
        if (predicate == ALWAYS
                or (predicate == STARTS_LATIN and script == LATIN_START)
                or (predicate == STARTS_GREEK_CAPITAL
                    and script == GREEK_CAPITAL_START)):
            return tagset.roles[role]
    raise TaggerError("initial rule chain matched no branch")  # unreachable


def serialize_lexicon(lexicon: Lexicon) -> str:
    lines = []
    for word in sorted(lexicon.entries):
        pairs = " ".join("%s:%d" % (t, c) for t, c in lexicon.entries[word])
        lines.append("%s %s\n" % (word, pairs))
    return "".join(lines)


def parse_lexicon(text: str, tagset: Tagset) -> Lexicon:
    entries = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        fields = line.split()
        if len(fields) < 2:
            raise ParseError("line %d: lexicon entry needs word and tag:count pairs"
                             % lineno, line=lineno)
        word, pairs = fields[0], []
        for item in fields[1:]:
            tag, sep, count = item.rpartition(":")
            if not sep or not tag or not count.isdigit():
                raise ParseError("line %d: malformed tag:count item %r"
                                 % (lineno, item), line=lineno)
            if tag not in tagset:
                raise TagsetError("line %d: tag %r not in tagset" % (lineno, tag),
                                  line=lineno)
            count = int(count)
            if count <= 0:
                raise ParseError("line %d: non-positive count in %r"
                                 % (lineno, item), line=lineno)
            pairs.append((tag, count))
        if word in entries:
            raise ParseError("line %d: duplicate lexicon word %r" % (lineno, word),
                             line=lineno)
        entries[word] = tuple(pairs)
    return Lexicon(entries)
