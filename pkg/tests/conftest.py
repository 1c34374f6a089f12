"""Shared fixtures and hypothesis strategies for the test suite."""

import pytest
from hypothesis import strategies as st

from tbltagger.corpus import TaggedCorpus, Tagset, Token
from tbltagger.evaluate import SynthSpec, generate_synthetic_corpus

# The large synthetic corpus shared by the learner-growth test and the
# acceptance suite (~24k tokens). Generated once per session.
BIG_SPEC = SynthSpec(n_stems=200, n_sentences=2600, seed=7)

# Alphabet for generated words: NFC-stable characters only, so parsing
# (which NFC-normalizes) round-trips byte-identically. No whitespace.
WORD_CHARS = "abcdefgxyzαβγδεηικλμνοςστάέήώΑΓΔΆ0123./:'#-"

TAG_NAMES = ("AT", "NN", "VB", "PUNCT", "FW", "PROP", "NNF")

DEFAULT_ROLES = {"FOREIGN": "FW", "PROPER_MASC_SG": "PROP",
                 "NOUN_FEM_SG": "NNF"}


def make_tagset(tags=TAG_NAMES, roles=None):
    return Tagset(tags, roles or DEFAULT_ROLES)


@pytest.fixture
def tagset():
    return make_tagset()


@pytest.fixture(scope="session")
def big_synth_corpus():
    return generate_synthetic_corpus(BIG_SPEC)


@pytest.fixture
def tiny_corpus(tagset):
    sents = (
        (Token("ο", "AT"), Token("γάτα", "NN"), Token(".", "PUNCT")),
        (Token("ο", "AT"), Token("τρέχει", "VB"), Token("γάτα", "NN")),
        (Token("γάτα", "VB"), Token(".", "PUNCT")),
    )
    return TaggedCorpus(sents, tagset)


def words_st(max_size=8):
    return st.text(alphabet=WORD_CHARS, min_size=1, max_size=max_size)


def tags_st():
    return st.sampled_from(TAG_NAMES)


def sentences_st(max_sentences=8):
    token = st.tuples(words_st(), tags_st()).map(lambda p: Token(*p))
    sentence = st.lists(token, min_size=1, max_size=6).map(tuple)
    return st.lists(sentence, min_size=0, max_size=max_sentences).map(tuple)


def corpora_st(max_sentences=8):
    return sentences_st(max_sentences).map(
        lambda s: TaggedCorpus(s, make_tagset()))
