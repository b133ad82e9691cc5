"""Deterministic text-to-token conversion.

tokenize_13a reproduces the language-independent mteval-v13a scheme used by
the standard BLEU tooling, so scores computed here line up with published
numbers. whitespace_tokenize is the lowercasing splitter that the repetition
statistic is defined over.
"""

import re
import unicodedata
from dataclasses import dataclass


@dataclass(frozen=True)
class TokenSequence:
    """An ordered list of non-empty, whitespace-free tokens."""

    tokens: tuple
    source_length_chars: int

    def __len__(self):
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)

    def __getitem__(self, index):
        return self.tokens[index]


# The always-split class: ASCII punctuation and symbols except period, comma,
# dash and apostrophe. Period/comma/dash follow digit-context rules below and
# the apostrophe stays attached (so contractions survive as one token).
# Periods and commas are padded here unconditionally and digit-adjacent ones
# are repaired afterwards; that is much cheaper than context regexes because
# str.translate runs at C speed and decimal separators are rare in prose.
_PAD_TABLE = {ord(ch): f" {ch} " for ch in "!\"#$%&()*+/:;<=>?@[\\]^_`{|}~.,"}
# Rejoin a period or comma that had an ASCII digit on both sides in the
# source. After the pad pass such a separator is flanked by exactly one
# space; anything pre-spaced in the source shows two or more, so this cannot
# rejoin what the source kept apart. [0-9] on purpose: the canonical rules
# are ASCII-only, and widening them would change scores on numeric text.
_REPAIR_DECIMAL = re.compile(r"([0-9]) ([\.,]) (?=[0-9])")
# A dash splits only when an ASCII digit immediately precedes it, so ranges
# like 5-6 break apart while hyphenated words do not.
_DASH_AFTER_DIGIT = re.compile(r"([0-9])(-)")

_ENTITIES = (("&quot;", '"'), ("&amp;", "&"), ("&lt;", "<"), ("&gt;", ">"))


class _NonAsciiPadTable(dict):
    """str.translate table that pads non-ASCII punctuation and symbols.

    Codepoint classifications are computed on first sight and cached, which
    avoids scanning the whole Unicode range up front. ASCII codepoints are
    left alone; the regex pipeline owns them.
    """

    def __missing__(self, codepoint):
        ch = chr(codepoint)
        if codepoint > 127 and unicodedata.category(ch)[0] in "PS":
            out = f" {ch} "
        else:
            out = ch
        self[codepoint] = out
        return out


_NON_ASCII_PAD = _NonAsciiPadTable()


def tokenize_13a(text):
    """Tokenize one segment the way the mteval-v13a scorer does.

    Applied in order: drop the literal "<skipped>" marker, rejoin
    hyphen-linebreak splits, turn newlines into spaces, decode the four XML
    entities, pad punctuation per the rules above, then split on whitespace.
    Total function: any input, including empty, yields a TokenSequence.

    Non-ASCII punctuation and symbol codepoints are padded as well (Unicode
    categories P and S); letters, digits and marks in any script are kept
    intact. Pure-ASCII input goes through the canonical rules unchanged.
    """
    norm = text.replace("<skipped>", "")
    norm = norm.replace("-\n", "")
    norm = norm.replace("\n", " ")
    if "&" in norm:
        for entity, literal in _ENTITIES:
            norm = norm.replace(entity, literal)
    if not norm.isascii():
        norm = norm.translate(_NON_ASCII_PAD)
    norm = norm.translate(_PAD_TABLE)
    norm = _REPAIR_DECIMAL.sub(r"\1\2", norm)
    norm = _DASH_AFTER_DIGIT.sub(r"\1 \2 ", norm)
    return TokenSequence(tuple(norm.split()), len(text))


def whitespace_tokenize(text):
    """Lowercase, split on whitespace runs, drop empties."""
    return TokenSequence(tuple(text.lower().split()), len(text))
