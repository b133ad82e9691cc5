"""Qualitative output statistics.

Token counts, 1-4 gram repetition rate, refusal detection, markdown usage,
and opener frequency, per text and aggregated over a corpus.
"""

import re
from dataclasses import dataclass, field

from .tokenization import tokenize_13a, whitespace_tokenize

DEFAULT_REFUSAL_PHRASES = (
    "I'm sorry, but",
    "As an AI",
)

DEFAULT_OPENERS = ("Certainly!", "Sure!", "To")

# curly-to-straight before matching, both in the text and the phrases
_APOSTROPHES = {0x2018: "'", 0x2019: "'", 0x02BC: "'"}

_MARKDOWN_PATTERNS = (
    re.compile(r"^\s{0,3}#{1,6}\s", re.MULTILINE),          # headings
    re.compile(r"\*\*[^*\n]+\*\*"),                          # bold
    re.compile(r"(?<!\*)\*[^\s*][^*\n]*\*(?!\*)"),           # italics, asterisk form
    re.compile(r"(?<![\w_])_[^\s_][^_\n]*_(?![\w_])"),       # italics, underscore form
    re.compile(r"```"),                                      # fenced code
    re.compile(r"^\s{0,3}[-*+]\s+\S", re.MULTILINE),         # bulleted list
    re.compile(r"^\s{0,3}\d+\.\s+\S", re.MULTILINE),         # numbered list
    re.compile(r"`[^`\n]+`"),                                # inline code
)


@dataclass(frozen=True)
class TextStatsReport:
    avg_tokens: float
    repetition_rate: float
    refusal_rate: float
    markdown_rate: float
    opener_frequencies: dict = field(default_factory=dict)
    n_texts: int = 0


def repetition_rate(text):
    """Mean over n = 1..4 of the repeated fraction of n-grams.

    Computed over lowercased whitespace tokens; an order with no n-grams
    contributes 0, so short or empty text scores 0.
    """
    words = whitespace_tokenize(text).tokens
    total_words = len(words)
    rates = []
    for n in range(1, 5):
        total = total_words - n + 1
        if total < 1:
            rates.append(0.0)
            continue
        distinct = len(set(zip(*(words[i:] for i in range(n))))) if n > 1 else len(set(words))
        rates.append(1.0 - distinct / total)
    return sum(rates) / 4.0


def is_refusal(text, phrases=DEFAULT_REFUSAL_PHRASES):
    """Case-insensitive substring match against the refusal phrase list."""
    haystack = text.translate(_APOSTROPHES).lower()
    for phrase in phrases:
        if phrase.translate(_APOSTROPHES).lower() in haystack:
            return True
    return False


def uses_markdown(text):
    """True when any common markdown construct appears."""
    for pattern in _MARKDOWN_PATTERNS:
        if pattern.search(text):
            return True
    return False


def opener_frequency(texts, phrases=DEFAULT_OPENERS):
    """Fraction of texts whose first non-whitespace characters equal each phrase.

    Prefix match is exact and case-sensitive.
    """
    texts = list(texts)
    counts = dict.fromkeys(phrases, 0)
    for text in texts:
        stripped = text.lstrip()
        for phrase in phrases:
            if stripped.startswith(phrase):
                counts[phrase] += 1
    n = len(texts)
    return {phrase: (count / n if n else 0.0) for phrase, count in counts.items()}


def stats_report(texts, refusal_phrases=DEFAULT_REFUSAL_PHRASES, opener_phrases=DEFAULT_OPENERS):
    """Aggregate the per-text statistics over a corpus."""
    texts = list(texts)
    n = len(texts)
    if n == 0:
        return TextStatsReport(
            avg_tokens=0.0,
            repetition_rate=0.0,
            refusal_rate=0.0,
            markdown_rate=0.0,
            opener_frequencies=dict.fromkeys(opener_phrases, 0.0),
            n_texts=0,
        )
    return TextStatsReport(
        avg_tokens=sum(len(tokenize_13a(t)) for t in texts) / n,
        repetition_rate=sum(repetition_rate(t) for t in texts) / n,
        refusal_rate=sum(1 for t in texts if is_refusal(t, refusal_phrases)) / n,
        markdown_rate=sum(1 for t in texts if uses_markdown(t)) / n,
        opener_frequencies=opener_frequency(texts, opener_phrases),
        n_texts=n,
    )
