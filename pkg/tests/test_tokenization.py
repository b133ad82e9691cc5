import string

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import oracle_tokenize_13a
from textreward.tokenization import TokenSequence, tokenize_13a, whitespace_tokenize

# mixes the tokenizer's special cases with ordinary text
_FRAGMENTS = st.sampled_from([
    "<skipped>", "-\n", "\n", "&quot;", "&amp;", "&lt;", "&gt;", "&amp;amp;",
    "don't", "3.5", "a.5", "5.a", "1,000", "5-6", "x-6", "1.2.3", ".5", "5.",
    ".", ",", "-", "'", "&", "<", ">", '"', "word", "Word", "9", "(x)",
    "«quoted»", "。", "！", "…", "é", "٣", "３.５", "  ", " ", "\t", "a\tb",
])
fragment_text = st.lists(_FRAGMENTS, max_size=12).map("".join)
any_text = st.text(max_size=80)


class TestSpecifiedExamples:
    def test_hello_world(self):
        assert list(tokenize_13a("Hello, world!")) == ["Hello", ",", "world", "!"]

    def test_empty(self):
        assert list(tokenize_13a("")) == []

    def test_newline_becomes_space(self):
        assert list(tokenize_13a("a\nb")) == ["a", "b"]

    def test_mixed_digit_punctuation(self):
        got = tokenize_13a("3.5 a.5 1,000 don't well-known 5-6 x-6")
        assert list(got) == [
            "3.5", "a", ".", "5", "1,000", "don't", "well-known",
            "5", "-", "6", "x-6",
        ]

    def test_skipped_marker_removed(self):
        assert list(tokenize_13a("a<skipped>b")) == ["ab"]

    def test_hyphen_linebreak_joined(self):
        assert list(tokenize_13a("over-\nlap")) == ["overlap"]

    def test_entities_decoded(self):
        assert list(tokenize_13a("&quot;x&quot; &amp; y &lt;z&gt;")) == [
            '"', "x", '"', "&", "y", "<", "z", ">",
        ]

    def test_decimal_chain_stays_joined(self):
        assert list(tokenize_13a("1.2.3")) == ["1.2.3"]

    def test_unicode_punctuation_is_split(self):
        assert list(tokenize_13a("«word»")) == ["«", "word", "»"]
        assert list(tokenize_13a("end。")) == ["end", "。"]

    def test_unicode_letters_kept_whole(self):
        assert list(tokenize_13a("café déjà")) == ["café", "déjà"]

    def test_non_ascii_digits_are_not_ascii_digits(self):
        # the digit-context rules are ASCII-only, so fullwidth digits split on the dot
        assert list(tokenize_13a("３.５")) == ["３", ".", "５"]

    def test_case_preserved(self):
        assert list(tokenize_13a("Hello WORLD")) == ["Hello", "WORLD"]


class TestTokenSequence:
    def test_container_protocol(self):
        seq = tokenize_13a("a b c")
        assert len(seq) == 3
        assert list(seq) == ["a", "b", "c"]
        assert seq[1] == "b"
        assert seq.source_length_chars == 5

    def test_source_length_counts_raw_characters(self):
        assert tokenize_13a("a<skipped>b").source_length_chars == len("a<skipped>b")


class TestWhitespaceTokenize:
    def test_lowercases(self):
        assert list(whitespace_tokenize("The cat")) == ["the", "cat"]

    def test_whitespace_only(self):
        assert list(whitespace_tokenize("  ")) == []

    def test_run_collapsing(self):
        assert list(whitespace_tokenize("A  b\tc")) == ["a", "b", "c"]


@given(fragment_text)
@settings(max_examples=300, deadline=None)
def test_matches_reference_oracle_on_adversarial_text(text):
    assert list(tokenize_13a(text)) == oracle_tokenize_13a(text)


@given(any_text)
@settings(max_examples=300, deadline=None)
def test_matches_reference_oracle_on_arbitrary_text(text):
    assert list(tokenize_13a(text)) == oracle_tokenize_13a(text)


@given(fragment_text)
@settings(max_examples=200, deadline=None)
def test_token_join_is_idempotent(text):
    once = list(tokenize_13a(text))
    again = list(tokenize_13a(" ".join(once)))
    assert once == again


@given(any_text)
@settings(max_examples=200, deadline=None)
def test_token_count_never_exceeds_character_count(text):
    assert len(tokenize_13a(text)) <= len(text)


@given(any_text)
@settings(max_examples=100, deadline=None)
def test_tokens_are_nonempty_and_whitespace_free(text):
    for token in tokenize_13a(text):
        assert token
        assert not any(ch.isspace() for ch in token)


@given(any_text)
@settings(max_examples=50, deadline=None)
def test_pure_function(text):
    assert tokenize_13a(text) == tokenize_13a(text)
