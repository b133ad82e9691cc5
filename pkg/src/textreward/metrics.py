"""Core scoring math.

Clipped n-gram precision, brevity penalty, multi-reference BLEU with
smoothing, ROUGE-L, the BLEU/ROUGE-L harmonic mean, and n-gram match
attribution. All functions are pure and accept any sequence of tokens
(TokenSequence or a plain list of strings).
"""

import math
from collections import Counter
from dataclasses import dataclass, field

from .errors import InvalidInputError

EFFECTIVE_REF_RULES = ("closest", "shortest")


@dataclass(frozen=True)
class ScoreConfig:
    """Knobs for BLEU-style scoring.

    weights defaults to uniform 1/max_order. With smoothing on, a precision
    whose match count or total count is zero becomes (m+1)/(t+1); nonzero
    precisions are never rescaled.
    """

    max_order: int = 4
    weights: tuple = None
    smoothing: bool = True
    effective_ref_length_rule: str = "closest"

    def __post_init__(self):
        if self.max_order < 1:
            raise InvalidInputError(f"max_order must be >= 1, got {self.max_order}")
        if self.weights is None:
            object.__setattr__(self, "weights", tuple([1.0 / self.max_order] * self.max_order))
        else:
            object.__setattr__(self, "weights", tuple(self.weights))
        if len(self.weights) != self.max_order:
            raise InvalidInputError(
                f"need {self.max_order} weights, got {len(self.weights)}"
            )
        if any(w < 0 for w in self.weights):
            raise InvalidInputError("weights must be non-negative")
        if abs(sum(self.weights) - 1.0) > 1e-9:
            raise InvalidInputError(f"weights must sum to 1, got {sum(self.weights)}")
        if self.effective_ref_length_rule not in EFFECTIVE_REF_RULES:
            raise InvalidInputError(
                f"effective_ref_length_rule must be one of {EFFECTIVE_REF_RULES}"
            )


DEFAULT_CONFIG = ScoreConfig()


def config_from_mapping(overrides):
    """ScoreConfig from a plain dict (parsed JSON). Falsy input → default."""
    if not overrides:
        return DEFAULT_CONFIG
    unknown = set(overrides) - set(ScoreConfig.__dataclass_fields__)
    if unknown:
        raise InvalidInputError(f"unknown config fields: {sorted(unknown)}")
    if overrides.get("weights") is not None:
        overrides = dict(overrides, weights=tuple(overrides["weights"]))
    return ScoreConfig(**overrides)


@dataclass(frozen=True)
class BleuReport:
    """Full BLEU decomposition.

    precisions holds the values that actually enter the score (smoothed where
    smoothing applied); match_counts and total_counts keep the raw integers,
    so score == brevity_penalty * exp(sum(w * log(p))) holds exactly whenever
    every precision is positive.
    """

    score: float
    precisions: tuple
    brevity_penalty: float
    candidate_length: int
    effective_reference_length: int
    match_counts: tuple
    total_counts: tuple


@dataclass(frozen=True)
class NgramAttribution:
    """Clipped matched n-grams per order; counts sum to the report's match_counts."""

    by_order: dict = field(default_factory=dict)

    def order(self, n):
        return self.by_order.get(n, {})


def _ngram_counts(tokens, order):
    if order == 1:
        return Counter(tokens)
    return Counter(zip(*(tokens[i:] for i in range(order))))


def _merged_reference_counts(references, order):
    # per-gram maximum across references, which is what clipping caps against
    if len(references) == 1:
        return _ngram_counts(tuple(references[0]), order)
    merged = Counter()
    for ref in references:
        counts = _ngram_counts(tuple(ref), order)
        for gram, count in counts.items():
            if count > merged[gram]:
                merged[gram] = count
    return merged


def clipped_precision(candidate, references, order):
    """Clipped matches and total candidate n-grams at one order.

    matches = sum over distinct candidate n-grams of min(count in candidate,
    max count in any single reference); total = max(0, len - order + 1).
    """
    if order < 1:
        raise InvalidInputError(f"order must be >= 1, got {order}")
    if not references:
        raise InvalidInputError("references must be non-empty")
    candidate = tuple(candidate)
    cand_counts = _ngram_counts(candidate, order)
    merged = _merged_reference_counts(references, order)
    matches = 0
    for gram, count in cand_counts.items():
        ceiling = merged.get(gram, 0)
        matches += count if count < ceiling else ceiling
    return matches, max(0, len(candidate) - order + 1)


def brevity_penalty(candidate_length, effective_ref_length):
    """1 when the candidate is longer than r, exp(1 - r/c) otherwise, 0 for empty."""
    if candidate_length == 0:
        return 0.0
    if candidate_length > effective_ref_length:
        return 1.0
    return math.exp(1.0 - effective_ref_length / candidate_length)


def effective_reference_length(candidate_length, reference_lengths, rule="closest"):
    """Reference length the brevity penalty compares against.

    closest picks the length minimizing |len - c| with ties broken toward the
    shorter length; shortest picks the minimum.
    """
    if not reference_lengths:
        raise InvalidInputError("reference_lengths must be non-empty")
    if rule == "shortest":
        return min(reference_lengths)
    if rule != "closest":
        raise InvalidInputError(f"unknown rule {rule!r}")
    best = None
    for length in sorted(reference_lengths):
        if best is None or abs(length - candidate_length) < abs(best - candidate_length):
            best = length
    return best


def _report_against_counts(candidate, merged_by_order, reference_lengths, config):
    c = len(candidate)
    r = effective_reference_length(
        c, reference_lengths, config.effective_ref_length_rule
    )
    bp = brevity_penalty(c, r)

    precisions = []
    match_counts = []
    total_counts = []
    for order in range(1, config.max_order + 1):
        total = c - order + 1
        if total < 1:
            matches, total = 0, 0
        else:
            cand_counts = _ngram_counts(candidate, order)
            merged_get = merged_by_order[order - 1].get
            matches = 0
            for gram, count in cand_counts.items():
                ceiling = merged_get(gram, 0)
                matches += count if count < ceiling else ceiling
        match_counts.append(matches)
        total_counts.append(total)
        if config.smoothing and (matches == 0 or total == 0):
            precisions.append((matches + 1) / (total + 1))
        elif total == 0:
            precisions.append(0.0)
        else:
            precisions.append(matches / total)

    if any(p == 0.0 for p in precisions):
        score = 0.0
    else:
        log_sum = 0.0
        for w, p in zip(config.weights, precisions):
            log_sum += w * math.log(p)
        score = bp * math.exp(log_sum)

    return BleuReport(
        score=score,
        precisions=tuple(precisions),
        brevity_penalty=bp,
        candidate_length=c,
        effective_reference_length=r,
        match_counts=tuple(match_counts),
        total_counts=tuple(total_counts),
    )


def bleu(candidate, references, config=DEFAULT_CONFIG):
    """Multi-reference BLEU with full component reporting.

    With smoothing on, p_n = (matches+1)/(total+1) whenever matches or total
    is zero; otherwise the raw ratio. With smoothing off, any zero precision
    forces score 0 while the components are still reported. An empty
    candidate scores 0 with brevity penalty 0.
    """
    if not references:
        raise InvalidInputError("references must be non-empty")
    candidate = tuple(candidate)
    references = [tuple(ref) for ref in references]
    merged_by_order = [
        _merged_reference_counts(references, order)
        for order in range(1, config.max_order + 1)
    ]
    return _report_against_counts(
        candidate, merged_by_order, [len(ref) for ref in references], config
    )


class BleuScorer:
    """Reusable scorer that preprocesses its references once.

    Group-sampled RL scores many candidates against the same references, so
    the reference n-gram counts are built a single time here and score() pays
    only for the candidate side.
    """

    def __init__(self, references, config=DEFAULT_CONFIG):
        if not references:
            raise InvalidInputError("references must be non-empty")
        references = [tuple(ref) for ref in references]
        self.config = config
        self._reference_lengths = [len(ref) for ref in references]
        self._merged_by_order = [
            _merged_reference_counts(references, order)
            for order in range(1, config.max_order + 1)
        ]

    def score(self, candidate):
        return _report_against_counts(
            tuple(candidate), self._merged_by_order, self._reference_lengths, self.config
        )


def precision_geometric_mean(candidate, references, config=DEFAULT_CONFIG):
    """The precision component of BLEU with the brevity penalty held at 1."""
    report = bleu(candidate, references, config)
    if any(p == 0.0 for p in report.precisions):
        return 0.0
    return math.exp(
        sum(w * math.log(p) for w, p in zip(config.weights, report.precisions))
    )


def _lcs_length(a, b):
    # two-row dynamic program; O(len(a) * len(b)) time, O(len(b)) space
    if not a or not b:
        return 0
    previous = [0] * (len(b) + 1)
    for token_a in a:
        current = [0]
        append = current.append
        for j, token_b in enumerate(b, start=1):
            if token_a == token_b:
                append(previous[j - 1] + 1)
            elif previous[j] >= current[j - 1]:
                append(previous[j])
            else:
                append(current[j - 1])
        previous = current
    return previous[-1]


def rouge_l(candidate, reference):
    """Sequence-level ROUGE-L F1 (beta = 1) against a single reference."""
    candidate = tuple(candidate)
    reference = tuple(reference)
    if not candidate or not reference:
        return 0.0
    lcs = _lcs_length(candidate, reference)
    if lcs == 0:
        return 0.0
    precision = lcs / len(candidate)
    recall = lcs / len(reference)
    return 2.0 * precision * recall / (precision + recall)


def rouge_l_multi(candidate, references):
    """Best ROUGE-L F1 over several references."""
    if not references:
        raise InvalidInputError("references must be non-empty")
    return max(rouge_l(candidate, ref) for ref in references)


def bleu_rouge_harmonic(bleu_score, rouge_score):
    """Harmonic mean of the two scores; 0 whenever either is 0."""
    if bleu_score == 0.0 or rouge_score == 0.0:
        return 0.0
    return 2.0 * bleu_score * rouge_score / (bleu_score + rouge_score)


def attribute_matches(candidate, references, config=DEFAULT_CONFIG):
    """Which n-grams matched, with their clipped counts, per order."""
    if not references:
        raise InvalidInputError("references must be non-empty")
    candidate = tuple(candidate)
    references = [tuple(ref) for ref in references]
    by_order = {}
    for order in range(1, config.max_order + 1):
        cand_counts = _ngram_counts(candidate, order) if len(candidate) >= order else {}
        merged = _merged_reference_counts(references, order)
        matched = {}
        for gram, count in cand_counts.items():
            ceiling = merged.get(gram, 0)
            clipped = count if count < ceiling else ceiling
            if clipped > 0:
                key = (gram,) if order == 1 else gram
                matched[key] = clipped
        by_order[order] = matched
    return NgramAttribution(by_order=by_order)
