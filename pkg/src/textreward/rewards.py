"""Reward functions over candidate groups and group-normalized advantages.

Everything an external policy trainer needs from this engine: per-candidate
rewards (BLEU, ROUGE-L, composites, format), and the per-group advantage
normalization.
"""

import math
import re
from dataclasses import dataclass

from .combine import ScoreVector, combine_mean
from .errors import InvalidInputError, MissingScoreError
from .metrics import DEFAULT_CONFIG, bleu, bleu_rouge_harmonic, rouge_l_multi
from .tokenization import tokenize_13a

DEFAULT_GROUP_SIZE = 8
DEFAULT_EPSILON = 1e-8

_THINK_ANSWER = re.compile(
    r"\s*<think>(.*?)</think>\s*<answer>(.*?)</answer>\s*\Z", re.DOTALL
)


@dataclass(frozen=True)
class RewardGroup:
    """K candidate completions for one prompt with their scalar rewards."""

    prompt_id: str
    candidates: tuple = ()
    rewards: tuple = ()
    reward_spec: str = ""

    def __post_init__(self):
        object.__setattr__(self, "candidates", tuple(self.candidates))
        object.__setattr__(self, "rewards", tuple(float(r) for r in self.rewards))
        if self.candidates and len(self.candidates) != len(self.rewards):
            raise InvalidInputError(
                f"group {self.prompt_id!r}: {len(self.candidates)} candidates "
                f"but {len(self.rewards)} rewards"
            )


@dataclass(frozen=True)
class AdvantageVector:
    values: tuple
    epsilon: float


def reward_bleu(candidate, references, config=DEFAULT_CONFIG):
    """BLEU of the candidate text against one or more reference texts."""
    if not references:
        raise InvalidInputError("references must be non-empty")
    return bleu(
        tokenize_13a(candidate), [tokenize_13a(ref) for ref in references], config
    ).score


def reward_rouge_l(candidate, references):
    """Best ROUGE-L F1 of the candidate text over the reference texts."""
    if not references:
        raise InvalidInputError("references must be non-empty")
    return rouge_l_multi(tokenize_13a(candidate), [tokenize_13a(ref) for ref in references])


def reward_brf1(candidate, references, config=DEFAULT_CONFIG):
    """Harmonic mean of BLEU and best ROUGE-L F1."""
    return bleu_rouge_harmonic(
        reward_bleu(candidate, references, config), reward_rouge_l(candidate, references)
    )


def reward_external(candidate_id, score_table):
    """Look up a precomputed scalar score, unchanged."""
    try:
        return score_table[candidate_id]
    except KeyError:
        raise MissingScoreError(f"no precomputed score for id {candidate_id!r}") from None


def reward_bleu_plus_external(bleu_scores, external_scores, ids=None):
    """Mean of the two batch z-scores, element-wise over one batch.

    Both inputs must cover the same candidates in the same order. ids default
    to positions. Single-candidate calls cannot be standardized; use
    reward_bleu_plus_external_single with precomputed batch statistics.
    """
    if len(bleu_scores) != len(external_scores):
        raise InvalidInputError(
            f"batch mismatch: {len(bleu_scores)} bleu vs {len(external_scores)} external"
        )
    if ids is None:
        ids = [str(i) for i in range(len(bleu_scores))]
    a = ScoreVector.from_pairs(zip(ids, bleu_scores))
    b = ScoreVector.from_pairs(zip(ids, external_scores))
    return list(combine_mean(a, b).values)


def reward_bleu_plus_external_single(bleu_score, external_score, bleu_stats=None,
                                     external_stats=None):
    """Per-candidate form of the z-combined reward.

    bleu_stats and external_stats are (mean, population std) over the batch
    each score came from; without them the combination is undefined.
    """
    if bleu_stats is None or external_stats is None:
        raise InvalidInputError(
            "z-combined reward needs batch statistics: pass bleu_stats and "
            "external_stats as (mean, std)"
        )
    parts = []
    for score, (mean, std) in ((bleu_score, bleu_stats), (external_score, external_stats)):
        parts.append(0.0 if std == 0 else (score - mean) / std)
    return (parts[0] + parts[1]) / 2.0


def format_reward(candidate):
    """1.0 for exactly one think block then one answer block, else 0.0.

    Strict: nothing but whitespace outside the two blocks, and no duplicated
    or nested tags anywhere.
    """
    if candidate.count("<think>") != 1 or candidate.count("</think>") != 1:
        return 0.0
    if candidate.count("<answer>") != 1 or candidate.count("</answer>") != 1:
        return 0.0
    return 1.0 if _THINK_ANSWER.fullmatch(candidate) else 0.0


def extract_answer(candidate):
    """The answer span of a well-formed candidate, or None."""
    if format_reward(candidate) == 0.0:
        return None
    return _THINK_ANSWER.fullmatch(candidate).group(2)


def reward_format_bleu(candidate, references, format_weight=0.5, config=DEFAULT_CONFIG):
    """Weighted sum of the format reward and BLEU on the extracted answer.

    format_weight is a free parameter; 0.5 weighs the two equally. A
    malformed candidate has no answer span, so its BLEU component is 0.
    """
    if not 0.0 <= format_weight <= 1.0:
        raise InvalidInputError(f"format_weight must be in [0, 1], got {format_weight}")
    formed = format_reward(candidate)
    answer = extract_answer(candidate)
    answer_score = reward_bleu(answer, references, config) if answer is not None else 0.0
    return format_weight * formed + (1.0 - format_weight) * answer_score


def group_advantage(group, epsilon=DEFAULT_EPSILON):
    """Group-normalized advantages: (r - mean) / (population std + epsilon).

    Accepts a RewardGroup or a bare sequence of rewards. A zero-variance
    group maps to all zeros. K < 2 is an error.
    """
    rewards = group.rewards if isinstance(group, RewardGroup) else tuple(group)
    k = len(rewards)
    if k < 2:
        raise InvalidInputError(f"advantage needs a group of at least 2, got {k}")
    mean = math.fsum(rewards) / k
    variance = math.fsum((r - mean) ** 2 for r in rewards) / k
    if variance == 0.0:
        return AdvantageVector(values=(0.0,) * k, epsilon=epsilon)
    denom = math.sqrt(variance) + epsilon
    return AdvantageVector(
        values=tuple((r - mean) / denom for r in rewards), epsilon=epsilon
    )


# reward_spec names accepted by the CLI and the service, each scoring one
# candidate against its references
# every spec is callable as fn(candidate, references, config); config may be None
def _spec_bleu(candidate, references, config=None):
    return reward_bleu(candidate, references, config or DEFAULT_CONFIG)


def _spec_rouge_l(candidate, references, config=None):
    return reward_rouge_l(candidate, references)


def _spec_brf1(candidate, references, config=None):
    return reward_brf1(candidate, references, config or DEFAULT_CONFIG)


def _spec_format(candidate, references=None, config=None):
    return format_reward(candidate)


def _spec_format_bleu(candidate, references, config=None):
    return reward_format_bleu(candidate, references, config=config or DEFAULT_CONFIG)


REWARD_SPECS = {
    "bleu": _spec_bleu,
    "rouge_l": _spec_rouge_l,
    "brf1": _spec_brf1,
    "format": _spec_format,
    "format_bleu": _spec_format_bleu,
}

# reference-free specs may omit references entirely
REFERENCE_FREE_SPECS = {"format"}
