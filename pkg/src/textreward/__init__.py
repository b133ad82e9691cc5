"""Reference-based text rewards for RL fine-tuning pipelines.

Tokenize, score candidates against references (BLEU family, ROUGE-L),
judge pairwise preferences, select hard training examples, normalize
rewards into group advantages, and serve it all over HTTP or the CLI.
"""

from .combine import ScoreVector, combine_mean, pearson, zscore
from .errors import (
    AlignmentError,
    InvalidInputError,
    MissingReferenceError,
    MissingScoreError,
    TextRewardError,
    UndefinedStatisticError,
)
from .judging import (
    ANNOTATOR_LABELS,
    DOMAINS,
    HUMAN_LABELS,
    TIE_POLICIES,
    AgreementReport,
    AnnotatorStats,
    PreferenceRecord,
    Verdict,
    annotator_stats,
    judge,
    judge_dataset,
    length_correlation,
    make_judge,
    multi_reference_sweep,
    verdicts,
)
from .metrics import (
    DEFAULT_CONFIG,
    BleuReport,
    BleuScorer,
    NgramAttribution,
    ScoreConfig,
    attribute_matches,
    bleu,
    bleu_rouge_harmonic,
    brevity_penalty,
    clipped_precision,
    config_from_mapping,
    effective_reference_length,
    precision_geometric_mean,
    rouge_l,
    rouge_l_multi,
)
from .pipeline import (
    DEFAULT_MAX_TOKENS,
    DEFAULT_MIN_TOKENS,
    DROP_REASONS,
    SELECTION_MODES,
    CorpusRecord,
    Drop,
    ReferenceSetView,
    SelectionReport,
    build_reference_sets,
    filter_pool,
    records_by_id,
    score_pool,
    select_hardest,
)
from .rewards import (
    DEFAULT_EPSILON,
    DEFAULT_GROUP_SIZE,
    REFERENCE_FREE_SPECS,
    REWARD_SPECS,
    AdvantageVector,
    RewardGroup,
    extract_answer,
    format_reward,
    group_advantage,
    reward_bleu,
    reward_bleu_plus_external,
    reward_bleu_plus_external_single,
    reward_brf1,
    reward_external,
    reward_format_bleu,
    reward_rouge_l,
)
from .stats import (
    DEFAULT_OPENERS,
    DEFAULT_REFUSAL_PHRASES,
    TextStatsReport,
    is_refusal,
    opener_frequency,
    repetition_rate,
    stats_report,
    uses_markdown,
)
from .tokenization import TokenSequence, tokenize_13a, whitespace_tokenize

__version__ = "0.1.0"

__all__ = [
    "ANNOTATOR_LABELS",
    "AdvantageVector",
    "AgreementReport",
    "AlignmentError",
    "AnnotatorStats",
    "BleuReport",
    "BleuScorer",
    "CorpusRecord",
    "DEFAULT_CONFIG",
    "DEFAULT_EPSILON",
    "DEFAULT_GROUP_SIZE",
    "DEFAULT_MAX_TOKENS",
    "DEFAULT_MIN_TOKENS",
    "DEFAULT_OPENERS",
    "DEFAULT_REFUSAL_PHRASES",
    "DOMAINS",
    "DROP_REASONS",
    "Drop",
    "HUMAN_LABELS",
    "InvalidInputError",
    "MissingReferenceError",
    "MissingScoreError",
    "NgramAttribution",
    "PreferenceRecord",
    "REFERENCE_FREE_SPECS",
    "REWARD_SPECS",
    "ReferenceSetView",
    "RewardGroup",
    "SELECTION_MODES",
    "ScoreConfig",
    "ScoreVector",
    "SelectionReport",
    "TIE_POLICIES",
    "TextRewardError",
    "TextStatsReport",
    "TokenSequence",
    "UndefinedStatisticError",
    "Verdict",
    "annotator_stats",
    "attribute_matches",
    "bleu",
    "bleu_rouge_harmonic",
    "brevity_penalty",
    "build_reference_sets",
    "clipped_precision",
    "combine_mean",
    "config_from_mapping",
    "effective_reference_length",
    "extract_answer",
    "filter_pool",
    "format_reward",
    "group_advantage",
    "is_refusal",
    "judge",
    "judge_dataset",
    "length_correlation",
    "make_judge",
    "multi_reference_sweep",
    "opener_frequency",
    "pearson",
    "precision_geometric_mean",
    "records_by_id",
    "repetition_rate",
    "reward_bleu",
    "reward_bleu_plus_external",
    "reward_bleu_plus_external_single",
    "reward_brf1",
    "reward_external",
    "reward_format_bleu",
    "reward_rouge_l",
    "rouge_l",
    "rouge_l_multi",
    "score_pool",
    "select_hardest",
    "stats_report",
    "tokenize_13a",
    "uses_markdown",
    "verdicts",
    "whitespace_tokenize",
    "zscore",
]
