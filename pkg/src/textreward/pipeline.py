"""Corpus filtering, parallel pool scoring, and hardest-k selection.

Records flow: filter_pool trims a raw corpus to the candidate pool,
score_pool attaches a reward per record (fanning out across processes),
select_hardest picks the k lowest-scoring records with deterministic
tie-breaks, and build_reference_sets produces tag-restricted views.
"""

import dataclasses
import logging
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .errors import InvalidInputError, MissingReferenceError, MissingScoreError
from .metrics import DEFAULT_CONFIG
from .rewards import REFERENCE_FREE_SPECS, REWARD_SPECS
from .tokenization import tokenize_13a

logger = logging.getLogger(__name__)

DEFAULT_MIN_TOKENS = 10
DEFAULT_MAX_TOKENS = 512

SELECTION_MODES = ("hardest", "easy", "medium", "random")
DROP_REASONS = ("min_tokens", "max_tokens", "language", "source_quota")


@dataclass
class CorpusRecord:
    """One prompt with tagged references, ready for scoring and selection."""

    id: str
    prompt: str
    references: dict
    base_output: str = None
    scores: dict = None
    source: str = None
    language: str = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not isinstance(self.references, dict):
            raise InvalidInputError(
                f"record {self.id!r}: references must map tag to text"
            )
        for tag, text in self.references.items():
            if not text:
                raise InvalidInputError(
                    f"record {self.id!r}: reference {tag!r} is empty"
                )


@dataclass(frozen=True)
class Drop:
    """Why a record left the pool. token_count is set for length drops."""

    record_id: str
    reason: str
    field: str
    token_count: int = None


@dataclass(frozen=True)
class SelectionReport:
    selected_ids: tuple
    metric: str
    threshold_score: float
    pool_size: int
    k: int
    mode: str = "hardest"
    seed: int = None


def filter_pool(records, min_tokens=DEFAULT_MIN_TOKENS, max_tokens=DEFAULT_MAX_TOKENS,
                language_allowlist=None, per_source_quota=None):
    """Split records into (kept, dropped) under length and language rules.

    Token counts use the 13a tokenizer. A record is dropped at its first
    violation, checked in order: language tag, prompt bounds, each reference
    in storage order. per_source_quota caps how many kept records any one
    source contributes (untagged records count under the None source).
    """
    kept = []
    dropped = []
    source_counts = {}
    for record in records:
        drop = _first_violation(record, min_tokens, max_tokens, language_allowlist)
        if drop is None and per_source_quota is not None:
            seen = source_counts.get(record.source, 0)
            if seen >= per_source_quota:
                drop = Drop(record_id=record.id, reason="source_quota", field="source")
            else:
                source_counts[record.source] = seen + 1
        if drop is None:
            kept.append(record)
        else:
            dropped.append(drop)
    return kept, dropped


def _first_violation(record, min_tokens, max_tokens, language_allowlist):
    if language_allowlist is not None and record.language not in language_allowlist:
        return Drop(record_id=record.id, reason="language", field="language")
    texts = [("prompt", record.prompt)]
    texts.extend(
        (f"references[{tag}]", text) for tag, text in record.references.items()
    )
    for field_name, text in texts:
        count = len(tokenize_13a(text))
        if count < min_tokens:
            return Drop(record_id=record.id, reason="min_tokens",
                        field=field_name, token_count=count)
        if count > max_tokens:
            return Drop(record_id=record.id, reason="max_tokens",
                        field=field_name, token_count=count)
    return None


def _score_payload(payload):
    """Worker-side scoring; must stay importable for process pools."""
    record_id, candidate, references, reward_spec, config = payload
    try:
        value = REWARD_SPECS[reward_spec](candidate, references, config)
        return record_id, True, value
    except Exception as err:  # one bad record must not sink the batch
        return record_id, False, f"{type(err).__name__}: {err}"


def score_pool(records, reference_tags=None, config=DEFAULT_CONFIG,
               reward_spec="bleu", workers=1):
    """Score every record's base_output and return (records, failures).

    Output preserves input order; scored records carry scores[reward_spec].
    Records that cannot be scored pass through unchanged and are listed in
    failures by id. Aggregation is keyed by id, so worker count never
    changes the result.
    """
    if reward_spec not in REWARD_SPECS:
        raise InvalidInputError(
            f"unknown reward spec {reward_spec!r}; known: {sorted(REWARD_SPECS)}"
        )
    records = list(records)
    failures = {}
    payloads = []
    for record in records:
        if record.base_output is None:
            failures[record.id] = "missing base_output"
            continue
        references = None
        if reward_spec not in REFERENCE_FREE_SPECS:
            try:
                references = _select_references(record, reference_tags)
            except MissingReferenceError as err:
                failures[record.id] = str(err)
                continue
        payloads.append((record.id, record.base_output, references, reward_spec, config))

    if workers > 1 and len(payloads) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunk = max(1, len(payloads) // (workers * 4))
            results = list(pool.map(_score_payload, payloads, chunksize=chunk))
    else:
        results = [_score_payload(p) for p in payloads]

    values = {}
    for record_id, ok, outcome in results:
        if ok:
            values[record_id] = outcome
        else:
            failures[record_id] = outcome

    out = []
    for record in records:
        if record.id in values:
            merged = dict(record.scores or {})
            merged[reward_spec] = values[record.id]
            out.append(dataclasses.replace(record, scores=merged))
        else:
            out.append(record)
    if failures:
        logger.warning("score_pool: %d of %d records failed", len(failures), len(records))
    return out, failures


def _select_references(record, reference_tags):
    if reference_tags is None:
        texts = list(record.references.values())
        if not texts:
            raise MissingReferenceError(f"record {record.id!r} has no references")
        return texts
    texts = []
    for tag in reference_tags:
        if tag not in record.references:
            raise MissingReferenceError(f"record {record.id!r} missing reference {tag!r}")
        texts.append(record.references[tag])
    return texts


def select_hardest(records, k, metric="bleu", mode="hardest", seed=None):
    """Pick k records by score under the named metric.

    hardest takes the lowest scores, easy the highest, medium the central
    slice of the ascending order, random a seeded sample. Ties break on id,
    so selection is a pure function of (scores, ids, k, mode, seed).
    """
    if k <= 0:
        raise InvalidInputError(f"k must be positive, got {k}")
    if mode not in SELECTION_MODES:
        raise InvalidInputError(f"mode must be one of {SELECTION_MODES}, got {mode!r}")
    records = list(records)
    scored = []
    for record in records:
        if not record.scores or metric not in record.scores:
            raise MissingScoreError(f"record {record.id!r} has no score {metric!r}")
        scored.append((record.scores[metric], record.id))
    pool_size = len(scored)
    if pool_size == 0:
        raise InvalidInputError("cannot select from an empty pool")
    take = min(k, pool_size)
    if k > pool_size:
        logger.warning("requested k=%d exceeds pool of %d; selecting all", k, pool_size)

    ascending = sorted(scored)
    if mode == "hardest":
        picked = ascending[:take]
    elif mode == "easy":
        picked = sorted(scored, key=lambda pair: (-pair[0], pair[1]))[:take]
    elif mode == "medium":
        start = (pool_size - take) // 2
        picked = ascending[start:start + take]
    else:
        picked = random.Random(seed).sample(ascending, take)

    return SelectionReport(
        selected_ids=tuple(record_id for _, record_id in picked),
        metric=metric,
        threshold_score=picked[-1][0],
        pool_size=pool_size,
        k=k,
        mode=mode,
        seed=seed,
    )


def records_by_id(records, ids):
    """Records matching ids, in the ids' order."""
    table = {record.id: record for record in records}
    missing = [record_id for record_id in ids if record_id not in table]
    if missing:
        raise InvalidInputError(f"unknown record ids: {missing}")
    return [table[record_id] for record_id in ids]


@dataclass(frozen=True)
class ReferenceSetView:
    name: str
    tags: tuple
    records: tuple
    missing: dict  # record id -> tags that record lacks


def build_reference_sets(records, tags, name=None):
    """Restrict every record's references to the given tags, in order.

    Records lacking any of the tags are excluded from the view and listed
    in missing. A tag found on no record at all is treated as a typo and
    rejected outright.
    """
    tags = tuple(tags)
    if not tags:
        raise InvalidInputError("reference-set configuration needs at least one tag")
    records = list(records)
    for tag in tags:
        if not any(tag in record.references for record in records):
            raise InvalidInputError(f"reference tag {tag!r} matches no record")
    views = []
    missing = {}
    for record in records:
        absent = [tag for tag in tags if tag not in record.references]
        if absent:
            missing[record.id] = absent
            continue
        views.append(dataclasses.replace(
            record, references={tag: record.references[tag] for tag in tags}
        ))
    return ReferenceSetView(
        name=name or "+".join(tags), tags=tags, records=tuple(views), missing=missing
    )
