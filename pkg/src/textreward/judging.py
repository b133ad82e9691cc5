"""Pairwise winner selection under any metric, and agreement reporting.

A judge scores both outputs of a PreferenceRecord; the higher score wins,
exact equality is a tie. Agreement against human labels is reported globally
and per domain, under a selectable metric-tie policy. Dataset-level judges
(the z-combined metric) standardize their component scores over the whole
record set before comparing.
"""

import logging
import math
from dataclasses import dataclass, field

from .errors import InvalidInputError, MissingReferenceError, MissingScoreError
from .metrics import DEFAULT_CONFIG, BleuScorer, brevity_penalty, rouge_l_multi
from .tokenization import tokenize_13a

logger = logging.getLogger(__name__)

DOMAINS = ("QA", "Code", "Writing", "MathReasoning", "Multilingual", "Planning")
HUMAN_LABELS = ("X", "Y", "tie")
TIE_POLICIES = ("exclude", "half_credit", "count_as_disagree")
ANNOTATOR_LABELS = ("B_wins", "R_wins", "tie")


@dataclass
class PreferenceRecord:
    """One pairwise comparison with a human label.

    references may be a list of texts or a mapping of reference tag to text;
    tagged references are required for reference-subset judging and sweeps.
    extra carries unknown JSONL fields through round-trips untouched.
    """

    id: str
    prompt: str
    output_x: str
    output_y: str
    human_label: str
    domain: str = None
    external_scores: dict = None
    references: object = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.human_label not in HUMAN_LABELS:
            raise InvalidInputError(
                f"record {self.id!r}: human_label must be one of {HUMAN_LABELS}, "
                f"got {self.human_label!r}"
            )
        if self.domain is not None and self.domain not in DOMAINS:
            raise InvalidInputError(
                f"record {self.id!r}: domain must be one of {DOMAINS}, got {self.domain!r}"
            )
        if self.human_label != "tie" and self.output_x == self.output_y:
            logger.warning(
                "record %r: identical outputs but human label %s",
                self.id, self.human_label,
            )


@dataclass(frozen=True)
class Verdict:
    winner: str
    score_x: float
    score_y: float
    judge_name: str


@dataclass(frozen=True)
class AgreementReport:
    n_total: int
    n_agree: int
    n_metric_ties: int
    agreement_rate: float
    tie_policy: str
    per_domain: dict = field(default_factory=dict)
    n_skipped_human_ties: int = 0
    n_errors: int = 0


def _reference_texts(record, ref_tags=None):
    refs = record.references
    if refs is None or len(refs) == 0:
        raise MissingReferenceError(f"record {record.id!r} has no references")
    if ref_tags is None:
        if isinstance(refs, dict):
            return list(refs.values())
        return list(refs)
    if not isinstance(refs, dict):
        raise MissingReferenceError(
            f"record {record.id!r}: reference subset {list(ref_tags)} requested "
            "but references are untagged"
        )
    texts = []
    for tag in ref_tags:
        if tag not in refs:
            raise MissingReferenceError(
                f"record {record.id!r} missing reference {tag!r}"
            )
        texts.append(refs[tag])
    return texts


class _Judge:
    name = "judge"
    needs_dataset = False

    def prepare(self, records):
        pass

    def score_pair(self, record):
        raise NotImplementedError


class _BleuJudge(_Judge):
    def __init__(self, config=DEFAULT_CONFIG, ref_tags=None):
        self.config = config
        self.ref_tags = ref_tags
        self.name = "bleu"

    def _reports(self, record):
        refs = [tokenize_13a(t) for t in _reference_texts(record, self.ref_tags)]
        scorer = BleuScorer(refs, self.config)
        return scorer.score(tokenize_13a(record.output_x)), scorer.score(
            tokenize_13a(record.output_y)
        )

    def score_pair(self, record):
        rx, ry = self._reports(record)
        return rx.score, ry.score


class _PrecisionOnlyJudge(_BleuJudge):
    """BLEU's geometric mean of precisions with the brevity penalty held at 1."""

    def __init__(self, config=DEFAULT_CONFIG, ref_tags=None):
        super().__init__(config, ref_tags)
        self.name = "precision_only"

    def _gm(self, report):
        if any(p == 0.0 for p in report.precisions):
            return 0.0
        return math.exp(
            sum(w * math.log(p) for w, p in zip(self.config.weights, report.precisions))
        )

    def score_pair(self, record):
        rx, ry = self._reports(record)
        return self._gm(rx), self._gm(ry)


class _BpOnlyJudge(_BleuJudge):
    """The brevity penalty alone."""

    def __init__(self, config=DEFAULT_CONFIG, ref_tags=None):
        super().__init__(config, ref_tags)
        self.name = "bp_only"

    def score_pair(self, record):
        ref_lengths = [
            len(tokenize_13a(t)) for t in _reference_texts(record, self.ref_tags)
        ]
        from .metrics import effective_reference_length

        scores = []
        for output in (record.output_x, record.output_y):
            c = len(tokenize_13a(output))
            r = effective_reference_length(
                c, ref_lengths, self.config.effective_ref_length_rule
            )
            scores.append(brevity_penalty(c, r))
        return scores[0], scores[1]


class _RougeJudge(_Judge):
    def __init__(self, ref_tags=None):
        self.ref_tags = ref_tags
        self.name = "rouge_l"

    def score_pair(self, record):
        refs = [tokenize_13a(t) for t in _reference_texts(record, self.ref_tags)]
        return (
            rouge_l_multi(tokenize_13a(record.output_x), refs),
            rouge_l_multi(tokenize_13a(record.output_y), refs),
        )


class _HarmonicJudge(_Judge):
    def __init__(self, config=DEFAULT_CONFIG, ref_tags=None):
        self._bleu = _BleuJudge(config, ref_tags)
        self._rouge = _RougeJudge(ref_tags)
        self.name = "harmonic"

    def score_pair(self, record):
        bx, by = self._bleu.score_pair(record)
        rx, ry = self._rouge.score_pair(record)

        def harmonic(b, r):
            return 0.0 if b == 0.0 or r == 0.0 else 2.0 * b * r / (b + r)

        return harmonic(bx, rx), harmonic(by, ry)


class _LengthJudge(_Judge):
    """Scores each output by its token count, so the longer output wins."""

    name = "length"

    def score_pair(self, record):
        return (
            float(len(tokenize_13a(record.output_x))),
            float(len(tokenize_13a(record.output_y))),
        )


class _ExternalJudge(_Judge):
    def __init__(self, metric):
        self.metric = metric
        self.name = f"external:{metric}"

    def score_pair(self, record):
        scores = record.external_scores or {}
        if self.metric not in scores:
            raise MissingScoreError(
                f"record {record.id!r} has no external score {self.metric!r}"
            )
        pair = scores[self.metric]
        return float(pair[0]), float(pair[1])


class _CombinedJudge(_Judge):
    """Mean of two component scores, each z-scored over the whole dataset.

    Standardization pools both outputs' scores (2n values per component), so
    swapping output_x and output_y leaves the statistics unchanged and the
    verdict flips cleanly. Requires prepare() with the full record list.
    """

    needs_dataset = True

    def __init__(self, component_a, component_b):
        self.components = (component_a, component_b)
        self.name = f"combined:{component_a.name}+{component_b.name}"
        self._pairs = None
        self._failures = None

    def prepare(self, records):
        raw = {}
        failures = {}
        for component in self.components:
            component.prepare(records)
        for record in records:
            try:
                raw[record.id] = [c.score_pair(record) for c in self.components]
            except (MissingReferenceError, MissingScoreError) as err:
                failures[record.id] = err
        self._failures = failures
        self._pairs = {}
        if not raw:
            return
        for index in range(len(self.components)):
            pooled = [s for pair_list in raw.values() for s in pair_list[index]]
            mean = math.fsum(pooled) / len(pooled)
            var = math.fsum((s - mean) ** 2 for s in pooled) / len(pooled)
            std = math.sqrt(var)
            for record_id, pair_list in raw.items():
                sx, sy = pair_list[index]
                zx = 0.0 if std == 0.0 else (sx - mean) / std
                zy = 0.0 if std == 0.0 else (sy - mean) / std
                x_sum, y_sum = self._pairs.get(record_id, (0.0, 0.0))
                self._pairs[record_id] = (x_sum + zx, y_sum + zy)

    def score_pair(self, record):
        if self._pairs is None:
            raise InvalidInputError(
                f"{self.name} needs dataset context; judge through judge_dataset"
            )
        if record.id in self._failures:
            raise self._failures[record.id]
        if record.id not in self._pairs:
            raise InvalidInputError(
                f"record {record.id!r} was not part of the prepared dataset"
            )
        x_sum, y_sum = self._pairs[record.id]
        n = len(self.components)
        return x_sum / n, y_sum / n


def make_judge(spec, config=DEFAULT_CONFIG, ref_tags=None):
    """Build a judge from its spec string.

    Accepted: bleu, rouge_l, harmonic, precision_only, bp_only, length,
    external:<metric>, combined:<spec>+<spec>. A judge instance passes
    through unchanged.
    """
    if isinstance(spec, _Judge):
        return spec
    if spec == "bleu":
        return _BleuJudge(config, ref_tags)
    if spec == "rouge_l":
        return _RougeJudge(ref_tags)
    if spec == "harmonic":
        return _HarmonicJudge(config, ref_tags)
    if spec == "precision_only":
        return _PrecisionOnlyJudge(config, ref_tags)
    if spec == "bp_only":
        return _BpOnlyJudge(config, ref_tags)
    if spec == "length":
        return _LengthJudge()
    if spec.startswith("external:"):
        metric = spec.split(":", 1)[1]
        if not metric:
            raise InvalidInputError("external judge needs a metric name")
        return _ExternalJudge(metric)
    if spec.startswith("combined:"):
        body = spec.split(":", 1)[1]
        parts = body.split("+")
        if len(parts) != 2:
            raise InvalidInputError(
                f"combined judge needs exactly two components, got {body!r}"
            )
        return _CombinedJudge(
            make_judge(parts[0], config, ref_tags), make_judge(parts[1], config, ref_tags)
        )
    raise InvalidInputError(f"unknown judge spec {spec!r}")


def _verdict(judge, record):
    score_x, score_y = judge.score_pair(record)
    if score_x > score_y:
        winner = "X"
    elif score_y > score_x:
        winner = "Y"
    else:
        winner = "tie"
    return Verdict(winner=winner, score_x=score_x, score_y=score_y, judge_name=judge.name)


def judge(record, judge_spec, config=DEFAULT_CONFIG, ref_tags=None):
    """Score both outputs of one record and return the Verdict."""
    the_judge = make_judge(judge_spec, config, ref_tags)
    if the_judge.needs_dataset:
        raise InvalidInputError(
            f"{the_judge.name} needs dataset context; use judge_dataset"
        )
    return _verdict(the_judge, record)


def verdicts(records, judge_spec, config=DEFAULT_CONFIG, ref_tags=None):
    """Verdicts for every judgeable record, keyed by id.

    Human-tie records are skipped with a warning; records the judge cannot
    score are skipped with the reason logged.
    """
    the_judge = make_judge(judge_spec, config, ref_tags)
    effective = [r for r in records if r.human_label != "tie"]
    skipped = len(records) - len(effective)
    if skipped:
        logger.warning("skipping %d human-tie records", skipped)
    the_judge.prepare(effective)
    out = {}
    errors = {}
    for record in effective:
        try:
            out[record.id] = _verdict(the_judge, record)
        except (MissingReferenceError, MissingScoreError) as err:
            logger.warning("skipping record %r: %s", record.id, err)
            errors[record.id] = str(err)
    return out, errors, skipped


def _rate(n_agree, n_ties, n_total, tie_policy):
    if tie_policy == "count_as_disagree":
        return n_agree / n_total
    if tie_policy == "half_credit":
        return (n_agree + 0.5 * n_ties) / n_total
    denominator = n_total - n_ties
    return n_agree / denominator if denominator else 0.0


def _aggregate(judged, tie_policy, skipped=0, errors=0):
    n_total = len(judged)
    n_agree = sum(1 for record, verdict in judged if verdict.winner == record.human_label)
    n_ties = sum(1 for _, verdict in judged if verdict.winner == "tie")
    return AgreementReport(
        n_total=n_total,
        n_agree=n_agree,
        n_metric_ties=n_ties,
        agreement_rate=_rate(n_agree, n_ties, n_total, tie_policy),
        tie_policy=tie_policy,
        n_skipped_human_ties=skipped,
        n_errors=errors,
    )


def judge_dataset(records, judge_spec, tie_policy="count_as_disagree",
                  config=DEFAULT_CONFIG, ref_tags=None):
    """Agreement of a judge against human labels over a record set.

    Metric ties count against agreement by default; exclude drops them from
    the denominator and half_credit awards them 0.5. Per-domain sections are
    reported for whatever domain tags are present.
    """
    if tie_policy not in TIE_POLICIES:
        raise InvalidInputError(f"tie_policy must be one of {TIE_POLICIES}")
    records = list(records)
    if not records:
        raise InvalidInputError("no records to judge")
    verdict_map, errors, skipped = verdicts(records, judge_spec, config, ref_tags)
    judged = [
        (record, verdict_map[record.id])
        for record in records
        if record.id in verdict_map
    ]
    if not judged:
        raise InvalidInputError("no judgeable records after filtering")
    report = _aggregate(judged, tie_policy, skipped=skipped, errors=len(errors))
    per_domain = {}
    for domain in DOMAINS:
        subset = [(r, v) for r, v in judged if r.domain == domain]
        if subset:
            per_domain[domain] = _aggregate(subset, tie_policy)
    return AgreementReport(
        n_total=report.n_total,
        n_agree=report.n_agree,
        n_metric_ties=report.n_metric_ties,
        agreement_rate=report.agreement_rate,
        tie_policy=report.tie_policy,
        per_domain=per_domain,
        n_skipped_human_ties=report.n_skipped_human_ties,
        n_errors=report.n_errors,
    )


def multi_reference_sweep(records, reference_model_order, config=DEFAULT_CONFIG,
                          tie_policy="count_as_disagree", judge_spec="bleu"):
    """Agreement at every reference-count prefix of the given model order.

    Every record must carry a tagged reference for every model in the order;
    the first violation is reported by record and model name. The resulting
    (k, report) rows plot agreement against reference count.
    """
    if not reference_model_order:
        raise InvalidInputError("reference_model_order must be non-empty")
    records = list(records)
    for record in records:
        refs = record.references if isinstance(record.references, dict) else {}
        for tag in reference_model_order:
            if tag not in refs:
                raise MissingReferenceError(
                    f"record {record.id!r} missing reference {tag!r}"
                )
    results = []
    for k in range(1, len(reference_model_order) + 1):
        report = judge_dataset(
            records, judge_spec, tie_policy=tie_policy, config=config,
            ref_tags=list(reference_model_order[:k]),
        )
        results.append((k, report))
    return results


def length_correlation(records, reports_by_group):
    """Pearson between mean |reference length - output length| and agreement.

    reports_by_group maps a reference tag to its AgreementReport (as produced
    by judging with that single reference). Lengths are 13a token counts; the
    per-record statistic averages the two outputs' absolute differences.
    """
    items = list(reports_by_group.items())
    if len(items) < 2:
        raise InvalidInputError(f"need at least 2 groups, got {len(items)}")
    diffs = []
    rates = []
    for tag, report in items:
        per_record = []
        for record in records:
            refs = record.references if isinstance(record.references, dict) else {}
            if tag not in refs:
                continue
            ref_len = len(tokenize_13a(refs[tag]))
            dx = abs(ref_len - len(tokenize_13a(record.output_x)))
            dy = abs(ref_len - len(tokenize_13a(record.output_y)))
            per_record.append((dx + dy) / 2.0)
        if not per_record:
            raise MissingReferenceError(f"no record carries reference {tag!r}")
        diffs.append(sum(per_record) / len(per_record))
        rates.append(report.agreement_rate)
    from .combine import pearson

    return pearson(diffs, rates)


@dataclass(frozen=True)
class AnnotatorStats:
    soft_pref_a: float
    soft_pref_b: float
    kappa: float  # None when undefined


def annotator_stats(labels_a, labels_b):
    """Per-annotator soft preference rates and Cohen's kappa.

    Soft preference counts B_wins and ties. Kappa is computed over records
    where both annotators gave a non-tie label and is None when undefined
    (empty subset or a single shared category).
    """
    labels_a = list(labels_a)
    labels_b = list(labels_b)
    if len(labels_a) != len(labels_b):
        raise InvalidInputError(
            f"label lists differ in length: {len(labels_a)} vs {len(labels_b)}"
        )
    if not labels_a:
        raise InvalidInputError("need at least one labeled record")
    for label in labels_a + labels_b:
        if label not in ANNOTATOR_LABELS:
            raise InvalidInputError(
                f"labels must be one of {ANNOTATOR_LABELS}, got {label!r}"
            )
    n = len(labels_a)
    soft_a = sum(1 for x in labels_a if x in ("B_wins", "tie")) / n
    soft_b = sum(1 for x in labels_b if x in ("B_wins", "tie")) / n

    pairs = [(a, b) for a, b in zip(labels_a, labels_b) if a != "tie" and b != "tie"]
    kappa = None
    if pairs:
        m = len(pairs)
        observed = sum(1 for a, b in pairs if a == b) / m
        chance = 0.0
        for category in ("B_wins", "R_wins"):
            pa = sum(1 for a, _ in pairs if a == category) / m
            pb = sum(1 for _, b in pairs if b == category) / m
            chance += pa * pb
        if chance != 1.0:
            kappa = (observed - chance) / (1.0 - chance)
    return AnnotatorStats(soft_pref_a=soft_a, soft_pref_b=soft_b, kappa=kappa)
