"""Command line front end.

Subcommands: score, judge, sweep, select, filter, advantage, stats, bench,
serve. Data commands read JSONL and write JSON or JSONL to stdout, so with
fixed inputs and seeds the output bytes never change across runs. Settings
resolve flag over environment (TEXTREWARD_HOST, TEXTREWARD_PORT,
TEXTREWARD_WORKERS) over --config file over built-in default.

Exit codes: 0 success, 1 runtime failure (with a diagnostic on stderr),
2 usage error.
"""

import argparse
import csv
import dataclasses
import json
import os
import random
import statistics
import sys
import time

from . import jsonl
from .errors import TextRewardError
from .judging import (
    DOMAINS,
    TIE_POLICIES,
    annotator_stats,
    judge_dataset,
    multi_reference_sweep,
)
from .metrics import DEFAULT_CONFIG, bleu, config_from_mapping
from .pipeline import (
    DEFAULT_MAX_TOKENS,
    DEFAULT_MIN_TOKENS,
    SELECTION_MODES,
    filter_pool,
    records_by_id,
    score_pool,
    select_hardest,
)
from .rewards import DEFAULT_EPSILON, DEFAULT_GROUP_SIZE, REWARD_SPECS, group_advantage
from .stats import stats_report
from .tokenization import tokenize_13a

_CONFIG_KEYS = ("host", "port", "workers", "score")


def _load_settings(path):
    if path is None:
        return {}
    with open(path, encoding="utf-8") as handle:
        settings = json.load(handle)
    if not isinstance(settings, dict):
        raise TextRewardError(f"{path}: config file must hold a JSON object")
    unknown = set(settings) - set(_CONFIG_KEYS)
    if unknown:
        raise TextRewardError(f"{path}: unknown config keys {sorted(unknown)}")
    return settings


def _resolve(flag_value, env_name, settings, key, default, cast=str):
    if flag_value is not None:
        return flag_value
    env_value = os.environ.get(env_name)
    if env_value is not None:
        return cast(env_value)
    if key in settings:
        return cast(settings[key])
    return default


def _score_config(settings):
    return config_from_mapping(settings.get("score"))


def _emit_json(payload):
    print(json.dumps(payload, sort_keys=True, ensure_ascii=False))


def _report_dict(report, by_domain):
    payload = dataclasses.asdict(report)
    if not by_domain:
        payload.pop("per_domain")
    return payload


def _split_tags(raw):
    return [tag for tag in raw.split(",") if tag] if raw else None


def _out_handle(path):
    return open(path, "w", encoding="utf-8") if path else sys.stdout


def _cmd_score(args, settings):
    records = jsonl.read_corpus(args.input)
    workers = _resolve(args.workers, "TEXTREWARD_WORKERS", settings, "workers", 1, int)
    scored, failures = score_pool(
        records,
        reference_tags=_split_tags(args.refs),
        config=_score_config(settings),
        reward_spec=args.reward,
        workers=workers,
    )
    handle = _out_handle(args.out)
    try:
        jsonl.write_corpus(handle, scored)
    finally:
        if handle is not sys.stdout:
            handle.close()
    for record_id in sorted(failures):
        print(f"failed {record_id}: {failures[record_id]}", file=sys.stderr)
    if failures and len(failures) == len(records):
        print("error: every record failed to score", file=sys.stderr)
        return 1
    return 0


def _cmd_judge(args, settings):
    records = jsonl.read_preferences(args.input)
    report = judge_dataset(
        records,
        args.judge,
        tie_policy=args.tie_policy,
        config=_score_config(settings),
        ref_tags=_split_tags(args.refs),
    )
    _emit_json(_report_dict(report, args.by_domain))
    return 0


def _cmd_sweep(args, settings):
    records = jsonl.read_preferences(args.input)
    order = _split_tags(args.order)
    results = multi_reference_sweep(
        records, order, config=_score_config(settings),
        tie_policy=args.tie_policy, judge_spec=args.judge,
    )
    table = []
    for k, report in results:
        row = _report_dict(report, by_domain=False)
        row["k"] = k
        row["reference_tags"] = order[:k]
        table.append(row)
    if args.csv:
        columns = ["k", "n_total", "n_agree", "n_metric_ties", "agreement_rate",
                   "n_skipped_human_ties", "n_errors", "tie_policy",
                   "reference_tags"]
        writer = csv.DictWriter(sys.stdout, fieldnames=columns)
        writer.writeheader()
        for row in table:
            flat = dict(row, reference_tags="+".join(row["reference_tags"]))
            writer.writerow(flat)
    else:
        _emit_json(table)
    return 0


def _cmd_select(args, settings):
    records = jsonl.read_corpus(args.input)
    report = select_hardest(
        records, args.k, metric=args.metric, mode=args.mode, seed=args.seed
    )
    if args.report:
        with open(args.report, "w", encoding="utf-8") as handle:
            json.dump(dataclasses.asdict(report), handle, sort_keys=True)
            handle.write("\n")
    selected = records_by_id(records, report.selected_ids)
    handle = _out_handle(args.out)
    try:
        jsonl.write_corpus(handle, selected)
    finally:
        if handle is not sys.stdout:
            handle.close()
    return 0


def _cmd_filter(args, settings):
    records = jsonl.read_corpus(args.input)
    allowlist = _split_tags(args.lang)
    kept, dropped = filter_pool(
        records,
        min_tokens=args.min_tokens,
        max_tokens=args.max_tokens,
        language_allowlist=set(allowlist) if allowlist else None,
        per_source_quota=args.source_quota,
    )
    handle = _out_handle(args.out)
    try:
        jsonl.write_corpus(handle, kept)
    finally:
        if handle is not sys.stdout:
            handle.close()
    if args.drops:
        with open(args.drops, "w", encoding="utf-8") as drop_handle:
            for drop in dropped:
                drop_handle.write(
                    json.dumps(dataclasses.asdict(drop), sort_keys=True) + "\n"
                )
    print(f"kept {len(kept)}, dropped {len(dropped)}", file=sys.stderr)
    return 0


def _cmd_advantage(args, settings):
    groups = jsonl.read_reward_groups(args.input)
    failures = {}
    for group in groups:
        try:
            vector = group_advantage(group, epsilon=args.epsilon)
            _emit_json({"prompt_id": group.prompt_id, "advantages": list(vector.values)})
        except TextRewardError as err:
            failures[group.prompt_id] = str(err)
    for prompt_id in sorted(failures):
        print(f"failed {prompt_id}: {failures[prompt_id]}", file=sys.stderr)
    if failures and len(failures) == len(groups):
        print("error: every group failed", file=sys.stderr)
        return 1
    return 0


def _cmd_stats(args, settings):
    texts = jsonl.read_texts(args.input, field=args.field)
    report = stats_report(texts)
    if args.csv:
        payload = dataclasses.asdict(report)
        openers = payload.pop("opener_frequencies")
        for phrase in sorted(openers):
            payload[f"opener:{phrase}"] = openers[phrase]
        writer = csv.DictWriter(sys.stdout, fieldnames=sorted(payload))
        writer.writeheader()
        writer.writerow(payload)
    else:
        _emit_json(dataclasses.asdict(report))
    return 0


def _synthetic_pairs(n, tokens, seed):
    # plausible text shape: finite vocabulary, some repetition, fixed length
    rng = random.Random(seed)
    vocabulary = [f"w{i}" for i in range(4096)]
    pairs = []
    for _ in range(n):
        candidate = " ".join(rng.choice(vocabulary) for _ in range(tokens))
        reference = " ".join(rng.choice(vocabulary) for _ in range(tokens))
        pairs.append((candidate, reference))
    return pairs


def _cmd_bench(args, settings):
    config = _score_config(settings)
    pairs = _synthetic_pairs(args.n, args.tokens, args.seed)
    # warm-up so first-call costs (regex JIT, caches) stay out of the numbers
    for candidate, reference in pairs[: min(10, len(pairs))]:
        bleu(tokenize_13a(candidate), [tokenize_13a(reference)], config)
    latencies = []
    started = time.perf_counter()
    for candidate, reference in pairs:
        t0 = time.perf_counter()
        bleu(tokenize_13a(candidate), [tokenize_13a(reference)], config)
        latencies.append(time.perf_counter() - t0)
    total = time.perf_counter() - started
    latencies.sort()

    def percentile(q):
        return latencies[min(len(latencies) - 1, int(q * len(latencies)))]

    _emit_json({
        "items": args.n,
        "tokens_per_item": args.tokens,
        "median_ms": statistics.median(latencies) * 1000.0,
        "p90_ms": percentile(0.90) * 1000.0,
        "p99_ms": percentile(0.99) * 1000.0,
        "candidates_per_second": args.n / total,
        "group_size_hint": DEFAULT_GROUP_SIZE,
    })
    return 0


def _cmd_serve(args, settings):
    from .service import serve

    host = _resolve(args.host, "TEXTREWARD_HOST", settings, "host", "127.0.0.1")
    port = _resolve(args.port, "TEXTREWARD_PORT", settings, "port", 8080, int)
    workers = _resolve(args.workers, "TEXTREWARD_WORKERS", settings, "workers", 1, int)
    serve(host=host, port=port, workers=workers)
    return 0


def _cmd_annotators(args, settings):
    payload = json.load(open(args.input, encoding="utf-8"))
    report = annotator_stats(payload["labels_a"], payload["labels_b"])
    _emit_json(dataclasses.asdict(report))
    return 0


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="textreward",
        description="Reference-based text rewards, preference judging, and "
                    "training-data selection.",
    )
    parser.add_argument("--config", help="JSON settings file", default=None)
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("score", help="attach reward scores to a corpus")
    p.add_argument("input")
    p.add_argument("--reward", default="bleu", choices=sorted(REWARD_SPECS))
    p.add_argument("--refs", help="comma-separated reference tags", default=None)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(handler=_cmd_score)

    p = commands.add_parser("judge", help="agreement of a judge with human labels")
    p.add_argument("input")
    p.add_argument("--judge", default="bleu")
    p.add_argument("--refs", help="comma-separated reference tags", default=None)
    p.add_argument("--tie-policy", default="count_as_disagree", choices=TIE_POLICIES)
    p.add_argument("--by-domain", action="store_true",
                   help=f"include per-domain sections ({', '.join(DOMAINS)})")
    p.set_defaults(handler=_cmd_judge)

    p = commands.add_parser("sweep", help="agreement at 1..N references")
    p.add_argument("input")
    p.add_argument("--order", required=True,
                   help="comma-separated reference tags, sweep order")
    p.add_argument("--judge", default="bleu")
    p.add_argument("--tie-policy", default="count_as_disagree", choices=TIE_POLICIES)
    p.add_argument("--csv", action="store_true", help="CSV table instead of JSON")
    p.set_defaults(handler=_cmd_sweep)

    p = commands.add_parser("select", help="pick k records by score")
    p.add_argument("input")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--mode", default="hardest", choices=SELECTION_MODES)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--metric", default="bleu")
    p.add_argument("--report", help="write the selection report JSON here", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(handler=_cmd_select)

    p = commands.add_parser("filter", help="length and language filtering")
    p.add_argument("input")
    p.add_argument("--min-tokens", type=int, default=DEFAULT_MIN_TOKENS)
    p.add_argument("--max-tokens", type=int, default=DEFAULT_MAX_TOKENS)
    p.add_argument("--lang", help="comma-separated language allowlist", default=None)
    p.add_argument("--source-quota", type=int, default=None)
    p.add_argument("--drops", help="write drop reasons JSONL here", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(handler=_cmd_filter)

    p = commands.add_parser("advantage", help="group-normalized advantages")
    p.add_argument("input")
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    p.set_defaults(handler=_cmd_advantage)

    p = commands.add_parser("stats", help="qualitative text statistics")
    p.add_argument("input")
    p.add_argument("--field", default="text")
    p.add_argument("--csv", action="store_true", help="emit a CSV row instead of JSON")
    p.set_defaults(handler=_cmd_stats)

    p = commands.add_parser("annotators", help="inter-annotator agreement")
    p.add_argument("input", help="JSON file with labels_a and labels_b")
    p.set_defaults(handler=_cmd_annotators)

    p = commands.add_parser("bench", help="single-candidate scoring throughput")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--tokens", type=int, default=512)
    p.add_argument("--seed", type=int, default=17)
    p.set_defaults(handler=_cmd_bench)

    p = commands.add_parser("serve", help="run the scoring service")
    p.add_argument("--host", default=None)
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(handler=_cmd_serve)

    return parser


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        settings = _load_settings(args.config)
        return args.handler(args, settings)
    except TextRewardError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError, KeyError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
