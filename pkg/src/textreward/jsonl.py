"""JSONL readers and writers for corpus, preference, and reward-group files.

One JSON object per line, UTF-8. Fields the schemas do not know about are
kept in each record's extra dict and written back on output, so files
round-trip without loss. Blank lines are skipped; parse errors carry the
file path and line number.
"""

import json

from .errors import InvalidInputError
from .judging import PreferenceRecord
from .pipeline import CorpusRecord
from .rewards import RewardGroup

_CORPUS_FIELDS = ("id", "prompt", "references", "base_output", "scores",
                  "source", "language")
_PREFERENCE_FIELDS = ("id", "prompt", "output_x", "output_y", "human_label",
                      "domain", "external_scores", "references")
_GROUP_FIELDS = ("prompt_id", "candidates", "rewards", "reward_spec")


def _iter_objects(path):
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, 1):
            line = line.strip()
            if not line:
                continue
            try:
                payload = json.loads(line)
            except json.JSONDecodeError as err:
                raise InvalidInputError(f"{path}:{line_no}: invalid JSON: {err}") from err
            if not isinstance(payload, dict):
                raise InvalidInputError(f"{path}:{line_no}: expected a JSON object")
            yield line_no, payload


def _split_fields(payload, known, required, path, line_no):
    for name in required:
        if name not in payload:
            raise InvalidInputError(f"{path}:{line_no}: missing field {name!r}")
    fields = {name: payload[name] for name in known if name in payload}
    extra = {name: value for name, value in payload.items() if name not in known}
    return fields, extra


def _check_unique(record_id, seen, path, line_no):
    if record_id in seen:
        raise InvalidInputError(f"{path}:{line_no}: duplicate id {record_id!r}")
    seen.add(record_id)


def read_corpus(path):
    records = []
    seen = set()
    for line_no, payload in _iter_objects(path):
        fields, extra = _split_fields(
            payload, _CORPUS_FIELDS, ("id", "prompt", "references"), path, line_no
        )
        _check_unique(fields["id"], seen, path, line_no)
        try:
            records.append(CorpusRecord(**fields, extra=extra))
        except InvalidInputError as err:
            raise InvalidInputError(f"{path}:{line_no}: {err}") from err
    return records


def read_preferences(path):
    records = []
    seen = set()
    for line_no, payload in _iter_objects(path):
        fields, extra = _split_fields(
            payload, _PREFERENCE_FIELDS,
            ("id", "prompt", "output_x", "output_y", "human_label"), path, line_no,
        )
        _check_unique(fields["id"], seen, path, line_no)
        try:
            records.append(PreferenceRecord(**fields, extra=extra))
        except InvalidInputError as err:
            raise InvalidInputError(f"{path}:{line_no}: {err}") from err
    return records


def read_reward_groups(path):
    groups = []
    seen = set()
    for line_no, payload in _iter_objects(path):
        fields, _ = _split_fields(payload, _GROUP_FIELDS, ("prompt_id",), path, line_no)
        _check_unique(fields["prompt_id"], seen, path, line_no)
        try:
            groups.append(RewardGroup(**fields))
        except InvalidInputError as err:
            raise InvalidInputError(f"{path}:{line_no}: {err}") from err
    return groups


def read_texts(path, field="text"):
    """Plain text corpus: one object per line carrying the named field."""
    texts = []
    for line_no, payload in _iter_objects(path):
        if field not in payload:
            raise InvalidInputError(f"{path}:{line_no}: missing field {field!r}")
        texts.append(payload[field])
    return texts


def _record_payload(record, known):
    payload = {}
    for name in known:
        value = getattr(record, name)
        if value is not None:
            payload[name] = value
    payload.update(record.extra)
    return payload


def corpus_line(record):
    return json.dumps(_record_payload(record, _CORPUS_FIELDS), ensure_ascii=False)


def preference_line(record):
    return json.dumps(_record_payload(record, _PREFERENCE_FIELDS), ensure_ascii=False)


def write_corpus(path_or_handle, records):
    _write_lines(path_or_handle, (corpus_line(r) for r in records))


def write_preferences(path_or_handle, records):
    _write_lines(path_or_handle, (preference_line(r) for r in records))


def _write_lines(path_or_handle, lines):
    if hasattr(path_or_handle, "write"):
        for line in lines:
            path_or_handle.write(line + "\n")
        return
    with open(path_or_handle, "w", encoding="utf-8") as handle:
        for line in lines:
            handle.write(line + "\n")
