"""Dataset-level score standardization and combination.

z-scoring uses the population standard deviation so the unit-variance
property is exact at any n; a constant vector maps to zeros rather than
erroring, so a degenerate metric contributes no signal instead of crashing
the pipeline.
"""

import math
from dataclasses import dataclass, field

from .errors import AlignmentError, InvalidInputError, UndefinedStatisticError


@dataclass(frozen=True)
class ScoreVector:
    """Scores aligned to record ids; id_index maps id to position in values."""

    values: tuple
    id_index: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        if len(self.id_index) != len(self.values):
            raise InvalidInputError(
                f"{len(self.id_index)} ids for {len(self.values)} values; ids must be unique"
            )

    @classmethod
    def from_pairs(cls, pairs):
        """Build from an iterable of (id, value)."""
        pairs = list(pairs)
        ids = [record_id for record_id, _ in pairs]
        if len(set(ids)) != len(ids):
            raise InvalidInputError("duplicate record ids")
        return cls(
            values=tuple(value for _, value in pairs),
            id_index={record_id: i for i, record_id in enumerate(ids)},
        )

    def value_of(self, record_id):
        return self.values[self.id_index[record_id]]

    def ids(self):
        """Record ids in positional order."""
        return sorted(self.id_index, key=self.id_index.get)


def _mean_std(values):
    n = len(values)
    mean = math.fsum(values) / n
    variance = math.fsum((v - mean) ** 2 for v in values) / n
    return mean, math.sqrt(variance)


def zscore(vector):
    """Standardize to mean 0, population std 1; all zeros when std is 0."""
    if len(vector.values) < 2:
        raise InvalidInputError(f"need at least 2 values, got {len(vector.values)}")
    mean, std = _mean_std(vector.values)
    if std == 0.0:
        standardized = (0.0,) * len(vector.values)
    else:
        standardized = tuple((v - mean) / std for v in vector.values)
    return ScoreVector(values=standardized, id_index=dict(vector.id_index))


def combine_mean(a, b):
    """Element-wise mean of zscore(a) and zscore(b), aligned by record id."""
    ids_a, ids_b = set(a.id_index), set(b.id_index)
    if ids_a != ids_b:
        only_a = ids_a - ids_b
        only_b = ids_b - ids_a
        raise AlignmentError(
            f"id mismatch: {sorted(only_a)} only in first, {sorted(only_b)} only in second",
            missing_left=only_b,
            missing_right=only_a,
        )
    za = zscore(a)
    zb = zscore(b)
    combined = tuple(
        (za.value_of(record_id) + zb.value_of(record_id)) / 2.0
        for record_id in za.ids()
    )
    return ScoreVector(values=combined, id_index=dict(za.id_index))


def pearson(x, y):
    """Pearson product-moment correlation of two equal-length vectors."""
    if len(x) != len(y):
        raise InvalidInputError(f"length mismatch: {len(x)} vs {len(y)}")
    if len(x) < 2:
        raise InvalidInputError(f"need at least 2 points, got {len(x)}")
    mean_x = math.fsum(x) / len(x)
    mean_y = math.fsum(y) / len(y)
    var_x = math.fsum((a - mean_x) ** 2 for a in x)
    var_y = math.fsum((b - mean_y) ** 2 for b in y)
    if var_x == 0.0 or var_y == 0.0:
        raise UndefinedStatisticError("correlation is undefined for a constant input")
    cov = math.fsum((a - mean_x) * (b - mean_y) for a, b in zip(x, y))
    return cov / math.sqrt(var_x * var_y)
