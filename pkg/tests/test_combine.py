import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import oracle_pearson, oracle_zscore
from textreward.combine import ScoreVector, combine_mean, pearson, zscore
from textreward.errors import AlignmentError, InvalidInputError, UndefinedStatisticError

finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)
vectors = st.lists(finite, min_size=2, max_size=30)
# the 1e-9 mean/std invariants assume sanely conditioned scores; a spread of
# 1e-13 against a magnitude of 1e6 is outside any float implementation's reach
conditioned = st.floats(min_value=-1e3, max_value=1e3, allow_nan=False)
conditioned_vectors = st.lists(conditioned, min_size=2, max_size=30).filter(
    lambda vs: max(vs) - min(vs) >= 1e-2
)


def make_vector(values):
    return ScoreVector.from_pairs((f"r{i}", v) for i, v in enumerate(values))


class TestScoreVector:
    def test_from_pairs_keeps_order(self):
        vector = ScoreVector.from_pairs([("b", 1.0), ("a", 2.0)])
        assert vector.values == (1.0, 2.0)
        assert vector.value_of("b") == 1.0
        assert list(vector.ids()) == ["b", "a"]

    def test_duplicate_ids_rejected(self):
        with pytest.raises(InvalidInputError):
            ScoreVector.from_pairs([("a", 1.0), ("a", 2.0)])

    def test_length_mismatch_rejected(self):
        with pytest.raises(InvalidInputError):
            ScoreVector(values=(1.0,), id_index={"a": 0, "b": 1})


class TestZscore:
    def test_three_point_example(self):
        got = zscore(make_vector([1, 2, 3]))
        assert got.values == pytest.approx(
            (-1.224744871391589, 0.0, 1.224744871391589), abs=1e-12
        )

    def test_two_point_example(self):
        assert zscore(make_vector([0, 2])).values == pytest.approx((-1.0, 1.0))

    def test_constant_maps_to_zeros(self):
        assert zscore(make_vector([5, 5, 5])).values == (0.0, 0.0, 0.0)

    def test_fewer_than_two_rejected(self):
        with pytest.raises(InvalidInputError):
            zscore(make_vector([1.0]))

    @given(vectors)
    @settings(max_examples=200, deadline=None)
    def test_matches_oracle(self, values):
        got = zscore(make_vector(values))
        assert list(got.values) == pytest.approx(oracle_zscore(values), abs=1e-9)

    @given(conditioned_vectors)
    @settings(max_examples=200, deadline=None)
    def test_mean_zero_unit_std(self, values):
        got = zscore(make_vector(values)).values
        n = len(got)
        mean = math.fsum(got) / n
        assert abs(mean) < 1e-9
        std = math.sqrt(math.fsum((v - mean) ** 2 for v in got) / n)
        assert std == pytest.approx(1.0, abs=1e-9)

    @given(conditioned_vectors, st.floats(min_value=0.01, max_value=100),
           st.floats(min_value=-1e3, max_value=1e3))
    @settings(max_examples=150, deadline=None)
    def test_affine_invariance(self, values, scale, shift):
        base = zscore(make_vector(values)).values
        moved = zscore(make_vector([scale * v + shift for v in values])).values
        assert list(moved) == pytest.approx(list(base), abs=1e-6)
        flipped = zscore(make_vector([-scale * v + shift for v in values])).values
        assert list(flipped) == pytest.approx([-v for v in base], abs=1e-6)


class TestCombineMean:
    def test_opposite_vectors_cancel(self):
        a = make_vector([0, 2])
        b = make_vector([2, 0])
        assert combine_mean(a, b).values == pytest.approx((0.0, 0.0))

    def test_identical_vectors_equal_single_zscore(self):
        a = make_vector([1, 4, 6])
        assert combine_mean(a, a).values == pytest.approx(zscore(a).values)

    def test_constant_side_contributes_zero(self):
        a = make_vector([7, 7])
        b = make_vector([0, 2])
        assert combine_mean(a, b).values == pytest.approx((-0.5, 0.5))

    def test_symmetric(self):
        a = make_vector([1, 5, 2])
        b = make_vector([0, 1, 9])
        assert combine_mean(a, b).values == pytest.approx(combine_mean(b, a).values)

    def test_alignment_error_names_offenders(self):
        a = ScoreVector.from_pairs([("x", 1.0), ("y", 2.0)])
        b = ScoreVector.from_pairs([("x", 1.0), ("z", 2.0)])
        with pytest.raises(AlignmentError) as excinfo:
            combine_mean(a, b)
        assert "y" in str(excinfo.value)
        assert "z" in str(excinfo.value)

    def test_result_follows_first_arguments_order(self):
        a = ScoreVector.from_pairs([("n2", 0.0), ("n1", 2.0)])
        b = ScoreVector.from_pairs([("n1", 2.0), ("n2", 0.0)])
        combined = combine_mean(a, b)
        assert list(combined.ids()) == ["n2", "n1"]
        assert combined.value_of("n2") == pytest.approx(-1.0)
        assert combined.value_of("n1") == pytest.approx(1.0)


class TestPearson:
    def test_perfect_positive(self):
        assert pearson([1, 2, 3], [2, 4, 6]) == pytest.approx(1.0)

    def test_perfect_negative(self):
        assert pearson([1, 2, 3], [3, 2, 1]) == pytest.approx(-1.0)

    def test_partial(self):
        assert pearson([1, 2, 3, 4], [1, 3, 2, 4]) == pytest.approx(0.8)

    def test_constant_input_rejected(self):
        with pytest.raises(UndefinedStatisticError):
            pearson([1, 1, 1], [1, 2, 3])
        with pytest.raises(UndefinedStatisticError):
            pearson([1, 2, 3], [4, 4, 4])

    def test_length_mismatch_rejected(self):
        with pytest.raises(InvalidInputError):
            pearson([1, 2], [1, 2, 3])

    def test_too_short_rejected(self):
        with pytest.raises(InvalidInputError):
            pearson([1], [2])

    @given(conditioned_vectors, conditioned_vectors)
    @settings(max_examples=200, deadline=None)
    def test_matches_oracle_and_bounds(self, x, y):
        n = min(len(x), len(y))
        x, y = x[:n], y[:n]
        if len(set(x)) < 2 or len(set(y)) < 2:
            return
        got = pearson(x, y)
        assert -1.0 - 1e-9 <= got <= 1.0 + 1e-9
        assert got == pytest.approx(oracle_pearson(x, y), abs=1e-9)

    @given(conditioned_vectors, st.floats(min_value=0.01, max_value=50),
           st.floats(min_value=-1e3, max_value=1e3))
    @settings(max_examples=100, deadline=None)
    def test_positive_affine_invariance(self, x, scale, shift):
        y = [(i * 0.7 + (-1) ** i) for i in range(len(x))]
        if len(set(y)) < 2:
            return
        base = pearson(x, y)
        moved = pearson([scale * v + shift for v in x], y)
        assert moved == pytest.approx(base, abs=1e-6)
