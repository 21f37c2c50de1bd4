import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import coefs, sparse_vectors
from ufhc.sequence_space import (
    FNormLadder,
    LpNorm,
    OpenBall,
    Seminorm,
    SparseVector,
    add_scaled,
    distance,
    f_norm,
    in_ball,
    metric_bounded_by_lp,
    metric_from_json,
    norm,
    p_norm,
)

e = SparseVector.basis
L2 = FNormLadder.uniform(2.0, 3)


class TestSparseVector:
    def test_canonical_form(self):
        v = SparseVector.from_pairs([(5, 1.0), (2, 3.0), (5, -1.0), (9, 0.0)])
        assert v.indices.tolist() == [2]
        assert v.coefs.tolist() == [3.0]

    def test_rejects_unsorted_input_in_constructor(self):
        with pytest.raises(ValueError):
            SparseVector([3, 1], [1.0, 1.0])
        with pytest.raises(ValueError):
            SparseVector([1], [0.0])
        with pytest.raises(ValueError):
            SparseVector.from_pairs([(-1, 1.0)])

    def test_immutable(self):
        v = e(1)
        with pytest.raises(AttributeError):
            v.indices = None
        with pytest.raises(ValueError):
            v.coefs[0] = 2.0

    def test_json_round_trip(self):
        v = SparseVector.from_pairs([(0, 1.5), (7, -2.0)])
        assert v.to_json() == [[0, 1.5], [7, -2.0]]
        assert SparseVector.from_json(json.loads(json.dumps(v.to_json()))) == v

    def test_max_index(self):
        assert SparseVector.zero().max_index == -1
        assert e(4, 2.0).max_index == 4


class TestNorms:
    def test_p_norm_examples(self):
        assert p_norm(SparseVector.zero(), 2) == 0
        assert p_norm(SparseVector.from_pairs([(0, 3.0), (7, 4.0)]), 2) == pytest.approx(5.0, abs=1e-15)
        assert p_norm(SparseVector.from_pairs([(0, 1.0), (1, 1.0), (2, 1.0)]), 1) == 3.0

    def test_p_norm_rejects_small_p(self):
        with pytest.raises(ValueError):
            p_norm(e(0), 0.5)

    def test_p_norm_no_overflow(self):
        v = SparseVector.from_pairs([(0, 1e200), (1, 1e200)])
        assert p_norm(v, 2) == pytest.approx(math.sqrt(2) * 1e200)

    def test_f_norm_examples(self):
        assert f_norm(SparseVector.zero(), L2) == 0
        assert f_norm(SparseVector.from_pairs([(0, 3.0), (7, 4.0)]), L2) == 1.0
        assert f_norm(e(0, 0.5), L2) == 0.5

    def test_f_norm_truncated_ladder(self):
        ladder = FNormLadder((Seminorm(2.0, 0), Seminorm(2.0, None)))
        # p_1 sees only e_0; p_2 (repeated) sees everything
        assert f_norm(e(5, 0.5), ladder) == pytest.approx(0.25)
        assert f_norm(e(0, 0.5), ladder) == pytest.approx(0.5)

    def test_ladder_validation(self):
        with pytest.raises(ValueError):
            FNormLadder(())
        with pytest.raises(ValueError):
            FNormLadder((Seminorm(2.0, 5), Seminorm(2.0, 3), Seminorm(2.0)))
        with pytest.raises(ValueError):
            FNormLadder((Seminorm(2.0, 5),))

    def test_metric_json(self):
        for m in (LpNorm(3.0), FNormLadder((Seminorm(2.0, 4), Seminorm(2.0)))):
            assert metric_from_json(m.to_json()) == m

    def test_metric_domination(self):
        assert metric_bounded_by_lp(LpNorm(2.0), 2.0)
        assert not metric_bounded_by_lp(LpNorm(1.0), 2.0)
        assert metric_bounded_by_lp(FNormLadder.uniform(3.0), 2.0)
        assert not metric_bounded_by_lp(FNormLadder.uniform(1.0), 2.0)


class TestAddScaled:
    def test_examples(self):
        assert add_scaled(e(0), 1, e(1)) == SparseVector.from_pairs([(0, 1.0), (1, 1.0)])
        assert add_scaled(e(0), -1, e(0)).is_zero()
        assert add_scaled(e(3, 2.0), 0.5, e(3, 2.0)) == e(3, 3.0)

    @given(sparse_vectors(), sparse_vectors(), sparse_vectors())
    def test_associative_commutative(self, x, y, z):
        assert_close(x + y, y + x)
        assert_close((x + y) + z, x + (y + z))


def assert_close(u, v, tol=1e-9):
    assert norm(u - v, LpNorm(1.0)) <= tol * (1 + norm(u, LpNorm(1.0)))


class TestBalls:
    def test_in_ball_examples(self):
        y = SparseVector.from_pairs([(0, 1.0), (3, 2.0)])
        assert in_ball(y, OpenBall(y, 1e-9))
        assert not in_ball(y + e(0, 0.25), OpenBall(y, 0.25, LpNorm(1.0)))
        assert not in_ball(e(0), OpenBall(SparseVector.zero(), 0.5))

    @pytest.mark.parametrize("r", [0.0, -1.0, math.inf, math.nan])
    def test_bad_radius(self, r):
        with pytest.raises(ValueError):
            OpenBall(SparseVector.zero(), r)


@given(sparse_vectors(), sparse_vectors(), st.sampled_from([1.0, 1.5, 2.0, 3.0]))
def test_triangle_inequality_lp(x, y, p):
    assert p_norm(x + y, p) <= p_norm(x, p) + p_norm(y, p) + 1e-12 * (1 + p_norm(x, p) + p_norm(y, p))


@given(sparse_vectors())
def test_zero_only_for_zero_vector(x):
    assert (p_norm(x, 2) == 0) == x.is_zero()


@given(sparse_vectors(), st.floats(-1, 1))
def test_f_norm_scalar_monotone(x, c):
    ladder = FNormLadder((Seminorm(2.0, 10), Seminorm(1.0, 50), Seminorm(2.0)))
    assert f_norm(x * c, ladder) <= f_norm(x, ladder) + 1e-15


@given(sparse_vectors(min_support=1))
def test_f_norm_vanishes_along_scalars(x):
    vals = [f_norm(x * 2.0**-j, L2) for j in range(31)]
    assert all(b <= a for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 1e-6 * max(1.0, p_norm(x, 2))


@given(sparse_vectors())
def test_uniform_l2_ladder_is_capped_norm(x):
    assert f_norm(x, L2) == pytest.approx(min(1.0, p_norm(x, 2)), rel=1e-14, abs=1e-300)


@given(sparse_vectors(), sparse_vectors())
def test_distance_symmetric(x, y):
    assert distance(x, y, L2) == pytest.approx(distance(y, x, L2))
