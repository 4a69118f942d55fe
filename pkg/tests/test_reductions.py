import itertools

import pytest
from hypothesis import given, strategies as st

from amem.reductions import (
    Combiner, ReductionQuery, bin_prefix_value, bin_to_unary, combine, deinterleave, eval_reduction,
    interleave, pair, prefix_width, unary_to_bin, unpair,
)


def test_interleave_examples():
    assert interleave("101", "011") == "011011"
    assert interleave("1", "0") == "01"
    assert deinterleave(interleave("1101", "0010")) == ("1101", "0010")


def test_interleave_pads_left():
    assert interleave("1", "100") == "100001"
    assert deinterleave(interleave("1", "100")) == ("001", "100")


def test_deinterleave_odd():
    with pytest.raises(ValueError):
        deinterleave("011")


def test_interleave_exhaustive_small():
    for k in range(0, 6):
        words = ["".join(b) for b in itertools.product("01", repeat=k)]
        outs = set()
        for a in words:
            for b in words:
                s = interleave(a, b)
                assert deinterleave(s) == (a, b)
                outs.add(s)
        assert len(outs) == len(words) ** 2


@given(st.integers(0, 10**6), st.integers(0, 10**6))
def test_pair_round_trip(a, b):
    assert unpair(pair(a, b)) == (a, b)


@pytest.mark.parametrize("w, out", [("01100101", "111"), ("0000", ""), ("1", "1"), ("0", ""), ("11", "1")])
def test_bin_to_unary(w, out):
    assert bin_to_unary(w) == out


def test_prefix_width():
    assert [prefix_width(n) for n in range(1, 10)] == [1, 1, 2, 2, 3, 3, 3, 3, 4]
    assert bin_prefix_value("101") == 2


@pytest.mark.parametrize("w, out", [("00111", "11"), ("0000", "0"), ("1", "1"), ("", "0")])
def test_unary_to_bin(w, out):
    assert unary_to_bin(w) == out


def test_unary_to_bin_malformed():
    with pytest.raises(ValueError):
        unary_to_bin("0110")
    with pytest.raises(ValueError):
        unary_to_bin("0a1")


def test_eval_reduction_examples():
    assert eval_reduction(ReductionQuery((1, 2, 3), Combiner.OR, (False, True, False)), None)
    assert eval_reduction(ReductionQuery((1, 2), Combiner.AND, (True, True)), None)
    assert not eval_reduction(ReductionQuery((1,), Combiner.IDENTITY, (False,)), None)


def test_eval_reduction_queries_oracle():
    q = ReductionQuery((2, 3, 5), Combiner.OR)
    assert eval_reduction(q, lambda u: u % 2 == 0)
    assert not eval_reduction(ReductionQuery((2, 3), Combiner.AND), lambda u: u % 2 == 0)


def test_empty_combinations():
    assert combine(Combiner.OR, ()) is False
    assert combine(Combiner.AND, ()) is True


def test_identity_needs_one_query():
    with pytest.raises(ValueError):
        ReductionQuery((1, 2), Combiner.IDENTITY)
    with pytest.raises(ValueError):
        ReductionQuery((1,), Combiner.OR, (True, False))
