import pytest
from hypothesis import given
from hypothesis import strategies as st

from skmors.metrics import ErrorCounts, classify_errors, f1, precision, recall


def test_classify_examples():
    truth = set(range(20))
    c = classify_errors(truth, truth)
    assert (c.fp, c.fn) == (0, 0)
    c = classify_errors([], truth)
    assert (c.tp, c.fn, c.fp) == (0, 20, 0)
    ident = list(range(2, 20)) + [20, 21]
    c = classify_errors(ident, truth)
    assert (c.tp, c.fp, c.fn) == (18, 2, 2)
    assert c.mci == 2 and c.mce == 2


def test_f1_examples():
    assert f1(ErrorCounts(20, 0, 0)) == 1.0
    assert f1(ErrorCounts(0, 3, 20)) == 0.0
    c = ErrorCounts(18, 2, 2)
    assert precision(c) == pytest.approx(0.9)
    assert recall(c) == pytest.approx(0.9)
    assert f1(c) == 0.9


@given(st.integers(0, 30), st.integers(0, 30), st.integers(0, 30))
def test_f1_properties(tp, fp, fn):
    c = ErrorCounts(tp, fp, fn)
    v = f1(c)
    assert 0.0 <= v <= 1.0
    assert (v == 1.0) == (tp > 0 and fp == 0 and fn == 0)
    if tp:
        p, r = precision(c), recall(c)
        assert v == pytest.approx(2 * p * r / (p + r))
        assert v <= (p + r) / 2 + 1e-12


@given(st.sets(st.integers(0, 40)), st.sets(st.integers(0, 40), min_size=1))
def test_counts_consistent(ident, truth):
    c = classify_errors(ident, truth)
    assert c.tp + c.fn == len(truth)
    assert c.tp + c.fp == len(ident)
