import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from risesim import stats

samples = st.lists(st.floats(-200, 300), min_size=1, max_size=60)


def test_cdf_examples():
    c = stats.cdf([7.5])
    assert c.values.tolist() == [7.5] and c.probabilities.tolist() == [1.0]
    c = stats.cdf([4, 1, 3, 2])
    assert c.at(2) == 0.5
    assert stats.percentile(c, 0.5) == 2
    assert stats.percentile(c, 1.0) == 4
    assert stats.percentile(c, 0.0) == 1
    assert stats.median([4, 1, 3, 2]) == 2


def test_unreachable_and_excluded_are_dropped():
    c = stats.cdf([3.0, math.inf, math.nan, 1.0])
    assert c.values.tolist() == [1.0, 3.0]
    assert c.probabilities.tolist() == [0.5, 1.0]


def test_errors():
    with pytest.raises(ValueError):
        stats.cdf([math.inf, math.nan])
    with pytest.raises(ValueError):
        stats.cdf([])
    with pytest.raises(ValueError):
        stats.percentile(stats.cdf([1.0]), 1.5)
    with pytest.raises(ValueError):
        stats.percentile(stats.cdf([1.0]), -0.1)


@given(samples)
def test_curve_invariants(xs):
    c = stats.cdf(xs)
    assert np.all(np.diff(c.values) >= 0)
    assert np.all(np.diff(c.probabilities) > 0)
    assert c.probabilities[-1] == 1.0
    assert len(c) == len(xs)


@given(samples, st.floats(0, 1), st.floats(0, 1))
def test_percentile_monotone_and_bounded(xs, q1, q2):
    c = stats.cdf(xs)
    lo, hi = sorted((q1, q2))
    assert stats.percentile(c, lo) <= stats.percentile(c, hi)
    assert min(xs) <= stats.percentile(c, q1) <= max(xs)


@given(samples, st.floats(0, 1))
def test_percentile_is_lower_quantile(xs, q):
    v = stats.percentile(stats.cdf(xs), q)
    n = len(xs)
    assert sum(x <= v for x in xs) / n >= q
    smaller = [x for x in xs if x < v]
    if smaller:
        assert sum(x <= max(smaller) for x in xs) / n < q


@given(samples, st.randoms())
def test_permutation_invariant(xs, rnd):
    ys = list(xs)
    rnd.shuffle(ys)
    a, b = stats.cdf(xs), stats.cdf(ys)
    assert a.values.tolist() == b.values.tolist()
