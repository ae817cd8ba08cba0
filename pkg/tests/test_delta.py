from fractions import Fraction

import re

import pytest
from hypothesis import given
from hypothesis import strategies as st

from lagforge.delta import (Partition, PartitionError, a_coefficient, all_partitions, classify_special_d,
                            curvature_weight, delta_bound_rhs, parse_rational)


def test_a_examples():
    assert a_coefficient(Partition(3, (2,))) == Fraction(3, 2)
    assert a_coefficient(Partition(4, (2, 2))) == Fraction(8, 3)


@pytest.mark.parametrize("n,parts,msg", [
    (3, (3,), "n_k ≤ n−1 violated"),
    (5, (2, 2, 2), "n_1 + ... + n_k ≤ n violated"),
    (5, (1,), "n_1 >= 2"),
    (5, (3, 2), "nondecreasing"),
    (2, (2,), "n >= 3"),
    (5, (), "k >= 1"),
])
def test_invalid_partitions(n, parts, msg):
    with pytest.raises(PartitionError, match=re.escape(msg)):
        Partition(n, parts)


def test_bound_examples():
    p = Partition(3, (2,))
    assert delta_bound_rhs(p, 0, 1) == 2
    assert delta_bound_rhs(p, 1, 0) == Fraction(3, 2)
    for q in all_partitions(6):
        assert delta_bound_rhs(q, 0, 0) == 0
    with pytest.raises(ValueError):
        delta_bound_rhs(p, -1, 0)
    assert isinstance(delta_bound_rhs(p, 0.5, 1), float)


def test_bound_is_affine():
    for p in all_partitions(7):
        a, w = a_coefficient(p), curvature_weight(p)
        pts = [(0, 0), (1, 0), (0, 1), (Fraction(7, 3), -1)]
        for h2, c in pts:
            assert delta_bound_rhs(p, h2, c) == a * h2 + w * c


def test_branch_dichotomy_and_positivity():
    count = 0
    for n in range(3, 13):
        for p in all_partitions(n):
            count += 1
            assert a_coefficient(p) > 0
            assert (p.total < n) or (p.total == n)
    assert count > 100


@pytest.mark.parametrize("n,d,m,two", [
    (5, "1/4", 2, True),
    (4, "1/3", None, False),
    (7, "1/5", 3, False),
    (6, "1/2", None, False),
    (9, "1/8", None, True),
])
def test_classify_examples(n, d, m, two):
    tag = classify_special_d(n, d)
    assert tag.case_one_m == m and tag.case_two == two


def test_classify_case_one_exhaustive():
    for n in range(2, 51):
        for m in range(2, n):
            if (n - 1) % m == 0:
                assert classify_special_d(n, Fraction(1, 2 + m)).case_one_m == m


@given(st.integers(2, 40), st.fractions(min_value=-3, max_value=3, max_denominator=50))
def test_classify_invariants(n, d):
    tag = classify_special_d(n, d)
    if tag.case_one_m is not None:
        m = tag.case_one_m
        assert m >= 2 and (n - 1) % m == 0 and d == Fraction(1, 2 + m)
    if tag.case_two:
        assert n >= 5 and d == Fraction(1, n - 1)
    assert tag.empty == (tag.case_one_m is None and not tag.case_two)


def test_parse_rational():
    assert parse_rational("1/4") == Fraction(1, 4)
    assert parse_rational("0.25") == Fraction(1, 4)
    assert parse_rational(3) == 3
    with pytest.raises(TypeError):
        parse_rational(0.25)
    with pytest.raises(ValueError):
        parse_rational("one")
    assert Partition.parse(5, "2, 3").parts == (2, 3)
