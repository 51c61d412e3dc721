import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from voaforge.linalg import (IndexMismatchError, Q, SpanHandle, binom, fmt, in_span, kernel_basis,
                             random_rational, rref)


def test_scalars_are_exact_and_normalized():
    assert Q("6/-4") == Q(-3, 2)
    assert Q(Fraction(2, 6)) == Q(1, 3)
    assert fmt(Q(-6, 4)) == "-3/2"
    assert fmt(Q(5)) == "5"
    with pytest.raises(TypeError):
        Q(0.5)
    with pytest.raises(ValueError):
        Q("pi")


def test_generalized_binomials():
    assert binom(5, 2) == 10
    assert binom(-2, 3) == -4
    assert binom(3, 5) == 0
    assert binom(4, -1) == 0


def test_rref_examples():
    assert rref([]).rank == 0
    h = rref([{1: 1, 2: 1}, {2: 1}])
    assert h.rank == 2 and h.pivots == [1, 2]
    m = in_span({1: 1}, h)
    assert m.member and m.coefficients == {0: 1, 1: -1}
    miss = in_span({3: 1}, rref([{1: 1}, {2: 1}]))
    assert not miss.member and miss.witness == 3
    assert in_span({}, h).member


def test_three_vectors_in_the_plane_have_rank_two():
    rng = random.Random(5)
    rows = [{0: random_rational(rng), 1: random_rational(rng)} for _ in range(3)]
    det = rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    assert det != 0
    assert rref(rows).rank == 2


def test_unknown_index_is_rejected():
    h = SpanHandle(universe=[1, 2])
    h.add({1: 1})
    with pytest.raises(IndexMismatchError):
        in_span({7: 1}, h)


def test_kernel_examples():
    assert kernel_basis([{0: 1}, {1: 1}]) == []
    assert len(kernel_basis([], columns=[0, 1, 2])) == 3
    (k,) = kernel_basis([{0: 1, 1: 1}])
    assert k == {1: 1, 0: -1}


sparse_rows = st.lists(
    st.dictionaries(st.integers(0, 5), st.fractions(max_denominator=7).filter(bool), max_size=4),
    max_size=6)


@settings(max_examples=60, deadline=None)
@given(sparse_rows)
def test_generators_are_members_with_verified_coefficients(rows):
    rows = [{k: Q(v) for k, v in r.items()} for r in rows]
    h = rref(rows)
    for r in rows:
        m = in_span(r, h)
        assert m.member
        total = {}
        for g, c in m.coefficients.items():
            for k, x in rows[g].items():
                total[k] = total.get(k, 0) + c * x
        assert {k: x for k, x in total.items() if x} == {k: x for k, x in r.items() if x}


@settings(max_examples=60, deadline=None)
@given(sparse_rows)
def test_rank_nullity(rows):
    rows = [{k: Q(v) for k, v in r.items()} for r in rows]
    cols = sorted({k for r in rows for k in r})
    ker = kernel_basis(rows, columns=cols)
    assert rref(rows).rank + len(ker) == len(cols)
    for x in ker:
        for r in rows:
            assert sum(r[k] * x.get(k, 0) for k in r) == 0
