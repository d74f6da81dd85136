from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from mobius_qec.gf2 import (
    BinaryMatrix,
    in_rowspace,
    inverse,
    kernel_basis,
    kron,
    rank,
    row_reduce,
    span,
)
from oracles import brute_rank, kron_np, matmul_np, span_set

CIRC3 = BinaryMatrix.from_text("110\n011\n101\n")
REP3 = BinaryMatrix.from_text("110\n011\n")


def matrices(max_rows=6, max_cols=8):
    return st.tuples(st.integers(0, max_rows), st.integers(1, max_cols)).flatmap(
        lambda s: arrays(np.uint8, s, elements=st.integers(0, 1))
    ).map(BinaryMatrix.from_array)


def test_rank_examples(cyl15):
    assert rank(CIRC3) == 2
    assert rank(REP3) == 2
    assert cyl15.h_x.shape == (9, 15)
    assert rank(cyl15.h_x) == 8
    assert rank(cyl15.h_x) == 15 - 1 - rank(cyl15.h_z)


def test_row_reduce_examples():
    eye = BinaryMatrix.identity(4)
    reduced, pivots = row_reduce(eye)
    assert reduced == eye and pivots == [0, 1, 2, 3]
    reduced, pivots = row_reduce(BinaryMatrix.zeros(3, 4))
    assert reduced.is_zero() and pivots == []
    reduced, pivots = row_reduce(CIRC3)
    assert reduced.n_rows == 2 and pivots == [0, 1]


def test_kernel_examples(cyl15):
    assert kernel_basis(REP3).to_text() == "111\n"
    assert kernel_basis(BinaryMatrix.identity(5)).n_rows == 0
    ker = kernel_basis(cyl15.h_x)
    assert ker.n_rows == 7
    assert (cyl15.h_x @ ker.T).is_zero()


def test_in_rowspace_examples(cyl15):
    assert in_rowspace(REP3, 0)
    assert in_rowspace(REP3, [1, 0, 1])
    assert not in_rowspace(REP3, [1, 1, 1])
    logical = sum(1 << (q - 1) for q in (8, 11, 14))
    assert not in_rowspace(cyl15.h_z, logical)
    with pytest.raises(ValueError):
        in_rowspace(REP3, [1, 1])


def test_kron_examples():
    a = BinaryMatrix.from_text("101\n011\n")
    assert kron(a, BinaryMatrix.identity(1)) == a
    assert kron(BinaryMatrix.identity(2), BinaryMatrix.identity(3)) == BinaryMatrix.identity(6)
    k = kron(REP3, BinaryMatrix.identity(2))
    assert k.shape == (4, 6)
    assert k.to_text() == "101000\n010100\n001010\n000101\n"


def test_text_round_trip():
    m = BinaryMatrix.from_text("0110\n1001\n")
    assert BinaryMatrix.from_text(m.to_text()) == m
    empty = BinaryMatrix.zeros(0, 5)
    assert BinaryMatrix.from_text(empty.to_text()) == empty
    with pytest.raises(ValueError):
        BinaryMatrix.from_text("012\n")
    with pytest.raises(ValueError):
        BinaryMatrix.from_text("01\n011\n")


def test_inverse():
    m = BinaryMatrix.from_text("110\n010\n011\n")
    assert m @ inverse(m) == BinaryMatrix.identity(3)
    with pytest.raises(ValueError):
        inverse(CIRC3)


@given(matrices())
def test_rank_nullity(m):
    assert rank(m) + kernel_basis(m).n_rows == m.n_cols
    assert rank(m) == rank(row_reduce(m)[0])
    assert rank(m) == brute_rank(list(m.rows))


@given(matrices())
def test_kernel_rows_annihilated_and_independent(m):
    ker = kernel_basis(m)
    for v in ker.rows:
        assert m.apply(v) == 0
    assert rank(ker) == ker.n_rows


@given(matrices(), st.data())
def test_matmul_matches_numpy(a, data):
    b = data.draw(arrays(np.uint8, (a.n_cols, data.draw(st.integers(1, 6))), elements=st.integers(0, 1)))
    got = (a @ BinaryMatrix.from_array(b)).to_array()
    assert np.array_equal(got, matmul_np(a.to_array(), b).reshape(got.shape))


def square(n):
    return arrays(np.uint8, (n, n), elements=st.integers(0, 1)).map(BinaryMatrix.from_array)


@given(square(3), square(3), square(3), square(3))
def test_kron_mixed_product(a, b, c, d):
    assert kron(a, b) @ kron(c, d) == kron(a @ c, b @ d)
    assert np.array_equal(kron(a, b).to_array(), kron_np(a.to_array(), b.to_array()))


@given(matrices(max_rows=12, max_cols=10), st.data())
def test_in_rowspace_matches_span(m, data):
    v = data.draw(st.integers(0, (1 << m.n_cols) - 1))
    assert in_rowspace(m, v) == (v in span_set(list(m.rows)))


@given(st.lists(st.integers(0, (1 << 20) - 1), max_size=8))
def test_span_array_matches_set(rows):
    arr = span(rows)
    assert len(arr) == 1 << len(rows)
    assert set(int(v) for v in arr) == span_set(rows)
