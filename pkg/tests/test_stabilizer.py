from __future__ import annotations

import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mobius_qec.gf2 import rank
from mobius_qec.stabilizer import (
    PauliOperator,
    classify_residual,
    logical_basis,
    min_distance,
    symplectic_commutes,
    syndrome,
)
from oracles import span_set

CODES = [("surface", 3, 3), ("cylindrical", 3, 3), ("moebius", 3, 3), ("cylindrical", 5, 3), ("moebius", 5, 3)]


def op(label, n=15):
    return PauliOperator.from_label(label, n)


def test_label_parsing():
    p = op("X1 Y7 Z10")
    assert p.weight == 3
    assert p.label() == "X1 Y7 Z10"
    assert op("Y7Y10").label() == "Y7 Y10"
    assert PauliOperator(4).label() == "I"
    for bad in ("X0", "X16", "X1 X1", "Q3"):
        with pytest.raises(ValueError):
            op(bad)


def test_commutation_examples():
    assert not symplectic_commutes(op("X1", 2), op("Z1", 2))
    assert symplectic_commutes(op("X1", 2), op("Z2", 2))
    assert symplectic_commutes(op("Y1", 2), op("Y1", 2))
    with pytest.raises(ValueError):
        symplectic_commutes(op("X1", 2), op("X1", 3))


def test_syndrome_examples(cyl15):
    assert not syndrome(cyl15, PauliOperator(15)).any()
    s = syndrome(cyl15, op("Z3 Z7 Z11 Z13"))
    assert list(np.flatnonzero(s)) == [0, 1]  # the first two site checks
    for g in cyl15.generators():
        assert not syndrome(cyl15, g).any()


def test_logical_basis_examples(cyl15, mob15):
    xs, zs = logical_basis(cyl15)
    assert len(xs) == len(zs) == 1
    assert not syndrome(cyl15, xs[0]).any() and not syndrome(cyl15, zs[0]).any()
    assert classify_residual(cyl15, zs[0]) == "logical_z"
    target = op("Z8 Z11 Z14")
    assert classify_residual(mob15, target) == "logical_z"
    # same coset as the basis logical: differs by a stabilizer
    assert classify_residual(mob15, target * mob15.logical_z_basis[0]) == "stabilizer"


def test_classify_examples(cyl15):
    assert classify_residual(cyl15, PauliOperator(15)) == "stabilizer"
    assert classify_residual(cyl15, op("X1 X7 X10")) == "stabilizer"
    assert classify_residual(cyl15, op("Z7 Z10 Z13")) == "logical_z"
    assert classify_residual(cyl15, op("Z1")) == "detectable"
    x = cyl15.logical_x_basis[0]
    z = cyl15.logical_z_basis[0]
    assert classify_residual(cyl15, x) == "logical_x"
    assert classify_residual(cyl15, x * z) == "logical_y"


def test_min_distance_examples(cyl15, surf13, code):
    assert min_distance(cyl15, "x") == min_distance(cyl15, "z") == 3
    c = code("cylindrical", 5, 3)
    assert (c.d_x, c.d_z) == (3, 5)
    assert min_distance(surf13, "x") == 3
    assert min_distance(cyl15, "x", w_max=2) is None


@pytest.mark.parametrize("family,lc,lf", CODES)
def test_code_invariants(code, family, lc, lf):
    c = code(family, lc, lf)
    assert c.k == c.n - rank(c.h_x) - rank(c.h_z)
    pairing = [[int(not symplectic_commutes(x, z)) for z in c.logical_z_basis] for x in c.logical_x_basis]
    assert pairing == np.eye(c.k, dtype=int).tolist()
    for lg in c.logical_x_basis + c.logical_z_basis:
        assert not syndrome(c, lg).any()
        assert classify_residual(c, lg) != "stabilizer"


def test_min_distance_matches_enumeration(surf13):
    # brute force over the full X-logical coset space of the small surface code
    kernel = span_set(list(__import__("mobius_qec.gf2", fromlist=["kernel_basis"]).kernel_basis(surf13.h_z).rows))
    logicals = [v for v in kernel if v not in surf13.x_stabilizers]
    assert min(bin(v).count("1") for v in logicals) == surf13.d_x


@pytest.mark.parametrize("family,lc,lf", CODES)
def test_random_stabilizer_invariance(code, family, lc, lf):
    c = code(family, lc, lf)
    gens = c.generators()
    rng = random.Random(lc * 10 + lf)
    for _ in range(200):
        e = PauliOperator(c.n, rng.getrandbits(c.n), rng.getrandbits(c.n))
        s = PauliOperator(c.n)
        for g in gens:
            if rng.random() < 0.5:
                s = s * g
        assert np.array_equal(syndrome(c, e * s), syndrome(c, e))
        assert classify_residual(c, e * s) == classify_residual(c, e)


@given(st.integers(0, (1 << 15) - 1), st.integers(0, (1 << 15) - 1),
       st.integers(0, (1 << 15) - 1), st.integers(0, (1 << 15) - 1))
def test_commutation_is_symmetric_and_bilinear(a, b, c, d):
    p, q, r = PauliOperator(15, a, b), PauliOperator(15, c, d), PauliOperator(15, b, c)
    assert symplectic_commutes(p, q) == symplectic_commutes(q, p)
    assert symplectic_commutes(p * r, q) == (symplectic_commutes(p, q) == symplectic_commutes(r, q))


@given(st.integers(0, (1 << 15) - 1), st.integers(0, (1 << 15) - 1))
def test_syndrome_matches_commutation(x, z):
    from conftest import cached_code

    c = cached_code("cylindrical", 3, 3)
    e = PauliOperator(15, x, z)
    expected = [int(not symplectic_commutes(g, e)) for g in c.generators()]
    assert syndrome(c, e).tolist() == expected
