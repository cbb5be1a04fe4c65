"""The four program models: K1, K2, the binary K201 and the partial model B."""

import random

import pytest
from hypothesis import given, strategies as st

from pcalab import streams as S
from pcalab.bmodel import (BElement, BPca, church_h, constant, from_table, gadget_a, nowhere,
                           segment_of)
from pcalab.k1 import K1Element, K1Pca, k1_generator, numeral_term
from pcalab.k2 import (K201_CATALOG, K2_CATALOG, Certified, K201Element, K201Pca, K2Pca,
                       UndefinedAtWindow, UndefinedZeroStream, certified, graph_encode,
                       psi_decode)
from pcalab.machine import Budget, OracleUndefined, OutOfFuel, evaluate
from pcalab.terms import eval_term

small = st.lists(st.integers(min_value=0, max_value=9), min_size=1, max_size=8)


def table(values, default=0):
    return certified(S.table_program(values, default), "test")


def bits(values, default=0):
    return K201Element(S.table_program(values, default), Certified("test"))


# --- K1

def test_k1_k_and_s():
    pca = K1Pca()
    ka = pca.apply(pca.k, K1Element(7))
    assert pca.apply(ka, K1Element(3)) == K1Element(7)


def test_k1_generator_cases():
    pca, e = K1Pca(), k1_generator()
    assert pca.apply(e, e) == K1Element(0)
    succ = pca.apply(e, K1Element(0))
    assert pca.apply(succ, K1Element(41)) == K1Element(42)
    diverges = pca.apply(e, K1Element(5), Budget(steps=5000))
    assert not diverges.defined


@pytest.mark.parametrize("n", [0, 1, 5, 12])
def test_k1_numerals(n):
    got = eval_term(numeral_term(n), K1Pca(), Budget(steps=10**6), {"e": k1_generator()})
    assert got == K1Element(n)


# --- K2

@given(small)
def test_k2_successor_head(values):
    pca = K2Pca()
    succ = certified(S.head_then_zeros(K2_CATALOG["succ"]), "succ")
    got = pca.apply(succ, table(values))
    assert got.values(len(values)) == [v + 1 for v in values]


@given(small, small)
def test_k2_k_law(a, b):
    pca = K2Pca()
    ka = pca.apply(pca.k, table(a))
    assert pca.equal(pca.apply(ka, table(b)), table(a))


def test_k2_undefined_at_window():
    pca = K2Pca()
    bad = certified(S.undefined_at([5, 1], [1]), "hole")
    r = pca.apply(certified(S.head_then_zeros(K2_CATALOG["succ"]), "succ"), bad,
                  Budget(steps=2000))
    assert isinstance(r, UndefinedAtWindow) and r.x == 1


# --- K201

def test_k201_zero_stream_is_undefined():
    pca = K201Pca()
    r = pca.apply(bits([0]), pca.k)
    assert isinstance(r, UndefinedZeroStream)


@given(st.lists(st.integers(min_value=0, max_value=1), min_size=1, max_size=12))
def test_k201_not_head(values):
    pca = K201Pca()
    e = K201_CATALOG["not"]
    neg = bits([0] * (e - 1) + [1])
    got = pca.apply(neg, bits(values))
    assert got.values(len(values)) == [1 - v for v in values]


def test_k201_k_law():
    pca = K201Pca()
    a, b = bits([0, 0, 0, 0, 0, 0, 1, 1, 0, 1]), bits([1, 1])
    assert pca.equal(pca.apply(pca.apply(pca.k, a), b), a)


@given(st.dictionaries(st.integers(0, 15), st.integers(0, 15), max_size=8))
def test_graph_coding_roundtrip(phi):
    assert psi_decode(graph_encode(phi), 16) == phi


def test_graph_coding_of_a_program():
    double = S.table_program([0, 2, 4, 6], 0)
    code = graph_encode(double)
    assert psi_decode(code.stream, 4, Budget(stage=8)) == {0: 0, 1: 2, 2: 4, 3: 6}


# --- B

def test_b_tables_report_holes():
    f = from_table({0: 3, 2: 4})
    outs = f.outcomes(4)
    assert outs[0].value == 3 and outs[2].value == 4
    assert isinstance(outs[1], OracleUndefined) and isinstance(outs[3], OracleUndefined)


def test_b_application_never_fails():
    pca = BPca()
    r = pca.apply(nowhere(), nowhere())
    assert isinstance(r, BElement)
    assert all(not o.defined for o in r.outcomes(3, Budget(steps=500)))


def test_b_k_law_keeps_partiality():
    pca = BPca()
    a = from_table({0: 1, 1: 7, 3: 2})
    r = pca.apply(pca.apply(pca.k, a), nowhere())
    assert pca.equal(r, a, Budget(window=6))


@pytest.mark.parametrize("n", [0, 1, 3])
def test_church_numerals_become_constants(n):
    assert church_h(n).values(5) == [n] * 5


def test_gadget_a_separates():
    pca = BPca()
    a = gadget_a(nowhere(), constant(1))
    f, g = from_table({0: 1, 1: 2}, default=0), from_table({0: 1, 1: 3}, default=0)
    differ = pca.apply(pca.apply(a, f), g)
    assert differ.values(3, Budget(steps=5000)) == [1, 1, 1]
    same = pca.apply(pca.apply(a, f), f)
    assert all(isinstance(o, OutOfFuel) for o in same.outcomes(2, Budget(steps=2000)))


def test_segments():
    seg = segment_of(from_table({0: 2, 2: 5}), 3)
    assert seg.as_dict() == {0: 2, 2: 5} and seg.undefined == frozenset({1})
    assert seg.extends_to(from_table({0: 2, 2: 5, 7: 1}), Budget()) is True
    assert seg.extends_to(from_table({0: 2, 1: 0, 2: 5}), Budget()) is False


def test_table_program_default():
    prog = S.table_program([4, 5], 9)
    assert [evaluate(prog, x).value for x in range(4)] == [4, 5, 9, 9]


def test_sampled_tables_are_seeded():
    from pcalab.k2 import random_k2
    a, b = random_k2(random.Random(3)), random_k2(random.Random(3))
    assert a.program == b.program
