import itertools

import pytest
from hypothesis import given, strategies as st

from pcalab import graph as G
from pcalab.machine import finite_set_decode, finite_set_encode, pair, unpair

small_sets = st.frozensets(st.integers(0, 20), max_size=6)
axioms = st.builds(lambda n, d: pair(n, finite_set_encode(d)),
                   st.integers(0, 12), st.frozensets(st.integers(0, 8), max_size=3))


def brute(xs, ys):
    """X·Y = {n : <n, u> in X for some u with D_u ⊆ Y}, by enumerating every subset of Y."""
    subsets = [frozenset(c) for r in range(len(ys) + 1) for c in itertools.combinations(sorted(ys), r)]
    out = set()
    for z in xs:
        n, u = unpair(z)
        if finite_set_decode(u) in subsets:
            out.add(n)
    return frozenset(out)


@given(st.frozensets(axioms, max_size=10), st.frozensets(st.integers(0, 8), max_size=6))
def test_application_rule_matches_brute_force(xs, ys):
    assert G.eq2(xs, ys) == brute(xs, ys)


@given(st.frozensets(axioms, max_size=8), small_sets, small_sets)
def test_application_is_monotone(xs, ys, extra):
    assert G.eq2(xs, ys) <= G.eq2(xs, ys | extra)


@given(small_sets, small_sets)
def test_k_law(x, y):
    got = G.g_apply_all(G.graph_k(), G.FiniteSet(x), G.FiniteSet(y))
    assert got.below(32, 32) == x


S_TRIPLES = [(frozenset(), frozenset(), frozenset()),
             (frozenset([pair(1, 0)]), frozenset([2]), frozenset([0])),
             (frozenset([pair(3, 1)]), frozenset([pair(0, 0)]), frozenset([pair(5, 0)]))]


@pytest.mark.parametrize("x,y,z", S_TRIPLES)
def test_s_law_on_small_triples(x, y, z):
    X, Y, Z = (G.FiniteSet(v) for v in (x, y, z))
    left = G.g_apply_all(G.graph_s(), X, Y, Z).below(16, 5)
    right = G.g_apply(G.g_apply(X, Z), G.g_apply(Y, Z)).below(16, 5)
    assert left == right


def test_empty_premise_axiom():
    assert G.g_apply(G.FiniteSet([pair(5, 0)]), G.EMPTY).approx(1) == frozenset([5])


@pytest.mark.parametrize("x,y", [(set(), set()), ({0}, set()), (set(), {0}), ({0, 3}, {0})])
def test_gadget_r(x, y):
    got = G.g_apply_all(G.gadget_R(), G.FiniteSet(x), G.FiniteSet(y)).approx(1)
    assert got == (frozenset([0]) if 0 not in x | y else frozenset([0, 1]))


def test_gadget_c():
    C = G.gadget_C([0], [0, 1], 4)
    same = G.g_apply_all(C, G.joined({1, 2}, 4), G.joined({1, 2}, 4)).approx(1)
    differ = G.g_apply_all(C, G.joined({1, 2}, 4), G.joined({1}, 4)).approx(1)
    assert same == frozenset([0]) and differ == frozenset([0, 1])
    with pytest.raises(ValueError):
        G.gadget_C([0, 1], [0], 4)


@pytest.mark.parametrize("n", range(5))
def test_numerals_and_independence(n):
    stage = G.WITNESS_STAGE
    vs = [G.numeral_value(m).approx(stage) for m in range(5)]
    f = G.independence_witness(n)
    assert f <= vs[n]
    assert all(not f <= vs[m] for m in range(5) if m != n)


@pytest.mark.parametrize("n", [0, 2, 6])
def test_generator_j_reaches_the_catalog(n):
    got = G.g_apply(G.generator_J(), G.numeral_value(n)).below(64, G.WITNESS_STAGE)
    assert got == G.W_CATALOG[n][1]


def test_catalog_bounds():
    with pytest.raises(ValueError):
        G.catalog_set(99)


def test_graph_pca_equality_is_at_the_window():
    from pcalab.machine import Budget
    pca = G.GraphPca()
    assert pca.equal(G.FiniteSet([1, 40]), G.FiniteSet([1]), Budget(window=32))
    assert not pca.equal(G.FiniteSet([1, 40]), G.FiniteSet([1]), Budget(window=64))
