import pytest
from hypothesis import given, strategies as st

from pcalab import machine as M
from pcalab.machine import (Budget, Halted, OracleUndefined, OutOfFuel, assemble, evaluate,
                            pair, phi, unpair)

nat = st.integers(min_value=0, max_value=10**30)


@given(nat, nat)
def test_pair_roundtrip(x, y):
    assert unpair(pair(x, y)) == (x, y)


@given(st.integers(min_value=0, max_value=10**6))
def test_unpair_then_pair(z):
    assert pair(*unpair(z)) == z


def test_pair_large_arguments_use_exact_arithmetic():
    x, y = 3 ** 400, 5 ** 300
    z = pair(x, y)
    M._UNPAIRS.clear()
    M._PAIRS.clear()
    assert unpair(z) == (x, y)


def test_pair_is_cantor():
    # first few values along the diagonals
    assert [pair(x, y) for x, y in [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]] == list(range(6))


@given(st.frozensets(st.integers(min_value=0, max_value=200)))
def test_finite_sets_roundtrip(xs):
    assert M.finite_set_decode(M.finite_set_encode(xs)) == xs


@given(st.lists(nat, min_size=1, max_size=5))
def test_tuples_roundtrip(args):
    assert M.tuple_decode(M.tuple_encode(args), len(args)) == tuple(args)


def test_program_index_roundtrip():
    prog = assemble([("inc", 0), ("inc", 0), ("halt", 0)])
    assert M.Program.decode(prog.index) == prog
    assert evaluate(prog.index, 5).value == 7


@given(st.integers(min_value=0, max_value=3000))
def test_every_index_names_a_program(n):
    # the numbering is onto: small indices decode to something that runs
    outcome = evaluate(phi(n), 1, budget=500)
    assert isinstance(outcome, (Halted, OutOfFuel, OracleUndefined))


def test_fuel_is_exact():
    loop = assemble([("label", "top"), ("jump", "top")])
    assert evaluate(loop, 0, budget=1000) == OutOfFuel(1000)
    add3 = assemble([("inc", 0), ("inc", 0), ("inc", 0), ("halt", 0)])
    used = M.steps_used(add3, 0)
    assert used is not None
    assert evaluate(add3, 0, budget=used).defined
    assert not evaluate(add3, 0, budget=used - 1).defined


def test_oracle_queries():
    ask = assemble([("query", 0, 0), ("halt", 0)])
    assert evaluate(ask, 4, M.TotalFn(lambda x: x * x)).value == 16
    assert isinstance(evaluate(ask, 4, M.NULL), OracleUndefined)


@given(st.lists(st.integers(min_value=0, max_value=50), min_size=1, max_size=3),
       st.integers(min_value=0, max_value=50))
def test_smn_freezes_arguments(frozen, x):
    echo = assemble([("halt", 0)])
    assert evaluate(M.smn(echo, frozen), x).value == M.pack(frozen, x)


def test_recursion_theorem():
    # t(z) = the program that ignores its input and returns z
    t = assemble([("const", 1, M.code_of(assemble([("unpair", 1, 2, 0), ("halt", 1)]))),
                  ("smn", 0, 1, 0), ("halt", 0)])
    e = M.fixpoint(t)
    out = evaluate(e, 0, budget=Budget(steps=10**6))
    assert out.defined
    # phi(e) behaves like phi(t(e)), which returns e's own index
    assert out.value == e.index


def test_code_table_short_codes():
    assert M.CODES.code("nowhere") == 1
    assert phi(1) == M.CODES.get(1)
    with pytest.raises(ValueError):
        M.CODES.bind(1, assemble([("halt", 0)]))


def test_oversized_index_counts_as_fuel():
    grow = assemble([("label", "top"), ("smn", 0, 0, 0), ("jump", "top")])
    out = evaluate(grow, 3, budget=10**6)
    assert isinstance(out, OutOfFuel)


def test_deep_nesting_counts_as_fuel():
    # a program that calls itself on every input nests without bound
    e = M.CODES.fixpoint("test.deep", lambda code: assemble([("const", 1, code),
                                                             ("call", 0, 1, 0), ("halt", 0)]))
    out = evaluate(e, 0, budget=10**7)
    assert isinstance(out, OutOfFuel)


def test_decimal_handles_huge_numbers():
    n = 10 ** 5000 + 7
    assert M.decimal(n).endswith("7") and len(M.decimal(n)) == 5001
    assert M.show_index(n) == "10000000...(5001 digits)"


def test_budget_must_be_positive():
    with pytest.raises(ValueError):
        Budget(steps=0)
