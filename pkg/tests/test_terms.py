import random

import pytest
from hypothesis import given, strategies as st

from pcalab.terms import (K, S, Apply, Const, TermSyntaxError, Var, abstract, abstract_all, ap,
                          church, cl_algebra, eval_term, free_vars, normalize, parse, show,
                          substitute, weak_step)

atoms = st.sampled_from([K, S, Var("x"), Var("y")])
terms = st.recursive(atoms, lambda sub: st.builds(Apply, sub, sub), max_leaves=12)
closed = st.recursive(st.sampled_from([K, S]), lambda sub: st.builds(Apply, sub, sub), max_leaves=10)


@given(terms)
def test_show_parse_roundtrip(t):
    assert parse(show(t)) == t


def test_application_associates_left():
    assert parse("s k k") == Apply(Apply(S, K), K)
    assert parse("x (y z)") == Apply(Var("x"), Apply(Var("y"), Var("z")))


@pytest.mark.parametrize("text,offset", [("(s k", 4), ("s )", 2), ("", 0), ("k $", 2)])
def test_syntax_errors_carry_positions(text, offset):
    with pytest.raises(TermSyntaxError) as err:
        parse(text)
    assert err.value.offset == offset


def test_syntax_error_line_and_column():
    with pytest.raises(TermSyntaxError) as err:
        parse("s k\n  k )")
    assert (err.value.line, err.value.column) == (2, 5)


def test_weak_reduction_rules():
    x, y, z = Var("x"), Var("y"), Var("z")
    assert weak_step(ap(K, x, y)) == x
    assert weak_step(ap(S, x, y, z)) == ap(x, z, Apply(y, z))
    assert weak_step(ap(x, y)) is None


@given(terms, st.sampled_from(["x", "y"]))
def test_abstraction_removes_the_variable(t, x):
    assert x not in free_vars(abstract(x, t))
    assert free_vars(abstract(x, t)) == free_vars(t) - {x}


@given(terms, closed)
def test_abstraction_is_sound_in_cl(t, a):
    # when t[a/x] has a weak normal form, ([x]t) a reaches the same one
    right = normalize(substitute(t, "x", a), 1000)
    if right is not None:
        assert normalize(Apply(abstract("x", t), a), 4000) == right


def test_abstract_all_order():
    t = abstract_all(["x", "y"], Var("x"))
    assert normalize(ap(t, S, K), 100) == S


@pytest.mark.parametrize("n", range(6))
def test_church_numerals_iterate(n):
    f, x = Var("f"), Var("x")
    want = x
    for _ in range(n):
        want = Apply(f, want)
    assert normalize(ap(church(n), f, x), 500) == want


def test_normalize_gives_up_on_omega():
    w = ap(S, ap(S, K, K), ap(S, K, K))
    assert normalize(Apply(w, w), 500) is None


def test_eval_term_binds_constants():
    cl = cl_algebra()
    t = parse("f k", constants={"f", "k", "s"})
    assert eval_term(t, cl, env={"f": S}) == Apply(S, K)
    with pytest.raises(KeyError):
        eval_term(Const("g"), cl)
    with pytest.raises(ValueError):
        eval_term(Var("z"), cl)


def test_cl_equality_is_three_valued():
    cl = cl_algebra()
    w = ap(S, ap(S, K, K), ap(S, K, K))
    assert cl.equal(ap(K, K, S), K) is True
    assert cl.equal(K, S) is False
    assert not isinstance(cl.equal(Apply(w, w), K), bool)


def test_random_terms_are_seeded():
    from pcalab.terms import random_term
    a = random_term(random.Random(4), 4, [K, S])
    b = random_term(random.Random(4), 4, [K, S])
    assert a == b
