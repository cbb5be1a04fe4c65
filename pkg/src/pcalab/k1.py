"""Kleene's first model: naturals with n·m = Φ_n(m)."""

from __future__ import annotations

from dataclasses import dataclass

from .machine import (CODES, NULL, Budget, EvalOutcome, Oracle, Program, assemble, code_of, evaluate,
                      fixpoint, transformer)
from .terms import Apply, Const, Term

# <a, x> -> a
_KCONST = assemble([("unpair", 1, 2, 0), ("halt", 1)])
# a -> index of x -> a
K_PROGRAM = assemble([("const", 1, code_of(_KCONST)), ("smn", 0, 1, 0), ("halt", 0)])

# <a, <b, c>> -> Φ_(Φ_a(c))(Φ_b(c))
_S2 = assemble([
    ("unpair", 1, 2, 0),
    ("unpair", 2, 3, 2),
    ("call", 4, 1, 3),
    ("call", 5, 2, 3),
    ("call", 0, 4, 5),
    ("halt", 0),
])
# <a, b> -> index of c -> (ac)(bc)
_S1 = assemble([
    ("unpair", 1, 2, 0),
    ("const", 3, code_of(_S2)),
    ("smn", 3, 3, 1),
    ("smn", 3, 3, 2),
    ("halt", 3),
])
S_PROGRAM = assemble([("const", 1, code_of(_S1)), ("smn", 0, 1, 0), ("halt", 0)])

SUCC = CODES.register("k1.succ", assemble([("inc", 0), ("halt", 0)]))

# <z, x> -> 0 if x = z, succ if x = 0, else diverge
_CASE = assemble([
    ("unpair", 1, 2, 0),
    ("jeq", 2, 1, "self"),
    ("const", 3, 0),
    ("jeq", 2, 3, "zero"),
    ("label", "loop"),
    ("jump", "loop"),
    ("label", "self"),
    ("const", 0, 0),
    ("halt", 0),
    ("label", "zero"),
    ("const", 0, SUCC),
    ("halt", 0),
])


@dataclass(frozen=True)
class K1Element:
    index: int

    defined = True

    def __str__(self):
        return str(self.index)


def k1_apply(n: K1Element | int, m: K1Element | int, budget: Budget | int = Budget(),
             oracle: Oracle = NULL) -> EvalOutcome:
    """Φ_n(m), relative to ``oracle`` when one is given."""
    n = n.index if isinstance(n, K1Element) else n
    m = m.index if isinstance(m, K1Element) else m
    return evaluate(n, m, oracle, budget)


def k1_k() -> K1Element:
    return K1Element(code_of(K_PROGRAM))


def k1_s() -> K1Element:
    return K1Element(code_of(S_PROGRAM))


def element(program: Program) -> K1Element:
    return K1Element(code_of(program))


_GENERATOR: list[K1Element] = []


def k1_generator() -> K1Element:
    """e with e·e = 0 and e·0 = an index of the successor; e·x diverges otherwise."""
    if not _GENERATOR:
        _GENERATOR.append(K1Element(code_of(fixpoint(transformer(_CASE)))))
    return _GENERATOR[0]


E = Const("e")


def numeral_term(n: int) -> Term:
    """A closed term over the single constant e with K₁ value n."""
    zero = Apply(E, E)
    t = zero
    for _ in range(n):
        t = Apply(Apply(E, zero), t)
    return t


class K1Pca:
    name = "K1"

    def __init__(self, oracle: Oracle = NULL):
        self.k = k1_k()
        self.s = k1_s()
        self.oracle = oracle

    def apply(self, a: K1Element, b: K1Element, budget: Budget = Budget()):
        o = k1_apply(a, b, budget, self.oracle)
        return K1Element(o.value) if o.defined else o

    def signature(self, a: K1Element, budget: Budget = Budget()) -> int:
        return a.index

    def equal(self, a: K1Element, b: K1Element, budget: Budget = Budget()) -> bool:
        return a.index == b.index


def k1_pca(oracle: Oracle = NULL) -> K1Pca:
    return K1Pca(oracle)
