"""The graph model on finite and c.e. sets.

    X·Y = {n : <n,u> ∈ X and D_u ⊆ Y for some u}

Every set is a :class:`GSet` with monotone finite approximations
``approx(stage)``.  Application is lazy: ``X.apply(Y)`` returns a set whose
approximation at stage s is computed from X and Y at stage s.  Curried
operators (k, s and compiled tables) also know how to apply themselves
symbolically, which avoids materializing their astronomically large axiom
codes; their explicit axioms remain available at small stages so the two
routes can be compared.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

import gmpy2

from .machine import (NULL, Budget, Program, assemble, code_of, evaluate, finite_set_decode,
                      finite_set_encode, pair, show_index, unpair)
from .terms import Apply, Const, Term


def members(u: int) -> Iterable[int]:
    """Elements of D_u in increasing order, without building the whole set."""
    u = gmpy2.mpz(u)
    i = gmpy2.bit_scan1(u, 0) if u else None
    while i is not None:
        yield int(i)
        i = gmpy2.bit_scan1(u, i + 1)


def premise_within(u: int, ys: frozenset) -> bool:
    return all(m in ys for m in members(u))


def eq2(xs: Iterable[int], ys: frozenset) -> frozenset:
    """The application rule on explicit finite sets."""
    out = set()
    for z in xs:
        n, u = unpair(z)
        if n not in out and premise_within(u, ys):
            out.add(n)
    return frozenset(out)


class GSet:
    """A set of naturals given by monotone finite approximations."""

    def approx(self, stage: int) -> frozenset:
        raise NotImplementedError

    def apply(self, other: "GSet") -> "GSet":
        return Applied(self, other)

    def below(self, bound: int, stage: int) -> frozenset:
        return frozenset(n for n in self.approx(stage) if n < bound)

    def describe(self, stage: int = 8, bound: int = 32) -> str:
        return str(sorted(self.below(bound, stage)))


@dataclass(frozen=True, eq=False)
class FiniteSet(GSet):
    items: frozenset

    def __init__(self, items: Iterable[int] = ()):
        object.__setattr__(self, "items", frozenset(items))

    def approx(self, stage: int) -> frozenset:
        return self.items

    def __eq__(self, other):
        return isinstance(other, FiniteSet) and other.items == self.items

    def __hash__(self):
        return hash(self.items)

    def __str__(self):
        return str(sorted(self.items))


EMPTY = FiniteSet()


class Enumerable(GSet):
    """Outputs of an enumerator: W = {e(i) - 1 : e(i) > 0}.

    Stage s runs e on i < s with s * steps_per_stage steps each, so
    approximations only grow with s.  Output 0 means "nothing at this i".
    """

    def __init__(self, program: Program, steps_per_stage: int = 64, name: str | None = None):
        self.program = program
        self.steps_per_stage = steps_per_stage
        self.name = name

    def approx(self, stage: int) -> frozenset:
        out = set()
        for i in range(stage):
            o = evaluate(self.program, i, NULL, stage * self.steps_per_stage)
            if o.defined and o.value > 0:
                out.add(o.value - 1)
        return frozenset(out)

    def describe(self, stage: int = 8, bound: int = 32) -> str:
        rows = [f"stage {s}: {sorted(self.below(bound, s))}" for s in (1, stage // 2, stage)]
        return f"W[index={show_index(self.program.index)}] " + "; ".join(rows)


def enumerator_of(items: Sequence[int]) -> Program:
    """A total enumerator listing ``items`` (as i -> items[i] + 1)."""
    lines = []
    for i, v in enumerate(items):
        lines += [("const", 1, i), ("jeq", 0, 1, f"v{i}")]
    lines += [("const", 0, 0), ("halt", 0)]
    for i, v in enumerate(items):
        lines += [("label", f"v{i}"), ("const", 0, v + 1), ("halt", 0)]
    return assemble(lines)


@dataclass(eq=False)
class Applied(GSet):
    left: GSet
    right: GSet

    def approx(self, stage: int) -> frozenset:
        return eq2(self.left.approx(stage), self.right.approx(stage))

    def __str__(self):
        return f"({self.left} {self.right})"


class StageSet(GSet):
    """A set given by a Python function of the stage (must be monotone)."""

    def __init__(self, fn: Callable[[int], Iterable[int]], name: str = "set"):
        self.fn = fn
        self.name = name

    def approx(self, stage: int) -> frozenset:
        return frozenset(self.fn(stage))

    def __str__(self):
        return self.name


def g_apply(x: GSet, y: GSet, stage: int | None = None) -> GSet:
    """X·Y.  With a stage, the stage approximation as a finite set; without,
    the lazy set (curried operators stay symbolic either way)."""
    out = x.apply(y)
    if stage is None or isinstance(out, (CurriedPartial, CurriedOperator)):
        return out
    return FiniteSet(out.approx(stage))


def g_apply_all(*parts: GSet) -> GSet:
    out = parts[0]
    for p in parts[1:]:
        out = out.apply(p)
    return out


# ---------------------------------------------------------------------------
# curried operators

def curry_code(n: int, premises: Sequence[int]) -> int:
    """Axiom code for output n under premises D1..Dk: <<<n, D_k>, ..>, D_1>."""
    z = n
    for u in reversed(premises):
        z = pair(z, u)
    return z


class CurriedOperator(GSet):
    """A set G with G·Y1·…·Yk = F(Y1, …, Yk).

    ``result(args)`` gives F symbolically; ``axioms(stage)`` enumerates the
    explicit axioms whose components are below the stage.
    """

    def __init__(self, name: str, arity: int, result: Callable[[list], GSet],
                 axioms: Callable[[int], Iterable[int]]):
        self.name = name
        self.arity = arity
        self.result = result
        self._axioms = axioms

    def approx(self, stage: int) -> frozenset:
        return frozenset(self._axioms(stage))

    def apply(self, other: GSet) -> GSet:
        if self.arity == 1:
            return self.result([other])
        return CurriedPartial(self, (other,))

    def __str__(self):
        return self.name


@dataclass(eq=False)
class CurriedPartial(GSet):
    op: CurriedOperator
    args: tuple

    def approx(self, stage: int) -> frozenset:
        # the explicit route: peel the given arguments off the axiom set
        xs = self.op.approx(stage)
        for a in self.args:
            xs = eq2(xs, a.approx(stage))
        return xs

    def apply(self, other: GSet) -> GSet:
        args = self.args + (other,)
        if len(args) == self.op.arity:
            return self.op.result(list(args))
        return CurriedPartial(self.op, args)

    def __str__(self):
        return "(" + " ".join([str(self.op), *map(str, self.args)]) + ")"


def _k_axioms(stage: int):
    for n in range(stage):
        yield curry_code(n, [1 << n, 0])


def graph_k() -> CurriedOperator:
    """k·X·Y = X, from the axioms <<n, ∅>, {n}>."""
    return CurriedOperator("kG", 2, lambda a: a[0], _k_axioms)


def _s_axioms(stage: int):
    # n ∈ (XZ)(YZ) from X ∋ <<n,u>,v>, Y ∋ <m,w_m> for m ∈ D_u, Z ⊇ D_v ∪ ⋃ D_w
    for n, u, v in itertools.product(range(stage), repeat=3):
        dom = sorted(finite_set_decode(u))
        for ws in itertools.product(range(stage), repeat=len(dom)):
            z = set(finite_set_decode(v))
            for w in ws:
                z |= finite_set_decode(w)
            d1 = finite_set_encode([pair(pair(n, u), v)])
            d2 = finite_set_encode([pair(m, w) for m, w in zip(dom, ws)])
            yield curry_code(n, [d1, d2, finite_set_encode(z)])


def graph_s() -> CurriedOperator:
    """s·X·Y·Z = (X·Z)·(Y·Z)."""
    return CurriedOperator("sG", 3, lambda a: Applied(Applied(a[0], a[2]), Applied(a[1], a[2])),
                           _s_axioms)


@dataclass(frozen=True)
class MonotonicityViolation:
    smaller: tuple
    larger: tuple
    lost: int

    defined = False

    def __str__(self):
        def show(t):
            return "(" + ", ".join(str(sorted(d)) for d in t) + ")"
        return f"{show(self.smaller)} ⊆ {show(self.larger)} but {self.lost} is lost"


def curry_operator(table: Mapping[tuple, Iterable[int]], arity: int):
    """Compile a finite monotone table {(D1,…,Dk): outputs} into a set G.

    G·Y1·…·Yk = ⋃ {table[D̄] : Di ⊆ Yi}, which agrees with the table on its
    inputs exactly when the table is monotone.  A non-monotone table returns
    a :class:`MonotonicityViolation`.
    """
    rows = []
    for inputs, outputs in table.items():
        if len(inputs) != arity:
            raise ValueError(f"table row {inputs} does not have arity {arity}")
        rows.append((tuple(frozenset(d) for d in inputs), frozenset(outputs)))
    for (a, out_a), (b, out_b) in itertools.permutations(rows, 2):
        if all(x <= y for x, y in zip(a, b)):
            lost = out_a - out_b
            if lost:
                return MonotonicityViolation(a, b, min(lost))
    axioms = set()
    for inputs, outputs in rows:
        codes = [finite_set_encode(d) for d in inputs]
        for n in outputs:
            axioms.add(curry_code(n, codes))
    return FiniteSet(axioms)


def gadget_R() -> FiniteSet:
    """R·X·Y = {0} if 0 ∉ X∪Y, {0,1} otherwise."""
    zero, one = frozenset(), frozenset([0])
    return curry_operator({(zero, zero): {0}, (one, zero): {0, 1}, (zero, one): {0, 1}}, 2)


def gadget_C(a: Iterable[int], b: Iterable[int], bound: int) -> FiniteSet:
    """C·(X⊕X̄)·(Y⊕Ȳ) = A if X and Y agree below ``bound``, B if they differ there."""
    a, b = frozenset(a), frozenset(b)
    if not a < b:
        raise ValueError("gadget_C needs A ⊊ B")
    table = {(frozenset(), frozenset()): a}
    for n in range(bound):
        table[(frozenset([2 * n]), frozenset([2 * n + 1]))] = b
        table[(frozenset([2 * n + 1]), frozenset([2 * n]))] = b
    return curry_operator(table, 2)


@dataclass(frozen=True)
class JoinedSet:
    """X⊕X̄ = {2n : n ∈ X} ∪ {2n+1 : n ∉ X}, materialized below ``bound``."""

    source: frozenset
    bound: int

    def as_set(self) -> FiniteSet:
        return FiniteSet(2 * n if n in self.source else 2 * n + 1 for n in range(self.bound))


def joined(x: Iterable[int], bound: int) -> FiniteSet:
    return JoinedSet(frozenset(x), bound).as_set()


# ---------------------------------------------------------------------------
# enumeration reducibility and index swapping

def identity_graph(bound: int) -> FiniteSet:
    return FiniteSet(pair(n, 1 << n) for n in range(bound))


def shift_graph(k: int, bound: int) -> FiniteSet:
    return FiniteSet(pair(n + k, 1 << n) for n in range(bound))


@dataclass(frozen=True)
class NotFound:
    searched: int

    defined = False


def e_reduces(z: GSet, y: GSet, bound: int = 32, stage: int = 32, search: int = 64):
    """Find a finite W with W·Y = Z below ``bound``.

    Tries the identity, then shifts, then an element-wise graph whose premises
    are singletons of Y where possible and empty otherwise.
    """
    zs, ys = z.below(bound, stage), y.approx(stage)

    def works(w):
        return w.apply(FiniteSet(ys)).below(bound, stage) == zs

    candidates = [identity_graph(bound)]
    candidates += [shift_graph(k, bound) for k in range(1, bound)]
    for tried, w in enumerate(candidates[:search], 1):
        if works(w):
            return w
    axioms = set()
    ordered = sorted(ys)
    for n in sorted(zs):
        axioms.add(pair(n, 1 << ordered[0]) if ordered else pair(n, 0))
    w = FiniteSet(axioms)
    if works(w):
        return w
    w = FiniteSet(pair(n, 0) for n in zs)
    return w if works(w) else NotFound(min(search, len(candidates)) + 2)


# <e, i> with i = <n, <u, t>>: output <n, 2^<n,u>> + 1 when every m ∈ D_u
# occurs among e(0..t) - 1, else 0
_SWAP = assemble([
    ("unpair", 1, 2, 0),          # r1 = e, r2 = i
    ("unpair", 3, 4, 2),          # r3 = n
    ("unpair", 5, 6, 4),          # r5 = u, r6 = t
    ("copy", 7, 5),               # r7 = remaining bits of u
    ("const", 8, 0),              # r8 = m
    ("const", 10, 2),
    ("label", "bits"),
    ("jeq", 7, 9, "emit"),
    ("mod", 11, 7, 10),
    ("jeq", 11, 9, "next"),
    ("const", 12, 0),             # search i' <= t with e(i') = m + 1
    ("copy", 13, 8),
    ("inc", 13),
    ("label", "search"),
    ("calln", 14, 1, 12),
    ("jeq", 14, 13, "next"),
    ("jeq", 12, 6, "none"),
    ("inc", 12),
    ("jump", "search"),
    ("label", "next"),
    ("div", 7, 7, 10),
    ("inc", 8),
    ("jump", "bits"),
    ("label", "emit"),
    ("pair", 15, 3, 5),           # r16 = 2^<n, u> by squaring
    ("const", 16, 1),
    ("const", 17, 2),
    ("label", "pow"),
    ("jeq", 15, 9, "done"),
    ("mod", 11, 15, 10),
    ("jeq", 11, 9, "square"),
    ("mul", 16, 16, 17),
    ("label", "square"),
    ("mul", 17, 17, 17),
    ("div", 15, 15, 10),
    ("jump", "pow"),
    ("label", "done"),
    ("pair", 0, 3, 16),
    ("inc", 0),
    ("halt", 0),
    ("label", "none"),
    ("const", 0, 0),
    ("halt", 0),
])


def swap_index(e: Program, steps_per_stage: int = 256) -> Enumerable:
    """W_d with W_d·X = X·W_e for every X: W_d = {<n, {<n,u>}> : D_u ⊆ W_e}."""
    from .machine import smn
    return Enumerable(smn(_SWAP, [code_of(e)]), steps_per_stage)


def swap_stage(n_bound: int, u_bound: int, t_bound: int) -> int:
    """A stage at which W_d has seen every <n, <u, t>> below the given bounds."""
    return pair(n_bound, pair(u_bound, t_bound)) + 1


# ---------------------------------------------------------------------------
# numerals and the term synthesis t_n

def _z0_axioms(stage: int):
    yield pair(0, 0)
    for y in range(stage):
        yield pair(y + 1, 1 << y)


Z0 = StageSet(_z0_axioms, "Z0")


def numeral_value(n: int) -> GSet:
    """v_0 = Z0, v_(n+1) = Z0·v_n, so v_n = {0..n-1} ∪ (Z0 + n)."""
    v: GSet = Z0
    for _ in range(n):
        v = Applied(Z0, v)
    return v


WITNESS_Y = 6
# Z0 must list the axiom <y+1, {y}> for y up to the witness codes
WITNESS_STAGE = pair(WITNESS_Y + 1, 1 << WITNESS_Y) + 16


def independence_witness(n: int) -> frozenset:
    """F_n ⊆ v_n with F_n ⊄ v_m for m ≠ n (checked, not assumed, by the tests)."""
    return frozenset([n + pair(WITNESS_Y + 1, 1 << WITNESS_Y)])


W_CATALOG: list[tuple[str, frozenset]] = [
    ("empty", frozenset()),
    ("zero", frozenset([0])),
    ("evens<16", frozenset(range(0, 16, 2))),
    ("odds<16", frozenset(range(1, 16, 2))),
    ("below8", frozenset(range(8))),
    ("three", frozenset([3])),
    ("primes<16", frozenset([2, 3, 5, 7, 11, 13])),
    ("squares<16", frozenset([1, 4, 9])),
    ("threes<16", frozenset(range(0, 16, 3))),
    ("fives", frozenset([5, 10, 15])),
]


def catalog_set(n: int) -> FiniteSet:
    if not 0 <= n < len(W_CATALOG):
        raise ValueError(f"catalog index {n} outside 0..{len(W_CATALOG) - 1}")
    return FiniteSet(W_CATALOG[n][1])


def generator_J(catalog: Sequence[frozenset] | None = None) -> FiniteSet:
    """J = {<m, F_n> : m ∈ W_n}, so J·v_n = W_n by independence of the F_n."""
    catalog = [s for _, s in W_CATALOG] if catalog is None else list(catalog)
    return FiniteSet(pair(m, finite_set_encode(independence_witness(n)))
                     for n, w in enumerate(catalog) for m in w)


Z0_CONST = Const("Z0")
J_CONST = Const("J")


def numeral_term(n: int) -> Term:
    t: Term = Z0_CONST
    for _ in range(n):
        t = Apply(Z0_CONST, t)
    return t


def term_for_W(n: int) -> Term:
    """A closed term over the generators whose value is W_n."""
    if not 0 <= n < len(W_CATALOG):
        raise ValueError(f"catalog index {n} outside 0..{len(W_CATALOG) - 1}")
    return Apply(J_CONST, numeral_term(n))


def generators() -> dict[str, GSet]:
    return {"k": graph_k(), "s": graph_s(), "J": generator_J(), "Z0": Z0}


class GraphPca:
    name = "E"

    def __init__(self, bound: int = 32, stage: int = 8):
        self.k = graph_k()
        self.s = graph_s()
        self.bound = bound
        self.stage = stage

    def apply(self, a: GSet, b: GSet, budget: Budget | None = None) -> GSet:
        return a.apply(b)

    def signature(self, a: GSet, budget: Budget | None = None) -> frozenset:
        stage = budget.stage if budget else self.stage
        bound = budget.window if budget else self.bound
        return a.below(bound, stage)

    def equal(self, a: GSet, b: GSet, budget: Budget | None = None) -> bool:
        return self.signature(a, budget) == self.signature(b, budget)


def graph_pca(bound: int = 32, stage: int = 8) -> GraphPca:
    return GraphPca(bound, stage)
