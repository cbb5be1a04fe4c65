"""Applicative terms, bracket abstraction and evaluation in any pca.

Grammar::

    term := atom | '(' term term+ ')' | term term    (juxtaposition is left-associative)
    atom := [A-Za-z0-9_.'-]+

Atoms listed in ``constants`` parse as :class:`Const`, everything else as
:class:`Var`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Any, Iterator, Mapping, Protocol, Union

from .machine import Budget


@dataclass(frozen=True)
class Const:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Apply:
    left: "Term"
    right: "Term"

    def __str__(self):
        return f"({self.left} {self.right})"


Term = Union[Const, Var, Apply]

K = Const("k")
S = Const("s")


def ap(*parts: Term) -> Term:
    out = parts[0]
    for p in parts[1:]:
        out = Apply(out, p)
    return out


def free_vars(t: Term) -> frozenset[str]:
    if isinstance(t, Var):
        return frozenset([t.name])
    if isinstance(t, Apply):
        return free_vars(t.left) | free_vars(t.right)
    return frozenset()


def constants_of(t: Term) -> frozenset[str]:
    if isinstance(t, Const):
        return frozenset([t.name])
    if isinstance(t, Apply):
        return constants_of(t.left) | constants_of(t.right)
    return frozenset()


def substitute(t: Term, x: str, value: Term) -> Term:
    if isinstance(t, Var):
        return value if t.name == x else t
    if isinstance(t, Apply):
        return Apply(substitute(t.left, x, value), substitute(t.right, x, value))
    return t


def size(t: Term) -> int:
    return size(t.left) + size(t.right) if isinstance(t, Apply) else 1


# ---------------------------------------------------------------------------
# parsing and printing

class TermSyntaxError(ValueError):
    def __init__(self, message: str, text: str, offset: int):
        line = text.count("\n", 0, offset) + 1
        column = offset - (text.rfind("\n", 0, offset) + 1) + 1
        super().__init__(f"{message} at line {line}, column {column} (offset {offset})")
        self.offset = offset
        self.line = line
        self.column = column


_TOKEN = re.compile(r"\s*(?:(\()|(\))|([A-Za-z0-9_.'\-]+))")


def _tokens(text: str) -> Iterator[tuple[str, str, int]]:
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            return
        m = _TOKEN.match(text, pos)
        if not m:
            start = len(text) - len(text[pos:].lstrip())
            raise TermSyntaxError(f"unexpected character {text[start]!r}", text, start)
        kind = "(" if m.group(1) else ")" if m.group(2) else "atom"
        yield kind, m.group(3) or kind, m.start(m.lastindex)
        pos = m.end()


def parse(text: str, constants: frozenset[str] | set[str] = frozenset({"k", "s"})) -> Term:
    tokens = list(_tokens(text))
    end = len(text)
    i = 0

    def sequence(closing: bool) -> Term:
        nonlocal i
        items: list[Term] = []
        while i < len(tokens):
            kind, value, offset = tokens[i]
            if kind == ")":
                if not closing:
                    raise TermSyntaxError("unmatched ')'", text, offset)
                break
            i += 1
            if kind == "(":
                items.append(sequence(True))
                if i >= len(tokens):
                    raise TermSyntaxError("expected ')'", text, end)
                i += 1
            else:
                items.append(Const(value) if value in constants else Var(value))
        if not items:
            offset = tokens[i][2] if i < len(tokens) else end
            raise TermSyntaxError("empty term", text, offset)
        return ap(*items)

    term = sequence(False)
    return term


def show(t: Term) -> str:
    """Fully parenthesized form; parse(show(t)) == t."""
    return str(t)


# ---------------------------------------------------------------------------
# bracket abstraction

def abstract(x: str, t: Term) -> Term:
    """[x]t: [x]x = s k k, [x]t = k t if x not free in t, [x](u v) = s ([x]u) ([x]v)."""
    if t == Var(x):
        return ap(S, K, K)
    if x not in free_vars(t):
        return Apply(K, t)
    return ap(S, abstract(x, t.left), abstract(x, t.right))


def abstract_all(names: list[str], t: Term) -> Term:
    """[x1]...[xn]t, so that (result a1 ... an) ≃ t[a/x]."""
    for x in reversed(names):
        t = abstract(x, t)
    return t


# ---------------------------------------------------------------------------
# evaluation in a pca

@dataclass(frozen=True)
class Diverged:
    """The application ``at`` failed; ``outcome`` is the model's report."""

    at: Term
    outcome: Any

    defined = False


class Pca(Protocol):
    name: str
    k: Any
    s: Any

    def apply(self, a, b, budget: Budget) -> Any:
        """Element, or an object with ``defined == False``."""

    def equal(self, a, b, budget: Budget) -> bool | None:
        ...


def eval_term(t: Term, pca: Pca, budget: Budget = Budget(),
              env: Mapping[str, Any] | None = None):
    """Innermost, left-to-right evaluation.  Returns an element or Diverged."""
    env = dict(env or {})
    env.setdefault("k", pca.k)
    env.setdefault("s", pca.s)
    if free_vars(t):
        raise ValueError(f"term has free variables: {sorted(free_vars(t))}")
    cache: dict[Term, Any] = {}

    def go(u: Term):
        if u in cache:
            return cache[u]
        if isinstance(u, Const):
            if u.name not in env:
                raise KeyError(f"no element bound to constant {u.name!r}")
            out = env[u.name]
        else:
            f = go(u.left)
            if isinstance(f, Diverged):
                return f
            a = go(u.right)
            if isinstance(a, Diverged):
                return a
            r = pca.apply(f, a, budget)
            out = Diverged(u, r) if getattr(r, "defined", True) is False else r
        cache[u] = out
        return out

    return go(t)


# ---------------------------------------------------------------------------
# the CL term algebra

@dataclass(frozen=True)
class UnknownEquality:
    reason: str


def _spine(t: Term) -> tuple[Term, list[Term]]:
    args = []
    while isinstance(t, Apply):
        args.append(t.right)
        t = t.left
    return t, args[::-1]


def weak_step(t: Term) -> Term | None:
    """One leftmost-outermost weak reduction step, or None if t is normal."""
    head, args = _spine(t)
    if head == K and len(args) >= 2:
        return ap(args[0], *args[2:])
    if head == S and len(args) >= 3:
        a, b, c = args[:3]
        return ap(Apply(Apply(a, c), Apply(b, c)), *args[3:])
    for i, arg in enumerate(args):
        r = weak_step(arg)
        if r is not None:
            return ap(head, *args[:i], r, *args[i + 1:])
    return None


def normalize(t: Term, steps: int, max_size: int = 20_000) -> Term | None:
    """Weak normal form within ``steps`` reductions, else None.

    A term that grows past ``max_size`` nodes also gives None: duplicating
    redexes can blow up long before the step budget runs out.
    """
    for i in range(steps):
        if i % 32 == 0 and size(t) > max_size:
            return None
        r = weak_step(t)
        if r is None:
            return t
        t = r
    return t if weak_step(t) is None else None


class CLAlgebra:
    """Closed terms over {k, s}; application is syntactic."""

    name = "CL"
    k = K
    s = S

    def apply(self, a: Term, b: Term, budget: Budget = Budget()) -> Term:
        return Apply(a, b)

    def equal(self, a: Term, b: Term, budget: Budget = Budget()):
        na, nb = normalize(a, budget.steps), normalize(b, budget.steps)
        if na is None or nb is None:
            return UnknownEquality("normalization budget exhausted")
        return na == nb


def cl_algebra() -> CLAlgebra:
    return CLAlgebra()


# ---------------------------------------------------------------------------
# numerals

def church(n: int) -> Term:
    """The Church numeral n̄ over {k, s}: n̄ f x = f^n x."""
    zero = Apply(K, ap(S, K, K))
    succ = ap(S, ap(S, Apply(K, S), K))
    t = zero
    for _ in range(n):
        t = Apply(succ, t)
    return t


def random_term(rng, depth: int, atoms: list[Term]) -> Term:
    if depth <= 0 or rng.random() < 0.3:
        return rng.choice(atoms)
    return Apply(random_term(rng, depth - 1, atoms), random_term(rng, depth - 1, atoms))
