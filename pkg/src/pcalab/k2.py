"""Kleene's second model on computable total functions, and its binary variant.

Elements are programs for total functions.  ``f·g`` runs ``Φ_{f(0)}`` with
oracle ``f⊕g`` and is defined iff the result is total, which is only ever
checked on a finite window.  In the binary variant the code of the running
program is one more than the position of the first 1 in the left stream and
all outputs are taken mod 2.

The stage programs behind k and s use registered short codes (see
:class:`pcalab.machine.CodeTable`), so a stream whose first 1 sits at
position ``e-1`` can be scanned in a handful of steps.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Mapping, Union

from . import streams as S
from .machine import (CODES, NULL, Budget, Program, assemble, code_of, evaluate,
                      pair, show_index, unpair)
from .streams import ZERO, apprel, headrel, interleave, prefix_one, reader

# ---------------------------------------------------------------------------
# binary k and s (registered first: their codes become stream positions)
#
# A program with code e is only ever run by K2,01 application on a left
# stream whose first 1 sits at position e-1, so each stage reads past its
# prefix using its own code instead of scanning for the 1.

_BIT = [("const", 6, 2), ("mod", 0, 0, 6), ("halt", 0)]
_RIGHT_BIT = [("const", 6, 2), ("mul", 2, 2, 6), ("inc", 2), ("query", 0, 2), *_BIT]
_TWO_X_1 = [("const", 6, 2), ("mul", 1, 0, 6), ("inc", 1)]


def _q(addr_lines, extra=()):
    return assemble([*addr_lines, *extra, ("halt", 0)])


def _s0(e: int) -> Program:
    # (0^(e-1) 1 ⌢ (X⊕Y)) ⊕ Z  ->  XZ(YZ), forcing XZ and YZ at the argument
    x01 = reader(2, 0, binary=True, after_prefix=0, prefix_len=e - 1)
    y01 = reader(2, 1, binary=True, after_prefix=0, prefix_len=e - 1)
    z01 = reader(2, 1, binary=True)
    xz, yz = apprel(x01, z01, binary=True), apprel(y01, z01, binary=True)
    return apprel(xz, yz, binary=True, force=(xz, yz))


# A read of X inside s·X·Y·Z scans the prefix of s·X once per position of
# (s·X)·Y and the prefix of s once per position of s·X, so the middle stage
# gets the smallest code and the outer stage the next one.
_S1_CODE = CODES.reserve("k201.s.e1")
_S2_CODE = CODES.reserve("k201.s.e2")
K201_S0 = CODES.fixpoint("k201.s.e0", _s0)


def _s1(e: int) -> Program:
    # (0^(e1-1) 1 ⌢ X) ⊕ Y  ->  0^(e0-1) 1 ⌢ (X⊕Y)
    return prefix_one(K201_S0 - 1, [
        ("const", 6, 2),
        ("mod", 4, 2, 6),
        ("div", 3, 2, 6),
        ("jeq", 4, ZERO, "left"),
        ("mul", 3, 3, 6),
        ("inc", 3),
        ("query", 0, 3),
        *_BIT,
        ("label", "left"),
        ("const", 5, e),
        ("add", 3, 3, 5),
        ("mul", 3, 3, 6),
        ("query", 0, 3),
        *_BIT,
    ])


K201_S1 = CODES.bind(_S1_CODE, _s1(_S1_CODE))
# s ⊕ X  ->  0^(e1-1) 1 ⌢ X
K201_S2 = CODES.bind(_S2_CODE, prefix_one(K201_S1 - 1, _RIGHT_BIT))

# (0^(e0-1) 1 ⌢ X) ⊕ Y  ->  X
K201_E0 = CODES.fixpoint("k201.k.e0", lambda e: reader(1, 0, binary=True, after_prefix=0,
                                                     prefix_len=e - 1))
# k ⊕ X  ->  0^(e0-1) 1 ⌢ X
K201_E1 = CODES.register("k201.k.e1", prefix_one(K201_E0 - 1, _RIGHT_BIT))

# catalog heads for sample binary elements, placed after k and s because
# those prefixes are scanned at every level of a nested application
_K201_ARG = CODES.register("k201.cat.arg", reader(2, 1, binary=True))
_K201_NOT = CODES.register("k201.cat.not", _q(_TWO_X_1, [
    ("query", 2, 1), ("mod", 2, 2, 6), ("const", 3, 1), ("sub", 0, 3, 2)]))
_K201_AND = CODES.register("k201.cat.and", _q(_TWO_X_1, [
    ("query", 2, 1), ("add", 1, 1, 6), ("query", 3, 1), ("mul", 0, 2, 3),
    ("mod", 0, 0, 6)]))

# ---------------------------------------------------------------------------
# Baire-space k and s, shared with the partial model

# (c ⌢ a) ⊕ b  ->  a
K2_K0 = CODES.register("k2.k.0", reader(2, 2))
# k ⊕ a  ->  k0 ⌢ a
K2_K1 = CODES.register("k2.k.1", headrel(K2_K0))

_F = reader(4, 2)
_G = reader(4, 4)
_H = reader(2, 1)
_FH = apprel(_F, _H)
_GH = apprel(_G, _H)
# (c ⌢ (f⊕g)) ⊕ h -> fh(gh); forcing fh and gh at the argument makes the
# result partial on a window exactly when one of fh, gh, fh(gh) is
K2_S0 = CODES.register("k2.s.0", apprel(_FH, _GH, force=(_FH, _GH)))
K2_S1 = CODES.register("k2.s.1", interleave(K2_S0))
K2_S2 = CODES.register("k2.s.2", headrel(K2_S1))

# ---------------------------------------------------------------------------
# catalogs of heads for sample elements

K2_CATALOG = {
    "succ": CODES.register("k2.cat.succ", _q(_TWO_X_1, [("query", 0, 1), ("inc", 0)])),
    "arg": CODES.register("k2.cat.arg", _q(_TWO_X_1, [("query", 0, 1)])),
    "own": CODES.register("k2.cat.own", reader(2, 2)),
    "sum": CODES.register("k2.cat.sum", _q(_TWO_X_1, [
        ("query", 2, 1), ("inc", 1), ("query", 3, 1), ("add", 0, 2, 3)])),
    "twice": CODES.register("k2.cat.twice", _q(_TWO_X_1, [
        ("query", 2, 1), ("const", 7, 8), ("mod", 2, 2, 7),
        ("mul", 2, 2, 6), ("inc", 2), ("query", 0, 2)])),
}
K201_CATALOG = {"arg": _K201_ARG, "not": _K201_NOT, "own": K201_E0, "and": _K201_AND}

# a head that answers g(x) but diverges at x = 3; used for engineered undefined products
K2_GAP3 = CODES.register("k2.gap3", assemble([
    ("const", 1, 3),
    ("jeq", 0, 1, "loop"),
    *_TWO_X_1,
    ("query", 0, 1),
    ("halt", 0),
    ("label", "loop"),
    ("jump", "loop"),
]))

# ---------------------------------------------------------------------------
# evidence and elements

@dataclass(frozen=True)
class Certified:
    tag: str


@dataclass(frozen=True)
class WindowChecked:
    window: int


Evidence = Union[Certified, WindowChecked]


@dataclass(frozen=True)
class K2Element:
    program: Program
    evidence: Evidence

    binary = False
    defined = True

    def values(self, window: int, budget: Budget = Budget()) -> list:
        out = S.bits if self.binary else S.points
        return S.values_or_none(out(self.program, window, budget))

    def __str__(self):
        vals = self.values(8)
        body = "".join(map(str, vals)) if self.binary else " ".join(map(str, vals))
        return f"[{body} ...] index={show_index(self.program.index)}"


class K201Element(K2Element):
    binary = True


@dataclass(frozen=True)
class UndefinedAtWindow:
    x: int
    outcome: object

    defined = False


@dataclass(frozen=True)
class UndefinedZeroStream:
    window: int

    defined = False


def certified(program: Program, tag: str) -> K2Element:
    return K2Element(program, Certified(tag))


def k2_k() -> K2Element:
    return certified(S.head_then_zeros(K2_K1), "k")


def k2_s() -> K2Element:
    return certified(S.head_then_zeros(K2_S2), "s")


def k2_apply(f: K2Element, g: K2Element, budget: Budget = Budget()):
    """f·g, or UndefinedAtWindow for the first x < window that fails to halt."""
    prog = S.apply_program(f.program, g.program)
    for x in range(budget.window):
        o = evaluate(prog, x, NULL, budget)
        if not o.defined:
            return UndefinedAtWindow(x, o)
    return K2Element(prog, WindowChecked(budget.window))


def k201_k() -> K201Element:
    return K201Element(S.ones_at(K201_E1 - 1), Certified("k"))


def k201_s() -> K201Element:
    return K201Element(S.ones_at(K201_S2 - 1), Certified("s"))


def k201_apply(a: K201Element, b: K201Element, budget: Budget = Budget()):
    """A·B for the binary model, scanning A's first window bits for a 1."""
    for i in range(budget.window):
        o = evaluate(a.program, i, NULL, budget)
        if not o.defined:
            return UndefinedAtWindow(i, o)
        if o.value % 2:
            break
    else:
        return UndefinedZeroStream(budget.window)
    prog = S.apply_program(a.program, b.program, binary=True)
    for x in range(budget.window):
        o = evaluate(prog, x, NULL, budget)
        if not o.defined:
            return UndefinedAtWindow(x, o)
    return K201Element(prog, WindowChecked(budget.window))


def apply_chain(apply, *parts, budget: Budget = Budget()):
    out = parts[0]
    for p in parts[1:]:
        out = apply(out, p, budget)
        if isinstance(out, (UndefinedAtWindow, UndefinedZeroStream)):
            return out
    return out


def random_k2(rng: random.Random, tail: int = 12, heads: Mapping[str, int] | None = None) -> K2Element:
    """A certified table element whose head is drawn from the catalog."""
    heads = dict(heads or K2_CATALOG)
    name = rng.choice(sorted(heads))
    values = [heads[name]] + [rng.randrange(6) for _ in range(tail)]
    return certified(S.table_program(values, rng.randrange(6)), f"table:{name}")


def random_k201(rng: random.Random, tail: int = 40, heads: Mapping[str, int] | None = None) -> K201Element:
    heads = dict(heads or K201_CATALOG)
    name = rng.choice(sorted(heads))
    e = heads[name]
    bits = [0] * (e - 1) + [1] + [rng.randrange(2) for _ in range(tail)]
    return K201Element(S.table_program(bits, rng.randrange(2)), Certified(f"table:{name}"))


# ---------------------------------------------------------------------------
# graph coding of partial functions and its decoding

@dataclass(frozen=True)
class PartialGraphCode:
    """graph(φ) = {<x, y> : φ(x) = y}, as a finite set when φ is finite and
    always as a bit stream program."""

    stream: Program
    members: frozenset | None = None

    def contains(self, m: int, budget: Budget = Budget()) -> bool | None:
        if self.members is not None:
            return m in self.members
        o = evaluate(self.stream, m, NULL, budget)
        return bool(o.value % 2) if o.defined else None


def graph_encode(phi: Mapping[int, int] | Program) -> PartialGraphCode:
    """Graph coding.  A program φ gives the stream m=<x,y> -> [φ(x) = y], which
    is total exactly when φ is."""
    if isinstance(phi, Program):
        prog = assemble([
            ("unpair", 1, 2, 0),
            ("const", 3, code_of(phi)),
            ("calln", 4, 3, 1),
            ("jeq", 4, 2, "yes"),
            ("const", 0, 0),
            ("halt", 0),
            ("label", "yes"),
            ("const", 0, 1),
            ("halt", 0),
        ])
        return PartialGraphCode(prog)
    members = frozenset(pair(x, y) for x, y in phi.items())
    top = max(members, default=-1) + 1
    return PartialGraphCode(S.table_program([int(m in members) for m in range(top)], 0), members)


def psi_decode(code: PartialGraphCode | frozenset | Program, window: int,
               budget: Budget = Budget()) -> dict[int, int]:
    """ψ_X(n) = least y with <n,y> in X, for n < window.

    A finite set is decoded exactly; a stream is searched for y < budget.stage.
    """
    if isinstance(code, Program):
        code = PartialGraphCode(code)
    if isinstance(code, frozenset):
        code = PartialGraphCode(S.NOWHERE, code)
    out: dict[int, int] = {}
    if code.members is not None:
        for m in sorted(code.members, key=lambda m: unpair(m)[1]):
            n, y = unpair(m)
            if n < window and n not in out:
                out[n] = y
        return out
    for n in range(window):
        for y in range(budget.stage):
            if code.contains(pair(n, y), budget):
                out[n] = y
                break
    return out


# ---------------------------------------------------------------------------

class K2Pca:
    name = "K2"
    binary = False

    def __init__(self):
        self.k = k2_k()
        self.s = k2_s()

    def apply(self, a: K2Element, b: K2Element, budget: Budget = Budget()):
        return k2_apply(a, b, budget)

    def signature(self, a: K2Element, budget: Budget = Budget()) -> tuple:
        return tuple(a.values(budget.window, budget))

    def equal(self, a: K2Element, b: K2Element, budget: Budget = Budget()) -> bool:
        return self.signature(a, budget) == self.signature(b, budget)


class K201Pca(K2Pca):
    name = "K201"
    binary = True

    def __init__(self):
        self.k = k201_k()
        self.s = k201_s()

    def apply(self, a: K201Element, b: K201Element, budget: Budget = Budget()):
        return k201_apply(a, b, budget)


def k2_pca() -> K2Pca:
    return K2Pca()


def k201_pca() -> K201Pca:
    return K201Pca()
