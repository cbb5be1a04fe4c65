"""Shared machinery for the stream models (Baire-style and binary).

Elements of K2, B and K2,01 are closed programs (run against the empty
oracle).  Application builds a new closed program by s-m-n, so application
itself costs nothing; definedness is observed later by evaluating points.

Two routes compute an application's value at a point:

* the closed program returned by :func:`apply_program` (machine route);
* :func:`tree_value` over an :class:`AppTree` (host route), which also
  records every query made to every leaf.  Probes use the host route for
  transcripts and for substituting finite partial functions for leaves.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence, Union

from . import machine as M
from .machine import (NULL, Budget, Halted, Program, assemble, code_of, evaluate)

ZERO = 9  # register that is never written, so it always reads 0


# ---------------------------------------------------------------------------
# closed elements

def table_program(values: Sequence[int], default: int = 0) -> Program:
    """x -> values[x] for x < len(values), else default."""
    lines = []
    for i, v in enumerate(values):
        lines += [("const", 1, i), ("jeq", 0, 1, f"v{i}")]
    lines += [("const", 0, default), ("halt", 0)]
    for i, v in enumerate(values):
        lines += [("label", f"v{i}"), ("const", 0, v), ("halt", 0)]
    return assemble(lines)


def constant_program(v: int) -> Program:
    return assemble([("const", 0, v), ("halt", 0)])


NOWHERE = assemble([("label", "top"), ("jump", "top")])
# the first short code, so a divergent index is small enough to build as a numeral
NOWHERE_CODE = M.CODES.register("nowhere", NOWHERE)


def undefined_from(values: Sequence[int], start: int) -> Program:
    """values[x] below ``start``, diverges from ``start`` on (values padded with 0)."""
    lines = [("const", 1, start), ("sub", 2, 1, 0), ("jeq", 2, ZERO, "loop")]
    for i, v in enumerate(values[:start]):
        lines += [("const", 1, i), ("jeq", 0, 1, f"v{i}")]
    lines += [("const", 0, 0), ("halt", 0)]
    for i, v in enumerate(values[:start]):
        lines += [("label", f"v{i}"), ("const", 0, v), ("halt", 0)]
    lines += [("label", "loop"), ("jump", "loop")]
    return assemble(lines)


def undefined_at(values: Sequence[int], points: Sequence[int], default: int = 0) -> Program:
    """Like table_program but diverging exactly at ``points``."""
    lines = []
    for p in points:
        lines += [("const", 1, p), ("jeq", 0, 1, "loop")]
    for i, v in enumerate(values):
        lines += [("const", 1, i), ("jeq", 0, 1, f"v{i}")]
    lines += [("const", 0, default), ("halt", 0)]
    for i, v in enumerate(values):
        lines += [("label", f"v{i}"), ("const", 0, v), ("halt", 0)]
    lines += [("label", "loop"), ("jump", "loop")]
    return assemble(lines)


def head_then(head: int, tail: Program) -> Program:
    """The stream head ⌢ tail: x=0 -> head, x>0 -> tail(x-1)."""
    return assemble([
        ("jeq", 0, ZERO, "head"),
        ("const", 1, 1),
        ("sub", 2, 0, 1),
        ("const", 3, code_of(tail)),
        ("calln", 0, 3, 2),
        ("halt", 0),
        ("label", "head"),
        ("const", 0, head),
        ("halt", 0),
    ])


def head_then_zeros(head: int) -> Program:
    return table_program([head], 0)


def ones_at(position: int, tail: Program | None = None) -> Program:
    """Binary stream 0^position 1 ⌢ tail (tail defaults to 0^ω)."""
    lines = [
        ("const", 1, position),
        ("jeq", 0, 1, "one"),
        ("sub", 2, 1, 0),
        ("jeq", 2, ZERO, "tail"),
        ("const", 0, 0),
        ("halt", 0),
        ("label", "one"),
        ("const", 0, 1),
        ("halt", 0),
        ("label", "tail"),
    ]
    if tail is None:
        lines += [("const", 0, 0), ("halt", 0)]
    else:
        lines += [
            ("inc", 1),
            ("sub", 2, 0, 1),
            ("const", 3, code_of(tail)),
            ("calln", 0, 3, 2),
            ("const", 4, 2),
            ("mod", 0, 0, 4),
            ("halt", 0),
        ]
    return assemble(lines)


# ---------------------------------------------------------------------------
# application programs

def _join_program(binary: bool) -> Program:
    # <f, <g, q>> -> f(q/2) or g((q-1)/2)
    tail = [("const", 7, 2), ("mod", 0, 0, 7)] if binary else []
    return assemble([
        ("unpair", 1, 2, 0),
        ("unpair", 2, 3, 2),
        ("const", 6, 2),
        ("mod", 4, 3, 6),
        ("div", 5, 3, 6),
        ("jeq", 4, ZERO, "even"),
        ("calln", 0, 2, 5),
        *tail,
        ("halt", 0),
        ("label", "even"),
        ("calln", 0, 1, 5),
        *tail,
        ("halt", 0),
    ])


JOIN = _join_program(binary=False)
JOIN01 = _join_program(binary=True)

# <f, <g, x>> -> phi(f(0))^(f⊕g)(x)
APP = assemble([
    ("unpair", 1, 2, 0),
    ("unpair", 2, 3, 2),
    ("calln", 5, 1, ZERO),
    ("const", 4, code_of(JOIN)),
    ("smn", 4, 4, 1),
    ("smn", 4, 4, 2),
    ("callt", 0, 5, 3, 4),
    ("halt", 0),
])

# <A, <B, x>> -> phi(e)^(A⊕B)(x) mod 2, e-1 the first position where A is odd
APP01 = assemble([
    ("unpair", 1, 2, 0),
    ("unpair", 2, 3, 2),
    ("const", 6, 2),
    ("const", 5, 0),
    ("label", "scan"),
    ("calln", 7, 1, 5),
    ("mod", 7, 7, 6),
    ("inc", 5),
    ("jeq", 7, ZERO, "scan"),
    ("const", 4, code_of(JOIN01)),
    ("smn", 4, 4, 1),
    ("smn", 4, 4, 2),
    ("callt", 0, 5, 3, 4),
    ("mod", 0, 0, 6),
    ("halt", 0),
])


def apply_program(f: Program, g: Program, binary: bool = False) -> Program:
    base = APP01 if binary else APP
    return M.smn(base, [code_of(f), code_of(g)])


# ---------------------------------------------------------------------------
# pointwise observation

def points(prog: Program, window: int, budget: Budget) -> list:
    return [evaluate(prog, x, NULL, budget) for x in range(window)]


def bits(prog: Program, window: int, budget: Budget) -> list:
    out = []
    for o in points(prog, window, budget):
        out.append(Halted(o.value % 2) if o.defined else o)
    return out


def first_failure(outcomes: Sequence) -> int | None:
    for x, o in enumerate(outcomes):
        if not o.defined:
            return x
    return None


def values_or_none(outcomes: Sequence) -> list:
    return [o.value if o.defined else None for o in outcomes]


def pointwise_equal(a: Sequence, b: Sequence) -> bool:
    """Partial-function equality at the window (undefined matches undefined)."""
    return values_or_none(a) == values_or_none(b)


def total_kleene_equal(a: Sequence, b: Sequence) -> bool:
    """Kleene equality for total-function models: both undefined, or equal."""
    fa, fb = first_failure(a), first_failure(b)
    if fa is not None or fb is not None:
        return fa is not None and fb is not None
    return values_or_none(a) == values_or_none(b)


# ---------------------------------------------------------------------------
# host route: application trees with query transcripts

@dataclass(frozen=True)
class Leaf:
    name: str
    source: Union[Program, Mapping[int, int]]

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Node:
    left: "AppTree"
    right: "AppTree"

    def __str__(self):
        return f"({self.left} {self.right})"


AppTree = Union[Leaf, Node]


def app(*parts: AppTree) -> AppTree:
    out = parts[0]
    for p in parts[1:]:
        out = Node(out, p)
    return out


@dataclass
class Transcript:
    """Queries made to leaves, in order: (leaf name, point, value or None)."""

    entries: list = field(default_factory=list)

    def uses(self, leaf: str) -> dict[int, int | None]:
        out: dict[int, int | None] = {}
        for name, q, v in self.entries:
            if name == leaf and q not in out:
                out[q] = v
        return out

    def lines(self) -> list[str]:
        return [f"query {name} {q} {'undef' if v is None else v}" for name, q, v in self.entries]


class _TreeOracle(M.Oracle):
    def __init__(self, tree, binary, log):
        self.tree = tree
        self.binary = binary
        self.log = log

    def ask(self, q, ctx):
        v = _value(self.tree, q, self.binary, ctx, self.log)
        return v % 2 if self.binary else v


def _value(tree, x, binary, ctx, log):
    if isinstance(tree, Leaf):
        src = tree.source
        if isinstance(src, Program):
            try:
                v = M._call(src, x, NULL, ctx)
            except M._Undefined:
                log.entries.append((tree.name, x, None))
                raise
            except M._Fuel:
                log.entries.append((tree.name, x, None))
                raise
        else:
            v = src.get(x)
            if v is None:
                log.entries.append((tree.name, x, None))
                raise M._Undefined(x)
        log.entries.append((tree.name, x, v))
        return v
    if binary:
        i = 0
        while _value(tree.left, i, binary, ctx, log) % 2 == 0:
            i += 1
        head = i + 1
    else:
        head = _value(tree.left, 0, binary, ctx, log)
    oracle = M.Join(_TreeOracle(tree.left, binary, log), _TreeOracle(tree.right, binary, log))
    v = M._call(M.phi(head), x, oracle, ctx)
    return v % 2 if binary else v


def tree_value(tree: AppTree, x: int, budget: Budget | int,
               binary: bool = False) -> tuple[M.EvalOutcome, Transcript]:
    """Evaluate an application tree at x, returning (outcome, transcript)."""
    steps = budget if isinstance(budget, int) else budget.steps
    ctx = M._Context(steps)
    log = Transcript()
    try:
        v = _value(tree, x, binary, ctx, log)
    except M._Fuel:
        return M.OutOfFuel(steps), log
    except M._Undefined as exc:
        return M.OracleUndefined(exc.query), log
    return Halted(v), log


def tree_program(tree: AppTree, binary: bool = False) -> Program:
    """Machine-route program for a tree whose leaves are programs."""
    if isinstance(tree, Leaf):
        if not isinstance(tree.source, Program):
            raise TypeError("table leaves have no closed program")
        return tree.source
    return apply_program(tree_program(tree.left, binary), tree_program(tree.right, binary), binary)


# ---------------------------------------------------------------------------
# relative programs: run against an oracle O the caller supplies

def _scan_lines(parity: int, out: int = 5) -> list:
    """Leave (position of the first odd O(2i+parity)) + 1 in register ``out``."""
    return [
        ("const", 6, 2),
        ("const", out, 0),
        ("label", f"scan{parity}"),
        ("mul", 7, out, 6),
        *([("inc", 7)] if parity else []),
        ("query", 7, 7),
        ("mod", 7, 7, 6),
        ("inc", out),
        ("jeq", 7, ZERO, f"scan{parity}"),
    ]


def reader(mult: int, offset: int, binary: bool = False, after_prefix: int | None = None,
           prefix_len: int | None = None) -> Program:
    """j -> O(mult*j + offset), or for binary streams past a 0^n 1 prefix,
    j -> O(2(n+1+mult*j+offset) + after_prefix) mod 2.

    n is ``prefix_len`` when the caller knows it, else found by scanning.
    """
    if after_prefix is not None and prefix_len is not None:
        lines = [
            ("const", 6, 2),
            ("const", 1, mult),
            ("mul", 1, 1, 0),
            ("const", 2, offset + prefix_len + 1),
            ("add", 1, 1, 2),
            ("mul", 1, 1, 6),
            *([("inc", 1)] if after_prefix else []),
            ("query", 0, 1),
        ]
    elif after_prefix is None:
        lines = [
            ("const", 1, mult),
            ("mul", 1, 1, 0),
            ("const", 2, offset),
            ("add", 1, 1, 2),
            ("query", 0, 1),
        ]
    else:
        lines = _scan_lines(after_prefix) + [
            ("const", 1, mult),
            ("mul", 1, 1, 0),
            ("const", 2, offset),
            ("add", 1, 1, 2),
            ("add", 1, 1, 5),
            ("mul", 1, 1, 6),
            *([("inc", 1)] if after_prefix else []),
            ("query", 0, 1),
        ]
    if binary:
        lines += [("const", 6, 2), ("mod", 0, 0, 6)]
    return assemble(lines + [("halt", 0)])


def joinrel(p: Program, q: Program) -> Program:
    """Relative join: q even -> p(q/2), odd -> q((q-1)/2), both on the current oracle."""
    return assemble([
        ("const", 6, 2),
        ("mod", 4, 0, 6),
        ("div", 5, 0, 6),
        ("jeq", 4, ZERO, "even"),
        ("const", 1, code_of(q)),
        ("call", 0, 1, 5),
        ("halt", 0),
        ("label", "even"),
        ("const", 1, code_of(p)),
        ("call", 0, 1, 5),
        ("halt", 0),
    ])


def apprel(p: Program, q: Program, binary: bool = False,
           force: Sequence[Program] = ()) -> Program:
    """Relative application y -> (P·Q)(y), P and Q relative programs.

    ``force`` lists programs that must converge at y before the result is
    produced.  Over any window the result is then undefined somewhere exactly
    when a forced argument or P·Q is, which is what totality needs.
    """
    lines = []
    for i, f in enumerate(force):
        lines += [("const", 10 + i, code_of(f)), ("call", 11 + len(force), 10 + i, 0)]
    lines += [("const", 1, code_of(p)), ("copy", 3, 0)]
    if binary:
        lines += [
            ("const", 6, 2),
            ("const", 5, 0),
            ("label", "scan"),
            ("call", 7, 1, 5),
            ("mod", 7, 7, 6),
            ("inc", 5),
            ("jeq", 7, ZERO, "scan"),
        ]
    else:
        lines += [("call", 5, 1, ZERO)]
    lines += [
        ("const", 4, code_of(joinrel(p, q))),
        ("callt", 0, 5, 3, 4),
    ]
    if binary:
        lines += [("const", 6, 2), ("mod", 0, 0, 6)]
    return assemble(lines + [("halt", 0)])


def headrel(head: int) -> Program:
    """x=0 -> head, x>0 -> O(2(x-1)+1): produces head ⌢ g from oracle f⊕g."""
    return assemble([
        ("jeq", 0, ZERO, "head"),
        ("const", 1, 1),
        ("sub", 2, 0, 1),
        ("const", 6, 2),
        ("mul", 2, 2, 6),
        ("inc", 2),
        ("query", 0, 2),
        ("halt", 0),
        ("label", "head"),
        ("const", 0, head),
        ("halt", 0),
    ])


def interleave(head: int) -> Program:
    """From oracle (c⌢f)⊕g produce head ⌢ (f⊕g)."""
    return assemble([
        ("jeq", 0, ZERO, "head"),
        ("const", 1, 1),
        ("sub", 2, 0, 1),
        ("const", 6, 2),
        ("mod", 4, 2, 6),
        ("jeq", 4, ZERO, "even"),
        ("query", 0, 2),
        ("halt", 0),
        ("label", "even"),
        ("add", 2, 2, 6),
        ("query", 0, 2),
        ("halt", 0),
        ("label", "head"),
        ("const", 0, head),
        ("halt", 0),
    ])


def prefix_one(position: int, tail: list) -> Program:
    """0^position 1 ⌢ (tail lines, which see j = m-position-1 in register 2)."""
    return assemble([
        ("const", 1, position),
        ("jeq", 0, 1, "one"),
        ("sub", 2, 1, 0),
        ("jeq", 2, ZERO, "tail"),
        ("const", 0, 0),
        ("halt", 0),
        ("label", "one"),
        ("const", 0, 1),
        ("halt", 0),
        ("label", "tail"),
        ("inc", 1),
        ("sub", 2, 0, 1),
        *tail,
    ])
