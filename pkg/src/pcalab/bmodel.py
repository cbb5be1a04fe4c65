"""The partial-function model: f·g = Φ_{f(0)}^{f⊕g} for partial f and g.

Application always succeeds and returns a program.  A computation that
queries an undefined point of f or g diverges, so partiality only shows up
when the resulting element is evaluated.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Mapping

from . import streams as S
from .k2 import K2_CATALOG, K2_K1, _FH, _GH
from .machine import (CODES, NULL, Budget, Halted, OracleUndefined, OutOfFuel, Program,
                      assemble, evaluate, show_index)
from .streams import ZERO, apprel, headrel, interleave
from .terms import Apply, Const, Term, church, eval_term

# (c ⌢ (f⊕g)) ⊕ h -> fh(gh), with no forcing: partial results are fine here
B_S0 = CODES.register("b.s.0", apprel(_FH, _GH))
B_S1 = CODES.register("b.s.1", interleave(B_S0))
B_S2 = CODES.register("b.s.2", headrel(B_S1))

# (a0 ⌢ (h⊕f)) ⊕ g -> h(x) once some n has f(n) != g(n)
GADGET_A0 = CODES.register("b.a.0", assemble([
    ("const", 1, 0),
    ("const", 6, 4),
    ("const", 7, 2),
    ("label", "search"),
    ("mul", 2, 1, 6),
    ("add", 2, 2, 6),
    ("query", 3, 2),
    ("mul", 2, 1, 7),
    ("inc", 2),
    ("query", 4, 2),
    ("inc", 1),
    ("jeq", 3, 4, "search"),
    ("mul", 2, 0, 6),
    ("add", 2, 2, 7),
    ("query", 0, 2),
    ("halt", 0),
]))
GADGET_A1 = CODES.register("b.a.1", interleave(GADGET_A0))

# j ⊕ h -> Φ_{h(0)}
J1 = CODES.register("b.j.1", assemble([
    ("const", 1, 1),
    ("query", 2, 1),
    ("calln", 0, 2, 0),
    ("halt", 0),
]))

SIGMA_HEAD = K2_CATALOG["succ"]
U = S.NOWHERE
U_CODE = S.NOWHERE_CODE


@dataclass(frozen=True)
class BElement:
    program: Program

    defined = True

    def outcomes(self, window: int, budget: Budget = Budget()) -> list:
        return S.points(self.program, window, budget)

    def values(self, window: int, budget: Budget = Budget()) -> list:
        return S.values_or_none(self.outcomes(window, budget))

    def __str__(self):
        table = " ".join("." if v is None else str(v) for v in self.values(8))
        return f"[{table} ...] index={show_index(self.program.index)}"


def b_apply(f: BElement, g: BElement, budget: Budget | None = None) -> BElement:
    return BElement(S.apply_program(f.program, g.program))


def b_k() -> BElement:
    return BElement(S.head_then_zeros(K2_K1))


def b_s() -> BElement:
    return BElement(S.head_then_zeros(B_S2))


def nowhere() -> BElement:
    return BElement(U)


def from_table(values: Mapping[int, int], default: int | None = None) -> BElement:
    """The partial function given by ``values``; undefined elsewhere unless a default is set.

    Undefined points query the empty oracle, so they diverge at once and are
    reported as certified-undefined rather than running out of fuel.
    """
    top = max(values, default=-1) + 1
    lines = []
    if default is None:
        lines += [("const", 1, top), ("sub", 2, 1, 0), ("jeq", 2, ZERO, "hole")]
    for x in range(top):
        lines += [("const", 1, x), ("jeq", 0, 1, f"v{x}" if x in values else "hole")]
    lines += [("const", 0, default or 0), ("halt", 0)]
    for x, v in sorted(values.items()):
        lines += [("label", f"v{x}"), ("const", 0, v), ("halt", 0)]
    lines += [("label", "hole"), ("query", 0, 0), ("halt", 0)]
    return BElement(assemble(lines))


def constant(v: int) -> BElement:
    return BElement(S.constant_program(v))


def gadget_a(u: BElement, h: BElement) -> BElement:
    """a with a·f·g = h if f and g differ somewhere, and a·f·g = u if they agree.

    ``u`` must be the nowhere-defined element: when no disagreement exists the
    search simply never stops.
    """
    if u.program != U:
        raise ValueError("gadget_a realizes u as the self-looping program only")
    return BElement(S.head_then(GADGET_A1, h.program))


def b_generator_j() -> BElement:
    return BElement(S.head_then_zeros(J1))


def sigma() -> BElement:
    """x -> g(x) + 1 after application to g."""
    return BElement(S.head_then_zeros(SIGMA_HEAD))


def zeta() -> BElement:
    return constant(0)


SIGMA = Const("sigma")
ZETA = Const("zeta")


def church_h_term(n: int) -> Term:
    """n̄ σ ζ, with n̄ the Church numeral over {k, s}."""
    return Apply(Apply(church(n), SIGMA), ZETA)


def church_h(n: int, budget: Budget = Budget()) -> BElement:
    """The constant-n function, obtained by evaluating n̄ σ ζ in the model."""
    return eval_term(church_h_term(n), BPca(), budget, {"sigma": sigma(), "zeta": zeta()})


# ---------------------------------------------------------------------------
# finite segments

@dataclass(frozen=True)
class FinitePartialFn:
    """A finite map plus a record of which points inside ``window`` are
    certified undefined and which were merely not settled by the budget."""

    values: Mapping[int, int]
    window: int
    undefined: frozenset = frozenset()
    undetermined: frozenset = frozenset()

    def __call__(self, n: int) -> int | None:
        return self.values.get(n)

    def defined_at(self, n: int) -> bool:
        return n in self.values

    def extends_to(self, f: BElement, budget: Budget) -> bool | None:
        """σ ⊑ f: values agree and certified-undefined points stay undefined.

        None means some point could not be settled at this budget.
        """
        unsure = False
        for n in range(self.window):
            o = evaluate(f.program, n, NULL, budget)
            if n in self.values:
                if not o.defined:
                    if isinstance(o, OutOfFuel):
                        unsure = True
                        continue
                    return False
                if o.value != self.values[n]:
                    return False
            elif n in self.undefined and o.defined:
                return False
        return None if unsure else True

    def as_dict(self) -> dict[int, int]:
        return dict(self.values)

    def __str__(self):
        cells = []
        for n in range(self.window):
            if n in self.values:
                cells.append(f"{n}:{self.values[n]}")
            elif n in self.undefined:
                cells.append(f"{n}:undef")
            else:
                cells.append(f"{n}:?")
        return "{" + " ".join(cells) + "}"


def segment_of(f: BElement | Program, w: int, budget: Budget = Budget()) -> FinitePartialFn:
    prog = f.program if isinstance(f, BElement) else f
    values, undefined, undetermined = {}, set(), set()
    for n in range(w):
        o = evaluate(prog, n, NULL, budget)
        if isinstance(o, Halted):
            values[n] = o.value
        elif isinstance(o, OracleUndefined):
            undefined.add(n)
        else:
            undetermined.add(n)
    return FinitePartialFn(values, w, frozenset(undefined), frozenset(undetermined))


# ---------------------------------------------------------------------------

class BPca:
    name = "B"

    def __init__(self):
        self.k = b_k()
        self.s = b_s()

    def apply(self, a: BElement, b: BElement, budget: Budget = Budget()) -> BElement:
        return b_apply(a, b)

    def signature(self, a: BElement, budget: Budget = Budget()) -> tuple:
        return tuple(a.values(budget.window, budget))

    def equal(self, a: BElement, b: BElement, budget: Budget = Budget()):
        """Equal at the window: same values, undefined (by any route) matches undefined."""
        return S.pointwise_equal(a.outcomes(budget.window, budget), b.outcomes(budget.window, budget))


def b_pca() -> BPca:
    return BPca()


def random_b(rng: random.Random, tail: int = 10, hole_rate: float = 0.2) -> BElement:
    """A table element with a catalog head and random holes in the tail."""
    name = rng.choice(sorted(K2_CATALOG))
    values = {0: K2_CATALOG[name]}
    for x in range(1, tail + 1):
        if rng.random() >= hole_rate:
            values[x] = rng.randrange(6)
    return from_table(values, default=None if rng.random() < 0.5 else rng.randrange(6))
