"""Probes that attack the claims of a candidate embedding.

Each probe follows the combinatorial core of a nonembedding argument: the
sigma probe looks for two elements whose images agree on the finite use of a
converging computation, the monotone probe exploits a failure of
monotonicity or the R gadget's substitution, and the decision probe turns a
non-monotone image pair into a decision procedure for a certified halting
set.  A probe returns a witness whose transcript replays exactly, or a
status saying how far it looked.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from types import MappingProxyType
from typing import Any, Callable, Mapping, Sequence

from . import graph as G
from . import streams as S
from .bmodel import BPca, constant, gadget_a, nowhere
from .embeddings import (TOT_UNIVERSE, EmbeddingCandidate, HomomorphismClash, JumpOracle,
                         RefutationWitness, _defined, _deriver, certify_halting, fmt,
                         make_witness)
from .k2 import K2Pca
from .machine import NULL, Budget, Halted, OracleUndefined, evaluate, pair
from .terms import Apply, Const, eval_term


# ---------------------------------------------------------------------------
# results and helpers

@dataclass(frozen=True)
class ProbeResult:
    """``status`` is "refuted", "exhausted", "undetermined" or "consistent"."""

    probe: str
    candidate: str
    status: str
    witness: RefutationWitness | None = None
    detail: str = ""

    def lines(self) -> list[str]:
        out = [f"probe {self.probe} candidate {self.candidate} status {self.status}"]
        if self.detail:
            out.append(f"detail {self.detail}")
        if self.witness is not None:
            out += self.witness.log_lines()
        return out

    def __str__(self):
        return f"{self.probe} on {self.candidate}: {self.status}" + (
            f" ({self.detail})" if self.detail else "")


def _program(x):
    return x.program if hasattr(x, "program") else x


def _point(target, elem, n: int, budget: Budget):
    """The target element's value at n, or None; graph targets answer membership."""
    if isinstance(elem, G.GSet):
        return 1 if n in elem.approx(budget.stage) else None
    o = evaluate(_program(elem), n, NULL, budget)
    if not o.defined:
        return None
    return o.value % 2 if getattr(target, "binary", False) else o.value


def _query_lines(log: S.Transcript) -> list[str]:
    return [f"query {name} {fmt(q)} {fmt(v)}" for name, q, v in log.entries]


def _is_program_target(target) -> bool:
    return isinstance(target, (K2Pca, BPca))


def _tree(F, parts: Sequence[tuple[str, Any]]):
    return S.app(*[S.Leaf(name, _program(F(x)) if F is not None else _program(x))
                   for name, x in parts])


@dataclass(frozen=True)
class Gadget:
    """The source gadget and the two values it takes: ``same`` when its two
    arguments agree and ``differ`` otherwise."""

    element: Any
    same: Any
    differ: Any
    argument: Callable[[Any], Any]
    name: str = "gadget"

    def __str__(self):
        return self.name

    def differs(self, source, f, g, budget: Budget):
        """A point where f and g are both defined and differ, or None."""
        if isinstance(source, G.GraphPca):
            diff = source.signature(f, budget) ^ source.signature(g, budget)
            return min(diff) if diff else None
        for x in range(budget.window):
            a, b = _point(source, f, x, budget), _point(source, g, x, budget)
            if a is not None and b is not None and a != b:
                return x
        return None


def gadget_for(source, bound: int = 8) -> Gadget:
    if isinstance(source, BPca):
        h = constant(1)
        return Gadget(gadget_a(nowhere(), h), nowhere(), h, lambda f: f, "a(u,h=1)")
    if isinstance(source, G.GraphPca):
        return c_gadget(frozenset([0]), frozenset([0, 1]), bound)
    raise TypeError(f"the collision gadgets live in B or the graph model, not {source.name}")


def c_gadget(a: frozenset, b: frozenset, bound: int) -> Gadget:
    return Gadget(G.gadget_C(a, b, bound), G.FiniteSet(a), G.FiniteSet(b),
                  lambda f: G.joined(f.below(bound, 8), bound), f"C({fmt(a)},{fmt(b)},{bound})")


def _distinguish(F, gadget: Gadget, budget: Budget):
    """Least n with F(same)(n) and F(differ)(n) defined and different."""
    tb = F.target_budget(budget)
    for n in range(tb.window):
        y0, y1 = _point(F.target, F(gadget.same), n, tb), _point(F.target, F(gadget.differ), n, tb)
        if y0 is not None and y1 is not None and y0 != y1:
            return n, y0, y1
    return None


def SigmaCollision(candidate, f, g, n, gadget, budget):
    return make_witness("SigmaCollision", candidate, f=f, g=g, n=n, gadget=gadget, budget=budget)


@_deriver("SigmaCollision")
def _derive_sigma(F, f, g, n, gadget, budget):
    """F(C)F(f')F(f') and F(C)F(f')F(g') make the same queries at n, yet the
    source products are the gadget's 'same' and 'differ' values."""
    tb = F.target_budget(budget)
    binary = getattr(F.target, "binary", False)
    fa, ga = gadget.argument(f), gadget.argument(g)
    x = gadget.differs(F.source, fa, ga, budget)
    y0 = _point(F.target, F(gadget.same), n, tb)
    y1 = _point(F.target, F(gadget.differ), n, tb)
    same_out, same_log = S.tree_value(_tree(F, [("C", gadget.element), ("f1", fa), ("f2", fa)]),
                                      n, tb, binary)
    uses = same_log.uses("f2")
    g_img = F(ga)
    agree = all(_point(F.target, g_img, q, tb) == v for q, v in sorted(uses.items()))
    diff_out, diff_log = S.tree_value(_tree(F, [("C", gadget.element), ("f1", fa), ("f2", ga)]),
                                      n, tb, binary)
    lines = [f"source f g differ at {fmt(x)}",
             f"F(same)({n}) -> {fmt(y0)}",
             f"F(differ)({n}) -> {fmt(y1)}",
             f"tree F(C) F(f) F(f) at {n} -> {fmt(same_out)}",
             *_query_lines(same_log),
             "sigma f2 " + " ".join(f"{q}:{fmt(v)}" for q, v in sorted(uses.items())),
             f"F(g) agrees on sigma -> {fmt(agree)}",
             f"tree F(C) F(f) F(g) at {n} -> {fmt(diff_out)}",
             *_query_lines(diff_log)]
    holds = (x is not None and y0 is not None and y1 is not None and y0 != y1
             and isinstance(same_out, Halted) and same_out.value == y0 and agree
             and isinstance(diff_out, Halted) and diff_out.value != y1)
    return lines, holds


def probe_sigma_collision(F: EmbeddingCandidate, pool: Sequence[Any],
                          budget: Budget = Budget(), bound: int = 8,
                          gadget: Gadget | None = None) -> ProbeResult:
    """Look for f ≠ g in the pool whose images agree on the use σ of the
    converging computation F(C)F(f)F(f) at a point separating F(same) from F(differ)."""
    gadget = gadget or gadget_for(F.source, bound)
    tb = F.target_budget(budget)
    binary = getattr(F.target, "binary", False)
    if not _is_program_target(F.target):
        return ProbeResult("sigma", F.name, "undetermined", detail="target has no query transcripts")
    found = _distinguish(F, gadget, budget)
    if found is None:
        return ProbeResult("sigma", F.name, "undetermined",
                           detail=f"no converging distinguishing point below {tb.window}")
    n, y0, y1 = found
    uses = []
    for f in pool:
        fa = gadget.argument(f)
        out, log = S.tree_value(_tree(F, [("C", gadget.element), ("f1", fa), ("f2", fa)]), n, tb, binary)
        uses.append((f, out, log.uses("f2")))
    for f, out, sigma_f in uses:
        if not (isinstance(out, Halted) and out.value == y0):
            continue
        for g in pool:
            if g is f or gadget.differs(F.source, gadget.argument(f), gadget.argument(g), budget) is None:
                continue
            g_img = F(gadget.argument(g))
            if all(_point(F.target, g_img, q, tb) == v for q, v in sigma_f.items()):
                return ProbeResult("sigma", F.name, "refuted",
                                   SigmaCollision(F, f, g, n, gadget, budget))
    return ProbeResult("sigma", F.name, "exhausted", detail=f"pool size {len(pool)}")


def _subset_pairs(bound: int):
    """All A ⊊ B ⊆ {0..bound-1}, smaller sets first."""
    sets = [frozenset(c) for r in range(bound + 1) for c in itertools.combinations(range(bound), r)]
    for b in sets:
        for a in sets:
            if a < b:
                yield a, b


def MonotonicityExploit(candidate, phase, budget, **args):
    return make_witness("MonotonicityExploit", candidate, phase=phase, budget=budget, **args)


@_deriver("MonotonicityExploit")
def _derive_monotone(F, phase, budget, **args):
    tb = F.target_budget(budget)
    if phase == 1:
        a, b, n, closing = args["A"], args["B"], args["n"], args["closing"]
        ya = _point(F.target, F(G.FiniteSet(a)), n, tb)
        yb = _point(F.target, F(G.FiniteSet(b)), n, tb)
        lines = [f"A {fmt(a)} subset of B {fmt(b)} -> {fmt(a <= b)}",
                 f"F(A)({n}) -> {fmt(ya)}", f"F(B)({n}) -> {fmt(yb)}",
                 f"closing {closing.kind}", *closing.transcript]
        holds = a <= b and ya is not None and ya != yb and closing.replay()
        return lines, holds
    # phase 2: the R gadget with X = ∅ and Y = {0}
    n = args["n"]
    R, X, Y = G.gadget_R(), G.EMPTY, G.FiniteSet([0])
    full = _point(F.target, F(G.FiniteSet([0, 1])), n, tb)
    part = _point(F.target, F(G.FiniteSet([0])), n, tb)
    tree = [("R", R), ("X1", X), ("X2", X)]
    out, log = S.tree_value(_tree(F, tree), n, tb)
    lines = [f"F({{0,1}})({n}) -> {fmt(full)}", f"F({{0}})({n}) -> {fmt(part)}",
             f"tree F(R) F(X) F(X) at {n} -> {fmt(out)}", *_query_lines(log)]
    if not isinstance(out, OracleUndefined):
        return lines, False
    failed = log.entries[-1][0]
    free = "X1" if failed == "X2" else "X2"
    clean = all(v is not None for name, _, v in log.entries if name == free)
    swapped = [(name, Y if name == free else x) for name, x in tree]
    out2, log2 = S.tree_value(_tree(F, swapped), n, tb)
    lines += [f"first undefined query in {failed}; {free} never queried where undefined -> {fmt(clean)}",
              f"tree F(R) with F(Y) for {free} at {n} -> {fmt(out2)}", *_query_lines(log2)]
    holds = full is not None and part is None and clean and not out2.defined
    return lines, holds


def probe_monotone_split(F: EmbeddingCandidate, bound: int = 3, budget: Budget = Budget(),
                         pool_bound: int = 4) -> ProbeResult:
    """Phase 1 hunts for A ⊆ B with F(A)(n)↓ ≠ F(B)(n) and closes it with the C
    gadget; phase 2 runs the R-gadget substitution argument."""
    if not isinstance(F.source, G.GraphPca):
        raise TypeError("the monotone split probe needs the graph model as source")
    tb = F.target_budget(budget)
    for a, b in _subset_pairs(bound):
        fa, fb = F(G.FiniteSet(a)), F(G.FiniteSet(b))
        for n in range(tb.window):
            ya = _point(F.target, fa, n, tb)
            if ya is None or ya == _point(F.target, fb, n, tb):
                continue
            closing = _close_with_C(F, a, b, budget, pool_bound)
            if closing is not None:
                return ProbeResult("monotone", F.name, "refuted",
                                   MonotonicityExploit(F, 1, budget, A=a, B=b, n=n, closing=closing))
            break
    if bound < 2 or not _is_program_target(F.target):
        return ProbeResult("monotone", F.name, "undetermined",
                           detail=f"no violation closed below bound {bound}")
    full, part = F(G.FiniteSet([0, 1])), F(G.FiniteSet([0]))
    for n in range(tb.window):
        if _point(F.target, full, n, tb) is None or _point(F.target, part, n, tb) is not None:
            continue
        lines, holds = _derive_monotone(F, 2, budget, n=n)
        if holds:
            return ProbeResult("monotone", F.name, "refuted",
                               MonotonicityExploit(F, 2, budget, n=n))
    return ProbeResult("monotone", F.name, "undetermined", detail=f"bound {bound}, window {tb.window}")


def _close_with_C(F, a, b, budget, pool_bound):
    """Turn a monotonicity failure into a clash through C·(X⊕X̄)·(Y⊕Ȳ)."""
    C = G.gadget_C(a, b, pool_bound)
    tb = F.target_budget(budget)
    pool = [G.joined(frozenset(s), pool_bound)
            for r in range(pool_bound + 1) for s in itertools.combinations(range(pool_bound), r)]
    for x in pool:
        cx = C.apply(x)
        for left, right in ((C, x), *((cx, y) for y in pool)):
            fab = F.target.apply(F(left), F(right), tb)
            if not _defined(fab):
                return HomomorphismClash(F, left, right, budget, tb, "target-undefined")
            if not F.target.equal(fab, F(F.source.apply(left, right, budget)), tb):
                return HomomorphismClash(F, left, right, budget, tb, "unequal")
    sets = [G.FiniteSet(c) for r in range(pool_bound + 1)
            for c in itertools.combinations(range(pool_bound), r)]
    return probe_sigma_collision(F, sets, budget, pool_bound, c_gadget(a, b, pool_bound)).witness


# ---------------------------------------------------------------------------
# the decision leak

D_CONST = Const("D")


class HaltingSplit(G.StageSet):
    """D with D·v_n = W_d(n): A while Φ_n(0) has not halted, B once it has.

    The catalog J only names ten sets, so D joins the generators and a
    candidate must supply its image.
    """

    def __init__(self, a: frozenset, b: frozenset, codes: Sequence[int], steps_per_stage: int = 64):
        self.a, self.b, self.codes = frozenset(a), frozenset(b), tuple(codes)
        self.steps_per_stage = steps_per_stage
        super().__init__(self._axioms, f"D({fmt(self.a)},{fmt(self.b)})")

    def halts_by(self, n: int, stage: int) -> bool:
        return evaluate(n, 0, NULL, max(1, stage * self.steps_per_stage)).defined

    def _axioms(self, stage: int):
        for n in self.codes:
            premise = G.finite_set_encode(G.independence_witness(n))
            out = self.b if self.halts_by(n, stage) else self.a
            for m in out:
                yield pair(m, premise)


def halting_jump(codes: Sequence[int], limit: int = 100_000) -> JumpOracle:
    """n -> [Φ_n(0) halts] for the given codes, each certified."""
    entries = {}
    for n in codes:
        cert = certify_halting(n, 0, NULL, limit)
        if cert is None:
            raise RuntimeError(f"no halting certificate for {n}")
        entries[n] = cert
    return JumpOracle(entries, "halting")


HALTING_CODES = (0, S.NOWHERE_CODE, TOT_UNIVERSE["2x"], TOT_UNIVERSE["seven"],
                 TOT_UNIVERSE["diverge-at-3"], TOT_UNIVERSE["diverge-at-0"],
                 TOT_UNIVERSE["diverge-from-5"])


def _image_env(F: EmbeddingCandidate) -> dict:
    if F.images is None:
        raise ValueError(f"candidate {F.name} gives no generator images")
    return dict(F.images)


def _term_image(F, term, budget, env):
    return eval_term(term, F.target, budget, env)


def _leak_budget(F, budget):
    tb = F.target_budget(budget)
    if isinstance(F.target, G.GraphPca):
        tb = tb.with_(stage=max(tb.stage, G.WITNESS_STAGE))
    return tb


def _non_monotone_catalog(F, budget):
    """Catalog sets W_i ⊊ W_j and a point x0 with F(W_i)(x0) = y ≠ F(W_j)(x0)."""
    env = _image_env(F)
    tb = _leak_budget(F, budget)
    images = [_term_image(F, G.term_for_W(i), tb, env) for i in range(len(G.W_CATALOG))]
    for j, (_, wj) in enumerate(G.W_CATALOG):
        for i, (_, wi) in enumerate(G.W_CATALOG):
            if not wi < wj or not _defined(images[i]) or not _defined(images[j]):
                continue
            for x0 in range(tb.window):
                y = _point(F.target, images[i], x0, tb)
                if y is not None and y != _point(F.target, images[j], x0, tb):
                    return i, j, x0, y
    return None


def _dual_search(F, n, split, x0, y, budget, max_stage):
    """Stage by stage: does Φ_n(0) halt, or does F(D·v_n)(x0) come out as y?"""
    env = _image_env(F)
    env["D"] = F(split)
    term = Apply(D_CONST, G.numeral_term(n))
    lines = []
    for stage in range(max_stage):
        steps = 64 << stage
        if evaluate(n, 0, NULL, steps).defined:
            lines.append(f"stage {stage} halting-branch steps={steps} -> halted")
            return "n in H", lines
        tb = _leak_budget(F, budget).with_(steps=steps * 16)
        image = _term_image(F, term, tb, env)
        v = _point(F.target, image, x0, tb) if _defined(image) else None
        lines.append(f"stage {stage} halting-branch steps={steps} -> running; "
                     f"F(D v_{n})({x0}) -> {fmt(v)}")
        if v == y:
            return "F(W_d(n))(x0)=y", lines
    return "timeout", lines


def DecisionLeak(candidate, n, split, x0, y, jump, budget, max_stage):
    return make_witness("DecisionLeak", candidate, n=n, split=split, x0=x0, y=y, jump=jump,
                        budget=budget, max_stage=max_stage)


@_deriver("DecisionLeak")
def _derive_leak(F, n, split, x0, y, jump, budget, max_stage):
    branch, lines = _dual_search(F, n, split, x0, y, budget, max_stage)
    truth = jump.answer(n)
    cert = jump.certificate(n)
    ok = cert.verify()
    lines += [f"decision {branch}", f"certificate {cert} -> {fmt(ok)}"]
    decided = {"n in H": 1, "F(W_d(n))(x0)=y": 0}.get(branch)
    return lines, ok and decided is not None and decided == truth


@dataclass(frozen=True)
class DecisionReport:
    result: ProbeResult
    decisions: Mapping[int, str]
    witnesses: tuple
    correct: bool

    def lines(self) -> list[str]:
        out = self.result.lines()
        out += [f"decide {n} {d}" for n, d in sorted(self.decisions.items())]
        return out


def probe_decision_leak(F: EmbeddingCandidate, jump: JumpOracle | None = None,
                        budget: Budget = Budget(), max_stage: int = 10) -> DecisionReport:
    """Use a non-monotone pair of catalog images to decide the mock halting set.

    Every code in the jump is decided by the dual search; the report says
    whether the decisions match the certified answers.
    """
    if not isinstance(F.source, G.GraphPca):
        raise TypeError("the decision leak probe needs the graph model as source")
    jump = halting_jump(HALTING_CODES) if jump is None else jump
    found = _non_monotone_catalog(F, budget)
    if found is None:
        return DecisionReport(ProbeResult("decision", F.name, "consistent",
                                          detail="no non-monotone catalog pair"), {}, (), True)
    i, j, x0, y = found
    split = HaltingSplit(G.W_CATALOG[i][1], G.W_CATALOG[j][1], sorted(jump.entries))
    decisions, witnesses, correct = {}, [], True
    for n in sorted(jump.entries):
        branch, _ = _dual_search(F, n, split, x0, y, budget, max_stage)
        decisions[n] = branch
        if branch == "timeout":
            correct = False
            continue
        decided = 1 if branch == "n in H" else 0
        if decided != jump.answer(n):
            correct = False
            continue
        witnesses.append(DecisionLeak(F, n, split, x0, y, jump, budget, max_stage))
    leak = [w for w in witnesses if decisions[w.args["n"]] != "n in H"]
    status = "refuted" if correct and leak else "undetermined"
    detail = f"A={G.W_CATALOG[i][0]} B={G.W_CATALOG[j][0]} x0={x0} y={y}"
    result = ProbeResult("decision", F.name, status, leak[0] if status == "refuted" else None, detail)
    return DecisionReport(result, MappingProxyType(decisions), tuple(witnesses), correct)
