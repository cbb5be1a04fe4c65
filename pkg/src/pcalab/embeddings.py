"""Weak embeddings: candidates, the constructed embeddings, and refutation probes.

A candidate is a map on element representations together with the claims it
makes.  The probes attack those claims and return a witness whose transcript
can be recomputed from scratch; nothing here proves that an embedding exists
or that none does.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass
from types import MappingProxyType
from typing import Any, Callable, Mapping, Sequence

from . import graph as G
from . import streams as S
from .bmodel import BElement, BPca, U_CODE, b_k, b_s, constant, nowhere, random_b, sigma
from .k1 import SUCC, K1Element, K1Pca, k1_generator
from .k2 import (K2_CATALOG, K2_GAP3, K2Element, K2Pca, K201Element, K201Pca, Certified,
                 certified, graph_encode, k2_apply, k2_k, k2_s, random_k2, random_k201)
from .machine import (CODES, NULL, Budget, Halted, Oracle, OracleUndefined, OutOfFuel, Program,
                      ProgramOracle,
                      assemble, code_of, decimal, detect_cycle, evaluate, fixpoint, pair, phi,
                      steps_used, transformer)
from .streams import ZERO

CLAIMS = frozenset({"injective", "homomorphic", "preserves-undefined", "monotone"})


def _same(budget: Budget) -> Budget:
    return budget


@dataclass(frozen=True, eq=False)
class EmbeddingCandidate:
    """A map between two pcas plus the claims the probes should attack.

    ``sampler`` draws source elements; ``undefined_sampler`` draws source
    pairs whose product is meant to be undefined.  ``target_budget`` lets a
    map that encodes elements ask for a larger target window or fuel.
    ``images`` holds generator images when the map is given that way.
    """

    name: str
    source: Any
    target: Any
    map: Callable[[Any], Any]
    claims: frozenset = frozenset({"injective", "homomorphic"})
    sampler: Callable[[random.Random], Any] | None = None
    undefined_sampler: Callable[[random.Random], tuple] | None = None
    target_budget: Callable[[Budget], Budget] = _same
    images: Mapping[str, Any] | None = None

    def __post_init__(self):
        unknown = set(self.claims) - CLAIMS
        if unknown:
            raise ValueError(f"unknown claims: {sorted(unknown)}")

    def __call__(self, a):
        return self.map(a)


# ---------------------------------------------------------------------------
# formatting for transcripts

def _num(n: int) -> str:
    if -10**40 < n < 10**40:
        return str(n)
    digest = hashlib.sha256(decimal(n).encode()).hexdigest()[:16]
    return f"#{digest}/{len(decimal(n))}d"


def fmt(x) -> str:
    """A canonical one-line rendering used in witness transcripts."""
    if x is None:
        return "undef"
    if isinstance(x, bool):
        return "yes" if x else "no"
    if isinstance(x, int):
        return _num(x)
    if isinstance(x, Program):
        return "prog" + _num(x.index)
    if isinstance(x, (K2Element, BElement)):
        return type(x).__name__ + ":" + fmt(x.program)
    if isinstance(x, K1Element):
        return "K1:" + _num(x.index)
    if isinstance(x, G.FiniteSet):
        return "{" + ",".join(_num(n) for n in sorted(x.items)) + "}"
    if isinstance(x, (frozenset, set)):
        return "{" + ",".join(fmt(n) for n in sorted(x)) + "}"
    if isinstance(x, (tuple, list)):
        return "[" + ",".join(fmt(v) for v in x) + "]"
    if isinstance(x, Halted):
        return f"halt {_num(x.value)}"
    if isinstance(x, OutOfFuel):
        return f"out-of-fuel {x.steps}"
    if isinstance(x, OracleUndefined):
        return f"oracle-undefined {_num(x.query)}"
    if isinstance(x, Budget):
        return f"steps={x.steps},window={x.window},stage={x.stage}"
    if isinstance(x, str):
        return x
    if getattr(x, "defined", True) is False:
        return "undefined:" + type(x).__name__
    text = str(x)
    if " at 0x" in text:
        raise TypeError(f"no canonical rendering for {type(x).__name__}")
    return type(x).__name__ + ":" + text


# ---------------------------------------------------------------------------
# witnesses

_DERIVE: dict[str, Callable] = {}


def _deriver(kind: str):
    def register(fn):
        _DERIVE[kind] = fn
        return fn
    return register


@dataclass(frozen=True, eq=False)
class RefutationWitness:
    """An immutable record of a contradiction found against ``candidate``.

    ``transcript`` is the line log of every evaluation the contradiction
    rests on.  :meth:`replay` recomputes it from ``args`` and checks that the
    lines are identical and still contradict the candidate's claims.
    """

    kind: str
    candidate: EmbeddingCandidate
    args: Mapping[str, Any]
    transcript: tuple[str, ...]

    def replay(self) -> bool:
        lines, holds = _DERIVE[self.kind](self.candidate, **self.args)
        return holds and tuple(lines) == self.transcript

    def log_lines(self) -> list[str]:
        head = [f"witness {self.kind}", f"candidate {self.candidate.name}"]
        head += [f"arg {k} {fmt(v)}" for k, v in sorted(self.args.items())]
        return head + [f"step {i} {line}" for i, line in enumerate(self.transcript)]

    def log(self) -> str:
        return "\n".join(self.log_lines()) + "\n"

    def __str__(self):
        return f"{self.kind} against {self.candidate.name}"


def make_witness(kind: str, candidate: EmbeddingCandidate, **args) -> RefutationWitness:
    lines, holds = _DERIVE[kind](candidate, **args)
    if not holds:
        raise AssertionError(f"{kind} does not contradict {candidate.name}")
    return RefutationWitness(kind, candidate, MappingProxyType(dict(args)), tuple(lines))


def InjectivityClash(candidate, a, b, budget, target_budget):
    return make_witness("InjectivityClash", candidate, a=a, b=b, budget=budget,
                        target_budget=target_budget)


def HomomorphismClash(candidate, a, b, budget, target_budget, mode):
    return make_witness("HomomorphismClash", candidate, a=a, b=b, budget=budget,
                        target_budget=target_budget, mode=mode)


@_deriver("InjectivityClash")
def _derive_injectivity(F, a, b, budget, target_budget):
    sa, sb = F.source.signature(a, budget), F.source.signature(b, budget)
    ta, tb = F.target.signature(F(a), target_budget), F.target.signature(F(b), target_budget)
    lines = [
        f"source-signature a {fmt(budget)} -> {fmt(sa)}",
        f"source-signature b {fmt(budget)} -> {fmt(sb)}",
        f"target-signature F(a) {fmt(target_budget)} -> {fmt(ta)}",
        f"target-signature F(b) {fmt(target_budget)} -> {fmt(tb)}",
    ]
    return lines, sa != sb and ta == tb


def _outcome_line(label: str, r) -> str:
    return f"{label} -> {'defined' if getattr(r, 'defined', True) else fmt(r)}"


@_deriver("HomomorphismClash")
def _derive_homomorphism(F, a, b, budget, target_budget, mode):
    ab = F.source.apply(a, b, budget)
    source_defined = getattr(ab, "defined", True)
    fa_fb = F.target.apply(F(a), F(b), target_budget)
    target_defined = getattr(fa_fb, "defined", True)
    lines = [_outcome_line(f"source-apply a b {fmt(budget)}", ab),
             _outcome_line(f"target-apply F(a) F(b) {fmt(target_budget)}", fa_fb)]
    if mode == "undefined-lost":
        # preserves-undefined: ab undefined but F(a)F(b) defined
        return lines, not source_defined and target_defined
    if not source_defined:
        return lines, False
    if not target_defined:
        return lines, mode == "target-undefined"
    left = F.target.signature(fa_fb, target_budget)
    right = F.target.signature(F(ab), target_budget)
    lines += [f"target-signature F(a)F(b) -> {fmt(left)}",
              f"target-signature F(ab) -> {fmt(right)}"]
    return lines, mode == "unequal" and left != right


# ---------------------------------------------------------------------------
# check_embedding

@dataclass(frozen=True)
class EmbeddingReport:
    candidate: str
    status: str          # "consistent" or "refuted"
    pairs: int
    undefined_pairs: int
    witness: RefutationWitness | None = None
    engineered: int = 0

    def __str__(self):
        if self.witness is not None:
            return f"{self.candidate}: refuted by {self.witness.kind}"
        return (f"{self.candidate}: consistent at sample size {self.pairs} "
                f"({self.undefined_pairs} undefined pairs)")


def _defined(r) -> bool:
    return getattr(r, "defined", True) is not False


def check_embedding(F: EmbeddingCandidate, samples: int = 100, budget: Budget = Budget(),
                    seed: int = 0, widen: int = 64) -> EmbeddingReport:
    """Sample pairs and test the claims of F; the first witness found is returned.

    When preserves-undefined is claimed and F has an undefined sampler, one
    pair in ten is drawn from it.  Injectivity clashes are only reported after
    the target window has been widened up to ``widen`` times without the two
    images coming apart.
    """
    if F.sampler is None:
        raise ValueError(f"candidate {F.name} has no sampler")
    rng = random.Random(seed)
    tb = F.target_budget(budget)
    claims = F.claims
    engineered = samples // 10 if ("preserves-undefined" in claims and F.undefined_sampler) else 0
    seen: list[Any] = []
    n_undefined = 0

    def report(witness=None):
        return EmbeddingReport(F.name, "refuted" if witness else "consistent",
                               samples, n_undefined, witness, engineered)

    for i in range(samples):
        if i < engineered:
            a, b = F.undefined_sampler(rng)
        else:
            a, b = F.sampler(rng), F.sampler(rng)
        seen += [a, b]
        ab = F.source.apply(a, b, budget)
        target = F.target.apply(F(a), F(b), tb)
        if not _defined(ab):
            n_undefined += 1
            if "preserves-undefined" in claims and _defined(target):
                return report(HomomorphismClash(F, a, b, budget, tb, "undefined-lost"))
            continue
        if "homomorphic" not in claims:
            continue
        if not _defined(target):
            return report(HomomorphismClash(F, a, b, budget, tb, "target-undefined"))
        if not F.target.equal(target, F(ab), tb):
            return report(HomomorphismClash(F, a, b, budget, tb, "unequal"))
        seen.append(ab)

    if "injective" in claims:
        w = _injectivity(F, seen, budget, tb, widen)
        if w is not None:
            return report(w)
    return report()


def _injectivity(F, elements, budget, tb, widen):
    by_source: dict[Any, Any] = {}
    for x in elements:
        by_source.setdefault(F.source.signature(x, budget), x)
    groups: dict[Any, list] = {}
    for sig, x in by_source.items():
        groups.setdefault(F.target.signature(F(x), tb), []).append(x)
    for members in groups.values():
        if len(members) < 2:
            continue
        a, b = members[0], members[1]
        wide = tb
        while wide.window < tb.window * widen:
            wide = wide.with_(window=wide.window * 2)
            if F.target.signature(F(a), wide) != F.target.signature(F(b), wide):
                break
        else:
            return InjectivityClash(F, a, b, budget, wide)
    return None


# ---------------------------------------------------------------------------
# samplers and identity embeddings

def sample_k2(rng: random.Random) -> K2Element:
    r = rng.random()
    k, s = k2_k(), k2_s()
    if r < 0.7:
        return random_k2(rng)
    if r < 0.8:
        return rng.choice([k, s])
    a = random_k2(rng)
    first = k2_apply(rng.choice([k, s]), a)
    if r < 0.9 or not _defined(first):
        return first if _defined(first) else a
    out = k2_apply(first, random_k2(rng))
    return out if _defined(out) else a


def sample_k201(rng: random.Random) -> K201Element:
    pca = K201Pca()
    r = rng.random()
    if r < 0.8:
        return random_k201(rng)
    return rng.choice([pca.k, pca.s])


def sample_b(rng: random.Random) -> BElement:
    r = rng.random()
    if r < 0.7:
        return random_b(rng)
    return rng.choice([b_k(), b_s(), nowhere(), sigma(), constant(rng.randrange(4))])


_K1_POOL: list[K1Element] = []


def sample_k1(rng: random.Random) -> K1Element:
    if not _K1_POOL:
        pca = K1Pca()
        _K1_POOL.extend([pca.k, pca.s, K1Element(SUCC), K1Element(0), k1_generator()])
        _K1_POOL.extend(K1Element(code_of(S.constant_program(v))) for v in range(3))
    r = rng.random()
    if r < 0.3:
        return K1Element(rng.randrange(64))
    if r < 0.8:
        return rng.choice(_K1_POOL)
    pca = K1Pca()
    out = pca.apply(rng.choice([pca.k, pca.s]), rng.choice(_K1_POOL))
    return out if _defined(out) else K1Element(0)


def sample_graph(rng: random.Random) -> G.GSet:
    r = rng.random()
    if r < 0.75:
        axioms = set()
        for _ in range(rng.randrange(1, 8)):
            premise = frozenset(rng.sample(range(6), rng.randrange(3)))
            axioms.add(pair(rng.randrange(8), G.finite_set_encode(premise)))
        axioms |= {rng.randrange(8) for _ in range(rng.randrange(3))}
        return G.FiniteSet(axioms)
    if r < 0.9:
        # s only enters through saturated products: its explicit axioms are too many to list
        return rng.choice([G.graph_k(), G.EMPTY, G.FiniteSet(range(6))])
    return G.graph_k().apply(G.FiniteSet(rng.sample(range(8), 3)))


_MODELS = {
    "K1": (K1Pca, sample_k1),
    "K2": (K2Pca, sample_k2),
    "K201": (K201Pca, sample_k201),
    "B": (BPca, sample_b),
    "E": (lambda: G.GraphPca(), sample_graph),
}


def identity_embedding(model: str) -> EmbeddingCandidate:
    """The identity of a model into itself, with every claim it honestly makes."""
    make, sampler = _MODELS[model]
    pca = make()
    claims = {"injective", "homomorphic", "preserves-undefined"}
    if model == "E":
        claims.add("monotone")
    return EmbeddingCandidate(f"identity-{model}", pca, pca, lambda x: x, frozenset(claims),
                              sampler)


def inclusion_K2_to_B() -> EmbeddingCandidate:
    """Total functions are partial functions, and application is the same program."""
    return EmbeddingCandidate("inclusion-K2-B", K2Pca(), BPca(), lambda f: BElement(f.program),
                              frozenset({"injective", "homomorphic"}), sample_k2)


def planted_homomorphism_defect() -> EmbeddingCandidate:
    """Identity on the graph model except that {5} is sent to {5, 9}.

    The sampler pairs X = {<5, ∅>} with the empty set often enough that the
    product {5} is hit.
    """
    five = G.FiniteSet([5])

    def F(x):
        if isinstance(x, G.GSet) and x.below(64, 8) == five.items:
            return G.FiniteSet([5, 9])
        return x

    def sampler(rng):
        return rng.choice([G.FiniteSet([pair(5, 0)]), G.EMPTY, sample_graph(rng)])

    pca = G.GraphPca()
    return EmbeddingCandidate("planted-homomorphism-defect", pca, pca, F,
                              frozenset({"homomorphic", "injective"}), sampler)


def planted_collapse() -> EmbeddingCandidate:
    """Every graph set goes to the empty set: a homomorphism, but not injective."""
    pca = G.GraphPca()
    return EmbeddingCandidate("planted-collapse", pca, pca, lambda x: G.EMPTY,
                              frozenset({"homomorphic", "injective"}), sample_graph)


# ---------------------------------------------------------------------------
# K2 into K201 by graph coding

def _psi_join(e: int) -> Program:
    """Relative to O = F(f)⊕F(g): q -> ψ(f)(q/2) for even q, ψ(g)((q-1)/2) for odd q.

    ψ(X)(n) is the least y whose graph bit <n, y> is set; that bit sits at
    position e + <n, y> of the encoded stream.
    """
    return assemble([
        ("const", 6, 2),
        ("mod", 4, 0, 6),
        ("div", 5, 0, 6),
        ("const", 7, 0),
        ("const", 10, e),
        ("label", "search"),
        ("pair", 8, 5, 7),
        ("add", 8, 8, 10),
        ("mul", 8, 8, 6),
        ("add", 8, 8, 4),
        ("query", 11, 8),
        ("mod", 11, 11, 6),
        ("jeq", 11, ZERO, "next"),
        ("halt", 7),
        ("label", "next"),
        ("inc", 7),
        ("jump", "search"),
    ])


def _graph_product(e: int) -> Program:
    """The program with code e: 0^(e-1) 1 ⌢ graph(f·g) from oracle F(f)⊕F(g).

    Bit e + j forces h = f·g at j as well as at x, where <x, y> = j, so that
    over a window W + e the result is undefined exactly when h is somewhere
    below W.
    """
    psi = code_of(_psi_join(e))
    return assemble([
        ("const", 1, e - 1),
        ("jeq", 0, 1, "one"),
        ("sub", 2, 1, 0),
        ("jeq", 2, ZERO, "graph"),
        ("const", 0, 0),
        ("halt", 0),
        ("label", "one"),
        ("const", 0, 1),
        ("halt", 0),
        ("label", "graph"),
        ("const", 3, e),
        ("sub", 4, 0, 3),
        ("unpair", 5, 6, 4),
        ("const", 7, psi),
        ("call", 8, 7, ZERO),
        ("callt", 10, 8, 4, 7),
        ("callt", 11, 8, 5, 7),
        ("jeq", 11, 6, "yes"),
        ("const", 0, 0),
        ("halt", 0),
        ("label", "yes"),
        ("const", 0, 1),
        ("halt", 0),
    ])


GRAPH_PRODUCT = CODES.fixpoint("emb.k2.k201", _graph_product)


def graph_image(f: K2Element) -> K201Element:
    """F(f) = 0^(e-1) 1 ⌢ graph(f)."""
    return K201Element(S.ones_at(GRAPH_PRODUCT - 1, graph_encode(f.program).stream),
                       Certified("graph-image"))


def _gap_pair(rng: random.Random) -> tuple:
    head = rng.choice([K2_GAP3, U_CODE])
    values = [head] + [rng.randrange(6) for _ in range(8)]
    return certified(S.table_program(values, rng.randrange(6)), "table:gap"), random_k2(rng)


def embed_K2_to_K201() -> EmbeddingCandidate:
    """The graph-coding embedding, claiming preservation of undefinedness.

    Target checks run at window W + e so that the forced points cover the
    source window, with twenty times the source fuel.
    """
    e = GRAPH_PRODUCT
    return EmbeddingCandidate(
        "graph-K2-K201", K2Pca(), K201Pca(), graph_image,
        frozenset({"injective", "homomorphic", "preserves-undefined"}),
        sample_k2, _gap_pair,
        target_budget=lambda b: b.with_(window=b.window + e, steps=b.steps * 20),
    )


# ---------------------------------------------------------------------------
# certified jump oracles

@dataclass(frozen=True)
class HaltingTrace:
    """Φ_program(x) halts with ``value`` after exactly ``steps`` steps."""

    program: Program
    x: int
    steps: int
    value: int
    oracle: Oracle = NULL

    def verify(self) -> bool:
        o = evaluate(self.program, self.x, self.oracle, self.steps)
        return (isinstance(o, Halted) and o.value == self.value
                and steps_used(self.program, self.x, self.oracle, self.steps) == self.steps)

    def __str__(self):
        return f"halts x={self.x} value={self.value} steps={self.steps}"


@dataclass(frozen=True)
class LoopProof:
    """The run of Φ_program(x) revisits a machine state at ``step``."""

    program: Program
    x: int
    step: int
    oracle: Oracle = NULL

    def verify(self) -> bool:
        return detect_cycle(self.program, self.x, self.oracle, self.step + 1) == self.step

    def __str__(self):
        return f"loops x={self.x} state repeats at step {self.step}"


_CALLS = frozenset({"call", "callt", "calln"})


@dataclass(frozen=True)
class LoopFree:
    """A static totality proof: no backward jumps and no nested calls.

    Such a program runs each instruction at most once, so it halts on every
    input against every total oracle.
    """

    program: Program

    def verify(self) -> bool:
        code = self.program.compiled()
        for pc, ins in enumerate(self.program.instructions):
            if ins.op in _CALLS:
                return False
            if ins.op in ("jump", "jeq", "decjz") and code[pc][-1] <= pc:
                return False
        return True

    def __str__(self):
        return "loop-free"


@dataclass(frozen=True)
class FamilyProduct:
    """In a family closed under application, a·b window-equals member c,
    and c is the least representative doing so."""

    family: "Family"
    a: int
    b: int
    c: int

    def verify(self) -> bool:
        return self.family.least_product(self.a, self.b) == self.c

    def __str__(self):
        return f"family product -> {_num(self.c)}"


_JUMP_KEYS: dict[tuple, int] = {}


class JumpOracle(Oracle):
    """Answers for a finite curated set of queries, each backed by a certificate.

    Outside the curated queries the oracle is undefined, so any computation
    that strays there fails rather than guesses.
    """

    def __init__(self, entries: Mapping[int, tuple[int, Any]], name: str = "jump"):
        self.entries = dict(entries)
        self.name = name
        content = (name, tuple(sorted((q, a) for q, (a, _) in self.entries.items())))
        self.key = ("jump", _JUMP_KEYS.setdefault(content, len(_JUMP_KEYS) + 1))

    def ask(self, q, ctx):
        hit = self.entries.get(q)
        if hit is None:
            raise _undefined(q)
        return hit[0]

    def answer(self, q: int) -> int | None:
        hit = self.entries.get(q)
        return None if hit is None else hit[0]

    def certificate(self, q: int):
        return self.entries[q][1]

    def verify(self) -> list[int]:
        """Queries whose certificate fails to replay (empty when all is well)."""
        return [q for q, (_, cert) in sorted(self.entries.items()) if not cert.verify()]

    def __contains__(self, q: int) -> bool:
        return q in self.entries

    def __str__(self):
        return f"{self.name}[{len(self.entries)} certified]"

    def __len__(self):
        return len(self.entries)


def _undefined(q: int):
    from .machine import _Undefined
    return _Undefined(q)


def certify_halting(program: Program | int, x: int = 0, oracle: Oracle = NULL,
                    limit: int = 100_000):
    """(1, HaltingTrace) or (0, LoopProof); None when neither shows up within ``limit``."""
    program = phi(program) if isinstance(program, int) else program
    steps = steps_used(program, x, oracle, limit)
    if steps is not None:
        return 1, HaltingTrace(program, x, steps, evaluate(program, x, oracle, steps).value, oracle)
    step = detect_cycle(program, x, oracle, limit)
    if step is not None:
        return 0, LoopProof(program, x, step, oracle)
    return None


def certify_totality(program: Program | int, oracle: Oracle = NULL, window: int = 32,
                     limit: int = 100_000):
    """(1, LoopFree) or (0, LoopProof at the least diverging x < window); else None."""
    program = phi(program) if isinstance(program, int) else program
    if LoopFree(program).verify():
        return 1, LoopFree(program)
    for x in range(window):
        if steps_used(program, x, oracle, limit) is None:
            step = detect_cycle(program, x, oracle, limit)
            return (0, LoopProof(program, x, step, oracle)) if step is not None else None
    return None


# ---------------------------------------------------------------------------
# the least-representative embedding into K1 relative to a jump

class ClosureViolation(ValueError):
    pass


def periodic_program(word: Sequence[int]) -> Program:
    """x -> word[x mod len(word)]."""
    lines = [("const", 1, len(word)), ("mod", 2, 0, 1)]
    for i, v in enumerate(word):
        lines += [("const", 1, i), ("jeq", 2, 1, f"v{i}")]
    lines += [("const", 0, 0), ("halt", 0)]
    for i, v in enumerate(word):
        lines += [("label", f"v{i}"), ("const", 0, v), ("halt", 0)]
    return assemble(lines)


def _rotations(word):
    return [tuple(word[i:] + word[:i]) for i in range(len(word))]


def curated_family() -> list[Program]:
    """Twelve periodic streams over the heads {arg, own} plus two duplicate programs.

    A head of arg makes f·g = g and a head of own makes f·g the shift of f,
    so the rotations of each word keep the family closed.
    """
    A, O = K2_CATALOG["arg"], K2_CATALOG["own"]
    words = []
    for w in ([A, O], [A, A, O], [A, O, O], [A, A, A, O]):
        words += _rotations(w)
    programs = [periodic_program(w) for w in words]
    programs += [periodic_program(list(words[0]) * 2), periodic_program(list(words[2]) * 2)]
    return programs


class Family:
    """A finite set of K2 programs with its least-representative table at a window."""

    def __init__(self, programs: Sequence[Program], window: int = 16, budget: Budget = Budget()):
        self.budget = budget.with_(window=window)
        self.window = window
        self.programs = list(programs)
        self.codes = [code_of(p) for p in self.programs]
        by_sig: dict[tuple, int] = {}
        for c in self.codes:
            sig = self._sig(phi(c))
            by_sig[sig] = min(c, by_sig.get(sig, c))
        self.least = by_sig
        self._products: dict[tuple[int, int], int] = {}

    def _sig(self, prog: Program) -> tuple:
        return tuple(K2Element(prog, Certified("family")).values(self.window, self.budget))

    def representative(self, code: int) -> int:
        return self.least[self._sig(phi(code))]

    def elements(self) -> list[int]:
        return sorted(set(self.least.values()))

    def product(self, a: int, b: int):
        return k2_apply(K2Element(phi(a), Certified("family")), K2Element(phi(b), Certified("family")),
                        self.budget)

    def least_product(self, a: int, b: int) -> int | None:
        key = (a, b)
        if key not in self._products:
            ab = self.product(a, b)
            c = self.least.get(self._sig(ab.program)) if _defined(ab) else None
            self._products[key] = c
        return self._products[key]

    def check_closure(self) -> None:
        for a in self.codes:
            for b in self.codes:
                if self.least_product(a, b) is None:
                    raise ClosureViolation(f"product of family members {_num(a)} and {_num(b)} "
                                           f"is not window-equal to a member")


def family_jump(family: Family) -> JumpOracle:
    """<a, b> -> least representative of a·b, for every pair of family codes."""
    family.check_closure()
    entries = {}
    for a in family.codes:
        for b in family.codes:
            c = family.least_product(a, b)
            entries[pair(a, b)] = (c, FamilyProduct(family, a, b, c))
    return JumpOracle(entries, "family")


# <z, <a, n>>: n = 0 -> a; else b = Φ_n(0), c = jump(<a,b>), output Φ_z(c)
_LR_BODY = assemble([
    ("unpair", 1, 2, 0),
    ("unpair", 3, 4, 2),
    ("jeq", 4, ZERO, "base"),
    ("call", 5, 4, ZERO),
    ("pair", 6, 3, 5),
    ("query", 7, 6),
    ("call", 0, 1, 7),
    ("halt", 0),
    ("label", "base"),
    ("halt", 3),
])
# <z, a> -> index of n -> body(<z, <a, n>>)
_LR_TEMPLATE = assemble([
    ("unpair", 1, 2, 0),
    ("const", 3, code_of(_LR_BODY)),
    ("smn", 3, 3, 1),
    ("smn", 3, 3, 2),
    ("halt", 3),
])
_LR_INDEX: list[int] = []


def least_representative_index() -> int:
    """e with e·a = index of n -> (n = 0 ? a : e·g(a, n·0)), by the recursion theorem."""
    if not _LR_INDEX:
        _LR_INDEX.append(code_of(fixpoint(transformer(_LR_TEMPLATE))))
    return _LR_INDEX[0]


@dataclass(frozen=True)
class LeastRepresentativeEmbedding:
    candidate: EmbeddingCandidate
    family: Family
    jump: JumpOracle
    e: int

    def image(self, code: int) -> K1Element:
        return self.candidate(code)


def embed_least_representative(family: Family, jump: JumpOracle | None = None,
                               budget: Budget = Budget()) -> LeastRepresentativeEmbedding:
    """f -> e·a_f in K1 relative to the jump, a_f the least representative of f."""
    family.check_closure()
    jump = family_jump(family) if jump is None else jump
    e = least_representative_index()
    source = K2Pca()
    target = K1Pca(oracle=jump)

    def F(code):
        o = evaluate(e, family.representative(code), jump, budget)
        if not o.defined:
            raise RuntimeError(f"e·a diverged: {fmt(o)}")
        return K1Element(o.value)

    cand = EmbeddingCandidate("least-representative", source, target, F,
                              frozenset({"injective", "homomorphic"}))
    return LeastRepresentativeEmbedding(cand, family, jump, e)


@dataclass(frozen=True)
class FamilyLawReport:
    base_failures: tuple
    product_failures: tuple
    injectivity_failures: tuple
    triples: int

    @property
    def ok(self) -> bool:
        return not (self.base_failures or self.product_failures or self.injectivity_failures)


def check_least_representative(emb: LeastRepresentativeEmbedding,
                               budget: Budget = Budget()) -> FamilyLawReport:
    """ea0 = a, (ea)(eb) = e·c on all family pairs, and ea ≠ eb for distinct a, b."""
    fam, jump = emb.family, emb.jump
    images = {a: emb.image(a) for a in fam.elements()}
    base = []
    for a, ea in images.items():
        o = evaluate(ea.index, 0, jump, budget)
        if not (o.defined and o.value == a):
            base.append(a)
    products = []
    triples = 0
    for a in fam.codes:
        for b in fam.codes:
            c = fam.least_product(a, b)
            ea, eb = emb.image(a), emb.image(b)
            o = evaluate(ea.index, eb.index, jump, budget)
            triples += 1
            if not (o.defined and o.value == emb.image(c).index):
                products.append((a, b))
    distinct = [(a, b) for a in images for b in images if a < b and images[a] == images[b]]
    return FamilyLawReport(tuple(base), tuple(products), tuple(distinct), triples)


# ---------------------------------------------------------------------------
# the TOT gadget

# (p ⌢ ..) ⊕ h -> Φ_(h(0)) relative to h shifted by one
TOT_E0 = CODES.register("tot.e0", assemble([
    ("const", 1, 1),
    ("query", 2, 1),
    ("const", 3, code_of(S.reader(2, 3))),
    ("callt", 0, 2, 0, 3),
    ("halt", 0),
]))
# (q ⌢ ..) ⊕ h -> (h(0) + 1) ⌢ h shifted by one
TOT_E1 = CODES.register("tot.e1", assemble([
    ("jeq", 0, ZERO, "head"),
    ("const", 6, 2),
    ("mul", 1, 0, 6),
    ("inc", 1),
    ("query", 0, 1),
    ("halt", 0),
    ("label", "head"),
    ("const", 1, 1),
    ("query", 0, 1),
    ("inc", 0),
    ("halt", 0),
]))

SQUARES = (0, 1, 4, 9, 16, 25)
X_SQUARES = S.table_program([int(x in SQUARES) for x in range(32)], 0)

_LOOP = [("label", "loop"), ("jump", "loop")]


def _diverge_at(v: int) -> list:
    return [("const", 1, v), ("jeq", 0, 1, "loop"), ("halt", 0), *_LOOP]


# name -> lines, all relative to an oracle X; the identity is index 0
_TOT_PROGRAMS = {
    "X(x)": [("query", 0, 0), ("halt", 0)],
    "X(x)+1": [("query", 0, 0), ("inc", 0), ("halt", 0)],
    "X(x+1)": [("inc", 0), ("query", 0, 0), ("halt", 0)],
    "2x": [("const", 1, 2), ("mul", 0, 0, 1), ("halt", 0)],
    "X(2x)": [("const", 1, 2), ("mul", 0, 0, 1), ("query", 0, 0), ("halt", 0)],
    "seven": [("const", 0, 7), ("halt", 0)],
    "X(X(x))": [("query", 0, 0), ("query", 0, 0), ("halt", 0)],
    "x+X(0)": [("query", 1, ZERO), ("add", 0, 0, 1), ("halt", 0)],
    "x-if-X": [("query", 1, 0), ("jeq", 1, ZERO, "zero"), ("halt", 0),
               ("label", "zero"), ("const", 0, 0), ("halt", 0)],
    "diverge-at-3": _diverge_at(3),
    "diverge-at-0": _diverge_at(0),
    "diverge-at-10": _diverge_at(10),
    "diverge-at-31": _diverge_at(31),
    "diverge-where-X": [("query", 1, 0), ("const", 2, 1), ("jeq", 1, 2, "loop"), ("halt", 0), *_LOOP],
    "diverge-from-5": [("const", 1, 5), ("sub", 2, 1, 0), ("jeq", 2, ZERO, "loop"), ("halt", 0),
                       *_LOOP],
    "diverge-at-odd": [("const", 1, 2), ("mod", 2, 0, 1), ("jeq", 2, ZERO, "ok"), *_LOOP,
                       ("label", "ok"), ("halt", 0)],
    "diverge-at-X(0)": [("query", 1, ZERO), ("jeq", 0, 1, "loop"), ("halt", 0), *_LOOP],
    "diverge-at-20": [("query", 1, 0), ("const", 2, 20), ("jeq", 0, 2, "loop"),
                      ("add", 0, 0, 1), ("halt", 0), *_LOOP],
    "two-cycle-at-7": [("const", 1, 7), ("jeq", 0, 1, "a"), ("halt", 0),
                       ("label", "a"), ("jump", "b"), ("label", "b"), ("jump", "a")],
}
TOT_UNIVERSE: dict[str, int] = {"identity": 0}
TOT_UNIVERSE.update({name: CODES.register(f"tot.u.{name}", assemble(lines))
                     for name, lines in _TOT_PROGRAMS.items()})


@dataclass(frozen=True)
class TotGadget:
    p: K2Element
    q: K2Element
    g: K2Element
    x_program: Program

    def numeral(self, n: int, budget: Budget = Budget()):
        """qⁿg, which should be n ⌢ X."""
        out = self.g
        for _ in range(n):
            out = k2_apply(self.q, out, budget)
            if not _defined(out):
                return out
        return out

    def query(self, n: int, budget: Budget = Budget()):
        """p·(qⁿg): defined at the window exactly when Φ_n^X is total there."""
        h = self.numeral(n, budget)
        return k2_apply(self.p, h, budget) if _defined(h) else h


def tot_gadget(x_program: Program = X_SQUARES) -> TotGadget:
    return TotGadget(certified(S.head_then_zeros(TOT_E0), "tot.p"),
                     certified(S.head_then_zeros(TOT_E1), "tot.q"),
                     certified(S.head_then(0, x_program), "tot.g"),
                     x_program)


def tot_query(n: int, budget: Budget = Budget(), gadget: TotGadget | None = None):
    return (gadget or tot_gadget()).query(n, budget)


def tot_jump(x_program: Program = X_SQUARES, window: int = 32) -> JumpOracle:
    """n -> [Φ_n^X is total] on the curated universe, with certificates."""
    oracle = ProgramOracle(x_program)
    entries = {}
    for name, n in TOT_UNIVERSE.items():
        cert = certify_totality(n, oracle, window)
        if cert is None:
            raise RuntimeError(f"no totality certificate for {name}")
        entries[n] = cert
    return JumpOracle(entries, "tot")

