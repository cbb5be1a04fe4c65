"""Deliberately wrong embeddings that the probes are expected to catch.

Each fake is honest enough on the easy checks to make the probe do real
work: the truncating map is a homomorphism on every gadget product whose
arguments differ in their first four values, the prefix-code map is
monotone, and so on.
"""

from __future__ import annotations

from . import graph as G
from . import streams as S
from .bmodel import BElement, BPca, constant, from_table, gadget_a, nowhere
from .embeddings import EmbeddingCandidate, certify_halting, identity_embedding, sample_graph
from .k2 import K2Pca, certified, k2_k, k2_s
from .probes import HaltingSplit
from .machine import assemble, code_of
from .streams import ZERO

# ---------------------------------------------------------------------------
# the truncating fake, B -> K2

# (CMP0 ⌢ P) ⊕ Q -> 0 if P and Q agree below 4, else 1 below 4 and 0 after
_CMP0 = assemble([
    ("const", 6, 2),
    ("const", 1, 0),
    ("const", 8, 4),
    ("label", "loop"),
    ("jeq", 1, 8, "same"),
    ("copy", 2, 1),
    ("inc", 2),
    ("mul", 2, 2, 6),
    ("query", 3, 2),
    ("mul", 4, 1, 6),
    ("inc", 4),
    ("query", 5, 4),
    ("inc", 1),
    ("jeq", 3, 5, "loop"),
    ("sub", 10, 8, 0),
    ("jeq", 10, ZERO, "same"),
    ("const", 0, 1),
    ("halt", 0),
    ("label", "same"),
    ("const", 0, 0),
    ("halt", 0),
])
_CMP1 = S.headrel(code_of(_CMP0))
TRUNCATE = 4


def _sigma_gadget() -> BElement:
    return gadget_a(nowhere(), constant(1))


def truncating_fake() -> EmbeddingCandidate:
    """x -> its first four values (undefined read as 0) followed by zeros."""
    a = _sigma_gadget()

    def F(x: BElement):
        if x.program == a.program:
            return certified(S.head_then_zeros(code_of(_CMP1)), "fake:C")
        vals = [0 if v is None else v for v in x.values(TRUNCATE)]
        return certified(S.table_program(vals, 0), "fake:trunc")

    return EmbeddingCandidate("truncating-fake", BPca(), K2Pca(), F,
                              frozenset({"injective", "homomorphic"}))


def truncation_pool() -> list[BElement]:
    """All sixteen binary patterns on 0..3, plus a seventeenth agreeing with
    the zero pattern there but not at 5."""
    pool = [from_table({i: (p >> i) & 1 for i in range(TRUNCATE)}, default=0) for p in range(16)]
    pool.append(from_table({0: 0, 1: 0, 2: 0, 3: 0, 4: 0, 5: 1}, default=0))
    return pool


# ---------------------------------------------------------------------------
# the parity fake, graph -> K2 (not monotone)

def parity_fake(bound: int = 8) -> EmbeddingCandidate:
    """X -> the constant stream |X ∩ {0..7}| mod 2."""
    def F(x):
        return certified(S.constant_program(len(x.below(bound, 8)) % 2), "fake:parity")

    return EmbeddingCandidate("parity-fake", G.GraphPca(), K2Pca(), F,
                              frozenset({"injective", "homomorphic"}), sample_graph)


# ---------------------------------------------------------------------------
# the prefix-code fake, graph -> B (monotone)

# (Q0 ⌢ F(X)) ⊕ F(Y): 0 at x = 0, 1; at x = 2 ask F(X)(1) and answer 0; diverge after
_Q0 = assemble([
    ("const", 1, 2),
    ("sub", 2, 0, 1),
    ("jeq", 2, ZERO, "low"),
    ("label", "loop"),
    ("jump", "loop"),
    ("label", "low"),
    ("jeq", 0, 1, "ask"),
    ("const", 0, 0),
    ("halt", 0),
    ("label", "ask"),
    ("const", 3, 4),
    ("query", 4, 3),
    ("const", 0, 0),
    ("halt", 0),
])
_Q1 = S.headrel(code_of(_Q0))


def prefix_code_fake(bound: int = 8) -> EmbeddingCandidate:
    """X -> 0 ⌢ semichar(X): position 1+i holds 0 when i ∈ X and is undefined otherwise."""
    R = G.gadget_R()

    def F(x):
        if isinstance(x, G.FiniteSet) and x == R:
            return BElement(S.head_then_zeros(code_of(_Q1)))
        members = x.below(bound, 8)
        return from_table({0: 0, **{1 + i: 0 for i in members}})

    return EmbeddingCandidate("prefix-code-fake", G.GraphPca(), BPca(), F,
                              frozenset({"injective", "homomorphic", "monotone"}), sample_graph)


# ---------------------------------------------------------------------------
# the decision fake, graph -> K2 through generator images

X0, Y = 1, 5

# F(Z0) ⊕ G -> (0, G(1) + 1, 0, ...), so F(v_n) = (.., n, 0, ..)
_ZSUCC = assemble([
    ("const", 1, 1),
    ("jeq", 0, 1, "one"),
    ("const", 0, 0),
    ("halt", 0),
    ("label", "one"),
    ("const", 2, 3),
    ("query", 0, 2),
    ("inc", 0),
    ("halt", 0),
])


def _lookup(marked: frozenset) -> int:
    """F(.) ⊕ F(v_i) -> at X0, Y+1 when i is marked and Y otherwise; 0 elsewhere."""
    lines = [("const", 1, X0), ("jeq", 0, 1, "at"), ("const", 0, 0), ("halt", 0),
             ("label", "at"), ("const", 2, 3), ("query", 3, 2)]
    for i in sorted(marked):
        lines += [("const", 4, i), ("jeq", 3, 4, "mark")]
    lines += [("const", 0, Y), ("halt", 0), ("label", "mark"), ("const", 0, Y + 1), ("halt", 0)]
    return code_of(assemble(lines))


def decision_fake() -> EmbeddingCandidate:
    """Images of the generators that make F(∅)(1) = 5 but F({0})(1) = 6.

    The image of D reads n off F(v_n) and looks it up in the halting
    table, which a fake is free to know.
    """
    images = {
        "k": k2_k(),
        "s": k2_s(),
        "Z0": certified(S.table_program([code_of(_ZSUCC), 0], 0), "fake:Z0"),
        "J": certified(S.head_then_zeros(_lookup(frozenset([1]))), "fake:J"),
    }

    def F(x):
        if isinstance(x, HaltingSplit):
            halting = frozenset(n for n in x.codes if certify_halting(n)[0] == 1)
            return certified(S.head_then_zeros(_lookup(halting)), "fake:D")
        raise TypeError("the decision fake is given by generator images only")

    return EmbeddingCandidate("decision-fake", G.GraphPca(), K2Pca(), F,
                              frozenset({"injective", "homomorphic"}), images=images)


def graph_identity_by_images() -> EmbeddingCandidate:
    """The identity of the graph model, presented through its generators."""
    base = identity_embedding("E")
    return EmbeddingCandidate("identity-E-images", base.source, base.target, lambda x: x,
                              base.claims, base.sampler, images=G.generators())
