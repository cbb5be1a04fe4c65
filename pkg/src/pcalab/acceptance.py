"""The ten acceptance criteria as plain functions.

Each ``criterion_N(seed)`` returns a :class:`Criterion` whose ``line`` is the
one-line verdict.  ``detail`` lines go to the suite log; they never contain
timings, so two runs with the same seed produce the same log.
"""

from __future__ import annotations

import itertools
import os
import random
import subprocess
import sys
import tempfile
import time
from dataclasses import dataclass, field
from typing import Callable

from . import graph as G
from . import planted
from . import probes
from . import streams as S
from .bmodel import BElement, BPca, constant, from_table, gadget_a, nowhere
from .embeddings import (TOT_UNIVERSE, X_SQUARES, Family, check_embedding,
                         check_least_representative, curated_family, embed_K2_to_K201,
                         embed_least_representative, family_jump, identity_embedding,
                         sample_b, sample_graph, sample_k1, tot_gadget, tot_jump)
from .k1 import K1Pca, k1_generator, numeral_term as k1_numeral
from .k2 import K201Pca, K2Pca, apply_chain, random_k2, random_k201
from .machine import NULL, Budget, evaluate, pair
from .terms import (Apply, Const, Var, abstract, eval_term, free_vars, normalize, random_term,
                    substitute)


@dataclass
class Criterion:
    number: int
    title: str
    passed: bool
    summary: str
    detail: list[str] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return f"criterion {self.number} {self.title}: {verdict} ({self.summary})"

    def log_lines(self) -> list[str]:
        return [self.line] + ["  " + d for d in self.detail]


def _timed(fn: Callable[..., Criterion]) -> Callable[..., Criterion]:
    def run(*args, **kw) -> Criterion:
        t = time.perf_counter()
        out = fn(*args, **kw)
        out.elapsed = time.perf_counter() - t
        return out
    run.__name__ = fn.__name__
    run.__doc__ = fn.__doc__
    return run


def _defined(r) -> bool:
    return getattr(r, "defined", True) is not False


def _kleene(pca, left, right, budget) -> bool:
    """Both undefined, or both defined and equal at the budget's window."""
    if _defined(left) != _defined(right):
        return False
    return not _defined(left) or bool(pca.equal(left, right, budget))


# ---------------------------------------------------------------------------
# 1. combinator laws

LAW_BUDGET = Budget(steps=10**5, window=32)


def _program_laws(pca, draw, rng, n: int, budget: Budget) -> tuple[int, int]:
    bad = undefined = 0
    for _ in range(n):
        x, y, z = draw(rng), draw(rng), draw(rng)
        kxy = apply_chain(pca.apply, pca.k, x, y, budget=budget)
        ok = _defined(kxy) and bool(pca.equal(kxy, x, budget))
        left = apply_chain(pca.apply, pca.s, x, y, z, budget=budget)
        xz, yz = pca.apply(x, z, budget), pca.apply(y, z, budget)
        right = xz if not _defined(xz) else yz if not _defined(yz) else pca.apply(xz, yz, budget)
        undefined += not _defined(left)
        ok = ok and _kleene(pca, left, right, budget)
        bad += not ok
    return bad, undefined


def _small_s_triple(rng: random.Random, top: int):
    """X, Y, Z whose axioms only mention numbers below ``top``, so the stage-``top``
    listing of s's axioms is complete for them."""
    xs = set()
    for _ in range(rng.randrange(1, 4)):
        u = rng.choice([0, 1, 2, 3]) if top > 3 else 0
        xs.add(pair(pair(rng.randrange(top), u), rng.randrange(top)))
    ys = {pair(rng.randrange(3), rng.randrange(top)) for _ in range(rng.randrange(1, 4))}
    zs = set(rng.sample(range(top), rng.randrange(top)))
    return G.FiniteSet(xs), G.FiniteSet(ys), G.FiniteSet(zs)


def _graph_laws(rng, n: int, window: int) -> int:
    k, s = G.graph_k(), G.graph_s()
    k_axioms = k.approx(window)
    s_stage = 5
    s_axioms = s.approx(s_stage)
    bad = 0
    for _ in range(n):
        x, y, z = sample_graph(rng), sample_graph(rng), sample_graph(rng)
        ok = G.g_apply_all(k, x, y).below(window, 8) == x.below(window, 8)
        # explicit route: peel both arguments off k's listed axioms
        ok = ok and G.eq2(G.eq2(k_axioms, x.approx(8)), y.approx(8)) == x.below(window, 8)
        left = G.g_apply_all(s, x, y, z).below(window, 8)
        right = G.Applied(G.Applied(x, z), G.Applied(y, z)).below(window, 8)
        ok = ok and left == right
        a, b, c = _small_s_triple(rng, s_stage)
        lhs = G.eq2(G.eq2(G.eq2(s_axioms, a.items), b.items), c.items)
        rhs = G.Applied(G.Applied(a, c), G.Applied(b, c)).approx(s_stage)
        ok = ok and lhs == rhs
        bad += not ok
    return bad


@_timed
def criterion_1(seed: int = 0) -> Criterion:
    """k·a·b = a and s·a·b·c ≃ (a·c)(b·c) on 100 triples in each of five models."""
    b = LAW_BUDGET
    rows, failures = [], 0
    models = [
        ("K1", K1Pca(), sample_k1),
        ("K2", K2Pca(), random_k2),
        ("K201", K201Pca(), random_k201),
        ("B", BPca(), sample_b),
    ]
    t = time.perf_counter()
    for i, (name, pca, draw) in enumerate(models):
        bad, undefined = _program_laws(pca, draw, random.Random(seed * 31 + i), 100, b)
        failures += bad
        rows.append(f"{name}: 100 triples, {bad} failures, {undefined} undefined s-products")
    bad = _graph_laws(random.Random(seed * 31 + 4), 100, b.window)
    failures += bad
    rows.append(f"E: 100 triples, {bad} failures")
    fast = time.perf_counter() - t < 60
    return Criterion(1, "combinator laws", failures == 0 and fast,
                     f"{failures} failures over 500 triples" + ("" if fast else ", over 60 s"),
                     rows)


# ---------------------------------------------------------------------------
# 2. the application rule against brute force

def _brute_unpair(z: int) -> tuple[int, int]:
    for s in range(z + 1):
        for y in range(s + 1):
            if s * (s + 1) // 2 + y == z:
                return s - y, y
    raise AssertionError(z)


def _brute_apply(xs: frozenset, ys: frozenset) -> frozenset:
    """n ∈ X·Y by trying every axiom against every subset of Y."""
    out = set()
    for z in xs:
        n, u = _brute_unpair(z)
        premise = frozenset(i for i, bit in enumerate(reversed(bin(u)[2:])) if bit == "1")
        # a premise cannot mention anything at or past the bit length of its code
        ylist = sorted(y for y in ys if y < u.bit_length())
        subsets = [frozenset(c) for r in range(len(ylist) + 1)
                   for c in itertools.combinations(ylist, r)]
        if any(premise == d for d in subsets):
            out.add(n)
    return frozenset(out)


@_timed
def criterion_2(seed: int = 0) -> Criterion:
    """g_apply on 1000 random finite X, Y equals a brute-force double loop."""
    rng = random.Random(seed)
    t = time.perf_counter()
    bad = 0
    for _ in range(1000):
        xs = frozenset(rng.sample(range(64), rng.randrange(13)))
        ys = frozenset(rng.sample(range(rng.choice([8, 64])), rng.randrange(9)))
        got = G.g_apply(G.FiniteSet(xs), G.FiniteSet(ys), 1)
        bad += got.items != _brute_apply(xs, ys)
    fast = time.perf_counter() - t < 10
    return Criterion(2, "application rule", bad == 0 and fast,
                     f"{bad} mismatches over 1000 pairs" + ("" if fast else ", over 10 s"))


# ---------------------------------------------------------------------------
# 3. bracket abstraction

_X = Var("x")


ESCALATION = (10**5, 10**6, 10**7)


def _abstraction_agrees(pca, t, arg, budget) -> tuple[bool, bool]:
    """(agrees, escalated).  A disagreement is re-run with ten and a hundred
    times the fuel, since the compiled side pays for the abstraction; only a
    disagreement that survives the largest budget counts."""
    env = {"a": arg}
    direct_term = substitute(t, "x", Const("a"))
    compiled_term = Apply(abstract("x", t), Const("a"))
    for i, steps in enumerate(ESCALATION):
        b = budget.with_(steps=steps)
        direct = eval_term(direct_term, pca, b, env)
        compiled = eval_term(compiled_term, pca, b, env)
        if _kleene(pca, direct, compiled, b):
            return True, i > 0
    return False, True


def _cl_agrees(t, arg, steps: int) -> bool | None:
    """Same weak normal form; None when neither side reaches one in ``steps``."""
    direct = normalize(substitute(t, "x", arg), steps)
    compiled = normalize(Apply(abstract("x", t), arg), steps * 4)
    if direct is None and compiled is None:
        return None
    return direct == compiled


@_timed
def criterion_3(seed: int = 0) -> Criterion:
    """[x]t·a ≃ t[a/x] for 500 random terms in K1, B and CL."""
    rng = random.Random(seed)
    b = Budget(steps=ESCALATION[0], window=16)
    k1, bp = K1Pca(), BPca()
    atoms = [Const("k"), Const("s"), _X, _X]
    bad = {"K1": 0, "B": 0, "CL": 0}
    escalated = {"K1": 0, "B": 0}
    unsettled = 0
    for _ in range(500):
        t = random_term(rng, 4, atoms)
        if "x" not in free_vars(t):
            t = Apply(t, _X)
        for name, pca, arg in (("K1", k1, sample_k1(rng)), ("B", bp, sample_b(rng))):
            ok, more = _abstraction_agrees(pca, t, arg, b)
            bad[name] += not ok
            escalated[name] += more
        eq = _cl_agrees(t, random_term(rng, 2, atoms[:2]), 2000)
        if eq is None:
            unsettled += 1
        else:
            bad["CL"] += not eq
    total = sum(bad.values())
    rows = [f"{k}: {v} failures" for k, v in bad.items()]
    rows += [f"{k}: {v} terms needed more fuel to settle" for k, v in escalated.items()]
    rows.append(f"CL: {unsettled} terms with no weak normal form on either side")
    return Criterion(3, "bracket abstraction", total == 0,
                     f"{total} failures over 500 terms in three algebras", rows)


# ---------------------------------------------------------------------------
# 4. gadget laws

def _total_pair(rng: random.Random, agree: bool) -> tuple[BElement, BElement]:
    """Two total functions given by different programs; they differ below 8 unless ``agree``."""
    values = [rng.randrange(4) for _ in range(8)]
    default = rng.randrange(4)
    f = from_table(dict(enumerate(values)), default=default)
    other = list(values)
    if not agree:
        other[rng.randrange(8)] += 1
    return f, BElement(S.table_program(other, default))


def _subsets(n: int):
    for mask in range(1 << n):
        yield frozenset(i for i in range(n) if mask >> i & 1)


@_timed
def criterion_4(seed: int = 0) -> Criterion:
    """R and C on every pair of subsets of 0..5; a on 50 pairs of total functions."""
    R = G.gadget_R()
    A, B = frozenset([0]), frozenset([0, 1])
    C = G.gadget_C(A, B, 6)
    r_bad = c_bad = 0
    for x in _subsets(6):
        for y in _subsets(6):
            want = frozenset([0]) if 0 not in x | y else frozenset([0, 1])
            r_bad += G.g_apply_all(R, G.FiniteSet(x), G.FiniteSet(y)).approx(1) != want
            got = G.g_apply_all(C, G.joined(x, 6), G.joined(y, 6)).approx(1)
            c_bad += got != (A if x == y else B)
    rng = random.Random(seed)
    budget = Budget(steps=10**5, window=16)
    h = constant(1)
    a = gadget_a(nowhere(), h)
    pca = BPca()
    a_bad = 0
    for i in range(50):
        f, g = _total_pair(rng, agree=i % 2 == 0)
        out = apply_chain(pca.apply, a, f, g, budget=budget)
        if i % 2 == 0:
            # equal arguments: the search never stops, so a·f·g is nowhere defined
            a_bad += any(o.defined for o in out.outcomes(4, budget.with_(steps=2000)))
        else:
            a_bad += not pca.equal(out, h, budget)
    total = r_bad + c_bad + a_bad
    rows = [f"R: 4096 pairs, {r_bad} failures", f"C: 4096 pairs, {c_bad} failures",
            f"a: 50 pairs (25 agreeing), {a_bad} failures"]
    return Criterion(4, "gadget laws", total == 0, f"{total} failures", rows)


# ---------------------------------------------------------------------------
# 5. the graph-coding embedding

@_timed
def criterion_5(seed: int = 0) -> Criterion:
    """embed_K2_to_K201 with preserves-undefined on 200 samples."""
    report = check_embedding(embed_K2_to_K201(), samples=200, seed=seed)
    ok = report.witness is None and report.engineered == 20 and report.undefined_pairs >= 20
    rows = [str(report), f"engineered undefined pairs: {report.engineered}"]
    if report.witness is not None:
        rows += report.witness.log_lines()
    return Criterion(5, "graph embedding K2 into K201", ok,
                     f"{'no' if report.witness is None else 'a'} witness, "
                     f"{report.undefined_pairs} undefined pairs", rows)


# ---------------------------------------------------------------------------
# 6. least representatives

@_timed
def criterion_6(seed: int = 0) -> Criterion:
    """ea0 = a and (ea)(eb) = ec over a 12-element family closed at window 16."""
    fam = Family(curated_family(), 16)
    jump = family_jump(fam)
    emb = embed_least_representative(fam, jump)
    report = check_least_representative(emb)
    bad_certs = jump.verify()
    n = len(fam.elements())
    ok = report.ok and n == 12 and not bad_certs
    rows = [f"family: {len(fam.codes)} programs, {n} elements",
            f"jump: {jump}, {len(bad_certs)} failing certificates",
            f"base failures {len(report.base_failures)}, product failures "
            f"{len(report.product_failures)}, injectivity failures {len(report.injectivity_failures)}"]
    return Criterion(6, "least-representative embedding", ok,
                     f"{report.triples} triples, "
                     f"{len(report.base_failures) + len(report.product_failures)} failures", rows)


# ---------------------------------------------------------------------------
# 7. the TOT gadget

@_timed
def criterion_7(seed: int = 0) -> Criterion:
    """qⁿg = n ⌢ X for n ≤ 16, and p·(qⁿg) is defined exactly on the total programs."""
    budget = Budget(steps=10**5, window=32)
    g = tot_gadget()
    x_values = [evaluate(X_SQUARES, x, NULL, budget).value for x in range(31)]
    head_bad = [n for n in range(17) if g.numeral(n, budget).values(32, budget) != [n] + x_values]
    jump = tot_jump()
    table_bad = []
    for name, n in TOT_UNIVERSE.items():
        r = g.query(n, budget)
        if _defined(r) != (jump.answer(n) == 1):
            table_bad.append(name)
    certs_bad = jump.verify()
    ok = not head_bad and not table_bad and not certs_bad
    totals = sum(jump.answer(n) for n in TOT_UNIVERSE.values())
    rows = [f"head law: {len(head_bad)} failures for n <= 16",
            f"universe: {len(TOT_UNIVERSE)} programs, {totals} total, {len(table_bad)} disagreements",
            f"certificates: {len(certs_bad)} fail to replay"]
    return Criterion(7, "TOT gadget", ok,
                     f"{len(head_bad) + len(table_bad) + len(certs_bad)} failures", rows)


# ---------------------------------------------------------------------------
# 8. finite generation

@_timed
def criterion_8(seed: int = 0) -> Criterion:
    """Numerals in K1, the catalog terms in the graph model, and numeral independence."""
    k1, e = K1Pca(), k1_generator()
    budget = Budget(steps=10**6)
    num_bad = []
    for n in range(64):
        v = eval_term(k1_numeral(n), k1, budget, {"e": e})
        if not (_defined(v) and v.index == n):
            num_bad.append(n)
    st = G.WITNESS_STAGE
    gp = G.graph_pca()
    w_bad = []
    for n, (name, want) in enumerate(G.W_CATALOG):
        v = eval_term(G.term_for_W(n), gp, Budget(stage=st), G.generators())
        if v.below(64, st) != want:
            w_bad.append(name)
    values = [G.numeral_value(n).approx(st) for n in range(len(G.W_CATALOG))]
    ind_bad = []
    for n in range(len(values)):
        wn = G.independence_witness(n)
        if not wn <= values[n] or any(wn <= values[m] for m in range(len(values)) if m != n):
            ind_bad.append(n)
    rows = [f"K1 numerals: {len(num_bad)} of 64 wrong",
            f"W catalog: {len(w_bad)} of {len(G.W_CATALOG)} wrong at bound 64",
            f"independence: {len(ind_bad)} failures"]
    total = len(num_bad) + len(w_bad) + len(ind_bad)
    return Criterion(8, "finite generation", total == 0, f"{total} failures", rows)


# ---------------------------------------------------------------------------
# 9. probes

def _replays(w) -> bool:
    """Rederive the witness and compare its log byte for byte."""
    if w is None or not w.replay():
        return False
    again = type(w)(w.kind, w.candidate, w.args, w.transcript)
    return again.log().encode() == w.log().encode()


@_timed
def criterion_9(seed: int = 0) -> Criterion:
    """Each probe refutes its planted fake and leaves the identity alone."""
    rows: list[str] = []
    ok = True

    sig_fake = probes.probe_sigma_collision(planted.truncating_fake(), planted.truncation_pool())
    sig_id = probes.probe_sigma_collision(identity_embedding("B"), planted.truncation_pool())
    mono_fake = probes.probe_monotone_split(planted.parity_fake())
    mono_fake2 = probes.probe_monotone_split(planted.prefix_code_fake())
    mono_id = probes.probe_monotone_split(identity_embedding("E"))
    leak_fake = probes.probe_decision_leak(planted.decision_fake())
    leak_id = probes.probe_decision_leak(planted.graph_identity_by_images())

    for fake in (sig_fake, mono_fake, mono_fake2, leak_fake.result):
        good = fake.status == "refuted" and _replays(fake.witness)
        ok = ok and good
        rows += fake.lines()
        rows.append(f"replay {'identical' if good else 'FAILED'}")
    ok = ok and leak_fake.correct and all(w.replay() for w in leak_fake.witnesses)
    rows += [f"decide {n} {d}" for n, d in sorted(leak_fake.decisions.items())]
    for ident in (sig_id, mono_id, leak_id.result):
        good = ident.status in ("consistent", "undetermined")
        ok = ok and good
        rows += ident.lines()
    refuted = sum(r.status == "refuted" for r in (sig_fake, mono_fake, mono_fake2, leak_fake.result))
    return Criterion(9, "probe efficacy", ok,
                     f"{refuted} of 4 fakes refuted, identities left standing", rows)


# ---------------------------------------------------------------------------
# 10. determinism

def suite_command(seed: int, out: str, only: str = "1-9") -> list[str]:
    return [sys.executable, "-m", "pcalab.cli", "acceptance", "--seed", str(seed),
            "--only", only, "--out", out]


@_timed
def criterion_10(seed: int = 0, only: str = "1-9") -> Criterion:
    """Two fresh runs of the suite with the same seed write byte-identical logs."""
    logs = []
    with tempfile.TemporaryDirectory() as tmp:
        for i, hashseed in enumerate(("1", "2")):
            path = os.path.join(tmp, f"run{i}.log")
            env = dict(os.environ, PYTHONHASHSEED=hashseed)
            subprocess.run(suite_command(seed, path, only), env=env, check=False,
                           stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL)
            if not os.path.exists(path):
                logs.append(b"")
                continue
            with open(path, "rb") as fh:
                logs.append(fh.read())
    same = logs[0] == logs[1] and len(logs[0]) > 0
    return Criterion(10, "determinism", same,
                     f"two runs of criteria {only}, {len(logs[0])} bytes, "
                     f"{'identical' if same else 'different'}")


CRITERIA: dict[int, Callable[..., Criterion]] = {
    1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
    6: criterion_6, 7: criterion_7, 8: criterion_8, 9: criterion_9, 10: criterion_10,
}


def parse_selection(text: str) -> list[int]:
    """"1-9", "2,5,7" or "all"."""
    if text == "all":
        return sorted(CRITERIA)
    out: list[int] = []
    for part in text.split(","):
        lo, _, hi = part.partition("-")
        out += range(int(lo), int(hi or lo) + 1)
    bad = [n for n in out if n not in CRITERIA]
    if bad:
        raise ValueError(f"no criterion numbered {bad[0]}")
    return out


def run_suite(numbers: list[int], seed: int = 0, echo: Callable[[str], None] = print):
    results = []
    for n in numbers:
        r = CRITERIA[n](seed)
        echo(r.line)
        results.append(r)
    return results
