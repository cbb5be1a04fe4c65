"""Command-line front end.

Exit codes: 0 success (defined, verified, consistent at bounds, all criteria
passed); 1 usage or parse error; 2 undefined at the window or failed
verification; 3 a refutation witness was found; 4 an acceptance criterion
failed.
"""

from __future__ import annotations

import argparse
import random
import re
import sys
from dataclasses import dataclass
from typing import Any, Callable, Sequence

from . import graph as G
from . import streams as S
from .bmodel import BElement, BPca
from .embeddings import (check_embedding, embed_K2_to_K201, fmt, identity_embedding,
                         inclusion_K2_to_B, planted_collapse, planted_homomorphism_defect,
                         sample_b, sample_k1, tot_jump, tot_query)
from .k1 import K1Element, K1Pca, k1_generator
from .k2 import (K201Element, K201Pca, K2Element, K2Pca, UndefinedAtWindow, UndefinedZeroStream,
                 WindowChecked, random_k2, random_k201)
from .machine import (Budget, OracleUndefined, OutOfFuel, decimal, finite_set_encode,
                      pair, phi, show_index)
from .terms import (Const, Diverged, TermSyntaxError, abstract_all, ap, eval_term,
                    free_vars, normalize, parse, random_term, show, substitute)

MODELS = ("K1", "K2", "K201", "B", "E")

LITERAL_HELP = """\
element literals:
  K1      a decimal index, or k, s, e (the single generator)
  K2      a decimal program index, optionally followed by ':' and the expected
          window values (e.g. 1234:3,1,4); or table(3,1,4) for the function
          3,1,4,0,0,...; or k, s
  K201    as K2 (values are read mod 2); 0^w (or 0^ω) is the zero stream
  B       as K2, and '.' marks an undefined point: table(3,.,4) or 1234:3,.,4;
          nowhere is the empty function
  E       a set of axioms written {(5,[]), (3,[0,2]), 7}: (n,[d1,...]) is the
          axiom <n, D> with premise D = {d1,...}, a bare number is itself;
          {} is the empty set; k and s are the combinators

term files (compile):
  lambda x y. body     with body over k, s and the declared variables,
                       application by juxtaposition, e.g. lambda x y. x

candidate files (probe, check): one 'key value' per line, '#' comments
  source K2
  target K201
  map graph-K2-K201
"""


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    model: str
    steps: int
    window: int
    stage: int
    seed: int
    input: str | None = None
    out: str | None = None

    def __post_init__(self):
        if min(self.steps, self.window, self.stage) <= 0:
            raise UsageError("budgets must be positive")
        if self.seed < 0:
            raise UsageError("the seed must be a natural number")

    @property
    def budget(self) -> Budget:
        return Budget(steps=self.steps, window=self.window, stage=self.stage)


def _pca(model: str):
    return {"K1": K1Pca, "K2": K2Pca, "K201": K201Pca, "B": BPca, "E": G.GraphPca}[model]()


# ---------------------------------------------------------------------------
# element literals

_TABLE = re.compile(r"table\(([^)]*)\)$")
_INDEXED = re.compile(r"(\d+)(?::(.*))?$")
_AXIOM = re.compile(r"\(\s*(\d+)\s*,\s*\[([^\]]*)\]\s*\)|(\d+)")


def _cells(text: str, allow_holes: bool) -> list[int | None]:
    out: list[int | None] = []
    for cell in text.split(","):
        cell = cell.strip()
        if cell == "." and allow_holes:
            out.append(None)
        elif cell.isdigit():
            out.append(int(cell))
        else:
            raise UsageError(f"bad table entry {cell!r}")
    return out


def _program_from_table(cells: list[int | None]):
    if None not in cells:
        return S.table_program(cells, 0)
    from .bmodel import from_table
    return from_table({i: v for i, v in enumerate(cells) if v is not None}, default=0).program


def _check_table(kind: str, program, cells: list[int | None], budget: Budget, binary: bool):
    got = S.values_or_none(S.points(program, len(cells), budget))
    if binary:
        got = [None if v is None else v % 2 for v in got]
    if got != cells:
        shown = ",".join("." if v is None else str(v) for v in got)
        raise UsageError(f"{kind} literal: the program's values are {shown}, not the table given")


def parse_graph(text: str) -> G.GSet:
    text = text.strip()
    if text == "k":
        return G.graph_k()
    if text == "s":
        return G.graph_s()
    if not (text.startswith("{") and text.endswith("}")):
        raise UsageError(f"graph literal must be k, s or {{...}}: {text!r}")
    body = text[1:-1].strip()
    items = set()
    pos = 0
    while pos < len(body):
        m = _AXIOM.match(body, pos)
        if m is None:
            raise UsageError(f"bad graph literal near {body[pos:pos + 12]!r}")
        if m.group(3) is not None:
            items.add(int(m.group(3)))
        else:
            premise = [int(c) for c in m.group(2).replace(" ", "").split(",") if c]
            items.add(pair(int(m.group(1)), finite_set_encode(premise)))
        pos = m.end()
        rest = body[pos:].lstrip()
        if rest.startswith(","):
            rest = rest[1:].lstrip()
        elif rest:
            raise UsageError(f"expected ',' in graph literal near {rest[:12]!r}")
        pos = len(body) - len(rest)
    return G.FiniteSet(items)


def parse_element(model: str, text: str, budget: Budget):
    text = text.strip()
    if model == "E":
        return parse_graph(text)
    pca = _pca(model)
    if text in ("k", "s"):
        return getattr(pca, text)
    if model == "K1":
        if text == "e":
            return k1_generator()
        if not text.isdigit():
            raise UsageError(f"K1 literal must be a decimal index: {text!r}")
        return K1Element(int(text))
    if model == "K201" and text in ("0^w", "0^ω", "0^omega"):
        return K201Element(S.constant_program(0), WindowChecked(budget.window))
    if model == "B" and text == "nowhere":
        return BElement(S.NOWHERE)
    holes = model == "B"
    binary = model == "K201"
    m = _TABLE.match(text)
    if m:
        program = _program_from_table(_cells(m.group(1), holes))
    else:
        m = _INDEXED.match(text)
        if m is None:
            raise UsageError(f"{model} literal must be an index, index:table or table(...): {text!r}")
        program = phi(int(m.group(1)))
        if m.group(2):
            _check_table(model, program, _cells(m.group(2), holes), budget, binary)
    if model == "B":
        return BElement(program)
    bad = S.first_failure(S.points(program, budget.window, budget))
    if bad is not None:
        raise UsageError(f"{model} elements are total; this one is undefined at {bad}")
    element = K201Element if binary else K2Element
    return element(program, WindowChecked(budget.window))


# ---------------------------------------------------------------------------
# printing

def _table(values: Sequence[int | None]) -> str:
    return "[" + " ".join("." if v is None else str(v) for v in values) + "]"


def _undefined_reason(r) -> str:
    if isinstance(r, UndefinedZeroStream):
        return "undefined: zero stream"
    if isinstance(r, UndefinedAtWindow):
        return f"undefined at {r.x}: {_undefined_reason(r.outcome)}"
    if isinstance(r, OutOfFuel):
        return f"out of fuel after {r.steps} steps"
    if isinstance(r, OracleUndefined):
        return f"undefined: oracle undefined at {show_index(r.query)}"
    if isinstance(r, Diverged):
        return _undefined_reason(r.outcome)
    return "undefined"


def render(model: str, value, budget: Budget) -> str:
    if model == "K1":
        return decimal(value.index)
    if model == "E":
        return "{" + ",".join(str(n) for n in sorted(value.below(budget.window, budget.stage))) + "}"
    values = value.values(budget.window, budget)
    return f"{_table(values)} index={show_index(value.program.index)}"


def _defined(r) -> bool:
    return getattr(r, "defined", True) is not False


# ---------------------------------------------------------------------------
# apply

def cmd_apply(cfg: RunConfig, a_text: str, b_text: str, out=print) -> int:
    b = cfg.budget
    a, c = parse_element(cfg.model, a_text, b), parse_element(cfg.model, b_text, b)
    pca = _pca(cfg.model)
    r = pca.apply(a, c, b)
    if not _defined(r):
        out(_undefined_reason(r))
        return 2
    out(render(cfg.model, r, b))
    if cfg.model == "B":
        holes = [x for x, v in enumerate(r.values(b.window, b)) if v is None]
        out("defined (a partial function" + (f"; undefined at {holes[0]}" if holes else "") + ")")
    else:
        out("defined" + ("" if cfg.model in ("K1", "E") else f" at window {b.window}"))
    return 0


# ---------------------------------------------------------------------------
# compile

_LAMBDA = re.compile(r"\s*(?:lambda|λ|\\)\s+([A-Za-z_][A-Za-z0-9_']*(?:\s+[A-Za-z_][A-Za-z0-9_']*)*)"
                     r"\s*\.\s*(.*)$", re.S)


def parse_lambda(text: str):
    """'lambda x y. body' -> (["x", "y"], body term)."""
    m = _LAMBDA.match(text)
    if m:
        names, body = m.group(1).split(), m.group(2)
    else:
        names, body = [], text
    if len(set(names)) != len(names):
        raise UsageError("a variable is declared twice")
    term = parse(body)
    extra = sorted(free_vars(term) - set(names))
    if extra:
        raise UsageError("open term: free variable" + ("s " if len(extra) > 1 else " ")
                         + ", ".join(extra))
    return names, term


def _samplers(model: str) -> Callable[[random.Random], Any]:
    return {
        "K1": sample_k1,
        "K2": random_k2,
        "K201": random_k201,
        "B": sample_b,
        "CL": lambda rng: random_term(rng, 2, [Const("k"), Const("s")]),
    }[model]


ESCALATION = (1, 10, 100)


def _fuel_limited(r) -> bool:
    while isinstance(r, (Diverged, UndefinedAtWindow)):
        r = r.outcome
    return isinstance(r, OutOfFuel)


def _compare(pca, left, right, budget: Budget) -> str:
    """"agree", "disagree" or "unsettled" (some side ran out of fuel)."""
    if _defined(left) and _defined(right):
        if hasattr(left, "program"):
            return _compare_points(left, right, budget)
        return "agree" if pca.equal(left, right, budget) else "disagree"
    if any(not _defined(r) and _fuel_limited(r) for r in (left, right)):
        return "unsettled"
    return "agree" if _defined(left) == _defined(right) else "disagree"


def _compare_points(left, right, budget: Budget) -> str:
    """Pointwise at the window; a point where either side ran out of fuel is unsettled."""
    binary = getattr(left, "binary", False)
    unsettled = False
    for a, b in zip(S.points(left.program, budget.window, budget),
                    S.points(right.program, budget.window, budget)):
        if isinstance(a, OutOfFuel) or isinstance(b, OutOfFuel):
            unsettled = True
        elif a.defined != b.defined:
            return "disagree"
        elif a.defined:
            va, vb = (a.value % 2, b.value % 2) if binary else (a.value, b.value)
            if va != vb:
                return "disagree"
    return "unsettled" if unsettled else "agree"


def _tally(out, verdicts: list[str], where: str) -> int:
    counts = {v: verdicts.count(v) for v in ("agree", "disagree", "unsettled")}
    summary = ", ".join(f"{n} {v}" for v, n in counts.items() if n)
    if counts["agree"] == len(verdicts):
        out(f"verified: {len(verdicts)} of {len(verdicts)} seeded argument tuples agree "
            f"with substitution ({where})")
        return 0
    out(f"verification failed: {summary} ({where})")
    return 2


def cmd_compile(cfg: RunConfig, text: str, out=print, trials: int = 3) -> int:
    """Print the compiled index, then compare it with direct substitution on
    seeded arguments.  A tuple that runs out of fuel is retried with 10x and
    100x the steps before it is reported as unsettled."""
    names, body = parse_lambda(text)
    compiled = abstract_all(names, body)
    rng = random.Random(cfg.seed)
    b = cfg.budget
    top = b.with_(steps=b.steps * ESCALATION[-1])
    if cfg.model == "CL":
        out(show(compiled))
        verdicts = []
        for _ in range(trials):
            args = [_samplers("CL")(rng) for _ in names]
            direct = body
            for n, a in zip(names, args):
                direct = substitute(direct, n, a)
            for m in ESCALATION:
                left = normalize(ap(compiled, *args) if args else compiled, b.steps * m * 4)
                right = normalize(direct, b.steps * m)
                if left is not None or right is not None:
                    break
            verdict = "unsettled" if left is None and right is None else \
                "agree" if left == right else "disagree"
            verdicts.append(verdict)
        return _tally(out, verdicts, f"weak normal forms, up to {top.steps} steps")
    if cfg.model == "E":
        raise UsageError("compile targets K1, K2, K201, B or CL")
    pca = _pca(cfg.model)
    element = eval_term(compiled, pca, b)
    if not _defined(element):
        out(_undefined_reason(element))
        return 2
    out(decimal(element.index) if cfg.model == "K1" else decimal(element.program.index))
    verdicts = []
    for _ in range(trials):
        env = {f"arg{i}": _samplers(cfg.model)(rng) for i in range(len(names))}
        consts = [Const(f"arg{i}") for i in range(len(names))]
        direct = body
        for n, c in zip(names, consts):
            direct = substitute(direct, n, c)
        applied = ap(Const("compiled"), *consts) if consts else Const("compiled")
        for m in ESCALATION:
            bm = b.with_(steps=b.steps * m)
            left = eval_term(applied, pca, bm, {**env, "compiled": element})
            right = eval_term(direct, pca, bm, env)
            verdict = _compare(pca, left, right, bm)
            if verdict != "unsettled":
                break
        verdicts.append(verdict)
    return _tally(out, verdicts, f"window {b.window}, up to {top.steps} steps")


# ---------------------------------------------------------------------------
# candidate files

def _graph_images():
    from .planted import graph_identity_by_images
    return graph_identity_by_images()


def _builtins() -> dict[str, Callable[[], Any]]:
    from . import planted
    out: dict[str, Callable[[], Any]] = {
        f"identity-{m}": (lambda m=m: identity_embedding(m)) for m in MODELS}
    out.update({
        "identity-E-images": _graph_images,
        "inclusion-K2-B": inclusion_K2_to_B,
        "graph-K2-K201": embed_K2_to_K201,
        "planted-homomorphism-defect": planted_homomorphism_defect,
        "planted-collapse": planted_collapse,
        "truncating-fake": planted.truncating_fake,
        "parity-fake": planted.parity_fake,
        "prefix-code-fake": planted.prefix_code_fake,
        "decision-fake": planted.decision_fake,
    })
    return out


def load_candidate(text: str):
    fields: dict[str, str] = {}
    for number, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, value = line.partition(" ")
        value = value.strip()
        if key not in ("source", "target", "map") or not value:
            raise UsageError(f"candidate file line {number}: expected 'source|target|map <value>'")
        if key in fields:
            raise UsageError(f"candidate file line {number}: {key} given twice")
        fields[key] = value
    missing = [k for k in ("source", "target", "map") if k not in fields]
    if missing:
        raise UsageError(f"candidate file: missing {', '.join(missing)}")
    builtins = _builtins()
    if fields["map"] not in builtins:
        raise UsageError(f"unknown map {fields['map']!r}; known maps: {', '.join(sorted(builtins))}")
    F = builtins[fields["map"]]()
    for key in ("source", "target"):
        if getattr(F, key).name != fields[key]:
            raise UsageError(f"map {fields['map']} has {key} {getattr(F, key).name}, "
                             f"not {fields[key]}")
    return F


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


# ---------------------------------------------------------------------------
# probes and checks

PROBES = ("sigma", "monotone", "decision")


def _sigma_pool(F):
    from . import planted
    if isinstance(F.source, BPca):
        return planted.truncation_pool()
    return [G.FiniteSet(i for i in range(3) if mask >> i & 1) for mask in range(8)]


def _run_probe(name: str, F, budget: Budget):
    """(status line list, witness or None); None when the probe does not apply."""
    from . import probes
    if name == "sigma":
        if not isinstance(F.source, (BPca, G.GraphPca)):
            return None
        return probes.probe_sigma_collision(F, _sigma_pool(F), budget)
    if name == "monotone":
        if not isinstance(F.source, G.GraphPca):
            return None
        return probes.probe_monotone_split(F, budget=budget)
    if not isinstance(F.source, G.GraphPca) or F.images is None:
        return None
    return probes.probe_decision_leak(F, budget=budget).result


def cmd_probe(cfg: RunConfig, path: str, probe: str, out=print) -> int:
    F = load_candidate(_read(path))
    names = PROBES if probe == "all" else (probe,)
    b = cfg.budget
    witness = None
    for name in names:
        r = _run_probe(name, F, b)
        if r is None:
            if probe != "all":
                raise UsageError(f"probe {name} does not apply to candidate {F.name}")
            out(f"{name}: not applicable to {F.name}")
            continue
        out(f"{name}: {r.status}" + (f" ({r.detail})" if r.detail else ""))
        if r.witness is not None and witness is None:
            witness = r.witness
    if witness is not None:
        _emit_witness(cfg, witness, out)
        return 3
    out(f"consistent at bounds (steps={b.steps}, window={b.window}, stage={b.stage})")
    return 0


def _emit_witness(cfg: RunConfig, witness, out) -> None:
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(witness.log())
        out(f"witness {witness.kind} written to {cfg.out} (replays: {fmt(witness.replay())})")
    else:
        out(witness.log().rstrip("\n"))


def cmd_check(cfg: RunConfig, path: str, samples: int, out=print) -> int:
    F = load_candidate(_read(path))
    if F.sampler is None:
        raise UsageError(f"candidate {F.name} has no sampler")
    report = check_embedding(F, samples=samples, budget=cfg.budget, seed=cfg.seed)
    out(str(report))
    if report.witness is not None:
        _emit_witness(cfg, report.witness, out)
        return 3
    return 0


# ---------------------------------------------------------------------------
# gadgets

def cmd_gadget(cfg: RunConfig, name: str, args: list[str], bound: int, out=print) -> int:
    b = cfg.budget
    if name in ("R", "C"):
        if len(args) != 2:
            raise UsageError(f"gadget {name} takes two graph sets")
        x, y = (parse_graph(a) for a in args)
        if name == "R":
            r = G.g_apply_all(G.gadget_R(), x, y)
        else:
            xs, ys = (s.below(bound, b.stage) for s in (x, y))
            r = G.g_apply_all(G.gadget_C([0], [0, 1], bound), G.joined(xs, bound), G.joined(ys, bound))
        out(render("E", r, b))
        return 0
    if name == "tot":
        if len(args) != 1 or not args[0].isdigit():
            raise UsageError("gadget tot takes one program index")
        n = int(args[0])
        r = tot_query(n, b)
        jump = tot_jump(window=b.window)
        known = jump.answer(n)
        certified = "" if known is None else f"; certified table says {'total' if known else 'partial'}"
        if not _defined(r):
            out(_undefined_reason(r) + certified)
            return 2
        out(f"defined at window {b.window}{certified}")
        return 0
    raise UsageError(f"unknown gadget {name!r}; choose R, C or tot")


# ---------------------------------------------------------------------------
# acceptance

def cmd_acceptance(cfg: RunConfig, only: str, out=print) -> int:
    from .acceptance import parse_selection, run_suite
    try:
        numbers = parse_selection(only)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    results = run_suite(numbers, cfg.seed, echo=out)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            for r in results:
                fh.write("\n".join(r.log_lines()) + "\n")
    return 0 if all(r.passed for r in results) else 4


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", default="K1", choices=MODELS + ("CL",),
                        help="the pca to work in (CL only for compile)")
    common.add_argument("--steps", type=int, default=100_000, help="fuel per evaluation")
    common.add_argument("--window", type=int, default=32, help="points checked for totality/equality")
    common.add_argument("--stage", type=int, default=64, help="stage for graph-model approximations")
    common.add_argument("--seed", type=int, default=0, help="seed for every random choice")
    common.add_argument("--out", help="file for witness logs or the acceptance log")

    p = argparse.ArgumentParser(prog="pcalab", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter,
                                epilog=LITERAL_HELP)
    sub = p.add_subparsers(dest="command", required=True)
    raw = argparse.RawDescriptionHelpFormatter

    a = sub.add_parser("apply", parents=[common], help="apply one element to another",
                       epilog=LITERAL_HELP, formatter_class=raw)
    a.add_argument("a")
    a.add_argument("b")

    c = sub.add_parser("compile", parents=[common], help="compile a lambda term to k and s",
                       epilog=LITERAL_HELP, formatter_class=raw)
    c.add_argument("file", help="term file, or - for standard input")

    pr = sub.add_parser("probe", parents=[common], help="run a refutation probe on a candidate",
                        epilog=LITERAL_HELP, formatter_class=raw)
    pr.add_argument("candidate")
    pr.add_argument("probe", choices=PROBES + ("all",))

    ch = sub.add_parser("check", parents=[common], help="sample a candidate embedding's claims",
                        epilog=LITERAL_HELP, formatter_class=raw)
    ch.add_argument("candidate")
    ch.add_argument("--samples", type=int, default=100)

    g = sub.add_parser("gadget", parents=[common], help="evaluate a gadget (R, C, tot)",
                       epilog=LITERAL_HELP, formatter_class=raw)
    g.add_argument("name")
    g.add_argument("args", nargs="*")
    g.add_argument("--bound", type=int, default=6, help="agreement bound for C")

    ac = sub.add_parser("acceptance", parents=[common], help="run the acceptance criteria")
    ac.add_argument("--only", default="all", help='criteria to run: "all", "1-9", "2,5"')
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig(args.model, args.steps, args.window, args.stage, args.seed,
                        getattr(args, "file", None) or getattr(args, "candidate", None), args.out)
        if args.command != "compile" and args.model == "CL":
            raise UsageError("CL is only a target for compile")
        if args.command == "apply":
            return cmd_apply(cfg, args.a, args.b)
        if args.command == "compile":
            return cmd_compile(cfg, _read(args.file))
        if args.command == "probe":
            return cmd_probe(cfg, args.candidate, args.probe)
        if args.command == "check":
            return cmd_check(cfg, args.candidate, args.samples)
        if args.command == "gadget":
            return cmd_gadget(cfg, args.name, args.args, args.bound)
        return cmd_acceptance(cfg, args.only)
    except (UsageError, TermSyntaxError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
