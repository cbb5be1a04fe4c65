"""Register machine with oracle access, Goedel numbering, s-m-n and fixpoints.

Every model's application bottoms out in :func:`evaluate`.  Programs are
lists of instructions over unbounded natural-number registers.  Register 0
holds the input; a run halts on ``halt r``, on a jump past the end, or by
falling off the end (output register 0).

Indices: ``Program.index`` is a bijective code (every natural decodes to a
program, encode(decode(n)) == n).  The *machine numbering* used by the
``call``/``smn`` opcodes and by the models is :func:`phi`, which agrees with
the bijective decoding except on a small block of short codes bound in
:data:`CODES`.  Short codes keep the heads of stream elements small enough
to scan.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

import gmpy2

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))


# ---------------------------------------------------------------------------
# pairing and finite sets

# codes built from huge frozen indices get unpaired over and over; remembering
# them avoids repeated square roots of multi-thousand-digit numbers
_BIG = 1 << 512
_UNPAIRS: dict[int, tuple[int, int]] = {}
_PAIRS: dict[tuple[int, int], int] = {}


def pair(x: int, y: int) -> int:
    """Cantor pairing (x+y)(x+y+1)/2 + y."""
    s = x + y
    if s < _BIG:
        return s * (s + 1) // 2 + y
    z = _PAIRS.get((x, y))
    if z is None:
        if len(_UNPAIRS) > 200000:
            _UNPAIRS.clear()
            _PAIRS.clear()
        z = int(gmpy2.mpz(s) * (s + 1) // 2 + y)
        _UNPAIRS[z] = (x, y)
        _PAIRS[(x, y)] = z
    return z


def unpair(z: int) -> tuple[int, int]:
    if z > _BIG:
        hit = _UNPAIRS.get(z)
        if hit is not None:
            return hit
        w = int((gmpy2.isqrt(8 * z + 1) - 1) // 2)
    else:
        w = (math.isqrt(8 * z + 1) - 1) // 2
    y = z - w * (w + 1) // 2
    return w - y, y


def finite_set_decode(u: int) -> frozenset[int]:
    """D_u: the set of bit positions of u."""
    out = []
    i = 0
    while u:
        low = u & -u
        i = low.bit_length() - 1
        out.append(i)
        u ^= low
    return frozenset(out)


def finite_set_encode(items: Iterable[int]) -> int:
    u = 0
    for x in set(items):
        u |= 1 << x
    return u


def tuple_encode(args: Sequence[int]) -> int:
    """Bijection N^k -> N for fixed k >= 1 (right-nested Cantor pairs)."""
    if len(args) == 1:
        return args[0]
    return pair(args[0], tuple_encode(args[1:]))


def tuple_decode(code: int, k: int) -> tuple[int, ...]:
    if k == 1:
        return (code,)
    head, rest = unpair(code)
    return (head,) + tuple_decode(rest, k - 1)


# ---------------------------------------------------------------------------
# instruction set

# name -> (opcode, arity); argument kinds are documented in OPCODE_DOC
OPCODES: dict[str, tuple[int, int]] = {
    "halt": (0, 1),
    "inc": (1, 1),
    "decjz": (2, 2),
    "copy": (3, 2),
    "query": (4, 2),
    "const": (5, 2),
    "add": (6, 3),
    "sub": (7, 3),
    "mul": (8, 3),
    "div": (9, 3),
    "mod": (10, 3),
    "pair": (11, 3),
    "unpair": (12, 3),
    "jeq": (13, 3),
    "jump": (14, 1),
    "smn": (15, 3),
    "call": (16, 3),
    "callt": (17, 4),
    "calln": (18, 3),
}
NOPS = len(OPCODES)
OPNAMES = {code: name for name, (code, _) in OPCODES.items()}
ARITY = {code: arity for code, arity in OPCODES.values()}

OPCODE_DOC = """\
halt r          stop, output r
inc r           r += 1
decjz r t       if r == 0 jump t else r -= 1
copy d s        d = s
query d s       d = oracle(s)
const d v       d = v
add/sub/mul/div/mod d a b   arithmetic (sub truncates at 0, x/0 = 0, x%0 = x)
pair d a b      d = <a, b>
unpair d e s    (d, e) = unpair(s)
jeq a b t       if a == b jump t
jump t          jump t
smn d e x       d = index of smn(phi(e), [x])
call d e x      d = phi(e)(x) with the current oracle
callt d e x t   d = phi(e)(x) with oracle q -> phi(t)(q) run on the current oracle
calln d e x     d = phi(e)(x) with the empty oracle
"""


@dataclass(frozen=True)
class Instruction:
    """One instruction.

    Any opcode number and any argument count is allowed, so that every list
    of naturals is an instruction and the numbering stays a bijection.  An
    opcode outside the table does nothing; missing arguments read as 0 and
    surplus ones are ignored.  :meth:`of` builds the well-formed ones.
    """

    opcode: int
    args: tuple[int, ...]

    @classmethod
    def of(cls, op: str, args: Sequence[int]) -> "Instruction":
        if op not in OPCODES:
            raise ValueError(f"unknown opcode {op!r}")
        code, arity = OPCODES[op]
        if len(args) != arity:
            raise ValueError(f"{op} takes {arity} arguments")
        if any(not isinstance(a, int) or a < 0 for a in args):
            raise ValueError(f"{op}: arguments must be natural numbers")
        return cls(code, tuple(args))

    @property
    def op(self) -> str:
        return OPNAMES.get(self.opcode, f"op{self.opcode}")

    @property
    def well_formed(self) -> bool:
        return ARITY.get(self.opcode) == len(self.args)

    def padded(self) -> tuple[int, ...]:
        """Arguments as the machine reads them."""
        k = ARITY.get(self.opcode, 0)
        return (self.args + (0,) * k)[:k]

    def __str__(self):
        return " ".join([self.op, *map(str, self.args)])


# Indices: a program is a word over 65536 digit symbols and two separators
# (between arguments, between instructions); numerals are written in
# bijective base 65536 and the word is read in bijective base 65538.  The
# size of an index is close to the total size of the numbers it contains,
# which keeps indices of nested constructions from blowing up.

_DIGIT = 1 << 16
_ARG, _INS = _DIGIT, _DIGIT + 1
_WORD = _DIGIT + 2
_POWERS: dict[tuple[int, int], object] = {}


def _power(base: int, k: int):
    key = (base, k)
    p = _POWERS.get(key)
    if p is None:
        p = gmpy2.mpz(base) ** k
        if len(_POWERS) > 4096:
            _POWERS.clear()
        _POWERS[key] = p
    return p


def _value(digits: Sequence[int], base: int):
    n = len(digits)
    if n <= 48:
        v = gmpy2.mpz(0)
        for d in digits:
            v = v * base + d
        return v
    h = n // 2
    return _value(digits[:h], base) * _power(base, n - h) + _value(digits[h:], base)


def _digits(v, length: int, base: int) -> list[int]:
    if length <= 48:
        out = [0] * length
        for i in range(length - 1, -1, -1):
            v, out[i] = gmpy2.f_divmod(v, base)
        return [int(d) for d in out]
    h = length // 2
    hi, lo = gmpy2.f_divmod(v, _power(base, length - h))
    return _digits(hi, h, base) + _digits(lo, length - h, base)


def _bij_encode(digits: Sequence[int], base: int) -> int:
    """Bijective numeral: words of length L follow all shorter words."""
    n = len(digits)
    return int((_power(base, n) - 1) // (base - 1) + _value(digits, base))


def _bij_decode(n: int, base: int) -> list[int]:
    v = gmpy2.mpz(n) * (base - 1) + 1
    length = max(int(gmpy2.mpz(v).bit_length() / math.log2(base)) - 1, 0)
    while _power(base, length + 1) <= v:
        length += 1
    while length and _power(base, length) > v:
        length -= 1
    return _digits(gmpy2.mpz(n) - (_power(base, length) - 1) // (base - 1), length, base)


def _numeral(c: int) -> list[int]:
    return _bij_decode(c, _DIGIT)


def _word(prog_instructions) -> list[int]:
    out: list[int] = []
    for i, ins in enumerate(prog_instructions):
        if i:
            out.append(_INS)
        for j, c in enumerate((ins.opcode,) + ins.args):
            if j:
                out.append(_ARG)
            out.extend(_numeral(c))
    return out


def _unword(word: Sequence[int]) -> list[Instruction]:
    out, nums, cur = [], [], []
    for sym in list(word) + [_INS]:
        if sym < _DIGIT:
            cur.append(sym)
            continue
        nums.append(_bij_encode(cur, _DIGIT))
        cur = []
        if sym == _INS:
            out.append(Instruction(nums[0], tuple(nums[1:])))
            nums = []
    return out


class Program:
    """An immutable instruction list; interned by index."""

    __slots__ = ("instructions", "_index", "_compiled", "uid", "__weakref__")
    _serial = 0

    def __init__(self, instructions: Iterable[Instruction]):
        self.instructions = tuple(instructions)
        self._index: int | None = None
        self._compiled = None
        Program._serial += 1
        self.uid = Program._serial

    @property
    def index(self) -> int:
        if self._index is None:
            if not self.instructions:
                self._index = 0
            else:
                self._index = _bij_encode(_word(self.instructions), _WORD) + 1
        return self._index

    @classmethod
    def decode(cls, index: int) -> "Program":
        if index < 0:
            raise ValueError("indices are natural numbers")
        cached = _DECODED.get(index)
        if cached is not None:
            return cached
        if index == 0:
            prog = cls(())
        else:
            prog = cls(_unword(_bij_decode(index - 1, _WORD)))
        prog._index = index
        _remember(prog)
        return prog

    def __len__(self):
        return len(self.instructions)

    def __eq__(self, other):
        return isinstance(other, Program) and self.instructions == other.instructions

    def __hash__(self):
        return hash(self.instructions)

    def __repr__(self):
        return f"Program({len(self)} instructions)"

    def to_text(self) -> str:
        return "".join(f"{i}\n" for i in self.instructions)

    @classmethod
    def from_text(cls, text: str) -> "Program":
        out = []
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip():
                continue
            op, *args = line.split()
            try:
                nums = tuple(int(a) for a in args)
                if op.startswith("op") and op[2:].isdigit():
                    out.append(Instruction(int(op[2:]), nums))
                elif op in OPCODES and len(nums) != OPCODES[op][1]:
                    out.append(Instruction(OPCODES[op][0], nums))
                else:
                    out.append(Instruction.of(op, nums))
            except ValueError as exc:
                raise ValueError(f"line {lineno}: {exc}") from None
        return cls(out)

    def compiled(self):
        if self._compiled is None:
            code = []
            for pc, i in enumerate(self.instructions):
                if i.opcode in ARITY:
                    code.append((i.opcode,) + i.padded())
                else:
                    code.append((14, pc + 1))
            self._compiled = tuple(code)
        return self._compiled


_DECODED: dict[int, Program] = {}


def _remember(prog: Program) -> None:
    if len(_DECODED) > 200_000:
        _DECODED.clear()
    _DECODED[prog.index] = prog


def intern(prog: Program) -> Program:
    """Canonical Program object for ``prog``'s index (keeps memo keys stable)."""
    found = _DECODED.get(prog.index)
    if found is not None and found == prog:
        return found
    _remember(prog)
    return prog


def assemble(lines: Sequence[tuple]) -> Program:
    """Build a program from tuples; string arguments in jump slots are labels.

    ``("label", name)`` marks a position.  The jump argument of ``decjz``,
    ``jeq`` and ``jump`` may be a label name.
    """
    labels: dict[str, int] = {}
    body = []
    for line in lines:
        if line[0] == "label":
            labels[line[1]] = len(body)
        else:
            body.append(line)
    out = []
    for op, *args in body:
        args = [labels[a] if isinstance(a, str) else a for a in args]
        out.append(Instruction.of(op, tuple(args)))
    return intern(Program(out))


# ---------------------------------------------------------------------------
# short codes

class CodeTable:
    """Short codes for frequently used programs.

    Codes are handed out consecutively from 1 in registration order, so
    values depend on import order only.  ``phi`` consults the table first.
    """

    CEILING = 512

    def __init__(self):
        self._programs: dict[int, Program] = {}
        self._names: dict[str, int] = {}
        self._next = 1

    def reserve(self, name: str) -> int:
        if name in self._names:
            return self._names[name]
        if self._next >= self.CEILING:
            raise RuntimeError("short code table exhausted")
        code = self._next
        self._next += 1
        self._names[name] = code
        return code

    def bind(self, code: int, program: Program) -> int:
        if code in self._programs and self._programs[code] != program:
            raise ValueError(f"short code {code} already bound")
        self._programs[code] = intern(program)
        return code

    def register(self, name: str, program: Program) -> int:
        return self.bind(self.reserve(name), program)

    def fixpoint(self, name: str, build: Callable[[int], "Program"]) -> int:
        """A short code e with phi(e) == build(e): the program may use its own code."""
        code = self.reserve(name)
        return self.bind(code, build(code))

    def code(self, name: str) -> int:
        return self._names[name]

    def get(self, code: int) -> Program | None:
        return self._programs.get(code)

    def names(self) -> dict[str, int]:
        return dict(self._names)


CODES = CodeTable()


def phi(n: int) -> Program:
    """The machine numbering: short code if bound, else the bijective decoding."""
    if n < CodeTable.CEILING:
        prog = CODES.get(n)
        if prog is not None:
            return prog
    return Program.decode(n)


def decimal(n: int) -> str:
    """Decimal text of n, without the interpreter's limit on long conversions."""
    return gmpy2.mpz(n).digits(10)


def show_index(n: int, width: int = 16) -> str:
    s = decimal(n)
    return s if len(s) <= width else f"{s[:8]}...({len(s)} digits)"


def code_of(program: Program) -> int:
    """An index n with phi(n) == program."""
    n = program.index
    if n < CodeTable.CEILING and CODES.get(n) not in (None, program):
        raise ValueError("program index collides with a short code")
    return n


# ---------------------------------------------------------------------------
# outcomes and budgets

@dataclass(frozen=True)
class Halted:
    value: int
    halted = True
    defined = True


@dataclass(frozen=True)
class OutOfFuel:
    steps: int
    halted = False
    defined = False


@dataclass(frozen=True)
class OracleUndefined:
    query: int
    halted = False
    defined = False


EvalOutcome = Halted | OutOfFuel | OracleUndefined


@dataclass(frozen=True)
class Budget:
    steps: int = 100_000
    window: int = 32
    stage: int = 64

    def __post_init__(self):
        if min(self.steps, self.window, self.stage) <= 0:
            raise ValueError("budget components must be positive")

    def with_(self, **kw) -> "Budget":
        return Budget(**{**self.__dict__, **kw})


# ---------------------------------------------------------------------------
# oracles

class _Fuel(Exception):
    pass


class _Undefined(Exception):
    def __init__(self, query: int):
        self.query = query


class Oracle:
    """Base class; ``key`` is a hashable identity when the oracle is pure."""

    key: object = None

    def ask(self, q: int, ctx: "_Context") -> int:
        raise NotImplementedError


class NullOracle(Oracle):
    key = 0

    def ask(self, q, ctx):
        raise _Undefined(q)

    def __repr__(self):
        return "NullOracle()"


NULL = NullOracle()


class TotalFn(Oracle):
    def __init__(self, fn: Callable[[int], int]):
        self.fn = fn

    def ask(self, q, ctx):
        return self.fn(q)


class PartialFn(Oracle):
    """Finite table, or a callable returning None where undefined."""

    def __init__(self, table: Mapping[int, int] | Callable[[int], int | None]):
        self.table = table

    def ask(self, q, ctx):
        if callable(self.table):
            v = self.table(q)
        else:
            v = self.table.get(q)
        if v is None:
            raise _Undefined(q)
        return v


class SetOracle(Oracle):
    def __init__(self, member: Callable[[int], bool] | Iterable[int]):
        if not callable(member):
            members = frozenset(member)
            member = members.__contains__
        self.member = member

    def ask(self, q, ctx):
        return 1 if self.member(q) else 0


class Join(Oracle):
    def __init__(self, left: Oracle, right: Oracle):
        self.left = left
        self.right = right

    def ask(self, q, ctx):
        side = self.left if q % 2 == 0 else self.right
        try:
            return side.ask(q // 2, ctx)
        except _Undefined:
            raise _Undefined(q) from None


_OKEYS: dict[tuple, int] = {}


class ProgramOracle(Oracle):
    """q -> phi(t)(q) evaluated relative to ``base`` (shares the caller's fuel)."""

    def __init__(self, program: Program, base: Oracle = NULL):
        self.program = program
        self.base = base
        if base.key is not None:
            k = (program.uid, base.key)
            self.key = _OKEYS.setdefault(k, len(_OKEYS) + 1)

    def ask(self, q, ctx):
        return _call(self.program, q, self.base, ctx)


class Recording(Oracle):
    """Wraps an oracle and logs (query, answer-or-None) in order."""

    def __init__(self, inner: Oracle):
        self.inner = inner
        self.log: list[tuple[int, int | None]] = []

    def ask(self, q, ctx):
        try:
            v = self.inner.ask(q, ctx)
        except _Undefined:
            self.log.append((q, None))
            raise
        self.log.append((q, v))
        return v


# ---------------------------------------------------------------------------
# evaluation

class _Context:
    __slots__ = ("fuel", "depth", "too_deep")

    def __init__(self, fuel: int):
        self.fuel = fuel
        self.depth = 0
        self.too_deep = False


# Nested calls recurse in Python; past this depth a run counts as out of fuel
# rather than overflowing the interpreter's stack.
MAX_DEPTH = 2000


# (program uid, input, oracle key) -> (value or None, query, cost) / lower bound
_MEMO: dict[tuple, tuple] = {}
_FAILS: dict[tuple, int] = {}
_SMN_CACHE: dict[tuple, int] = {}


def clear_caches() -> None:
    _MEMO.clear()
    _FAILS.clear()
    _SMN_CACHE.clear()


def _call(prog: Program, x: int, oracle: Oracle, ctx: _Context) -> int:
    # Memo hits are charged their recorded cost, so fuel accounting is the
    # same as a fresh run.
    okey = oracle.key
    if okey is None:
        if ctx.depth >= MAX_DEPTH:
            ctx.too_deep = True
            ctx.fuel = -1
            raise _Fuel
        ctx.depth += 1
        try:
            return _run(prog, x, oracle, ctx)
        finally:
            ctx.depth -= 1
    key = (prog.uid, x, okey)
    hit = _MEMO.get(key)
    if hit is not None:
        value, query, cost = hit
        if cost > ctx.fuel:
            ctx.fuel = -1
            raise _Fuel
        ctx.fuel -= cost
        if value is None:
            raise _Undefined(query)
        return value
    bound = _FAILS.get(key)
    if bound is not None and ctx.fuel <= bound:
        ctx.fuel = -1
        raise _Fuel
    start = ctx.fuel
    if ctx.depth >= MAX_DEPTH:
        ctx.too_deep = True
        ctx.fuel = -1
        raise _Fuel
    ctx.depth += 1
    try:
        value = _run(prog, x, oracle, ctx)
    except _Undefined as exc:
        _store(key, (None, exc.query, start - ctx.fuel))
        raise
    except _Fuel:
        # a failure caused by depth says nothing about fuel, so it is not remembered
        if not ctx.too_deep and start > _FAILS.get(key, -1):
            _FAILS[key] = start
        raise
    finally:
        ctx.depth -= 1
    _store(key, (value, None, start - ctx.fuel))
    return value


def _store(key, entry):
    if len(_MEMO) > 2_000_000:
        _MEMO.clear()
    _MEMO[key] = entry


INDEX_BITS = 1 << 20


def smn_index(e: int, x: int) -> int:
    key = (e, x)
    found = _SMN_CACHE.get(key)
    if found is None:
        if len(_SMN_CACHE) > 100_000:
            _SMN_CACHE.clear()
        found = code_of(smn(phi(e), [x]))
        _SMN_CACHE[key] = found
    return found


def _run(prog: Program, x: int, oracle: Oracle, ctx: _Context) -> int:
    code = prog.compiled()
    n = len(code)
    regs: dict[int, int] = {0: x}
    get = regs.get
    pc = 0
    while pc < n:
        ctx.fuel -= 1
        if ctx.fuel < 0:
            raise _Fuel
        ins = code[pc]
        op = ins[0]
        pc += 1
        if op == 5:
            regs[ins[1]] = ins[2]
        elif op == 13:
            if get(ins[1], 0) == get(ins[2], 0):
                pc = ins[3]
        elif op == 4:
            regs[ins[1]] = oracle.ask(get(ins[2], 0), ctx)
        elif op == 16:
            regs[ins[1]] = _call(phi(get(ins[2], 0)), get(ins[3], 0), oracle, ctx)
        elif op == 17:
            derived = ProgramOracle(phi(get(ins[4], 0)), oracle)
            regs[ins[1]] = _call(phi(get(ins[2], 0)), get(ins[3], 0), derived, ctx)
        elif op == 18:
            regs[ins[1]] = _call(phi(get(ins[2], 0)), get(ins[3], 0), NULL, ctx)
        elif op == 14:
            if ins[1] == pc - 1:
                # a jump to itself changes nothing, so it spends all remaining fuel
                ctx.fuel = -1
                raise _Fuel
            pc = ins[1]
        elif op == 6:
            regs[ins[1]] = get(ins[2], 0) + get(ins[3], 0)
        elif op == 7:
            regs[ins[1]] = max(get(ins[2], 0) - get(ins[3], 0), 0)
        elif op == 1:
            regs[ins[1]] = get(ins[1], 0) + 1
        elif op == 2:
            v = get(ins[1], 0)
            if v == 0:
                pc = ins[2]
            else:
                regs[ins[1]] = v - 1
        elif op == 3:
            regs[ins[1]] = get(ins[2], 0)
        elif op == 0:
            return get(ins[1], 0)
        elif op == 8:
            regs[ins[1]] = get(ins[2], 0) * get(ins[3], 0)
        elif op == 9:
            b = get(ins[3], 0)
            regs[ins[1]] = get(ins[2], 0) // b if b else 0
        elif op == 10:
            b = get(ins[3], 0)
            regs[ins[1]] = get(ins[2], 0) % b if b else get(ins[2], 0)
        elif op == 11:
            regs[ins[1]] = pair(get(ins[2], 0), get(ins[3], 0))
        elif op == 12:
            a, b = unpair(get(ins[3], 0))
            regs[ins[1]] = a
            regs[ins[2]] = b
        elif op == 15:
            e, v = get(ins[2], 0), get(ins[3], 0)
            if e.bit_length() > INDEX_BITS or v.bit_length() > INDEX_BITS:
                # self-application can double index length at every smn, so
                # runaway growth is treated as running out of fuel
                ctx.fuel = -1
                raise _Fuel
            regs[ins[1]] = smn_index(e, v)
    return get(0, 0)


def evaluate(program: Program | int, x: int, oracle: Oracle = NULL,
             budget: Budget | int = Budget()) -> EvalOutcome:
    """Run ``program`` on ``x`` for at most ``budget.steps`` steps."""
    if isinstance(program, int):
        program = phi(program)
    steps = budget if isinstance(budget, int) else budget.steps
    ctx = _Context(steps)
    try:
        value = _call(program, x, oracle, ctx)
    except _Fuel:
        return OutOfFuel(steps)
    except _Undefined as exc:
        return OracleUndefined(exc.query)
    return Halted(value)


def steps_used(program: Program, x: int, oracle: Oracle = NULL, limit: int = 10**7) -> int | None:
    """Exact step count of a halting run, or None if it fails within ``limit``."""
    ctx = _Context(limit)
    try:
        _call(program, x, oracle, ctx)
    except (_Fuel, _Undefined):
        return None
    return limit - ctx.fuel


# ---------------------------------------------------------------------------
# s-m-n and the recursion theorem

def _shift(ins: Instruction, offset: int) -> Instruction:
    if ins.op in ("jump", "decjz", "jeq"):
        args = ins.padded()
        return Instruction(ins.opcode, args[:-1] + (args[-1] + offset,))
    return ins


def smn(e: Program, frozen: Sequence[int]) -> Program:
    """Freeze leading arguments: smn(e, [a1..ak])(x) = e(<a1, <a2, .. <ak, x>>>)."""
    if not frozen:
        return e
    prefix = []
    for a in reversed(frozen):
        prefix.append(Instruction.of("const", (1, a)))
        prefix.append(Instruction.of("pair", (0, 1, 0)))
    prefix.append(Instruction.of("const", (1, 0)))
    body = [_shift(i, len(prefix)) for i in e.instructions]
    return intern(Program(prefix + body))


def pack(args: Sequence[int], x: int) -> int:
    """The input seen by e when run as smn(e, args) on x."""
    for a in reversed(args):
        x = pair(a, x)
    return x


# U(<x, y>) = phi(phi(x)(x))(y)
_DIAG = assemble([
    ("unpair", 1, 2, 0),
    ("call", 3, 1, 1),
    ("call", 0, 3, 2),
    ("halt", 0),
])


def fixpoint(t: Program) -> Program:
    """Kleene fixed point: returns e with phi(e) ~ phi(t(e)) extensionally."""
    v = assemble([
        ("const", 1, code_of(_DIAG)),
        ("smn", 2, 1, 0),
        ("const", 3, code_of(t)),
        ("call", 0, 3, 2),
        ("halt", 0),
    ])
    return smn(_DIAG, [code_of(v)])


def transformer(template: Program) -> Program:
    """The index transformer z -> smn(template, [z]) as a program."""
    return assemble([
        ("const", 1, code_of(template)),
        ("smn", 0, 1, 0),
        ("halt", 0),
    ])


def _exec_one(code, pc: int, regs: dict, oracle: Oracle, ctx: _Context):
    """Execute one instruction; returns the next pc or ("halt", value)."""
    ins = code[pc]
    op = ins[0]
    get = regs.get
    nxt = pc + 1
    if op == 0:
        return ("halt", get(ins[1], 0))
    if op == 13:
        if get(ins[1], 0) == get(ins[2], 0):
            nxt = ins[3]
    elif op == 14:
        nxt = ins[1]
    elif op == 2:
        v = get(ins[1], 0)
        if v == 0:
            nxt = ins[2]
        else:
            regs[ins[1]] = v - 1
    elif op == 1:
        regs[ins[1]] = get(ins[1], 0) + 1
    elif op == 3:
        regs[ins[1]] = get(ins[2], 0)
    elif op == 4:
        regs[ins[1]] = oracle.ask(get(ins[2], 0), ctx)
    elif op == 5:
        regs[ins[1]] = ins[2]
    elif op in (6, 7, 8, 9, 10, 11):
        a, b = get(ins[2], 0), get(ins[3], 0)
        regs[ins[1]] = {
            6: lambda: a + b,
            7: lambda: max(a - b, 0),
            8: lambda: a * b,
            9: lambda: a // b if b else 0,
            10: lambda: a % b if b else a,
            11: lambda: pair(a, b),
        }[op]()
    elif op == 12:
        regs[ins[1]], regs[ins[2]] = unpair(get(ins[3], 0))
    elif op == 15:
        regs[ins[1]] = smn_index(get(ins[2], 0), get(ins[3], 0))
    else:
        target = phi(get(ins[2], 0))
        if op == 16:
            orc = oracle
        elif op == 17:
            orc = ProgramOracle(phi(get(ins[4], 0)), oracle)
        else:
            orc = NULL
        regs[ins[1]] = _call(target, get(ins[3], 0), orc, ctx)
    return nxt


def detect_cycle(program: Program, x: int, oracle: Oracle = NULL,
                 limit: int = 100_000) -> int | None:
    """Step at which the top frame revisits a configuration, or None.

    A repeated (pc, registers) state is a divergence proof when the oracle
    answers deterministically.  None means the run halted, failed, or no
    repetition showed up within ``limit`` steps.
    """
    code = program.compiled()
    regs: dict[int, int] = {0: x}
    seen = set()
    pc = 0
    ctx = _Context(10**9)
    for step in range(limit):
        if pc >= len(code):
            return None
        state = (pc, tuple(sorted((k, v) for k, v in regs.items() if v)))
        if state in seen:
            return step
        seen.add(state)
        try:
            pc = _exec_one(code, pc, regs, oracle, ctx)
        except (_Undefined, _Fuel):
            return None
        if isinstance(pc, tuple):
            return None
    return None
