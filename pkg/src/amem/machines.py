"""Bounded nondeterministic register programs and their configuration graphs.

A register program stands in for a space-bounded Turing machine: each
register holds a value bounded by a polynomial in the input length, so the
set of configurations (program counter plus register values) is polynomial.

Program text::

    prog even_length
    reg i bound n
    reg p bound 1
    start L0
    L0: inc i goto L1
    ...

Instructions: ``inc r goto L``, ``dec r goto L``, ``set r <poly> goto L``,
``copy r s goto L``, ``brz r Lz Lnz``, ``breq r s Le Lne``,
``read r L1 L0``, ``choice L L'``, ``accept``, ``reject``. A ``;`` separates
statements like a newline does.
"""
from __future__ import annotations

import math
import re
from collections import deque
from dataclasses import dataclass, field

from .core import SourceError
from .semantics import BoundExceeded

DEFAULT_VERTEX_CAP = 200_000


class ProgramError(ValueError):
    pass


class CyclicMachine(RuntimeError):
    """The machine can revisit a configuration."""


@dataclass(frozen=True)
class Poly:
    """Polynomial in ``n`` with non-negative integer coefficients (low degree first)."""

    coeffs: tuple[int, ...] = (0,)

    _TERM = re.compile(r"^(\d+)?\s*\*?\s*(n)?(?:\s*\^\s*(\d+))?$")

    @classmethod
    def const(cls, k: int) -> Poly:
        return cls((k,))

    @classmethod
    def parse(cls, text: str | int) -> Poly:
        if isinstance(text, int):
            return cls.const(text)
        text = text.strip()
        if not text:
            raise ValueError("empty polynomial")
        coeffs: dict[int, int] = {}
        for term in text.split("+"):
            term = term.strip()
            m = cls._TERM.match(term)
            if not term or not m or (m.group(1) is None and m.group(2) is None):
                raise ValueError(f"bad polynomial term {term!r}")
            coef, var, power = m.groups()
            if power is not None and var is None:
                raise ValueError(f"bad polynomial term {term!r}")
            c = int(coef) if coef is not None else 1
            d = (int(power) if power is not None else 1) if var else 0
            coeffs[d] = coeffs.get(d, 0) + c
        top = max(coeffs)
        return cls(tuple(coeffs.get(i, 0) for i in range(top + 1)))

    def __call__(self, n: int) -> int:
        return sum(c * n ** i for i, c in enumerate(self.coeffs))

    def __add__(self, other: Poly) -> Poly:
        k = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (k - len(self.coeffs))
        b = other.coeffs + (0,) * (k - len(other.coeffs))
        return Poly(tuple(x + y for x, y in zip(a, b)))

    def __mul__(self, other: Poly) -> Poly:
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            for j, y in enumerate(other.coeffs):
                out[i + j] += x * y
        return Poly(tuple(out))

    def __str__(self) -> str:
        parts = []
        for d, c in enumerate(self.coeffs):
            if not c:
                continue
            if d == 0:
                parts.append(str(c))
            else:
                var = "n" if d == 1 else f"n^{d}"
                parts.append(var if c == 1 else f"{c}{var}")
        return "+".join(reversed(parts)) or "0"


BoundFn = Poly


@dataclass(frozen=True)
class Instr:
    op: str
    args: tuple

    def targets(self) -> tuple[str, ...]:
        op, a = self.op, self.args
        if op in ("inc", "dec"):
            return (a[1],)
        if op in ("set", "copy"):
            return (a[2],)
        if op in ("brz", "read"):
            return (a[1], a[2])
        if op == "breq":
            return (a[2], a[3])
        if op == "choice":
            return a
        return ()

    def __str__(self) -> str:
        op, a = self.op, self.args
        if op in ("inc", "dec"):
            return f"{op} {a[0]} goto {a[1]}"
        if op == "set":
            return f"set {a[0]} {a[1]} goto {a[2]}"
        if op == "copy":
            return f"copy {a[0]} {a[1]} goto {a[2]}"
        return " ".join((op,) + tuple(str(x) for x in a))


@dataclass(frozen=True)
class RegisterProgram:
    name: str
    registers: tuple[tuple[str, Poly], ...]
    instructions: tuple[tuple[str, Instr], ...]
    start: str

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(lab for lab, _ in self.instructions)

    def instruction(self, label: str) -> Instr:
        return self._table[label]

    @property
    def _table(self) -> dict[str, Instr]:
        return dict(self.instructions)

    def register_index(self) -> dict[str, int]:
        return {r: i for i, (r, _) in enumerate(self.registers)}

    def bounds(self, n: int) -> tuple[int, ...]:
        return tuple(b(n) for _, b in self.registers)

    def to_text(self) -> str:
        lines = [f"prog {self.name}"]
        lines += [f"reg {r} bound {b}" for r, b in self.registers]
        lines.append(f"start {self.start}")
        lines += [f"{lab}: {ins}" for lab, ins in self.instructions]
        return "\n".join(lines) + "\n"


@dataclass(frozen=True, order=True)
class ProgramConfig:
    pc: str
    regs: tuple[int, ...]

    def __str__(self) -> str:
        return f"{self.pc}{list(self.regs)}"


_LABEL = r"[A-Za-z_][A-Za-z0-9_.']*"
_LABEL_RE = re.compile(_LABEL)

_ARITY = {"inc": 3, "dec": 3, "set": 4, "copy": 4, "brz": 3, "breq": 4,
          "read": 3, "choice": 2, "accept": 0, "reject": 0}


def _statements(text: str):
    for lineno, raw in enumerate(text.splitlines(), 1):
        for piece in raw.split("#", 1)[0].split(";"):
            if piece.strip():
                yield lineno, piece.strip()


def parse_program(text: str) -> RegisterProgram:
    name = "program"
    registers: list[tuple[str, Poly]] = []
    instrs: list[tuple[str, Instr]] = []
    start = None
    for lineno, stmt in _statements(text):
        words = stmt.split()
        if words[0] == "prog":
            if len(words) != 2:
                raise SourceError("expected 'prog <name>'", lineno)
            name = words[1]
            continue
        if words[0] == "reg":
            if len(words) < 4 or words[2] != "bound":
                raise SourceError("expected 'reg <name> bound <poly>'", lineno)
            try:
                bound = Poly.parse(" ".join(words[3:]))
            except ValueError as exc:
                raise SourceError(str(exc), lineno) from None
            if any(r == words[1] for r, _ in registers):
                raise SourceError(f"register {words[1]!r} declared twice", lineno)
            registers.append((words[1], bound))
            continue
        if words[0] == "start":
            if len(words) != 2:
                raise SourceError("expected 'start <label>'", lineno)
            start = words[1]
            continue
        label, colon, body = stmt.partition(":")
        label = label.strip()
        if not colon or not _LABEL_RE.fullmatch(label):
            raise SourceError(f"unrecognised statement {stmt!r}", lineno)
        instrs.append((label, _parse_instr(body.split(), lineno)))
    if not instrs:
        raise ProgramError("program has no instructions")
    prog = RegisterProgram(name, tuple(registers), tuple(instrs), start or instrs[0][0])
    return validate_program(prog)


def _parse_instr(words: list[str], lineno: int) -> Instr:
    if not words:
        raise SourceError("empty instruction", lineno)
    op, args = words[0], words[1:]
    if op not in _ARITY:
        raise SourceError(f"unknown instruction {op!r}", lineno)
    if op in ("inc", "dec", "set", "copy"):
        if len(args) < 2 or args[-2] != "goto":
            raise SourceError(f"'{op}' needs '... goto <label>'", lineno)
        args = args[:-2] + args[-1:]
        if op == "set":
            if len(args) < 3:
                raise SourceError("'set' needs a value", lineno)
            try:
                value = Poly.parse(" ".join(args[1:-1]))
            except ValueError as exc:
                raise SourceError(str(exc), lineno) from None
            args = [args[0], value, args[-1]]
    if len(args) != _ARITY[op] - (1 if op in ("inc", "dec", "set", "copy") else 0):
        raise SourceError(f"wrong number of operands for {op!r}", lineno)
    return Instr(op, tuple(args))


def validate_program(prog: RegisterProgram) -> RegisterProgram:
    labels = prog.labels
    if len(set(labels)) != len(labels):
        raise ProgramError("duplicate instruction label")
    regs = prog.register_index()
    if prog.start not in labels:
        raise ProgramError(f"unknown start label {prog.start!r}")
    for _, b in prog.registers:
        if b(0) < 1 and all(c == 0 for c in b.coeffs):
            raise ProgramError("register bounds must be positive")
    for lab, ins in prog.instructions:
        for t in ins.targets():
            if t not in labels:
                raise ProgramError(f"{lab}: jump to unknown label {t!r}")
        reg_args = {"inc": 1, "dec": 1, "set": 1, "copy": 2, "brz": 1, "breq": 2, "read": 1}.get(ins.op, 0)
        for r in ins.args[:reg_args]:
            if r not in regs:
                raise ProgramError(f"{lab}: unbounded register {r!r} (no 'reg' declaration)")
    return prog


def parse_input(word: str) -> str:
    """Accept ``1^k`` shorthand or a plain bit string."""
    word = word.strip()
    m = re.fullmatch(r"([01])\^(\d+)", word)
    if m:
        return m.group(1) * int(m.group(2))
    if word and set(word) - {"0", "1"}:
        raise ValueError(f"input must be a bit string or 1^k, got {word!r}")
    return word


def step(prog: RegisterProgram, config: ProgramConfig, word: str,
         bounds: tuple[int, ...], regs: dict[str, int] | None = None,
         table: dict[str, Instr] | None = None) -> list[ProgramConfig]:
    regs = regs or prog.register_index()
    ins = (table or prog._table)[config.pc]
    vals = config.regs
    op, a = ins.op, ins.args

    def put(r: str, v: int, goto: str) -> list[ProgramConfig]:
        i = regs[r]
        if v < 0 or v > bounds[i]:
            return []
        new = vals[:i] + (v,) + vals[i + 1:]
        return [ProgramConfig(goto, new)]

    get = lambda r: vals[regs[r]]
    if op == "inc":
        return put(a[0], get(a[0]) + 1, a[1])
    if op == "dec":
        return put(a[0], get(a[0]) - 1, a[1])
    if op == "set":
        return put(a[0], a[1](len(word)), a[2])
    if op == "copy":
        return put(a[0], get(a[1]), a[2])
    if op == "brz":
        return [ProgramConfig(a[1] if get(a[0]) == 0 else a[2], vals)]
    if op == "breq":
        return [ProgramConfig(a[2] if get(a[0]) == get(a[1]) else a[3], vals)]
    if op == "read":
        pos = get(a[0])
        if pos >= len(word):
            return []
        return [ProgramConfig(a[1] if word[pos] == "1" else a[2], vals)]
    if op == "choice":
        return [ProgramConfig(t, vals) for t in dict.fromkeys(a)]
    return []


@dataclass
class ConfigGraph:
    vertices: list
    edges: list[tuple[int, int]]
    start: int
    accept_vertices: list[int] = field(default_factory=list)

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in self.vertices]
        for a, b in self.edges:
            adj[a].append(b)
        return adj

    def accept_reachable(self) -> bool:
        if not self.vertices:
            return False
        adj = self.adjacency()
        targets = set(self.accept_vertices)
        seen = {self.start}
        queue = deque([self.start])
        while queue:
            v = queue.popleft()
            if v in targets:
                return True
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        return False


def build_config_graph(prog: RegisterProgram, input: str = "",
                       cap: int = DEFAULT_VERTEX_CAP) -> ConfigGraph:
    word = parse_input(input)
    bounds = prog.bounds(len(word))
    regs = prog.register_index()
    table = prog._table
    start = ProgramConfig(prog.start, (0,) * len(prog.registers))
    index = {start: 0}
    vertices = [start]
    edges = []
    queue = deque([start])
    while queue:
        c = queue.popleft()
        i = index[c]
        for s in step(prog, c, word, bounds, regs, table):
            j = index.get(s)
            if j is None:
                if len(vertices) >= cap:
                    raise BoundExceeded(f"configuration graph exceeds {cap} vertices")
                j = index[s] = len(vertices)
                vertices.append(s)
                queue.append(s)
            edges.append((i, j))
    accept = [i for i, v in enumerate(vertices) if table[v.pc].op == "accept"]
    graph = ConfigGraph(vertices, edges, 0, accept)
    if not check_acyclic(graph):
        raise CyclicMachine(f"program {prog.name!r} repeats a configuration on input {word!r}")
    return graph


def check_acyclic(graph: ConfigGraph) -> bool:
    adj = graph.adjacency()
    color = [0] * len(graph.vertices)
    for root in range(len(graph.vertices)):
        if color[root]:
            continue
        color[root] = 1
        stack = [(root, iter(adj[root]))]
        while stack:
            v, it = stack[-1]
            w = next(it, None)
            if w is None:
                color[v] = 2
                stack.pop()
            elif color[w] == 1:
                return False
            elif color[w] == 0:
                color[w] = 1
                stack.append((w, iter(adj[w])))
    return True


COMPLEMENT_START = ProgramConfig("complement.start", ())
COMPLEMENT_ACCEPT = ProgramConfig("complement.accept", ())


def complement_graph_oracle(graph: ConfigGraph) -> ConfigGraph:
    """Configuration graph of a machine accepting exactly when ``graph``'s does not."""
    if graph.accept_reachable():
        return ConfigGraph([COMPLEMENT_START], [], 0, [])
    return ConfigGraph([COMPLEMENT_START, COMPLEMENT_ACCEPT], [(0, 1)], 0, [1])


def default_step_bound(prog: RegisterProgram) -> Poly:
    bound = Poly.const(2 * len(prog.instructions))
    for _, b in prog.registers:
        bound = bound * (b + Poly.const(1))
    return bound


def auto_step_counter(prog: RegisterProgram, bound: Poly | str | int | None = None,
                      register: str = "steps") -> RegisterProgram:
    """Thread a step counter through every transition so no configuration repeats.

    Once the counter reaches ``bound`` the next transition has no successor.
    """
    bound = default_step_bound(prog) if bound is None else Poly.parse(bound) if not isinstance(bound, Poly) else bound
    names = {r for r, _ in prog.registers}
    while register in names:
        register = "_" + register
    used = set(prog.labels)
    instrs: list[tuple[str, Instr]] = []
    for lab, ins in prog.instructions:
        if ins.op in ("accept", "reject"):
            instrs.append((lab, ins))
            continue
        body = f"{lab}.run"
        while body in used:
            body += "'"
        used.add(body)
        instrs.append((lab, Instr("inc", (register, body))))
        instrs.append((body, ins))
    return RegisterProgram(prog.name, prog.registers + ((register, bound),), tuple(instrs), prog.start)


def vertex_limit(prog: RegisterProgram, n: int) -> int:
    """Upper bound on configuration count: labels x prod(bound + 1)."""
    return len(prog.instructions) * math.prod(b + 1 for b in prog.bounds(n))


def accepts(prog: RegisterProgram, word: str, cap: int = DEFAULT_VERTEX_CAP) -> bool:
    return build_config_graph(prog, word, cap).accept_reachable()
