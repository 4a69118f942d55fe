"""Uniform and semi-uniform families and the constructions built on them."""
from __future__ import annotations

import itertools
import json
from collections.abc import Callable, Iterable, Mapping
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .analysis import DepNode, Reachability
from .core import ENV, NO, YES, LabelTree, MembraneSystem, Multiset, Rule, validate
from .machines import (
    ConfigGraph, Poly, RegisterProgram, accepts, build_config_graph,
    complement_graph_oracle, parse_program,
)
from .reductions import (
    Combiner, ReductionQuery, bin_to_unary, eval_reduction, pair, unpair,
)
from .semantics import ACCEPT, REJECT, ExploreResult, Mode, Verdict, explore


class FamilyError(ValueError):
    pass


@dataclass
class Family:
    kind: str
    mode: Mode
    name: str = "family"
    f: Callable[[int], MembraneSystem] | None = None
    e: Callable[[str], Multiset] | None = None
    h: Callable[[str], MembraneSystem] | None = None
    meta: dict = field(default_factory=dict)
    _systems: dict = field(default_factory=dict, repr=False)
    _reach: dict = field(default_factory=dict, repr=False)

    @property
    def uniform(self) -> bool:
        return self.kind == "uniform"

    def system(self, n: int) -> MembraneSystem:
        if not self.uniform:
            raise FamilyError(f"{self.name} is semi-uniform; systems are indexed by words")
        if n not in self._systems:
            self._systems[n] = self.f(n)
        return self._systems[n]

    def reachability(self, n: int) -> Reachability:
        if n not in self._reach:
            self._reach[n] = Reachability(self.system(n))
        return self._reach[n]

    def instance(self, x: str) -> tuple[MembraneSystem, Multiset | None]:
        if self.uniform:
            return self.system(len(x)), self.e(x)
        return self.h(x), None

    def explore(self, x: str, max_configs: int = 100_000) -> ExploreResult:
        system, inp = self.instance(x)
        return explore(system, inp, self.mode, max_configs)


# ---------------------------------------------------------------------------
# PARITY (semi-uniform)


def parity_family(x: str) -> MembraneSystem:
    """Single-membrane recogniser deciding whether ``x`` has an odd number of 1s.

    ``o_i`` / ``e_i`` mean the first i bits have odd / even parity; the rule
    leaving index i is chosen by bit i+1.
    """
    if not x:
        raise FamilyError("PARITY systems need a non-empty word")
    if set(x) - {"0", "1"}:
        raise FamilyError(f"not a bit string: {x!r}")
    n = len(x)
    objects = [f"o{i}" for i in range(1, n + 1)] + [f"e{i}" for i in range(1, n + 1)] + [YES, NO]
    rules = []
    for i in range(1, n):
        if x[i] == "1":
            rules += [Rule.evolve(ENV, f"o{i}", [f"e{i + 1}"]), Rule.evolve(ENV, f"e{i}", [f"o{i + 1}"])]
        else:
            rules += [Rule.evolve(ENV, f"o{i}", [f"o{i + 1}"]), Rule.evolve(ENV, f"e{i}", [f"e{i + 1}"])]
    rules += [Rule.evolve(ENV, f"o{n}", [YES]), Rule.evolve(ENV, f"e{n}", [NO])]
    start = "o1" if x[0] == "1" else "e1"
    return validate(MembraneSystem(tuple(objects), LabelTree.single(), {ENV: Multiset([start])},
                                   tuple(rules), name=f"parity_{x}"))


# ---------------------------------------------------------------------------
# Configuration graphs as object-rewriting rules


def graph_objects(graph: ConfigGraph, prefix: str, answer: str | None) -> tuple[list[str], list[Rule]]:
    """One object per vertex and one evolve rule per vertex with successors.

    Accepting vertices rewrite to ``answer`` (``yes`` or ``no``).
    """
    names = [f"{prefix}{i}" for i in range(len(graph.vertices))]
    succ = graph.adjacency()
    accept = set(graph.accept_vertices)
    rules = []
    for i, outs in enumerate(succ):
        if outs:
            rules.append(Rule.evolve(ENV, names[i], [names[j] for j in outs]))
        elif i in accept and answer is not None:
            rules.append(Rule.evolve(ENV, names[i], [answer]))
    return names, rules


def compile_semiuniform(prog: RegisterProgram, x: str, cap: int | None = None) -> MembraneSystem:
    kw = {"cap": cap} if cap else {}
    graph = build_config_graph(prog, x, **kw)
    comp = complement_graph_oracle(graph)
    m_objs, m_rules = graph_objects(graph, "m", YES)
    n_objs, n_rules = graph_objects(comp, "n", NO)
    system = MembraneSystem(
        tuple(m_objs + n_objs + [YES, NO]), LabelTree.single(),
        {ENV: Multiset([m_objs[graph.start], n_objs[comp.start]])},
        tuple(m_rules + n_rules), name=f"{prog.name}_on_{x or 'empty'}",
    )
    return validate(system)


def semiuniform_from_program(prog: RegisterProgram, mode: Mode = Mode.RECOGNISER1) -> Family:
    return Family("semiuniform", mode, f"from-tm:{prog.name}",
                  h=lambda x: compile_semiuniform(prog, x), meta={"program": prog})


def parity() -> Family:
    return Family("semiuniform", Mode.RECOGNISER, "parity", h=parity_family)


# ---------------------------------------------------------------------------
# Uniform families over a tally machine


def _tally_system(prog: RegisterProgram, top: int, with_complement: bool, name: str) -> MembraneSystem:
    objects: list[str] = []
    rules: list[Rule] = []
    for u in range(top + 1):
        graph = build_config_graph(prog, "1" * u)
        objs, rs = graph_objects(graph, f"t{u}_", YES)
        objects += objs
        rules += rs
        if with_complement:
            objs, rs = graph_objects(complement_graph_oracle(graph), f"nt{u}_", NO)
            objects += objs
            rules += rs
    objects += [YES, NO]
    return validate(MembraneSystem(tuple(objects), LabelTree.single(), {}, tuple(rules),
                                   input_label=ENV, name=name))


def _check_unary(word: str, limit: int, n: int) -> int:
    if set(word) - {"1"}:
        raise FamilyError(f"reduction produced a non-unary word {word!r}")
    if len(word) > limit:
        raise FamilyError(f"reduction output 1^{len(word)} exceeds the bound {limit} for n={n}")
    return len(word)


def build_family_m(prog: RegisterProgram, r: Callable[[str], str], q: Poly | str,
                   name: str | None = None) -> Family:
    """Recogniser>=1 family for ``{x : r(x) in T}`` with T decided by ``prog``.

    The system for length n holds the graphs of ``prog`` and of its
    complement on every ``1^u`` with ``u <= q(n)``.
    """
    q = Poly.parse(q) if not isinstance(q, Poly) else q
    name = name or f"m-family:{prog.name}"

    def f(n: int) -> MembraneSystem:
        return _tally_system(prog, q(n), True, f"{prog.name}_m_{n}")

    def e(x: str) -> Multiset:
        u = _check_unary(r(x), q(len(x)), len(x))
        return Multiset([f"t{u}_0", f"nt{u}_0"])

    return Family("uniform", Mode.RECOGNISER1, name, f=f, e=e,
                  meta={"program": prog, "r": r, "bound": q})


def build_family_dtt(prog: RegisterProgram, r_multi: Callable[[str], Iterable[str]], q: Poly | str,
                     name: str | None = None) -> Family:
    """Acknowledger family accepting x when some word of ``r_multi(x)`` is in T."""
    q = Poly.parse(q) if not isinstance(q, Poly) else q
    name = name or f"dtt-family:{prog.name}"

    def f(n: int) -> MembraneSystem:
        return _tally_system(prog, q(n), False, f"{prog.name}_dtt_{n}")

    def e(x: str) -> Multiset:
        us = {_check_unary(w, q(len(x)), len(x)) for w in r_multi(x)}
        return Multiset([f"t{u}_0" for u in sorted(us)])

    return Family("uniform", Mode.ACKNOWLEDGER, name, f=f, e=e,
                  meta={"program": prog, "r_multi": r_multi, "bound": q})


# ---------------------------------------------------------------------------
# Truth-table reductions read off a uniform family


@dataclass
class TTOutcome:
    objects: tuple[str, ...]
    pairs: tuple[tuple[int, int], ...]
    query: ReductionQuery
    constants: tuple[tuple[DepNode, bool], ...]
    verdict: Verdict

    def report(self) -> str:
        lines = [f"combiner: {self.query.combiner.value}"]
        for obj, (o, n), v, a in zip(self.objects, self.pairs, self.query.queries, self.query.answers):
            lines.append(f"query {obj}: <{o},{n}> = {v}  (1^{v})  answer {int(a)}")
        for node, val in self.constants:
            lines.append(f"constant c{node}: {int(val)}")
        lines.append(f"verdict: {self.verdict}")
        return "\n".join(lines)


def _require_uniform(family: Family):
    if not family.uniform:
        raise FamilyError(f"{family.name} is not a uniform family")


def tally_oracle(family: Family, answer: str = YES) -> Callable[[int], bool]:
    """Membership in the tally set of codes ``<o, n>``.

    For ``answer=yes``: o in the input membrane of f(1^n) eventually evolves
    yes in env. For ``answer=no``: o never evolves no in env.
    """
    _require_uniform(family)

    def oracle(length: int) -> bool:
        o, n = unpair(length)
        system = family.system(n)
        if o >= len(system.objects):
            return answer == NO
        node = DepNode(system.objects[o], system.input_label)
        reach = family.reachability(n)
        if answer == YES:
            return reach.reaches_yes(node)
        return not reach.reaches_no(node)

    return oracle


def _tt(family: Family, x: str, combiner: Combiner, answer: str) -> TTOutcome:
    _require_uniform(family)
    n = len(x)
    system = family.system(n)
    inp = family.e(x)
    objs = tuple(sorted(set(inp), key=system.ordinal))
    pairs = tuple((system.ordinal(o), n) for o in objs)
    oracle = tally_oracle(family, answer)
    codes = tuple(pair(o, k) for o, k in pairs)
    answers = tuple(oracle(c) for c in codes)
    query = ReductionQuery(codes, combiner, answers)
    reach = family.reachability(n)
    consts = []
    for lab in system.labels:
        for o in system.contents[lab]:
            node = DepNode(o, lab)
            if answer == YES:
                consts.append((node, reach.reaches_yes(node)))
            else:
                consts.append((node, not reach.reaches_no(node)))
    ok = eval_reduction(query, oracle)
    if combiner is Combiner.OR:
        ok = ok or any(v for _, v in consts)
    else:
        ok = ok and all(v for _, v in consts)
    return TTOutcome(objs, pairs, query, tuple(consts), ACCEPT if ok else REJECT)


def uniform_to_dtt(family: Family, x: str) -> TTOutcome:
    if family.mode is Mode.RECOGNISER:
        raise FamilyError("disjunctive extraction applies to acknowledger and recogniser>=1 families")
    return _tt(family, x, Combiner.OR, YES)


def uniform_to_ctt(family: Family, x: str) -> TTOutcome:
    if family.mode is Mode.ACKNOWLEDGER:
        raise FamilyError("conjunctive extraction applies to recogniser>=1 and recogniser families")
    return _tt(family, x, Combiner.AND, NO)


@dataclass
class MOutcome:
    word: str
    query: ReductionQuery
    verdict: Verdict

    def report(self) -> str:
        (u,) = self.query.queries
        return (f"combiner: identity\nquery: unary length {u}\n"
                f"answer {int(self.query.answers[0])}\nverdict: {self.verdict}")


def uniform_to_m(family: Family, x: str) -> MOutcome:
    """Many-one query ``r(x)`` against the tally machine of an m-family."""
    if "r" not in family.meta:
        raise FamilyError(f"{family.name} was not built from a many-one reduction")
    prog: RegisterProgram = family.meta["program"]
    u = _check_unary(family.meta["r"](x), family.meta["bound"](len(x)), len(x))
    answer = accepts(prog, "1" * u)
    query = ReductionQuery((u,), Combiner.IDENTITY, (answer,))
    return MOutcome(x, query, ACCEPT if eval_reduction(query, None) else REJECT)


# ---------------------------------------------------------------------------
# Circuits


@dataclass(frozen=True)
class Gate:
    kind: str
    args: tuple[int, ...] = ()
    stage: str = ""
    note: str = ""


class CircuitError(ValueError):
    pass


@dataclass
class Circuit:
    n_inputs: int
    gates: list[Gate]
    output: int

    def add(self, gate: Gate) -> int:
        self.gates.append(gate)
        return len(self.gates) - 1

    def check(self):
        for i, g in enumerate(self.gates):
            if g.kind in ("AND", "OR", "NOT"):
                for j in g.args:
                    if not 0 <= j < len(self.gates):
                        raise CircuitError(f"g{i}: fan-in g{j} out of range")
                    if j >= i:
                        raise CircuitError(f"g{i}: fan-in g{j} is not an earlier gate")
                if g.kind == "NOT" and len(g.args) != 1:
                    raise CircuitError(f"g{i}: NOT takes one input")
            elif g.kind == "IN":
                if not 0 <= g.args[0] < self.n_inputs:
                    raise CircuitError(f"g{i}: input {g.args[0]} out of range")
            elif g.kind != "CONST":
                raise CircuitError(f"g{i}: unknown gate kind {g.kind!r}")
        if not 0 <= self.output < len(self.gates):
            raise CircuitError("output gate out of range")

    def depth(self, stop: Callable[[Gate], bool] = lambda g: False) -> int:
        """Longest path to the output; gates matching ``stop`` count as sources."""
        d = [0] * len(self.gates)
        for i, g in enumerate(self.gates):
            if g.kind in ("IN", "CONST") or stop(g):
                d[i] = 0
            else:
                d[i] = 1 + max((d[j] for j in g.args), default=0)
        return d[self.output]

    def depth_after_encoder(self) -> int:
        return self.depth(lambda g: g.stage == "encoder")

    def to_text(self) -> str:
        lines = [f"# circuit inputs={self.n_inputs} output=g{self.output}"]
        for i, g in enumerate(self.gates):
            if g.kind in ("IN", "CONST"):
                body = f"{g.kind}({g.args[0]})"
            else:
                body = f"{g.kind}(" + ", ".join(f"g{j}" for j in g.args) + ")"
            tail = []
            if g.stage:
                tail.append(f"stage={g.stage}")
            if g.note:
                tail.append(g.note)
            lines.append(f"g{i} = {body}" + (f"  # {' '.join(tail)}" if tail else ""))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> Circuit:
        import re

        n_inputs = output = None
        gates: dict[int, Gate] = {}
        for raw in text.splitlines():
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                m = re.search(r"inputs=(\d+)\s+output=g(\d+)", line)
                if m:
                    n_inputs, output = int(m.group(1)), int(m.group(2))
                continue
            body, _, comment = line.partition("#")
            m = re.fullmatch(r"g(\d+)\s*=\s*(IN|CONST|AND|OR|NOT)\s*\((.*)\)\s*", body)
            if not m:
                raise CircuitError(f"bad gate line {line!r}")
            idx, kind, inner = int(m.group(1)), m.group(2), m.group(3).strip()
            stage = ""
            note = comment.strip()
            sm = re.match(r"stage=(\S+)\s*", note)
            if sm:
                stage, note = sm.group(1), note[sm.end():]
            if kind in ("IN", "CONST"):
                args = (int(inner),)
            else:
                toks = [t.strip() for t in inner.split(",") if t.strip()]
                if any(not re.fullmatch(r"g\d+", t) for t in toks):
                    raise CircuitError(f"bad fan-in in {line!r}")
                args = tuple(int(t[1:]) for t in toks)
            gates[idx] = Gate(kind, args, stage, note)
        if n_inputs is None:
            raise CircuitError("missing '# circuit inputs=N output=gK' header")
        if sorted(gates) != list(range(len(gates))):
            raise CircuitError("gate indices must be 0..k-1")
        c = cls(n_inputs, [gates[i] for i in range(len(gates))], output)
        c.check()
        return c


def eval_circuit(c: Circuit, w: str) -> int:
    if len(w) != c.n_inputs:
        raise CircuitError(f"circuit takes {c.n_inputs} inputs, got {len(w)}")
    vals: list[int] = []
    for i, g in enumerate(c.gates):
        if g.kind in ("AND", "OR", "NOT"):
            for j in g.args:
                if not 0 <= j < i:
                    raise CircuitError(f"g{i}: fan-in g{j} out of range")
        if g.kind == "IN":
            vals.append(1 if w[g.args[0]] == "1" else 0)
        elif g.kind == "CONST":
            vals.append(1 if g.args[0] else 0)
        elif g.kind == "AND":
            vals.append(int(all(vals[j] for j in g.args)))
        elif g.kind == "OR":
            vals.append(int(any(vals[j] for j in g.args)))
        elif g.kind == "NOT":
            vals.append(1 - vals[g.args[0]])
        else:
            raise CircuitError(f"g{i}: unknown gate kind {g.kind!r}")
    if not 0 <= c.output < len(vals):
        raise CircuitError("output gate out of range")
    return vals[c.output]


def synthesize_circuit(family: Family, n: int) -> Circuit:
    """Non-uniform circuit for the length-``n`` member of a uniform family.

    Encoder stage: the characteristic vector of e(w) over object types, as
    a DNF over the words of length n. Then one AND per object with the
    constant "this object in the input membrane evolves yes in env", and a
    final OR that also takes a constant per initially present (o, h).
    """
    _require_uniform(family)
    system = family.system(n)
    reach = family.reachability(n)
    c = Circuit(n, [], -1)
    ins = [c.add(Gate("IN", (i,), "encoder")) for i in range(n)]
    negs = [c.add(Gate("NOT", (g,), "encoder")) for g in ins]
    holders: dict[str, list[int]] = {}
    for bits in itertools.product("01", repeat=n):
        w = "".join(bits)
        present = set(family.e(w))
        if not present:
            continue
        lits = tuple(ins[i] if b == "1" else negs[i] for i, b in enumerate(w))
        term = c.add(Gate("AND", lits, "encoder", f"w={w}"))
        for o in present:
            holders.setdefault(o, []).append(term)
    top = []
    for o in system.objects:
        chi = c.add(Gate("OR", tuple(holders.get(o, ())), "encoder", f"chi[{o}]"))
        node = DepNode(o, system.input_label)
        const = c.add(Gate("CONST", (int(reach.reaches_yes(node)),), "", f"c{node}"))
        top.append(c.add(Gate("AND", (chi, const), "and", f"a[{o}]")))
    for lab in system.labels:
        for o in system.contents[lab]:
            node = DepNode(o, lab)
            top.append(c.add(Gate("CONST", (int(reach.reaches_yes(node)),), "", f"c{node}")))
    c.output = c.add(Gate("OR", tuple(top), "or", "output"))
    c.check()
    return c


# ---------------------------------------------------------------------------
# Built-in reductions and descriptor files

R_FUNCTIONS: dict[str, Callable[[str], str]] = {
    "bin-prefix": bin_to_unary,
    "ones": lambda x: "1" * x.count("1"),
    "length": lambda x: "1" * len(x),
}

R_MULTI_FUNCTIONS: dict[str, Callable[[str], tuple[str, ...]]] = {
    "one-positions": lambda x: tuple("1" * (i + 1) for i, b in enumerate(x) if b == "1"),
    "bin-prefix-and-ones": lambda x: (bin_to_unary(x), "1" * x.count("1")),
}

BUILTIN_PROGRAMS = {"even-length": "even_length.prog", "stconn3": "stconn3.prog"}


def load_program(ref: str, base: Path | None = None) -> RegisterProgram:
    if ref.startswith("builtin:"):
        key = ref.split(":", 1)[1]
        if key not in BUILTIN_PROGRAMS:
            raise FamilyError(f"unknown built-in program {key!r}")
        text = resources.files("amem.programs").joinpath(BUILTIN_PROGRAMS[key]).read_text()
        return parse_program(text)
    path = Path(ref)
    if base is not None and not path.is_absolute():
        path = base / path
    return parse_program(path.read_text())


def _lookup(table: Mapping[str, Callable], key: str, what: str) -> Callable:
    if key not in table:
        raise FamilyError(f"unknown {what} {key!r}; choose from {', '.join(sorted(table))}")
    return table[key]


def build_family(builder: str, params: Mapping | None = None, base: Path | None = None) -> Family:
    params = dict(params or {})
    if builder == "parity":
        fam = parity()
    elif builder == "from-tm":
        fam = semiuniform_from_program(load_program(params["program"], base))
    elif builder == "m-family":
        fam = build_family_m(load_program(params.get("program", "builtin:even-length"), base),
                             _lookup(R_FUNCTIONS, params.get("r", "bin-prefix"), "r function"),
                             params.get("bound", "2n"))
    elif builder == "dtt-family":
        fam = build_family_dtt(load_program(params.get("program", "builtin:even-length"), base),
                               _lookup(R_MULTI_FUNCTIONS, params.get("r", "one-positions"), "r function"),
                               params.get("bound", "n"))
    else:
        raise FamilyError(f"unknown family builder {builder!r}")
    if params.get("mode"):
        fam.mode = Mode(params["mode"])
    fam.meta["descriptor"] = {"builder": builder, **params}
    return fam


def load_family(path: str | Path) -> Family:
    path = Path(path)
    data = json.loads(path.read_text())
    if "builder" not in data:
        raise FamilyError("family descriptor needs a 'builder' field")
    builder = data.pop("builder")
    return build_family(builder, data, path.parent)
