"""Maximally parallel transitions, seeded runs and exhaustive exploration."""
from __future__ import annotations

import enum
import itertools
import random
from collections import deque
from collections.abc import Mapping
from dataclasses import dataclass, field

from .core import (
    ENV, NO, YES, Configuration, Membrane, MembraneSystem, Multiset, RuleKind,
    canonical_key, initial_configuration,
)

DEFAULT_ASSIGNMENT_CAP = 100_000


class BoundExceeded(RuntimeError):
    """A configured exploration or enumeration limit was hit."""


class Mode(str, enum.Enum):
    RECOGNISER = "recogniser"
    RECOGNISER1 = "recogniser1"
    ACKNOWLEDGER = "acknowledger"


@dataclass(frozen=True)
class Verdict:
    kind: str
    reason: str | None = None

    @classmethod
    def invalid(cls, reason: str) -> Verdict:
        return cls("invalid", reason)

    def __str__(self) -> str:
        names = {"accept": "Accept", "reject": "Reject", "invalid": "Invalid",
                 "bound-exceeded": "BoundExceeded"}
        s = names.get(self.kind, self.kind)
        return f"{s}({self.reason})" if self.reason else s


ACCEPT = Verdict("accept")
REJECT = Verdict("reject")
BOUND = Verdict("bound-exceeded")


@dataclass(frozen=True, order=True)
class RuleInstance:
    """Rule ``rule`` applied with its object taken from ``source``.

    ``target`` is the instance receiving the product: the child for
    communication in, the parent for communication out, ``source`` itself
    for evolution and division.
    """

    rule: int
    source: int
    target: int


@dataclass(frozen=True)
class Assignment:
    instances: tuple[tuple[RuleInstance, int], ...]

    def signature(self) -> tuple:
        return self.instances

    def __len__(self) -> int:
        return sum(n for _, n in self.instances)


@dataclass
class RunResult:
    verdict: Verdict
    steps: int
    trace: list[Configuration] | None = None
    final: Configuration | None = None


def _layout(config: Configuration):
    parent: dict[int, Membrane | None] = {}
    order = []
    for m, p, depth in config.root.postorder():
        parent[m.id] = p
        order.append(m)
    return order, parent


def applicable_instances(config: Configuration, system: MembraneSystem) -> list[RuleInstance]:
    idx = system.index
    rules = system.rules
    out = []
    order, parent = _layout(config)
    for m in order:
        for o in m.contents:
            for ri in idx.evolve.get((m.label, o), ()):
                out.append(RuleInstance(ri, m.id, m.id))
        p = parent[m.id]
        for ri in idx.membrane.get(m.label, ()):
            r = rules[ri]
            if r.kind is RuleKind.IN:
                if p is not None and p.contents[r.subject]:
                    out.append(RuleInstance(ri, p.id, m.id))
            elif r.kind is RuleKind.OUT:
                if p is not None and m.contents[r.subject]:
                    out.append(RuleInstance(ri, m.id, p.id))
            elif not m.children and m.contents[r.subject]:
                out.append(RuleInstance(ri, m.id, m.id))
    return sorted(set(out))


def _compositions(total: int, parts: int):
    """All ways to write ``total`` as an ordered sum of ``parts`` naturals."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _count_compositions(total: int, parts: int) -> int:
    from math import comb
    return comb(total + parts - 1, parts - 1)


def enumerate_maximal_assignments(config: Configuration, system: MembraneSystem,
                                  cap: int = DEFAULT_ASSIGNMENT_CAP) -> list[Assignment]:
    idx = system.index
    rules = system.rules
    order, parent = _layout(config)
    by_id = {m.id: m for m in order}

    # Membrane-subject options: each membrane instance hosts at most one.
    options: list[tuple[int, list[RuleInstance]]] = []
    for m in order:
        p = parent[m.id]
        opts = []
        for ri in idx.membrane.get(m.label, ()):
            r = rules[ri]
            if r.kind is RuleKind.IN:
                if p is not None and p.contents[r.subject]:
                    opts.append(RuleInstance(ri, p.id, m.id))
            elif r.kind is RuleKind.OUT:
                if p is not None and m.contents[r.subject]:
                    opts.append(RuleInstance(ri, m.id, p.id))
            elif not m.children and m.contents[r.subject]:
                opts.append(RuleInstance(ri, m.id, m.id))
        if opts:
            options.append((m.id, opts))

    def has_evolve(src: int, obj: str) -> bool:
        return (by_id[src].label, obj) in idx.evolve

    membrane_choices: list[list[RuleInstance]] = []

    def choose(k: int, used: dict, chosen: list):
        if k == len(options):
            # Maximal iff every idle membrane has no option with a leftover object.
            chosen_mems = {mid for mid, _ in chosen}
            for mid, opts in options:
                if mid in chosen_mems:
                    continue
                for inst in opts:
                    obj = rules[inst.rule].subject
                    if has_evolve(inst.source, obj):
                        continue
                    if by_id[inst.source].contents[obj] - used.get((inst.source, obj), 0) > 0:
                        return
            membrane_choices.append([inst for _, inst in chosen])
            if len(membrane_choices) > cap:
                raise BoundExceeded(f"more than {cap} maximal assignments")
            return
        mid, opts = options[k]
        choose(k + 1, used, chosen)
        for inst in opts:
            key = (inst.source, rules[inst.rule].subject)
            if by_id[inst.source].contents[key[1]] - used.get(key, 0) <= 0:
                continue
            used[key] = used.get(key, 0) + 1
            chosen.append((mid, inst))
            choose(k + 1, used, chosen)
            chosen.pop()
            used[key] -= 1

    choose(0, {}, [])

    result: dict[tuple, Assignment] = {}
    for chosen in membrane_choices:
        used: dict[tuple[int, str], int] = {}
        for inst in chosen:
            key = (inst.source, rules[inst.rule].subject)
            used[key] = used.get(key, 0) + 1
        # Remaining occurrences of evolvable objects must all be rewritten.
        slots = []
        total = 1
        for m in order:
            for o, n in m.contents.items():
                rs = idx.evolve.get((m.label, o))
                if not rs:
                    continue
                left = n - used.get((m.id, o), 0)
                if left <= 0:
                    continue
                slots.append((m.id, rs, left))
                total *= _count_compositions(left, len(rs))
                if total * len(membrane_choices) > cap:
                    raise BoundExceeded(f"more than {cap} maximal assignments")
        per_slot = [list(_compositions(left, len(rs))) for _, rs, left in slots]
        base = [(inst, 1) for inst in chosen]
        for combo in itertools.product(*per_slot):
            items: dict[RuleInstance, int] = {}
            for inst, n in base:
                items[inst] = items.get(inst, 0) + n
            for (mid, rs, _), split in zip(slots, combo):
                for ri, n in zip(rs, split):
                    if n:
                        inst = RuleInstance(ri, mid, mid)
                        items[inst] = items.get(inst, 0) + n
            if not items:
                continue
            a = Assignment(tuple(sorted(items.items())))
            result.setdefault(a.signature(), a)
            if len(result) > cap:
                raise BoundExceeded(f"more than {cap} maximal assignments")
    return [result[k] for k in sorted(result)]


def apply_assignment(config: Configuration, assignment: Assignment, system: MembraneSystem) -> Configuration:
    rules = system.rules
    order, parent = _layout(config)
    contents = {m.id: dict(m.contents.items()) for m in order}
    incoming: dict[int, dict[str, int]] = {m.id: {} for m in order}
    divisions: dict[int, tuple[str, str]] = {}

    def add(box, obj, n):
        box[obj] = box.get(obj, 0) + n

    # Consume every subject occurrence first; products only exist next step.
    for inst, n in assignment.instances:
        r = rules[inst.rule]
        box = contents[inst.source]
        have = box.get(r.subject, 0)
        if have < n:
            raise ValueError(f"assignment consumes {n} x {r.subject} but only {have} present")
        box[r.subject] = have - n
    # Phase 1: rewriting.
    for inst, n in assignment.instances:
        r = rules[inst.rule]
        if r.kind is RuleKind.EVOLVE:
            for o in r.products:
                add(incoming[inst.source], o, n)
    # Phase 2: communication.
    for inst, n in assignment.instances:
        r = rules[inst.rule]
        if r.kind in (RuleKind.IN, RuleKind.OUT):
            add(incoming[inst.target], r.products[0], n)
    # Phase 3: division, deepest membranes first.
    for inst, n in assignment.instances:
        r = rules[inst.rule]
        if r.kind is RuleKind.DIVIDE:
            if n != 1 or inst.source in divisions:
                raise ValueError("a membrane can divide at most once per step")
            divisions[inst.source] = (r.products[0], r.products[1])

    next_id = max(contents) + 1
    new_ids: dict[int, int] = {}
    for m in order:
        if m.id in divisions:
            new_ids[m.id] = next_id
            next_id += 1

    def build(m: Membrane) -> list[Membrane]:
        box = dict(contents[m.id])
        for o, n in incoming[m.id].items():
            add(box, o, n)
        kids = []
        for c in m.children:
            kids.extend(build(c))
        if m.id not in divisions:
            return [Membrane(m.id, m.label, Multiset(box), tuple(kids))]
        u, v = divisions[m.id]
        left, right = dict(box), dict(box)
        add(left, u, 1)
        add(right, v, 1)
        return [Membrane(m.id, m.label, Multiset(left), tuple(kids)),
                Membrane(new_ids[m.id], m.label, Multiset(right), tuple(kids))]

    (root,) = build(config.root)
    return Configuration(root)


def successors(config: Configuration, system: MembraneSystem,
               cap: int = DEFAULT_ASSIGNMENT_CAP) -> list[Configuration]:
    return [apply_assignment(config, a, system)
            for a in enumerate_maximal_assignments(config, system, cap)]


def classify_halt(config: Configuration | Multiset, mode: Mode | str) -> Verdict:
    env = config.env if isinstance(config, Configuration) else config
    mode = Mode(mode)
    yes, no = env[YES], env[NO]
    if mode is Mode.ACKNOWLEDGER:
        return ACCEPT if yes else REJECT
    if yes and no:
        return Verdict.invalid("yes-and-no")
    if mode is Mode.RECOGNISER1:
        if yes:
            return ACCEPT
        if no:
            return REJECT
        return Verdict.invalid("no-answer")
    if yes == 1:
        return ACCEPT
    if no == 1:
        return REJECT
    if yes > 1:
        return Verdict.invalid("multiple-yes")
    if no > 1:
        return Verdict.invalid("multiple-no")
    return Verdict.invalid("no-answer")


def run(system: MembraneSystem, input: Mapping[str, int] | None = None,
        mode: Mode | str = Mode.RECOGNISER1, seed: int = 0, max_steps: int = 10_000,
        trace: bool = False, cap: int = DEFAULT_ASSIGNMENT_CAP) -> RunResult:
    if max_steps < 1:
        raise ValueError("max_steps must be at least 1")
    rng = random.Random(seed)
    config = initial_configuration(system, input)
    history = [config] if trace else None
    for step in range(max_steps + 1):
        try:
            choices = enumerate_maximal_assignments(config, system, cap)
        except BoundExceeded:
            return RunResult(BOUND, step, history, config)
        if not choices:
            return RunResult(classify_halt(config, mode), step, history, config)
        if step == max_steps:
            break
        config = apply_assignment(config, choices[rng.randrange(len(choices))], system)
        if history is not None:
            history.append(config)
    return RunResult(BOUND, max_steps, history, config)


class Outcome(str, enum.Enum):
    CONFLUENT_ACCEPT = "ConfluentAccept"
    CONFLUENT_REJECT = "ConfluentReject"
    NON_CONFLUENT = "NonConfluent"
    INVALID = "InvalidRun"
    BOUND_EXCEEDED = "BoundExceeded"


@dataclass
class ExploreResult:
    outcome: Outcome
    reason: str | None = None
    states: int = 0
    halting_leaves: int = 0
    max_depth: int = 0
    accept_leaves: int = 0
    reject_leaves: int = 0
    halting_depths: set[int] = field(default_factory=set)
    reached_yes: bool = False
    reached_no: bool = False

    @property
    def verdict(self) -> Verdict:
        if self.outcome is Outcome.CONFLUENT_ACCEPT:
            return ACCEPT
        if self.outcome is Outcome.CONFLUENT_REJECT:
            return REJECT
        if self.outcome is Outcome.BOUND_EXCEEDED:
            return BOUND
        if self.outcome is Outcome.NON_CONFLUENT:
            return Verdict.invalid("non-confluent")
        return Verdict.invalid(self.reason)

    def summary(self) -> str:
        head = self.outcome.value + (f"({self.reason})" if self.reason else "")
        return (f"{head}\nstates explored: {self.states}\nhalting leaves: {self.halting_leaves}\n"
                f"max depth: {self.max_depth}")


def _has_cycle(graph: dict[str, list[str]]) -> bool:
    WHITE, GREY, BLACK = 0, 1, 2
    color = dict.fromkeys(graph, WHITE)
    for start in graph:
        if color[start] != WHITE:
            continue
        stack = [(start, iter(graph[start]))]
        color[start] = GREY
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                color[node] = BLACK
                stack.pop()
            elif color.get(nxt, WHITE) == GREY:
                return True
            elif color.get(nxt, WHITE) == WHITE:
                color[nxt] = GREY
                stack.append((nxt, iter(graph.get(nxt, ()))))
    return False


def explore_from(config: Configuration, system: MembraneSystem, mode: Mode | str = Mode.RECOGNISER1,
                 max_configs: int = 100_000, cap: int = DEFAULT_ASSIGNMENT_CAP) -> ExploreResult:
    mode = Mode(mode)
    res = ExploreResult(Outcome.CONFLUENT_REJECT)
    start = canonical_key(config)
    depth = {start: 0}
    graph: dict[str, list[str]] = {}
    queue = deque([config])
    invalid: str | None = None
    while queue:
        c = queue.popleft()
        k = canonical_key(c)
        d = depth[k]
        res.max_depth = max(res.max_depth, d)
        env = c.env
        res.reached_yes |= env[YES] > 0
        res.reached_no |= env[NO] > 0
        try:
            succ = successors(c, system, cap)
        except BoundExceeded as exc:
            res.outcome, res.reason, res.states = Outcome.BOUND_EXCEEDED, str(exc), len(depth)
            return res
        keys = []
        for s in succ:
            sk = canonical_key(s)
            keys.append(sk)
            if sk not in depth:
                depth[sk] = d + 1
                if len(depth) > max_configs:
                    res.outcome, res.states = Outcome.BOUND_EXCEEDED, len(depth) - 1
                    res.reason = f"more than {max_configs} configurations"
                    return res
                queue.append(s)
        graph[k] = keys
        if not succ:
            res.halting_leaves += 1
            res.halting_depths.add(d)
            v = classify_halt(c, mode)
            if v == ACCEPT:
                res.accept_leaves += 1
            elif v == REJECT:
                res.reject_leaves += 1
            elif invalid is None:
                invalid = v.reason
        elif mode is Mode.RECOGNISER and (env[YES] or env[NO]) and invalid is None:
            invalid = "early-decision"
    res.states = len(depth)
    if invalid is None and _has_cycle(graph):
        invalid = "non-halting"
    if invalid is not None:
        res.outcome, res.reason = Outcome.INVALID, invalid
    elif res.accept_leaves and res.reject_leaves:
        res.outcome = Outcome.NON_CONFLUENT
    elif res.accept_leaves:
        res.outcome = Outcome.CONFLUENT_ACCEPT
    else:
        res.outcome = Outcome.CONFLUENT_REJECT
    return res


def explore(system: MembraneSystem, input: Mapping[str, int] | None = None,
            mode: Mode | str = Mode.RECOGNISER1, max_configs: int = 100_000,
            cap: int = DEFAULT_ASSIGNMENT_CAP) -> ExploreResult:
    return explore_from(initial_configuration(system, input), system, mode, max_configs, cap)
