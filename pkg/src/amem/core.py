"""Membrane systems, configurations and the line-oriented source format.

A system is written as::

    system demo
    objects: a, b, yes, no
    mu: env( m() )
    input: m
    contents m: a*2
    evolve m: a -> b b
    out m: b -> yes

Rules on a label that does not exist, division or communication out of
``env``, and rules consuming ``yes``/``no`` are rejected by :func:`validate`.
"""
from __future__ import annotations

import enum
import json
import re
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field

ENV = "env"
YES = "yes"
NO = "no"
RESERVED = (YES, NO)

_IDENT = r"[A-Za-z_][A-Za-z0-9_.']*"
_IDENT_RE = re.compile(_IDENT)


class SourceError(ValueError):
    """Syntax error in system or program source text."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.message = message
        self.line = line
        self.column = column
        loc = f"line {line}, column {column}: " if line else ""
        super().__init__(loc + message)


class ValidationError(ValueError):
    """A structural invariant of a membrane system is violated.

    ``code`` is a stable machine-readable tag (``env-divide``,
    ``reserved-consumed``, ``unknown-label`` ...).
    """

    def __init__(self, code: str, message: str):
        self.code = code
        super().__init__(message)


class Multiset(Mapping):
    """Immutable multiset of object names. Zero counts are never stored."""

    __slots__ = ("_counts", "_hash")

    def __init__(self, counts: Mapping[str, int] | Iterable[str] | None = None):
        data: dict[str, int] = {}
        if counts is None:
            pass
        elif isinstance(counts, Mapping):
            for k, v in counts.items():
                if v < 0:
                    raise ValueError(f"negative multiplicity for {k!r}")
                if v:
                    data[k] = data.get(k, 0) + v
        else:
            for k in counts:
                data[k] = data.get(k, 0) + 1
        self._counts = dict(sorted(data.items()))
        self._hash = None

    def __getitem__(self, key: str) -> int:
        return self._counts.get(key, 0)

    def __contains__(self, key: object) -> bool:
        return key in self._counts

    def __iter__(self) -> Iterator[str]:
        return iter(self._counts)

    def __len__(self) -> int:
        return len(self._counts)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Multiset):
            return self._counts == other._counts
        if isinstance(other, Mapping):
            return self._counts == {k: v for k, v in other.items() if v}
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(tuple(self._counts.items()))
        return self._hash

    def __repr__(self) -> str:
        return f"Multiset({self._counts!r})"

    def __add__(self, other: Mapping[str, int]) -> Multiset:
        out = dict(self._counts)
        for k, v in other.items():
            out[k] = out.get(k, 0) + v
        return Multiset(out)

    def __sub__(self, other: Mapping[str, int]) -> Multiset:
        out = dict(self._counts)
        for k, v in other.items():
            if out.get(k, 0) < v:
                raise ValueError(f"cannot remove {v} x {k!r}")
            out[k] -= v
        return Multiset(out)

    def total(self) -> int:
        return sum(self._counts.values())

    def elements(self) -> Iterator[str]:
        for k, v in self._counts.items():
            for _ in range(v):
                yield k

    def key(self) -> str:
        return ",".join(f"{k}:{v}" for k, v in self._counts.items())


EMPTY = Multiset()


@dataclass(frozen=True)
class ObjectType:
    name: str
    index: int


class RuleKind(enum.Enum):
    EVOLVE = "evolve"
    IN = "in"
    OUT = "out"
    DIVIDE = "div"


@dataclass(frozen=True)
class Rule:
    kind: RuleKind
    subject: str
    label: str
    products: tuple[str, ...]
    """Evolve: the rewritten multiset as a sorted tuple; in/out: one object;
    div: the pair ``(u, v)`` in order."""

    @classmethod
    def evolve(cls, label: str, subject: str, products: Iterable[str] = ()) -> Rule:
        return cls(RuleKind.EVOLVE, subject, label, tuple(sorted(products)))

    @classmethod
    def comm_in(cls, label: str, subject: str, product: str) -> Rule:
        return cls(RuleKind.IN, subject, label, (product,))

    @classmethod
    def comm_out(cls, label: str, subject: str, product: str) -> Rule:
        return cls(RuleKind.OUT, subject, label, (product,))

    @classmethod
    def divide(cls, label: str, subject: str, u: str, v: str) -> Rule:
        return cls(RuleKind.DIVIDE, subject, label, (u, v))

    @property
    def is_membrane_rule(self) -> bool:
        return self.kind is not RuleKind.EVOLVE

    def __str__(self) -> str:
        return _format_rule(self, permissible=True)


@dataclass(frozen=True)
class LabelTree:
    """Rooted label tree; ``children`` keeps declaration order."""

    children: Mapping[str, tuple[str, ...]]
    root: str = ENV

    @classmethod
    def single(cls) -> LabelTree:
        return cls({ENV: ()})

    @property
    def labels(self) -> tuple[str, ...]:
        out = []
        stack = [self.root]
        while stack:
            lab = stack.pop()
            out.append(lab)
            stack.extend(reversed(self.children.get(lab, ())))
        return tuple(out)

    def parent(self, label: str) -> str | None:
        for p, kids in self.children.items():
            if label in kids:
                return p
        return None

    def parents(self) -> dict[str, str]:
        return {c: p for p, kids in self.children.items() for c in kids}

    def is_leaf(self, label: str) -> bool:
        return not self.children.get(label)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LabelTree):
            return NotImplemented
        norm = lambda t: {k: tuple(v) for k, v in t.children.items() if v}
        return self.root == other.root and norm(self) == norm(other)

    def __hash__(self) -> int:
        return hash(self.labels)


@dataclass(frozen=True, eq=True)
class MembraneSystem:
    objects: tuple[str, ...]
    tree: LabelTree
    contents: Mapping[str, Multiset]
    rules: tuple[Rule, ...]
    input_label: str | None = None
    name: str = "system"
    _index: dict = field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self):
        labels = self.tree.labels
        full = {lab: Multiset(self.contents.get(lab, EMPTY)) for lab in labels}
        for lab in self.contents:
            if lab not in full:
                full[lab] = Multiset(self.contents[lab])
        object.__setattr__(self, "contents", full)
        object.__setattr__(self, "objects", tuple(self.objects))
        object.__setattr__(self, "rules", tuple(self.rules))

    __hash__ = None

    @property
    def labels(self) -> tuple[str, ...]:
        return self.tree.labels

    def object_types(self) -> list[ObjectType]:
        return [ObjectType(name, i) for i, name in enumerate(self.objects)]

    def ordinal(self, name: str) -> int:
        return self.index.ordinals[name]

    @property
    def index(self) -> RuleIndex:
        if self._index is None:
            object.__setattr__(self, "_index", RuleIndex(self))
        return self._index


class RuleIndex:
    """Lookup tables for rule matching, built once per system."""

    def __init__(self, system: MembraneSystem):
        self.ordinals = {name: i for i, name in enumerate(system.objects)}
        self.parents = system.tree.parents()
        self.evolve: dict[tuple[str, str], list[int]] = {}
        # Rules whose membrane subject has the given label.
        self.membrane: dict[str, list[int]] = {}
        for i, r in enumerate(system.rules):
            if r.kind is RuleKind.EVOLVE:
                self.evolve.setdefault((r.label, r.subject), []).append(i)
            else:
                self.membrane.setdefault(r.label, []).append(i)


# ---------------------------------------------------------------------------
# Configurations


@dataclass(frozen=True)
class Membrane:
    id: int
    label: str
    contents: Multiset = EMPTY
    children: tuple[Membrane, ...] = ()

    def walk(self, parent: Membrane | None = None) -> Iterator[tuple[Membrane, Membrane | None]]:
        """Pre-order traversal yielding ``(instance, parent)``."""
        yield self, parent
        for c in self.children:
            yield from c.walk(self)

    def postorder(self, parent: Membrane | None = None, depth: int = 0):
        for c in self.children:
            yield from c.postorder(self, depth + 1)
        yield self, parent, depth


@dataclass(frozen=True)
class Configuration:
    root: Membrane

    @property
    def env(self) -> Multiset:
        return self.root.contents

    def instances(self) -> Iterator[tuple[Membrane, Membrane | None]]:
        return self.root.walk()

    def by_id(self) -> dict[int, Membrane]:
        return {m.id: m for m, _ in self.instances()}

    def to_dict(self) -> dict:
        return membrane_to_dict(self.root)

    def restrict(self, instance_id: int, obj: str) -> Configuration:
        """Same membrane structure holding one ``obj`` in ``instance_id`` only."""

        def go(m: Membrane) -> Membrane:
            contents = Multiset({obj: 1}) if m.id == instance_id else EMPTY
            return Membrane(m.id, m.label, contents, tuple(go(c) for c in m.children))

        return Configuration(go(self.root))


def membrane_to_dict(m: Membrane) -> dict:
    return {
        "id": m.id,
        "label": m.label,
        "contents": dict(m.contents.items()),
        "children": [membrane_to_dict(c) for c in m.children],
    }


def configuration_from_dict(data: Mapping) -> Configuration:
    def go(d: Mapping) -> Membrane:
        return Membrane(
            int(d["id"]), d["label"], Multiset(d.get("contents", {})),
            tuple(go(c) for c in d.get("children", ())),
        )

    return Configuration(go(data))


def dump_trace(configs: Iterable[Configuration]) -> str:
    return json.dumps([c.to_dict() for c in configs], indent=1)


def initial_configuration(system: MembraneSystem, input: Mapping[str, int] | None = None) -> Configuration:
    extra = Multiset(input or {})
    if extra and system.input_label is None:
        raise ValidationError("no-input-membrane", "input given but the system declares no input membrane")
    for o in extra:
        if o not in system.index.ordinals:
            raise ValidationError("unknown-object", f"input object {o!r} is not declared")
    counter = iter(range(len(system.labels)))

    def build(label: str) -> Membrane:
        ident = next(counter)
        contents = system.contents[label]
        if label == system.input_label and extra:
            contents = contents + extra
        kids = tuple(build(c) for c in system.tree.children.get(label, ()))
        return Membrane(ident, label, contents, kids)

    return Configuration(build(system.tree.root))


def canonical_key(config: Configuration | Membrane) -> str:
    m = config.root if isinstance(config, Configuration) else config
    kids = sorted(canonical_key(c) for c in m.children)
    return f"{m.label}[{m.contents.key()}]({';'.join(kids)})"


# ---------------------------------------------------------------------------
# Validation


def validate(system: MembraneSystem) -> MembraneSystem:
    seen = set()
    for o in system.objects:
        if o in seen:
            raise ValidationError("duplicate-object", f"object {o!r} declared twice")
        seen.add(o)
    tree = system.tree
    if tree.root != ENV:
        raise ValidationError("bad-root", "the root membrane must be labelled env")
    labels = []
    stack = [tree.root]
    while stack:
        lab = stack.pop()
        labels.append(lab)
        stack.extend(tree.children.get(lab, ()))
        if len(labels) > 10 * (len(tree.children) + 1) + 10:
            raise ValidationError("bad-tree", "membrane structure is not a tree")
    if len(set(labels)) != len(labels):
        raise ValidationError("duplicate-label", "membrane labels must be unique")
    label_set = set(labels)
    for p in tree.children:
        if p not in label_set:
            raise ValidationError("bad-tree", f"label {p!r} is not connected to env")

    def need_label(lab: str, where: str):
        if lab not in label_set:
            raise ValidationError("unknown-label", f"unknown label {lab!r} in {where}")

    def need_object(o: str, where: str):
        if o not in seen:
            raise ValidationError("unknown-object", f"unknown object {o!r} in {where}")

    for lab, ms in system.contents.items():
        need_label(lab, "contents")
        for o in ms:
            need_object(o, f"contents of {lab}")
    if system.input_label is not None:
        need_label(system.input_label, "input declaration")
    for r in system.rules:
        where = f"rule {r}"
        need_label(r.label, where)
        need_object(r.subject, where)
        for o in r.products:
            need_object(o, where)
        if r.subject in RESERVED:
            raise ValidationError("reserved-consumed", f"reserved object consumed: {where}")
        if r.label == ENV:
            if r.kind is RuleKind.DIVIDE:
                raise ValidationError("env-divide", "env cannot divide")
            if r.kind is RuleKind.OUT:
                raise ValidationError("env-comm-out", "env cannot communicate out")
            if r.kind is RuleKind.IN:
                raise ValidationError("env-comm-in", "env has no parent to receive objects from")
        if r.kind is RuleKind.DIVIDE and not tree.is_leaf(r.label):
            raise ValidationError("divide-non-leaf", f"only elementary membranes divide: {where}")
    return system


# ---------------------------------------------------------------------------
# Parsing


def _split_list(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def _parse_items(tokens: Iterable[str], line: int, col: int) -> list[str]:
    out: list[str] = []
    for tok in tokens:
        name, star, count = tok.partition("*")
        name = name.strip()
        if not _IDENT_RE.fullmatch(name):
            raise SourceError(f"bad object name {name!r}", line, col)
        n = 1
        if star:
            if not count.strip().isdigit():
                raise SourceError(f"bad multiplicity in {tok!r}", line, col)
            n = int(count)
        out.extend([name] * n)
    return out


def parse_multiset(text: str) -> Multiset:
    """Read ``"a*2, b"`` (or ``"a, a, b"``) into a multiset."""
    return Multiset(_parse_items(_split_list(text), 1, 1))


def _parse_mu(text: str, line: int, col0: int) -> LabelTree:
    pos = 0
    children: dict[str, list[str]] = {}

    def skip():
        nonlocal pos
        while pos < len(text) and text[pos].isspace():
            pos += 1

    def err(msg):
        raise SourceError(msg, line, col0 + pos)

    def node() -> str:
        nonlocal pos
        skip()
        m = _IDENT_RE.match(text, pos)
        if not m:
            err("expected a membrane label")
        label = m.group()
        if label in children:
            err(f"duplicate label {label!r}")
        children[label] = []
        pos = m.end()
        skip()
        if pos < len(text) and text[pos] == "(":
            pos += 1
            skip()
            if pos < len(text) and text[pos] == ")":
                pos += 1
                return label
            while True:
                children[label].append(node())
                skip()
                if pos < len(text) and text[pos] == ",":
                    pos += 1
                    continue
                if pos < len(text) and text[pos] == ")":
                    pos += 1
                    break
                err("expected ',' or ')'")
        return label

    root = node()
    skip()
    if pos != len(text):
        err("trailing text in membrane structure")
    if root != ENV:
        raise SourceError("membrane structure must be rooted at env", line, col0)
    return LabelTree({k: tuple(v) for k, v in children.items()})


_RULE_RE = re.compile(rf"^(evolve|in|out|div)\s+({_IDENT})\s*:\s*({_IDENT})\s*->(.*)$")


def parse_system(text: str) -> MembraneSystem:
    name = "system"
    objects: list[str] | None = None
    tree = LabelTree.single()
    input_label = None
    contents: dict[str, list[str]] = {}
    rules: list[Rule] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        stripped = line.strip()
        if not stripped:
            continue
        col = len(line) - len(line.lstrip()) + 1
        head, _, rest = stripped.partition(" ")
        if head == "system":
            if not _IDENT_RE.fullmatch(rest.strip()):
                raise SourceError("expected a system name", lineno, col + 7)
            name = rest.strip()
        elif head == "objects:" or stripped.startswith("objects:"):
            objects = _parse_items(_split_list(stripped[len("objects:"):]), lineno, col)
        elif stripped.startswith("mu:"):
            tree = _parse_mu(stripped[3:], lineno, col + 3)
        elif stripped.startswith("input:"):
            lab = stripped[6:].strip()
            if not _IDENT_RE.fullmatch(lab):
                raise SourceError("expected an input label", lineno, col + 6)
            input_label = lab
        elif head == "contents":
            lab, colon, items = rest.partition(":")
            lab = lab.strip()
            if not colon or not _IDENT_RE.fullmatch(lab):
                raise SourceError("expected 'contents <label>: ...'", lineno, col)
            contents.setdefault(lab, []).extend(_parse_items(_split_list(items), lineno, col))
        else:
            m = _RULE_RE.match(stripped)
            if not m:
                raise SourceError(f"unrecognised line {stripped!r}", lineno, col)
            kind, label, subject, rhs = m.groups()
            rhs_col = col + stripped.index("->") + 2
            if kind == "evolve":
                rules.append(Rule.evolve(label, subject, _parse_items(rhs.split(), lineno, rhs_col)))
            elif kind == "div":
                parts = [p.strip() for p in rhs.split("|")]
                if len(parts) != 2 or not all(_IDENT_RE.fullmatch(p) for p in parts):
                    raise SourceError("division needs 'u | v'", lineno, rhs_col)
                rules.append(Rule.divide(label, subject, parts[0], parts[1]))
            else:
                prod = rhs.strip()
                if not _IDENT_RE.fullmatch(prod):
                    raise SourceError("communication rules produce exactly one object", lineno, rhs_col)
                maker = Rule.comm_in if kind == "in" else Rule.comm_out
                rules.append(maker(label, subject, prod))
    if objects is None:
        objects = []
    system = MembraneSystem(
        objects=tuple(objects),
        tree=tree,
        contents={k: Multiset(v) for k, v in contents.items()},
        rules=tuple(rules),
        input_label=input_label,
        name=name,
    )
    return validate(system)


# ---------------------------------------------------------------------------
# Serialization


def _format_items(ms: Multiset, permissible: bool, sep: str = ", ") -> str:
    if permissible:
        return sep.join(ms.elements())
    return sep.join(k if v == 1 else f"{k}*{v}" for k, v in ms.items())


def _format_rule(r: Rule, permissible: bool) -> str:
    if r.kind is RuleKind.EVOLVE:
        rhs = _format_items(Multiset(r.products), permissible, sep=" ")
        return f"evolve {r.label}: {r.subject} ->" + (f" {rhs}" if rhs else "")
    if r.kind is RuleKind.DIVIDE:
        return f"div {r.label}: {r.subject} -> {r.products[0]} | {r.products[1]}"
    return f"{r.kind.value} {r.label}: {r.subject} -> {r.products[0]}"


def _format_mu(tree: LabelTree, label: str) -> str:
    kids = tree.children.get(label, ())
    return f"{label}(" + (" " + ", ".join(_format_mu(tree, k) for k in kids) + " " if kids else "") + ")"


def serialize_system(system: MembraneSystem, mode: str = "compact") -> str:
    if mode not in ("compact", "permissible"):
        raise ValueError(f"unknown serialization mode {mode!r}")
    permissible = mode == "permissible"
    lines = [f"system {system.name}", "objects: " + ", ".join(system.objects)]
    lines.append("mu: " + _format_mu(system.tree, system.tree.root))
    if system.input_label is not None:
        lines.append(f"input: {system.input_label}")
    for lab in system.labels:
        ms = system.contents.get(lab, EMPTY)
        if ms:
            lines.append(f"contents {lab}: " + _format_items(ms, permissible))
    lines.extend(_format_rule(r, permissible) for r in system.rules)
    return "\n".join(lines) + "\n"
