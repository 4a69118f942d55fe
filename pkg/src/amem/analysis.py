"""Reachability over (object, label) pairs.

Rule applicability depends only on an object's type and the label of the
membrane holding it, and the label adjacency never changes (no dissolution,
division keeps labels). A single object's possible futures are therefore
paths in a graph over ``(object, label)`` nodes, whatever else the
configuration holds.
"""
from __future__ import annotations

from collections import deque
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field

from .core import ENV, NO, YES, MembraneSystem, RuleKind, initial_configuration
from .semantics import ACCEPT, REJECT, Mode, Verdict


@dataclass(frozen=True, order=True)
class DepNode:
    object: str
    label: str

    def __str__(self) -> str:
        return f"({self.object},{self.label})"


@dataclass
class DependencyGraph:
    nodes: list[DepNode]
    edges: dict[DepNode, set[DepNode]] = field(default_factory=dict)

    def successors(self, node: DepNode) -> set[DepNode]:
        return self.edges.get(node, set())

    def edge_count(self) -> int:
        return sum(len(v) for v in self.edges.values())

    def reachable_from(self, start: DepNode) -> set[DepNode]:
        seen = {start}
        queue = deque([start])
        while queue:
            n = queue.popleft()
            for m in self.edges.get(n, ()):
                if m not in seen:
                    seen.add(m)
                    queue.append(m)
        return seen

    def reaching(self, target: DepNode) -> set[DepNode]:
        """Every node with a path to ``target`` (including ``target``)."""
        reverse: dict[DepNode, list[DepNode]] = {}
        for a, outs in self.edges.items():
            for b in outs:
                reverse.setdefault(b, []).append(a)
        seen = {target}
        queue = deque([target])
        while queue:
            n = queue.popleft()
            for m in reverse.get(n, ()):
                if m not in seen:
                    seen.add(m)
                    queue.append(m)
        return seen


def dependency_graph(system: MembraneSystem) -> DependencyGraph:
    labels = system.labels
    parents = system.tree.parents()
    graph = DependencyGraph([DepNode(o, h) for h in labels for o in system.objects])
    edges = graph.edges

    def link(a: DepNode, b: DepNode):
        edges.setdefault(a, set()).add(b)

    for r in system.rules:
        src = DepNode(r.subject, r.label)
        if r.kind is RuleKind.EVOLVE:
            for o in r.products:
                link(src, DepNode(o, r.label))
        elif r.kind is RuleKind.IN:
            link(DepNode(r.subject, parents[r.label]), DepNode(r.products[0], r.label))
        elif r.kind is RuleKind.OUT:
            link(src, DepNode(r.products[0], parents[r.label]))
        else:
            link(src, DepNode(r.products[0], r.label))
            link(src, DepNode(r.products[1], r.label))
    return graph


class Reachability:
    """Cached answers to "does (o,h) eventually evolve yes/no in env"."""

    def __init__(self, system: MembraneSystem):
        self.system = system
        self.graph = dependency_graph(system)
        self._to_yes = self.graph.reaching(DepNode(YES, ENV))
        self._to_no = self.graph.reaching(DepNode(NO, ENV))

    def reaches_yes(self, node: DepNode) -> bool:
        return node in self._to_yes

    def reaches_no(self, node: DepNode) -> bool:
        return node in self._to_no


def eventually_evolves(system: MembraneSystem, start: DepNode, target: DepNode,
                       graph: DependencyGraph | None = None) -> bool:
    graph = graph or dependency_graph(system)
    return target in graph.reachable_from(start)


def occupied_nodes(system: MembraneSystem, input: Mapping[str, int] | None = None) -> list[DepNode]:
    config = initial_configuration(system, input)
    nodes = {DepNode(o, m.label) for m, _ in config.instances() for o in m.contents}
    return sorted(nodes)


@dataclass
class Prediction:
    verdict: Verdict
    rows: list[tuple[DepNode, bool, bool]]

    def table(self) -> str:
        width = max([len(str(n)) for n, _, _ in self.rows] + [len("node")])
        lines = [f"{'node':<{width}}  reaches-yes  reaches-no"]
        for n, y, no in self.rows:
            lines.append(f"{str(n):<{width}}  {str(y).lower():<11}  {str(no).lower()}")
        lines.append(f"predicted: {self.verdict}")
        return "\n".join(lines)


def predict(system: MembraneSystem, input: Mapping[str, int] | None = None,
            mode: Mode | str = Mode.RECOGNISER1, reach: Reachability | None = None) -> Prediction:
    mode = Mode(mode)
    if mode is Mode.RECOGNISER:
        raise ValueError("the single-object walk cannot certify recogniser multiplicities; use explore")
    reach = reach or Reachability(system)
    rows = [(n, reach.reaches_yes(n), reach.reaches_no(n)) for n in occupied_nodes(system, input)]
    yes = any(y for _, y, _ in rows)
    no = any(n for _, _, n in rows)
    if mode is Mode.ACKNOWLEDGER:
        verdict = ACCEPT if yes else REJECT
    elif yes and no:
        verdict = Verdict.invalid("both-reachable")
    elif yes:
        verdict = ACCEPT
    elif no:
        verdict = REJECT
    else:
        verdict = Verdict.invalid("neither-reachable")
    return Prediction(verdict, rows)


def predict_verdict(system: MembraneSystem, input: Mapping[str, int] | None = None,
                    mode: Mode | str = Mode.RECOGNISER1) -> Verdict:
    return predict(system, input, mode).verdict


def reaches_any(graph: DependencyGraph, starts: Iterable[DepNode], target: DepNode) -> bool:
    pool = graph.reaching(target)
    return any(s in pool for s in starts)
