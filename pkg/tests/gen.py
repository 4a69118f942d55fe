"""Seeded generators for random systems and register programs."""
from __future__ import annotations

import random

from amem.core import ENV, NO, YES, LabelTree, MembraneSystem, Multiset, Rule, ValidationError, validate
from amem.machines import Instr, Poly, RegisterProgram, auto_step_counter


def random_system(rng: random.Random, max_objects: int = 6, max_labels: int = 3,
                  max_rules: int = 10, cycle_p: float = 0.1, single_rule: bool = False) -> MembraneSystem:
    """A valid system with mostly forward-pointing rules.

    Objects are ordered and products usually come later in the order than
    the subject, so most systems halt. ``single_rule`` allows at most one
    rule per (subject, label), which keeps most systems confluent.
    """
    while True:
        k = rng.randint(1, max_objects - 2)
        objs = [f"o{i}" for i in range(k)]
        n_labels = rng.randint(1, max_labels)
        children: dict[str, list[str]] = {}
        labels = [ENV]
        for j in range(1, n_labels):
            lab = f"m{j}"
            children.setdefault(rng.choice(labels), []).append(lab)
            labels.append(lab)
        tree = LabelTree({p: tuple(c) for p, c in children.items()})
        parents = tree.parents()
        inner = labels[1:]

        def later(i: int, cycle: bool = True) -> str:
            if cycle and rng.random() < cycle_p:
                return rng.choice(objs)
            pool = objs[i + 1:] + [YES, NO]
            return rng.choice(pool)

        rules: list[Rule] = []
        taken: set[tuple[str, str]] = set()
        for _ in range(rng.randint(1, max_rules)):
            i = rng.randrange(k)
            subj = objs[i]
            kind = rng.choices(["evolve", "in", "out", "div"], [5, 1, 2, 1])[0]
            if kind != "evolve" and not inner:
                kind = "evolve"
            if kind == "evolve":
                lab = rng.choice(labels)
                width = rng.randint(0, 2)
                # only single-product rules may point backwards, so nothing multiplies forever
                rule = Rule.evolve(lab, subj, [later(i, width == 1) for _ in range(width)])
                key = (subj, lab)
            elif kind == "in":
                lab = rng.choice(inner)
                rule = Rule.comm_in(lab, subj, later(i))
                key = (subj, parents[lab])
            elif kind == "out":
                lab = rng.choice(inner)
                rule = Rule.comm_out(lab, subj, later(i))
                key = (subj, lab)
            else:
                leaves = [h for h in inner if tree.is_leaf(h)]
                lab = rng.choice(leaves)
                rule = Rule.divide(lab, subj, later(i, False), later(i, False))
                key = (subj, lab)
            if rule in rules or (single_rule and key in taken):
                continue
            taken.add(key)
            rules.append(rule)
        contents: dict[str, list[str]] = {}
        for _ in range(rng.randint(1, 3)):
            contents.setdefault(rng.choice(labels), []).append(rng.choice(objs))
        try:
            return validate(MembraneSystem(
                tuple(objs + [YES, NO]), tree, {h: Multiset(v) for h, v in contents.items()},
                tuple(rules), input_label=rng.choice(labels), name="random"))
        except ValidationError:
            continue


BOUNDS = ["1", "2", "3", "n", "n+1"]
OPS = ["inc", "dec", "set", "copy", "brz", "breq", "read", "choice"]
OP_WEIGHTS = [3, 1, 1, 1, 2, 1, 2, 3]


def random_program(rng: random.Random, n_instr: int | None = None, step_bound: str = "16") -> RegisterProgram:
    """Random program wrapped in a step counter so it always halts."""
    regs = [(f"r{i}", Poly.parse(rng.choice(BOUNDS))) for i in range(rng.randint(1, 2))]
    names = [r for r, _ in regs]
    n_instr = n_instr or rng.randint(3, 7)
    labels = [f"L{i}" for i in range(n_instr)] + ["acc", "rej"]

    def target() -> str:
        return rng.choice(labels)

    instrs = []
    for lab in labels[:n_instr]:
        op = rng.choices(OPS, OP_WEIGHTS)[0]
        r = rng.choice(names)
        if op in ("inc", "dec"):
            ins = Instr(op, (r, target()))
        elif op == "set":
            ins = Instr(op, (r, Poly.parse(rng.choice(["0", "1", "n"])), target()))
        elif op == "copy":
            ins = Instr(op, (r, rng.choice(names), target()))
        elif op == "brz":
            ins = Instr(op, (r, target(), target()))
        elif op == "breq":
            ins = Instr(op, (r, rng.choice(names), target(), target()))
        elif op == "read":
            ins = Instr(op, (r, target(), target()))
        else:
            ins = Instr(op, (target(), target()))
        instrs.append((lab, ins))
    instrs += [("acc", Instr("accept", ())), ("rej", Instr("reject", ()))]
    prog = RegisterProgram("random", tuple(regs), tuple(instrs), "L0")
    return auto_step_counter(prog, step_bound)


def random_word(rng: random.Random, max_len: int = 4) -> str:
    return "".join(rng.choice("01") for _ in range(rng.randint(1, max_len)))
