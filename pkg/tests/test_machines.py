import random

import pytest

from amem.core import SourceError
from amem.machines import (
    ConfigGraph, CyclicMachine, Poly, ProgramConfig, ProgramError, accepts, auto_step_counter,
    build_config_graph, check_acyclic, complement_graph_oracle, parse_input, parse_program,
    vertex_limit,
)
from amem.semantics import BoundExceeded
from gen import random_program, random_word
from oracles import as_sets, bfs_accepts, closure


def test_parse_single_accept():
    p = parse_program("L0: accept")
    assert len(p.instructions) == 1 and p.start == "L0"


def test_parse_unknown_label():
    with pytest.raises(ProgramError):
        parse_program("L0: inc r goto L9\nreg r bound 2")


def test_parse_unbounded_register():
    with pytest.raises(ProgramError):
        parse_program("L0: inc r goto L1\nL1: accept")


def test_parse_choice_and_syntax_errors():
    p = parse_program("L0: choice L0 L1; L1: accept")
    assert p.instruction("L0").op == "choice"
    with pytest.raises(SourceError):
        parse_program("L0: frob r")
    with pytest.raises(SourceError):
        parse_program("reg r bound n^")


def test_program_text_round_trip():
    p = load_builtin("stconn3")
    assert parse_program(p.to_text()) == p


def load_builtin(name):
    from amem.families import load_program
    return load_program(f"builtin:{name}")


def test_poly():
    assert Poly.parse("n^2+1")(3) == 10
    assert Poly.parse("3n")(2) == 6
    assert Poly.parse("2*n+4")(1) == 6
    assert str(Poly.parse("n^2+1")) == "n^2+1"
    with pytest.raises(ValueError):
        Poly.parse("n-1")


def test_parse_input():
    assert parse_input("1^3") == "111"
    assert parse_input("0101") == "0101"
    assert parse_input("") == ""
    with pytest.raises(ValueError):
        parse_input("12")


def test_graph_single_accept():
    g = build_config_graph(parse_program("L0: accept"), "1")
    assert len(g.vertices) == 1 and g.edges == [] and g.accept_vertices == [0]


def test_graph_choice():
    g = build_config_graph(parse_program("L0: choice L1 L2 ; L1: accept ; L2: reject"))
    assert (len(g.vertices), len(g.edges), len(g.accept_vertices)) == (3, 2, 1)


def test_graph_bounded_counter():
    # hand-simulated: r runs 0..3 at L0 and L1 (r < 3), L2 is reachable from every L0 vertex
    p = parse_program("reg r bound n\nL0: choice L1 L2\nL1: inc r goto L0\nL2: accept")
    g = build_config_graph(p, "111")
    assert len(g.vertices) == 12
    assert len(g.edges) == 11
    assert len(g.accept_vertices) == 4
    assert check_acyclic(g)


def test_inc_at_bound_and_dec_at_zero_are_dead_ends():
    p = parse_program("reg r bound 1\nL0: inc r goto L1\nL1: inc r goto L2\nL2: accept")
    assert not accepts(p, "")
    p = parse_program("reg r bound 1\nL0: dec r goto L1\nL1: accept")
    assert len(build_config_graph(p, "").vertices) == 1


def test_read_out_of_range_is_dead_end():
    p = parse_program("reg i bound 5\nL0: read i A R\nA: accept\nR: reject")
    assert accepts(p, "1") and not accepts(p, "0")
    assert len(build_config_graph(p, "").vertices) == 1


def test_cyclic_machine_detected():
    with pytest.raises(CyclicMachine):
        build_config_graph(parse_program("reg r bound 1\nL0: brz r L0 L0"), "")


def test_vertex_cap():
    p = parse_program("reg r bound n\nL0: inc r goto L0")
    with pytest.raises(BoundExceeded):
        build_config_graph(p, "1" * 50, cap=10)


def test_check_acyclic_examples():
    chain = ConfigGraph([0, 1, 2], [(0, 1), (1, 2)], 0)
    loop = ConfigGraph([0], [(0, 0)], 0)
    assert check_acyclic(chain)
    assert not check_acyclic(loop)
    assert check_acyclic(ConfigGraph([], [], 0))


def test_complement_oracle_examples():
    acc = build_config_graph(parse_program("L0: accept"))
    comp = complement_graph_oracle(acc)
    assert (len(comp.vertices), len(comp.edges), comp.accept_vertices) == (1, 0, [])
    rej = build_config_graph(parse_program("L0: reject"))
    comp = complement_graph_oracle(rej)
    assert (len(comp.vertices), comp.edges, comp.accept_vertices) == (2, [(0, 1)], [1])
    assert complement_graph_oracle(ConfigGraph([0, 1], [(0, 1)], 0, [])).accept_reachable()


def test_step_counter_breaks_loops():
    p = auto_step_counter(parse_program("reg r bound 1\nL0: brz r L0 L0"), "5")
    g = build_config_graph(p, "")
    assert check_acyclic(g) and not g.accept_reachable()
    assert len(g.vertices) == 11


def test_step_counter_keeps_accept():
    p = auto_step_counter(parse_program("L0: accept"))
    g = build_config_graph(p, "1")
    assert len(g.accept_vertices) == 1 and g.accept_reachable()


@pytest.mark.parametrize("name", ["even-length", "stconn3"])
def test_step_counter_preserves_verdicts(name):
    p = load_builtin(name)
    q = auto_step_counter(p)
    words = [""] + ["".join(b) for k in range(1, 5) for b in __import__("itertools").product("01", repeat=k)]
    for w in words:
        assert accepts(p, w) == accepts(q, w)


@pytest.mark.parametrize("seed", range(80))
def test_graph_matches_independent_closure(seed):
    rng = random.Random(seed)
    prog, word = random_program(rng), random_word(rng)
    g = build_config_graph(prog, word)
    seen, edges, acc = closure(prog, word)
    assert as_sets(g) == (seen, edges, acc)
    assert check_acyclic(g)
    start = (prog.start, (0,) * len(prog.registers))
    assert g.accept_reachable() == bfs_accepts(seen, edges, acc, start)
    assert g.accept_reachable() != complement_graph_oracle(g).accept_reachable()
    assert len(g.vertices) <= vertex_limit(prog, len(word))


def test_even_length_program():
    p = load_builtin("even-length")
    for k in range(10):
        assert accepts(p, "1" * k) == (k % 2 == 0)


def test_stconn3_against_adjacency_bfs():
    import itertools
    p = load_builtin("stconn3")
    for bits in itertools.product("01", repeat=9):
        w = "".join(bits)
        reach, frontier = {0}, [0]
        while frontier:
            a = frontier.pop()
            for b in range(3):
                if w[3 * a + b] == "1" and b not in reach:
                    reach.add(b)
                    frontier.append(b)
        assert accepts(p, w) == (2 in reach), w


def test_program_config_str():
    assert str(ProgramConfig("L0", (1, 2))) != ""
