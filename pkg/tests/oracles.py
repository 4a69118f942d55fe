"""Independent reference implementations used as test oracles."""


def closure(prog, word):
    """Second implementation of the configuration graph: naive recursion over a visited set."""
    n = len(word)
    regs = [r for r, _ in prog.registers]
    bound = {r: b(n) for r, b in prog.registers}
    code = dict(prog.instructions)
    seen, edges = set(), set()

    def moves(pc, vals):
        ins = code[pc]
        env = dict(zip(regs, vals))
        a = ins.args

        def write(r, v, goto):
            if not 0 <= v <= bound[r]:
                return []
            env2 = dict(env)
            env2[r] = v
            return [(goto, tuple(env2[x] for x in regs))]

        if ins.op == "inc":
            return write(a[0], env[a[0]] + 1, a[1])
        if ins.op == "dec":
            return write(a[0], env[a[0]] - 1, a[1])
        if ins.op == "set":
            return write(a[0], a[1](n), a[2])
        if ins.op == "copy":
            return write(a[0], env[a[1]], a[2])
        if ins.op == "brz":
            return [(a[1] if env[a[0]] == 0 else a[2], vals)]
        if ins.op == "breq":
            return [(a[2] if env[a[0]] == env[a[1]] else a[3], vals)]
        if ins.op == "read":
            p = env[a[0]]
            return [] if p >= n else [(a[1] if word[p] == "1" else a[2], vals)]
        if ins.op == "choice":
            return [(t, vals) for t in set(a)]
        return []

    def visit(c):
        if c in seen:
            return
        seen.add(c)
        for d in moves(*c):
            edges.add((c, d))
            visit(d)

    visit((prog.start, (0,) * len(regs)))
    accepting = {c for c in seen if code[c[0]].op == "accept"}
    return seen, edges, accepting


def as_sets(graph):
    vs = [(v.pc, v.regs) for v in graph.vertices]
    return set(vs), {(vs[a], vs[b]) for a, b in graph.edges}, {vs[i] for i in graph.accept_vertices}


def bfs_accepts(seen, edges, accepting, start):
    adj = {}
    for a, b in edges:
        adj.setdefault(a, []).append(b)
    stack, visited = [start], {start}
    while stack:
        v = stack.pop()
        if v in accepting:
            return True
        for w in adj.get(v, ()):
            if w not in visited:
                visited.add(w)
                stack.append(w)
    return False
