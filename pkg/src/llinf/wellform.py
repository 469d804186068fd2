"""Well-formation for the full and the 4S systems, with environment inference.

Both judgments are mixed formal systems: all rules are inductive except
the coinductive-box rule.  A preterm is a term when it has a derivation
in which every infinite branch crosses the coinductive rule infinitely
often.  On regular graphs the candidate derivation is syntax-directed
and deterministic (application splitting and the choice between the two
inductive-binder rules are resolved by occurrence analysis), so the
derivation's state space is the finite set of (subterm, environment)
pairs.  Acceptance then reduces to two checks over that state graph:

* no state fails a side condition, and
* every cycle crosses a coinductive-box edge, i.e. the subgraph of
  non-coinductive edges is acyclic.

Pattern kinds:

==========  =======================  ==================================
kind        full system              4S system
==========  =======================  ==================================
``lin``     exactly one occurrence,  same
            outside all boxes
``ind``     unrestricted             --
``coind``   unrestricted             occurrences under >= 1 coinductive
                                     box
``dup``     --                       any number of occurrences, all
                                     outside boxes
``ind1``    --                       exactly one occurrence, under
                                     exactly one inductive box
``any``     --                       unrestricted
==========  =======================  ==================================
"""

import math
from dataclasses import dataclass

from .errors import LLinfError
from .terms import (
    App, Box, Lam, Node, TermGraph, Var,
    COIND, IND, LIN,
)
from . import surface

LLINF = "llinf"
LL4S = "4s"

KINDS = {
    LLINF: frozenset({"lin", "ind", "coind"}),
    LL4S: frozenset({"lin", "dup", "ind1", "coind", "any"}),
}

INF = math.inf


@dataclass(frozen=True)
class OccSummary:
    """Free occurrences of one variable, classified by enclosing boxes.

    Counts may be ``math.inf`` when a cycle pumps unboundedly many
    occurrences of the class.
    """

    linear: object      # no enclosing box
    ind_one: object     # exactly one inductive box, no coinductive
    deeper_ind: object  # >= 2 inductive boxes, no coinductive
    coind: object       # >= 1 coinductive box

    @property
    def under_coind(self) -> bool:
        return self.coind > 0

    @property
    def total(self):
        return self.linear + self.ind_one + self.deeper_ind + self.coind

    @property
    def infinite(self) -> bool:
        return self.total == INF


_CLS_LIN, _CLS_IND1, _CLS_IND2, _CLS_COIND = range(4)


def _shift(cls, boxkind):
    if boxkind == COIND:
        return _CLS_COIND
    if cls == _CLS_LIN:
        return _CLS_IND1
    if cls == _CLS_IND1:
        return _CLS_IND2
    return cls


def occurrences(g: TermGraph, x: str, node: Node = None) -> OccSummary:
    """Classified free-occurrence counts of ``x`` below ``node``.

    Computed by path counting on the product of the graph with the
    4-class box automaton; a class count is infinite exactly when a
    cycle lies on a path from the start to an occurrence of the class.
    """
    start_node = g.resolve(node if node is not None else g.root_body())
    start = (id(start_node), _CLS_LIN)
    nodes = {start: start_node}
    edges = {}
    todo = [start]
    while todo:
        key = todo.pop()
        if key in edges:
            continue
        n = nodes[key]
        cls = key[1]
        outs = []
        match n:
            case Var(_):
                pass
            case Lam(_, v, b):
                if v != x:
                    outs.append((g.resolve(b), cls))
            case App(f, a):
                outs.append((g.resolve(f), cls))
                outs.append((g.resolve(a), cls))
            case Box(k, b):
                outs.append((g.resolve(b), _shift(cls, k)))
        keys = []
        for child, ccls in outs:
            ck = (id(child), ccls)
            nodes.setdefault(ck, child)
            keys.append(ck)
            if ck not in edges:
                todo.append(ck)
        edges[key] = keys

    def is_target(key, cls):
        n = nodes[key]
        return key[1] == cls and isinstance(n, Var) and n.name == x

    counts = []
    for cls in range(4):
        targets = {k for k in edges if is_target(k, cls)}
        if not targets:
            counts.append(0)
            continue
        co = _coreachable(edges, targets)
        relevant = co  # everything in `edges` is reachable from start
        if start not in relevant:
            counts.append(0)
            continue
        if _has_cycle(edges, relevant):
            counts.append(INF)
            continue
        memo = {}

        def npaths(key):
            if key in memo:
                return memo[key]
            total = 1 if key in targets else 0
            total += sum(npaths(c) for c in edges[key] if c in relevant)
            memo[key] = total
            return total

        # children first, so each npaths call finds its children memoised
        for key in reversed(_topo(edges, relevant)):
            npaths(key)
        counts.append(memo.get(start, 1 if start in targets else 0))
    return OccSummary(*counts)


def _coreachable(edges, targets):
    rev = {k: [] for k in edges}
    for k, outs in edges.items():
        for c in outs:
            rev[c].append(k)
    seen = set(targets)
    todo = list(targets)
    while todo:
        k = todo.pop()
        for p in rev[k]:
            if p not in seen:
                seen.add(p)
                todo.append(p)
    return seen


def _has_cycle(edges, relevant):
    color = {}
    for root in relevant:
        if color.get(root):
            continue
        stack = [(root, iter([c for c in edges[root] if c in relevant]))]
        color[root] = 1
        while stack:
            node, it = stack[-1]
            advanced = False
            for child in it:
                if color.get(child) == 1:
                    return True
                if not color.get(child):
                    color[child] = 1
                    stack.append((child, iter([c for c in edges[child] if c in relevant])))
                    advanced = True
                    break
            if not advanced:
                color[node] = 2
                stack.pop()
    return False


def _topo(edges, relevant):
    color = {}
    order = []
    for root in relevant:
        if color.get(root):
            continue
        stack = [(root, iter([c for c in edges[root] if c in relevant]))]
        color[root] = 1
        while stack:
            node, it = stack[-1]
            advanced = False
            for child in it:
                if not color.get(child):
                    color[child] = 1
                    stack.append((child, iter([c for c in edges[child] if c in relevant])))
                    advanced = True
                    break
            if not advanced:
                color[node] = 2
                order.append(node)
                stack.pop()
    order.reverse()
    return order


# ---------------------------------------------------------------------------
# the checker

@dataclass
class CheckReport:
    """Outcome of a well-formation check.

    On acceptance, ``states`` is the number of distinct (subterm,
    environment) states of the derivation and ``loops`` describes each
    strongly connected component together with a coinductive crossing
    justifying its cycles.  On rejection, ``failure_path`` leads from the
    root judgment to the violated side condition, or ``cycle`` lists an
    inductive-only loop.
    """

    accepted: bool
    system: str
    reason: str = ""
    failure_path: tuple = ()
    cycle: tuple = ()
    states: int = 0
    loops: tuple = ()

    def __bool__(self):
        return self.accepted

    def summary(self) -> str:
        if self.accepted:
            return f"accepted ({self.states} states, {len(self.loops)} loops)"
        lines = [f"rejected: {self.reason}"]
        for step in self.failure_path:
            lines.append(f"  at {step}")
        if self.cycle:
            lines.append("  loop:")
            for step in self.cycle:
                lines.append(f"    {step}")
        return "\n".join(lines)


class _Fail(LLinfError):
    def __init__(self, reason):
        self.reason = reason
        super().__init__(reason)


def _describe(node, env):
    txt = surface.format_node(node)
    if len(txt) > 48:
        txt = txt[:45] + "..."
    return f"{surface.format_environment(env) or chr(0x2205)} |- {txt}"


def _split_sides(g, fv_memo, env, f, a, strict_kinds):
    env_f = {}
    env_a = {}
    for v, k in env.items():
        if k in strict_kinds:
            in_f = v in _node_fv(g, fv_memo, f)
            in_a = v in _node_fv(g, fv_memo, a)
            if in_f and in_a:
                raise _Fail(f"{k} variable {v!r} occurs in both sides of an application")
            if not in_f and not in_a:
                raise _Fail(f"{k} variable {v!r} is unused")
            (env_f if in_f else env_a)[v] = k
        else:
            env_f[v] = k
            env_a[v] = k
    return env_f, env_a


def _node_fv(g, memo, node):
    key = id(node)
    got = memo.get(key)
    if got is None:
        got = g.node_free_vars(node)
        memo[key] = got
    return got


def _expand_llinf(g, fv_memo, node, env):
    match node:
        case Var(x):
            k = env.get(x)
            if k is None:
                raise _Fail(f"free variable {x!r} has no pattern in the environment")
            for v, kv in env.items():
                if v != x and kv == "lin":
                    raise _Fail(f"linear variable {v!r} is unused")
            return []
        case App(f, a):
            env_f, env_a = _split_sides(g, fv_memo, env, f, a, ("lin",))
            return [(f, env_f, False), (a, env_a, False)]
        case Lam(k, x, b):
            bind = {LIN: "lin", IND: "ind", COIND: "coind"}[k]
            env2 = dict(env)
            env2[x] = bind
            return [(b, env2, False)]
        case Box(k, b):
            for v, kv in env.items():
                if kv == "lin":
                    raise _Fail(f"linear variable {v!r} cannot occur under a box")
            return [(b, env, k == COIND)]
    raise TypeError(f"unexpected node {node!r}")


def _expand_ll4s(g, fv_memo, node, env):
    match node:
        case Var(x):
            k = env.get(x)
            if k is None:
                raise _Fail(f"free variable {x!r} has no pattern in the environment")
            if k == "coind":
                raise _Fail(
                    f"coinductive variable {x!r} occurs outside every coinductive box")
            if k == "ind1":
                raise _Fail(
                    f"ind-one variable {x!r} occurs outside its inductive box")
            for v, kv in env.items():
                if v == x:
                    continue
                if kv == "lin":
                    raise _Fail(f"linear variable {v!r} is unused")
                if kv == "ind1":
                    raise _Fail(f"ind-one variable {v!r} is unused")
            return []
        case App(f, a):
            env_f, env_a = _split_sides(g, fv_memo, env, f, a, ("lin", "ind1"))
            return [(f, env_f, False), (a, env_a, False)]
        case Lam("lin", x, b):
            env2 = dict(env)
            env2[x] = "lin"
            return [(b, env2, False)]
        case Lam("coind", x, b):
            env2 = dict(env)
            env2[x] = "coind"
            return [(b, env2, False)]
        case Lam("ind", x, b):
            occ = occurrences(g, x, b)
            if occ.coind > 0 or occ.deeper_ind > 0:
                raise _Fail(
                    f"inductively bound {x!r} occurs under a coinductive box "
                    "or under more than one inductive box")
            if occ.ind_one == 0:
                bind = "dup"
            elif occ.linear == 0 and occ.ind_one == 1:
                bind = "ind1"
            else:
                raise _Fail(
                    f"inductively bound {x!r} occurs both outside and inside "
                    "inductive boxes")
            env2 = dict(env)
            env2[x] = bind
            return [(b, env2, False)]
        case Box("ind", b):
            env2 = {}
            for v, kv in env.items():
                if kv == "lin":
                    raise _Fail(f"linear variable {v!r} cannot occur under a box")
                if kv == "dup":
                    continue  # duplicable variables may not enter boxes
                env2[v] = "lin" if kv == "ind1" else kv
            return [(b, env2, False)]
        case Box("coind", b):
            env2 = {}
            for v, kv in env.items():
                if kv == "lin":
                    raise _Fail(f"linear variable {v!r} cannot occur under a box")
                if kv == "ind1":
                    raise _Fail(
                        f"ind-one variable {v!r} cannot occur under a coinductive box")
                if kv == "dup":
                    continue
                env2[v] = "any" if kv == "coind" else kv
            return [(b, env2, True)]
    raise TypeError(f"unexpected node {node!r}")


def check(system: str, env: dict, g: TermGraph) -> CheckReport:
    """Decide the well-formation judgment ``env |- g`` for one system."""
    bad = set(env.values()) - KINDS[system]
    if bad:
        raise ValueError(f"pattern kinds {sorted(bad)} are not valid for {system}")
    expand = _expand_llinf if system == LLINF else _expand_ll4s
    fv_memo = {}

    keys = {}
    info = []      # (node, env)
    out_edges = []  # per state: list of (child_idx, is_mc)
    parent = []

    def state_key(node, env):
        return (id(node), frozenset(env.items()))

    root_node = g.resolve(g.root_body())
    keys[state_key(root_node, env)] = 0
    info.append((root_node, dict(env)))
    out_edges.append(None)
    parent.append(None)
    todo = [0]
    failure = None
    while todo:
        idx = todo.pop()
        if out_edges[idx] is not None:
            continue
        node, st_env = info[idx]
        try:
            children = expand(g, fv_memo, node, st_env)
        except _Fail as f:
            failure = (idx, f.reason)
            break
        edges = []
        for child, cenv, mc in children:
            child = g.resolve(child)
            key = state_key(child, cenv)
            cidx = keys.get(key)
            if cidx is None:
                cidx = len(info)
                keys[key] = cidx
                info.append((child, cenv))
                out_edges.append(None)
                parent.append(idx)
                todo.append(cidx)
            edges.append((cidx, mc))
        out_edges[idx] = edges

    if failure is not None:
        idx, reason = failure
        path = []
        while idx is not None:
            node, st_env = info[idx]
            path.append(_describe(node, st_env))
            idx = parent[idx]
        path.reverse()
        return CheckReport(False, system, reason=reason,
                           failure_path=tuple(path), states=len(info))

    cycle = _inductive_cycle(out_edges)
    if cycle is not None:
        desc = tuple(_describe(*info[i]) for i in cycle)
        return CheckReport(
            False, system,
            reason="inductive loop: a cycle of the derivation crosses no "
                   "coinductive box",
            cycle=desc, states=len(info))

    loops = _loop_witness(out_edges, info)
    return CheckReport(True, system, states=len(info), loops=tuple(loops))


def _inductive_cycle(out_edges):
    """A cycle using only non-coinductive edges, or None."""
    n = len(out_edges)
    color = [0] * n
    stack_pos = {}
    for root in range(n):
        if color[root]:
            continue
        path = [root]
        iters = [iter([c for c, mc in out_edges[root] if not mc])]
        color[root] = 1
        stack_pos[root] = 0
        while iters:
            try:
                child = next(iters[-1])
            except StopIteration:
                done = path.pop()
                iters.pop()
                color[done] = 2
                del stack_pos[done]
                continue
            if color[child] == 1:
                return path[stack_pos[child]:] + [child]
            if color[child] == 0:
                color[child] = 1
                stack_pos[child] = len(path)
                path.append(child)
                iters.append(iter([c for c, mc in out_edges[child] if not mc]))
    return None


def _loop_witness(out_edges, info):
    """Per nontrivial SCC of the full state graph, one coinductive edge."""
    n = len(out_edges)
    index = [None] * n
    low = [0] * n
    on = [False] * n
    stack = []
    sccs = []
    counter = [0]

    for root in range(n):
        if index[root] is not None:
            continue
        work = [(root, 0)]
        while work:
            v, pi = work.pop()
            if pi == 0:
                index[v] = low[v] = counter[0]
                counter[0] += 1
                stack.append(v)
                on[v] = True
            recurse = False
            edges = out_edges[v]
            for i in range(pi, len(edges)):
                w = edges[i][0]
                if index[w] is None:
                    work.append((v, i + 1))
                    work.append((w, 0))
                    recurse = True
                    break
                if on[w]:
                    low[v] = min(low[v], index[w])
            if recurse:
                continue
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on[w] = False
                    comp.append(w)
                    if w == v:
                        break
                sccs.append(comp)
            if work:
                parent_v = work[-1][0]
                low[parent_v] = min(low[parent_v], low[v])

    witness = []
    for comp in sccs:
        comp_set = set(comp)
        if len(comp) == 1:
            v = comp[0]
            if not any(c == v for c, _ in out_edges[v]):
                continue
        mc_edge = None
        for v in comp:
            for c, mc in out_edges[v]:
                if mc and c in comp_set:
                    mc_edge = (v, c)
                    break
            if mc_edge:
                break
        witness.append({
            "size": len(comp),
            "coinductive_crossing": _describe(*info[mc_edge[0]]) if mc_edge else None,
        })
    return witness


def check_llinf(env: dict, g: TermGraph) -> CheckReport:
    return check(LLINF, env, g)


def check_ll4s(env: dict, g: TermGraph) -> CheckReport:
    return check(LL4S, env, g)


# ---------------------------------------------------------------------------
# environment inference and the precedence order

def infer_env(system: str, g: TermGraph):
    """Least-committal environment accepting the term, or None.

    Kinds are picked per variable from its occurrence summary (linear
    preferred, then the most specific 4S kind), then verified by a full
    check.
    """
    env = {}
    for x in sorted(g.free_vars()):
        occ = occurrences(g, x)
        if occ.total == 1 and occ.linear == 1:
            env[x] = "lin"
        elif system == LLINF:
            env[x] = "ind"
        elif occ.ind_one == 0 and occ.deeper_ind == 0 and occ.coind == 0:
            env[x] = "dup"
        elif (occ.linear, occ.ind_one, occ.deeper_ind, occ.coind) == (0, 1, 0, 0):
            env[x] = "ind1"
        elif occ.linear == 0 and occ.ind_one == 0 and occ.deeper_ind == 0:
            env[x] = "coind"
        else:
            env[x] = "any"
    return env if check(system, env, g) else None


def env_precedes(gamma: dict, delta: dict) -> bool:
    """True iff ``delta`` replaces some ind-one patterns of ``gamma`` by
    duplicable patterns (the environment order of the 4S system)."""
    if set(gamma) != set(delta):
        return False
    for x, k in gamma.items():
        dk = delta[x]
        if dk == k:
            continue
        if k == "ind1" and dk == "dup":
            continue
        return False
    return True


def preceding_variants(gamma: dict):
    """All environments Delta with ``env_precedes(gamma, delta)``."""
    ind1 = [x for x, k in gamma.items() if k == "ind1"]
    for mask in range(1 << len(ind1)):
        d = dict(gamma)
        for i, x in enumerate(ind1):
            if mask >> i & 1:
                d[x] = "dup"
        yield d
