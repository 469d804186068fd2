"""Redex discovery, contraction, level-set strategies, and productive
level-by-level evaluation.

Basic reduction has three rules, one per abstraction kind::

    (\\x. M) N    ->  M[x := N]
    (\\!x. M) !N  ->  M[x := N]
    (\\#x. M) #N  ->  M[x := N]

A redex occurrence carries the level (word over ``{i, c}``) of the boxes
crossed on the path to it; its depth is the number of ``c`` symbols.
Level-by-level reduction fires a redex at level ``s`` only when the term
is normal at every proper prefix of ``s``; evaluation normalises depth
0, then depth 1, and so on, which is what makes productive terms print
their output depth by depth.
"""

from dataclasses import dataclass, field

from .errors import BudgetExceededError, InvalidPositionError
from .terms import (
    App, Box, Lam, Node, Ref, TermGraph,
    ARG, BODY, BOXED, FN,
    IND, LIN,
    DEFAULT_BUDGET,
    fresh_name, level_depth, level_key, project_depth,
    subst_in_body, _ref_names,
)

DEFAULT_HEIGHT = 64
LINEAR = "linear"
INDUCTIVE = "inductive"
COINDUCTIVE = "coinductive"


@dataclass(frozen=True)
class Redex:
    position: tuple
    level: str
    kind: str

    @property
    def depth(self) -> int:
        return level_depth(self.level)

    def sort_key(self, preorder_index=0):
        return (*level_key(self.level), preorder_index)


@dataclass(frozen=True)
class StepRecord:
    redex: Redex

    @property
    def depth(self) -> int:
        return self.redex.depth


@dataclass
class EvalStats:
    steps_per_depth: dict = field(default_factory=dict)
    fuel_consumed: int = 0
    outcome: str = "normalized"          # | "fuel-exhausted" | "stuck"
    stuck_position: tuple = None
    detail: str = ""


def walk(g: TermGraph, *, max_height=None, max_depth=None,
         budget=DEFAULT_BUDGET):
    """Preorder traversal of the unfolding, yielding (node, path, level).

    ``max_height`` bounds the path length; ``max_depth`` stops descent
    into coinductive boxes beyond the bound (the box node itself is
    still yielded).  References are transparent.
    """
    stack = [(g.resolve(g.root_body()), (), "")]
    visited = 0
    while stack:
        node, path, level = stack.pop()
        visited += 1
        if visited > budget:
            raise BudgetExceededError(
                f"traversal exceeded {budget} nodes (ill-formed input?)")
        yield node, path, level
        if max_height is not None and len(path) >= max_height:
            continue
        match node:
            case App(f, a):
                stack.append((g.resolve(a), path + (ARG,), level))
                stack.append((g.resolve(f), path + (FN,), level))
            case Lam(_, _, b):
                stack.append((g.resolve(b), path + (BODY,), level))
            case Box("ind", b):
                stack.append((g.resolve(b), path + (BOXED,), level + "i"))
            case Box("coind", b):
                if max_depth is None or level_depth(level) < max_depth:
                    stack.append((g.resolve(b), path + (BOXED,), level + "c"))


def redex_kind_at(g: TermGraph, node: Node):
    """The basic-reduction kind this application matches, or None."""
    if not isinstance(node, App):
        return None
    f = g.resolve(node.fn)
    if not isinstance(f, Lam):
        return None
    if f.kind == LIN:
        return LINEAR
    a = g.resolve(node.arg)
    if isinstance(a, Box) and a.kind == f.kind:
        return INDUCTIVE if f.kind == IND else COINDUCTIVE
    return None


def _collect_redexes(g, *, max_height=None, max_depth=None, budget):
    found = []
    for i, (node, path, level) in enumerate(
            walk(g, max_height=max_height, max_depth=max_depth, budget=budget)):
        kind = redex_kind_at(g, node)
        if kind:
            found.append((Redex(path, level, kind), i))
    found.sort(key=lambda ri: ri[0].sort_key(ri[1]))
    return [r for r, _ in found]


def find_redexes(g: TermGraph, height_bound=DEFAULT_HEIGHT,
                 budget=DEFAULT_BUDGET):
    """All redexes within the height bound, ordered by level depth, then
    level (i before c), then leftmost-outermost position."""
    return _collect_redexes(g, max_height=height_bound, budget=budget)


def redexes_within_depth(g: TermGraph, max_depth, budget=DEFAULT_BUDGET):
    """All redexes in the depth-bounded region (finite on terms)."""
    return _collect_redexes(g, max_depth=max_depth, budget=budget)


def has_any_redex(g: TermGraph) -> bool:
    """Whether the unfolding contains a redex anywhere, decided on the
    graph (every unfolding occurrence is a reachable graph node)."""
    seen = set()
    todo = [g.defs[name] for name in g.reachable_defs()]
    while todo:
        n = todo.pop()
        if id(n) in seen:
            continue
        seen.add(id(n))
        if redex_kind_at(g, n):
            return True
        match n:
            case App(f, a):
                todo.append(f)
                todo.append(a)
            case Lam(_, _, b) | Box(_, b):
                todo.append(b)
    return False


def level_at(g: TermGraph, path) -> str:
    """Level of the position reached by ``path`` from the root."""
    node = g.resolve(g.root_body())
    level = ""
    for sel in path:
        match (node, sel):
            case (App(f, _), "fn"):
                node = g.resolve(f)
            case (App(_, a), "arg"):
                node = g.resolve(a)
            case (Lam(_, _, b), "body"):
                node = g.resolve(b)
            case (Box(k, b), "box"):
                level += "i" if k == IND else "c"
                node = g.resolve(b)
            case _:
                raise InvalidPositionError(f"selector {sel!r} does not apply")
    return level


def contract(g: TermGraph, redex: Redex) -> TermGraph:
    """Contract one redex occurrence.

    The path is rebuilt top-down; reference crossings along it are
    inlined first, so sibling occurrences of shared definitions are
    untouched (path copying).
    """
    defs = dict(g.defs)
    scratch = TermGraph(defs, g.root, _validate=False)
    path = redex.position

    def beta(node):
        kind = redex_kind_at(scratch, node)
        if kind != redex.kind:
            raise InvalidPositionError(
                f"position {'.'.join(path) or '<root>'} holds "
                f"{kind or 'no redex'}, not a {redex.kind} redex")
        f = scratch.resolve(node.fn)
        if f.kind == LIN:
            value = node.arg
        else:
            value = scratch.resolve(node.arg).body
        out = subst_in_body(scratch, f.body, f.name, value)
        while isinstance(out, Ref):  # keep definition bodies guarded
            out = defs[out.name]
        return out

    def rewrite(node, i):
        while isinstance(node, Ref):
            node = defs[node.name]
        if i == len(path):
            return beta(node)
        sel = path[i]
        match (node, sel):
            case (App(f, a), "fn"):
                return App(rewrite(f, i + 1), a)
            case (App(f, a), "arg"):
                return App(f, rewrite(a, i + 1))
            case (Lam(k, x, b), "body"):
                return Lam(k, x, rewrite(b, i + 1))
            case (Box(k, b), "box"):
                return Box(k, rewrite(b, i + 1))
            case _:
                raise InvalidPositionError(
                    f"selector {sel!r} does not apply at step {i} of "
                    f"{'.'.join(path)}")

    new_body = rewrite(g.root_body(), 0)
    root = g.root
    if any(root in _ref_names(b) for b in defs.values()):
        # the old root is shared; give the rewritten unfolding a new name
        root = fresh_name(root, set(defs) | g.all_names())
    defs[root] = new_body
    return TermGraph(defs, root).pruned()


# ---------------------------------------------------------------------------
# strategies

def level_predicate(spec):
    """Compile a level predicate: 'any', 'even', 'odd', ('depth', n) or
    ('exact', word)."""
    match spec:
        case "any":
            return lambda lv: True
        case "even":
            return lambda lv: level_depth(lv) % 2 == 0
        case "odd":
            return lambda lv: level_depth(lv) % 2 == 1
        case ("depth", n):
            return lambda lv: level_depth(lv) == n
        case ("exact", word):
            return lambda lv: lv == word
    raise ValueError(f"unknown level predicate {spec!r}")


def step_at_levelset(g: TermGraph, predicate, height_bound=DEFAULT_HEIGHT,
                     budget=DEFAULT_BUDGET):
    """Contract the first redex whose level satisfies the predicate, or
    return None."""
    if not callable(predicate):
        predicate = level_predicate(predicate)
    for r in find_redexes(g, height_bound, budget):
        if predicate(r.level):
            return contract(g, r)
    return None


def _admissible(redexes):
    levels = {r.level for r in redexes}
    return [r for r in redexes
            if not any(r.level[:k] in levels for k in range(len(r.level)))]


def step_lbl(g: TermGraph, max_depth=256, budget=DEFAULT_BUDGET):
    """One level-by-level step: the leftmost admissible redex at the
    outermost non-normal level.  Returns (graph, record) or None."""
    if not has_any_redex(g):
        return None
    d = 0
    while d <= max_depth:
        redexes = redexes_within_depth(g, d, budget)
        if redexes:
            r = _admissible(redexes)[0]
            return contract(g, r), StepRecord(r)
        d += 1
    raise BudgetExceededError(
        f"no redex found at depth <= {max_depth} despite the graph holding one")


def find_deadlock(g: TermGraph, *, max_depth=None, max_height=None,
                  budget=DEFAULT_BUDGET, include_box_heads=False):
    """First application that can never fire, or None.

    Always flagged (the shapes are stable under further reduction and
    substitution): an inductive/coinductive abstraction whose argument
    is an abstraction or a box of the other kind.  A closed application
    whose head is a box is reported only on request: such subterms are
    inert but legitimate (the non-normalising examples carry one at
    every depth), so evaluation must not halt on them.
    """
    for node, path, level in walk(g, max_depth=max_depth,
                                  max_height=max_height, budget=budget):
        if not isinstance(node, App):
            continue
        f = g.resolve(node.fn)
        if isinstance(f, Box):
            if include_box_heads and not g.node_free_vars(node):
                return path, "application head is a box"
            continue
        if isinstance(f, Lam) and f.kind != LIN:
            a = g.resolve(node.arg)
            if isinstance(a, Box) and a.kind != f.kind:
                want = "inductive" if f.kind == IND else "coinductive"
                return path, (f"{want} abstraction applied to a "
                              f"{'inductive' if a.kind == IND else 'coinductive'} box")
            if isinstance(a, Lam):
                return path, ("boxed argument expected but the argument "
                              "is an abstraction")
    return None


def eval_lbl(g: TermGraph, depth: int, fuel: int,
             budget=DEFAULT_BUDGET, on_step=None):
    """Level-by-level evaluation: normalise depth 0, then 1, ... ``depth``.

    Spends at most ``fuel`` steps per depth.  On outcome ``normalized``
    the returned tree is the depth projection of every continuation of
    the reduction: completed depths can never reacquire a redex.
    Returns ``(graph, tree, stats)``.
    """
    stats = EvalStats(steps_per_depth={})
    for d in range(depth + 1):
        stats.steps_per_depth[d] = 0
        while True:
            redexes = redexes_within_depth(g, d, budget)
            if not redexes:
                break
            assert all(r.depth == d for r in redexes), \
                "a completed depth reacquired a redex"
            if stats.steps_per_depth[d] >= fuel:
                stats.outcome = "fuel-exhausted"
                stats.detail = f"fuel exhausted while normalising depth {d}"
                return g, project_depth(g, depth, budget), stats
            r = _admissible(redexes)[0]
            g = contract(g, r)
            stats.steps_per_depth[d] += 1
            stats.fuel_consumed += 1
            if on_step is not None:
                on_step(g, StepRecord(r))
        dead = find_deadlock(g, max_depth=d, budget=budget)
        if dead is not None:
            stats.outcome = "stuck"
            stats.stuck_position, stats.detail = dead
            return g, project_depth(g, depth, budget), stats
    return g, project_depth(g, depth, budget), stats


def run_lbl_trace(g: TermGraph, depth: int, fuel: int, budget=DEFAULT_BUDGET):
    """Evaluate and return the list of step records alongside the result."""
    records = []
    gout, tree, stats = eval_lbl(g, depth, fuel, budget,
                                 on_step=lambda _g, rec: records.append(rec))
    return gout, tree, stats, records


def classify(g: TermGraph, height_bound=DEFAULT_HEIGHT,
             budget=DEFAULT_BUDGET) -> str:
    """'normal', 'reducible', or 'deadlocked' within the height bound.

    Redexes take priority: a term that still reduces is reducible even
    if an unusable application is already visible.
    """
    if find_redexes(g, height_bound, budget):
        return "reducible"
    dead = find_deadlock(g, max_height=height_bound, budget=budget,
                         include_box_heads=True)
    if dead is not None:
        return "deadlocked"
    return "normal"


def format_step(index: int, record: StepRecord, human=False) -> str:
    r = record.redex
    level = r.level or ("ε" if human else "")
    pos = ".".join(r.position) or ("ε" if human else "")
    if human:
        return (f"step {index}: level {level}, depth {r.depth}, "
                f"{r.kind} redex at {pos}")
    return f"{index}\t{level}\t{r.depth}\t{r.kind}\t{pos}"
