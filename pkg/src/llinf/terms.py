"""Regular infinitary preterms as finite systems of guarded equations.

A preterm is built from seven constructors: variables, applications,
three kinds of abstraction (linear ``\\x``, inductive ``\\!x``, coinductive
``\\#x``) and two kinds of box (inductive ``!M``, coinductive ``#M``).
Possibly infinite preterms are represented here by a :class:`TermGraph`:
a finite map from definition names to bodies, where bodies may contain
``Ref`` back-references.  The denoted (infinite) tree is the unfolding
of the root definition.

Three structural invariants are enforced at construction time:

* every referenced name is defined exactly once;
* no definition body is a bare reference, so every reference cycle
  crosses at least one constructor (guardedness);
* no reference occurs beneath a binder whose bound name is free in the
  referenced body (capture-freedom).

Capture-freedom gives a global property used throughout the package:
free variables of a definition are free in the whole unfolding, and a
binder never scopes across a definition boundary.

Levels are words over ``{i, c}`` recording which boxes a path crosses
(``i`` inductive, ``c`` coinductive); the depth of a level is its number
of ``c`` symbols.  Only coinductive boxes increase depth.
"""

from dataclasses import dataclass
from itertools import count

from .errors import (
    BudgetExceededError,
    CaptureError,
    DefinitionError,
    GuardednessError,
)

# Abstraction / box kinds.
LIN = "lin"
IND = "ind"
COIND = "coind"

# Position selectors (paths through the unfolding; Ref crossings are
# transparent and contribute no selector).
FN = "fn"
ARG = "arg"
BODY = "body"
BOXED = "box"

DEFAULT_BUDGET = 100_000


@dataclass(frozen=True)
class Node:
    """Base class of preterm tree nodes."""

    __slots__ = ()


@dataclass(frozen=True)
class Var(Node):
    __slots__ = ("name",)
    name: str


@dataclass(frozen=True)
class App(Node):
    __slots__ = ("fn", "arg")
    fn: Node
    arg: Node


@dataclass(frozen=True)
class Lam(Node):
    """Abstraction; ``kind`` is one of ``lin``, ``ind``, ``coind``."""

    __slots__ = ("kind", "name", "body")
    kind: str
    name: str
    body: Node


@dataclass(frozen=True)
class Box(Node):
    """Box; ``kind`` is ``ind`` or ``coind``."""

    __slots__ = ("kind", "body")
    kind: str
    body: Node


@dataclass(frozen=True)
class Ref(Node):
    __slots__ = ("name",)
    name: str


@dataclass(frozen=True)
class Cut(Node):
    """Truncation marker in finite approximants (never occurs in graphs)."""

    __slots__ = ()


CUT = Cut()


def level_depth(level: str) -> int:
    """Depth of a level word = number of coinductive crossings."""
    return level.count("c")


def level_key(level: str):
    """Sort key ordering levels by depth, then lexicographically (i < c)."""
    return (level_depth(level), tuple(0 if ch == "i" else 1 for ch in level))


class TermGraph:
    """An immutable system of named, guarded equations plus a root name."""

    __slots__ = ("defs", "root", "_fvs")

    def __init__(self, defs, root, _validate=True):
        self.defs = dict(defs)
        self.root = root
        self._fvs = None
        if _validate:
            _validate_graph(self)

    def root_body(self) -> Node:
        return self.defs[self.root]

    def resolve(self, node: Node) -> Node:
        """Chase Ref indirections (at most one step: bodies are never refs)."""
        while isinstance(node, Ref):
            node = self.defs[node.name]
        return node

    def def_free_vars(self):
        """Free variables of each definition's unfolding (cached fixpoint)."""
        if self._fvs is None:
            fvs = {name: set() for name in self.defs}
            changed = True
            while changed:
                changed = False
                for name, body in self.defs.items():
                    got = _fv_node(body, fvs, frozenset())
                    if not got <= fvs[name]:
                        fvs[name] |= got
                        changed = True
            self._fvs = {name: frozenset(s) for name, s in fvs.items()}
        return self._fvs

    def free_vars(self) -> frozenset:
        return self.def_free_vars()[self.root]

    def node_free_vars(self, node: Node) -> frozenset:
        """Free variables of an arbitrary subterm of this graph."""
        return frozenset(_fv_node(node, self.def_free_vars(), frozenset()))

    def all_names(self):
        """Every identifier in use: definition names plus variable names."""
        names = set(self.defs)
        todo = list(self.defs.values())
        while todo:
            n = todo.pop()
            match n:
                case Var(x):
                    names.add(x)
                case Lam(_, x, b):
                    names.add(x)
                    todo.append(b)
                case _:
                    todo.extend(ch for _, ch in _children(n))
        return names

    def reachable_defs(self):
        """Names of definitions reachable from the root, in discovery order."""
        seen = []
        seen_set = set()
        todo = [self.root]
        while todo:
            name = todo.pop()
            if name in seen_set:
                continue
            seen_set.add(name)
            seen.append(name)
            todo.extend(sorted(_ref_names(self.defs[name]), reverse=True))
        return seen

    def pruned(self) -> "TermGraph":
        """Drop definitions unreachable from the root."""
        keep = set(self.reachable_defs())
        if keep == set(self.defs):
            return self
        return TermGraph({n: b for n, b in self.defs.items() if n in keep},
                         self.root, _validate=False)

    def __repr__(self):
        return f"TermGraph(root={self.root!r}, defs={sorted(self.defs)})"


def graph_of(node: Node, name="main", extra_defs=None) -> TermGraph:
    """Wrap a (Ref-free or Ref-using) body node as a graph."""
    defs = dict(extra_defs) if extra_defs else {}
    defs[name] = node
    return TermGraph(defs, name)


def free_vars(g: TermGraph) -> frozenset:
    return g.free_vars()


# ---------------------------------------------------------------------------
# validation

def _children(node):
    match node:
        case App(f, a):
            return ((FN, f), (ARG, a))
        case Lam(_, _, b):
            return ((BODY, b),)
        case Box(_, b):
            return ((BOXED, b),)
        case _:
            return ()


def _ref_names(node):
    out = set()
    todo = [node]
    while todo:
        n = todo.pop()
        if isinstance(n, Ref):
            out.add(n.name)
        else:
            todo.extend(ch for _, ch in _children(n))
    return out


def _fv_node(node, fvs, bound):
    match node:
        case Var(x):
            return set() if x in bound else {x}
        case Lam(_, x, b):
            return _fv_node(b, fvs, bound | {x})
        case App(f, a):
            return _fv_node(f, fvs, bound) | _fv_node(a, fvs, bound)
        case Box(_, b):
            return _fv_node(b, fvs, bound)
        case Ref(name):
            # Capture-freedom: a definition's free variables are never
            # bound here, so no subtraction is needed.
            return set(fvs[name])
        case Cut():
            return set()
    raise TypeError(f"not a node: {node!r}")


def _validate_graph(g):
    if g.root not in g.defs:
        raise DefinitionError(f"root {g.root!r} is not defined")
    for name, body in g.defs.items():
        if not isinstance(body, Node):
            raise DefinitionError(f"definition {name!r} is not a term")
        for ref in _ref_names(body):
            if ref not in g.defs:
                raise DefinitionError(
                    f"definition {name!r} references undefined {ref!r}")
    # Guardedness: a bare-reference body would let a reference cycle cross
    # zero constructors.
    for name, body in g.defs.items():
        if isinstance(body, Ref):
            chain = [name]
            cur = body
            while isinstance(cur, Ref) and cur.name not in chain:
                chain.append(cur.name)
                cur = g.defs[cur.name]
            if isinstance(cur, Ref):
                chain.append(cur.name)
            raise GuardednessError(
                "unguarded definition: " + " -> ".join(chain), cycle=chain)
    # Variable and definition names share the surface namespace; keeping
    # them disjoint makes printing/parsing a faithful round trip.
    defnames = set(g.defs)
    for name, body in g.defs.items():
        clash = _var_names(body) & defnames
        if clash:
            raise DefinitionError(
                f"variable {sorted(clash)[0]!r} in definition {name!r} "
                "collides with a definition name")
    fvs = g.def_free_vars()
    for name, body in g.defs.items():
        _check_capture(name, body, fvs, frozenset())


def _var_names(node):
    out = set()
    todo = [node]
    while todo:
        n = todo.pop()
        match n:
            case Var(x):
                out.add(x)
            case Lam(_, x, b):
                out.add(x)
                todo.append(b)
            case _:
                todo.extend(ch for _, ch in _children(n))
    return out


def _check_capture(defname, node, fvs, bound):
    match node:
        case Ref(ref):
            bad = bound & fvs[ref]
            if bad:
                binder = sorted(bad)[0]
                raise CaptureError(
                    f"in definition {defname!r}, reference to {ref!r} occurs "
                    f"beneath binder {binder!r} which is free in {ref!r}",
                    binder=binder, ref=ref)
        case Lam(_, x, b):
            _check_capture(defname, b, fvs, bound | {x})
        case _:
            for _, ch in _children(node):
                _check_capture(defname, ch, fvs, bound)


# ---------------------------------------------------------------------------
# finite approximants

def project_depth(g: TermGraph, depth: int, budget: int = DEFAULT_BUDGET) -> Node:
    """The sub-tree of the unfolding holding every node at depth <= depth.

    Contents of coinductive boxes sitting at the depth bound are replaced
    by ``Cut``.  Terminates whenever the bounded region is finite; raises
    :class:`BudgetExceededError` after visiting ``budget`` nodes otherwise.
    Iterative: the region of an ill-formed preterm can be an arbitrarily
    deep spine.
    """
    defs = g.defs
    work = [("go", g.resolve(g.root_body()), depth)]
    vals = []
    visited = 0
    while work:
        op = work.pop()
        tag = op[0]
        if tag == "go":
            _, node, rd = op
            visited += 1
            if visited > budget:
                raise BudgetExceededError(
                    f"depth-{depth} region exceeds {budget} nodes "
                    "(preterm is not well-formed)")
            match node:
                case Var(_):
                    vals.append(node)
                case Lam(k, x, b):
                    work.append(("lam", k, x))
                    work.append(("go", g.resolve(b), rd))
                case App(f, a):
                    work.append(("app",))
                    work.append(("go", g.resolve(a), rd))
                    work.append(("go", g.resolve(f), rd))
                case Box("ind", b):
                    work.append(("box", IND))
                    work.append(("go", g.resolve(b), rd))
                case Box("coind", b):
                    if rd == 0:
                        vals.append(Box(COIND, CUT))
                    else:
                        work.append(("box", COIND))
                        work.append(("go", g.resolve(b), rd - 1))
                case _:
                    raise TypeError(f"unexpected node {node!r}")
        elif tag == "app":
            a = vals.pop()
            f = vals.pop()
            vals.append(App(f, a))
        elif tag == "lam":
            b = vals.pop()
            vals.append(Lam(op[1], op[2], b))
        else:  # box
            b = vals.pop()
            vals.append(Box(op[1], b))
    return vals[0]


def unfold_height(g: TermGraph, height: int) -> Node:
    """Tree of all unfolding nodes at path length < height, ``Cut`` below.

    Always terminates: each unfolding step crosses a constructor, so the
    number of nodes above any fixed height is finite.
    """
    def go(node, h):
        if h <= 0:
            return CUT
        node = g.resolve(node)
        match node:
            case Var(_):
                return node
            case Lam(k, x, b):
                return Lam(k, x, go(b, h - 1))
            case App(f, a):
                return App(go(f, h - 1), go(a, h - 1))
            case Box(k, b):
                return Box(k, go(b, h - 1))
        raise TypeError(f"unexpected node {node!r}")

    return go(g.root_body(), height)


def truncate_tree(tree: Node, height: int) -> Node:
    """Height-truncation of a finite tree (for coherence checks)."""
    if height <= 0:
        return CUT
    match tree:
        case Var(_) | Cut():
            return tree
        case Lam(k, x, b):
            return Lam(k, x, truncate_tree(b, height - 1))
        case App(f, a):
            return App(truncate_tree(f, height - 1), truncate_tree(a, height - 1))
        case Box(k, b):
            return Box(k, truncate_tree(b, height - 1))
    raise TypeError(f"unexpected tree node {tree!r}")


# ---------------------------------------------------------------------------
# equality

def alpha_equal(t1: Node, t2: Node) -> bool:
    """Alpha-equivalence of finite trees (de Bruijn comparison)."""
    def go(a, b, ea, eb, lvl):
        match (a, b):
            case (Cut(), Cut()):
                return True
            case (Var(x), Var(y)):
                ia, ib = ea.get(x), eb.get(y)
                if ia is None and ib is None:
                    return x == y
                return ia == ib
            case (App(f1, a1), App(f2, a2)):
                return go(f1, f2, ea, eb, lvl) and go(a1, a2, ea, eb, lvl)
            case (Lam(k1, x, b1), Lam(k2, y, b2)):
                if k1 != k2:
                    return False
                ea2 = dict(ea)
                eb2 = dict(eb)
                ea2[x] = lvl
                eb2[y] = lvl
                return go(b1, b2, ea2, eb2, lvl + 1)
            case (Box(k1, b1), Box(k2, b2)):
                return k1 == k2 and go(b1, b2, ea, eb, lvl)
            case _:
                return False

    return go(t1, t2, {}, {}, 0)


def canonical_string(tree: Node) -> str:
    """Canonical (alpha-invariant) rendering of a finite tree."""
    parts = []

    def go(t, env, lvl):
        match t:
            case Cut():
                parts.append("?")
            case Var(x):
                i = env.get(x)
                parts.append(f"b{i}" if i is not None else f"f:{x}")
            case App(f, a):
                parts.append("(")
                go(f, env, lvl)
                parts.append(" ")
                go(a, env, lvl)
                parts.append(")")
            case Lam(k, x, b):
                parts.append(f"(\\{k} ")
                env2 = dict(env)
                env2[x] = lvl
                go(b, env2, lvl + 1)
                parts.append(")")
            case Box(k, b):
                parts.append(f"({k[0]}# ")
                go(b, env, lvl)
                parts.append(")")

    go(tree, {}, 0)
    return "".join(parts)


def equal_at_depth(g1: TermGraph, g2: TermGraph, depth: int,
                   budget: int = DEFAULT_BUDGET) -> bool:
    """Observational equality: alpha-equal depth projections."""
    return alpha_equal(project_depth(g1, depth, budget),
                       project_depth(g2, depth, budget))


def _debruijn(g):
    """Per-definition de Bruijn conversion (binders never cross defs)."""
    def conv(node, env, lvl):
        match node:
            case Var(x):
                i = env.get(x)
                return ("bv", lvl - 1 - i) if i is not None else ("fv", x)
            case App(f, a):
                return ("app", conv(f, env, lvl), conv(a, env, lvl))
            case Lam(k, x, b):
                env2 = dict(env)
                env2[x] = lvl
                return ("lam", k, conv(b, env2, lvl + 1))
            case Box(k, b):
                return ("box", k, conv(b, env, lvl))
            case Ref(name):
                return ("ref", name)
        raise TypeError(f"unexpected node {node!r}")

    return {name: conv(body, {}, 0) for name, body in g.defs.items()}


def graph_bisimilar(g1: TermGraph, g2: TermGraph) -> bool:
    """Alpha-bisimilarity of the denoted regular trees.

    Decided by a memoised pairwise traversal of the de Bruijn forms:
    a revisited pair is assumed equal, which is sound for the greatest
    fixpoint.  State space is finite since each side ranges over the
    (finitely many) subterms of its converted definitions.
    """
    d1 = _debruijn(g1)
    d2 = _debruijn(g2)

    def resolve(d, n):
        while n[0] == "ref":
            n = d[n[1]]
        return n

    seen = set()
    todo = [(d1[g1.root], d2[g2.root])]
    while todo:
        a, b = todo.pop()
        a = resolve(d1, a)
        b = resolve(d2, b)
        key = (id(a), id(b))
        if key in seen:
            continue
        seen.add(key)
        if a[0] != b[0]:
            return False
        match a[0]:
            case "bv" | "fv":
                if a != b:
                    return False
            case "app":
                todo.append((a[1], b[1]))
                todo.append((a[2], b[2]))
            case "lam":
                if a[1] != b[1]:
                    return False
                todo.append((a[2], b[2]))
            case "box":
                if a[1] != b[1]:
                    return False
                todo.append((a[2], b[2]))
    return True


# ---------------------------------------------------------------------------
# substitution

_fresh_counter = count(1)


def fresh_name(base, used):
    base = base.rstrip("0123456789") or "v"
    for _ in range(10_000_000):
        cand = f"{base}{next(_fresh_counter)}"
        if cand not in used:
            return cand
    raise RuntimeError("fresh name space exhausted")


def _rename_free(node, old, new):
    """Rename free occurrences of a variable inside a body tree.

    Never descends into references: capture-freedom guarantees that no
    reference beneath the renamed binder mentions it freely.
    """
    match node:
        case Var(x):
            return Var(new) if x == old else node
        case Lam(k, x, b):
            return node if x == old else Lam(k, x, _rename_free(b, old, new))
        case App(f, a):
            return App(_rename_free(f, old, new), _rename_free(a, old, new))
        case Box(k, b):
            return Box(k, _rename_free(b, old, new))
        case Ref(_):
            return node
    raise TypeError(f"unexpected node {node!r}")


def rename_binders_apart(node, avoid, used):
    """Alpha-rename binders whose names collide with ``avoid``."""
    match node:
        case Lam(k, x, b):
            if x in avoid:
                x2 = fresh_name(x, avoid | used)
                used.add(x2)
                b = _rename_free(b, x, x2)
                return Lam(k, x2, rename_binders_apart(b, avoid, used))
            return Lam(k, x, rename_binders_apart(b, avoid, used))
        case App(f, a):
            return App(rename_binders_apart(f, avoid, used),
                       rename_binders_apart(a, avoid, used))
        case Box(k, b):
            return Box(k, rename_binders_apart(b, avoid, used))
        case _:
            return node


def subst_in_body(g: TermGraph, body: Node, x: str, replacement: Node) -> Node:
    """Capture-avoiding substitution inside one body tree.

    ``replacement`` may reference definitions; by capture-freedom no
    referenced definition has ``x`` free when the body lies beneath an
    ``x`` binder, so recursion stops at references and at shadowing
    binders.
    """
    avoid = g.node_free_vars(replacement)
    used = set(avoid) | g.all_names()
    body = rename_binders_apart(body, avoid, used)

    def go(n):
        match n:
            case Var(v):
                return replacement if v == x else n
            case Lam(k, v, b):
                return n if v == x else Lam(k, v, go(b))
            case App(f, a):
                return App(go(f), go(a))
            case Box(k, b):
                return Box(k, go(b))
            case Ref(_):
                return n
        raise TypeError(f"unexpected node {n!r}")

    return go(body)


def import_defs(target_defs: dict, src: TermGraph):
    """Copy ``src``'s reachable definitions into ``target_defs``.

    Definition names are renamed apart on collision.  Returns the name of
    the imported root.
    """
    reach = src.reachable_defs()
    rename = {}
    used = set(target_defs)
    for body in target_defs.values():
        used |= _var_names(body)
    used |= src.all_names() - set(src.defs)
    for name in reach:
        if name in used:
            new = fresh_name(name, used)
        else:
            new = name
        rename[name] = new
        used.add(new)

    def fix(node):
        match node:
            case Ref(name):
                return Ref(rename[name])
            case App(f, a):
                return App(fix(f), fix(a))
            case Lam(k, v, b):
                return Lam(k, v, fix(b))
            case Box(k, b):
                return Box(k, fix(b))
            case _:
                return node

    for name in reach:
        target_defs[rename[name]] = fix(src.defs[name])
    return rename[src.root]


def substitute(g: TermGraph, x: str, n: TermGraph) -> TermGraph:
    """The graph denoting ``M[x := N]``.

    Applied across every definition reachable from the root in which
    ``x`` is free; ``n``'s definitions are imported (renamed apart).
    When ``x`` is not free the input graph is returned unchanged.
    """
    fvs = g.def_free_vars()
    if all(x not in fvs[name] for name in g.reachable_defs()):
        return g

    defs = dict(g.defs)
    n_root = import_defs(defs, n)
    # Inline the root body at occurrence sites: definition bodies must
    # never become bare references.
    replacement = defs[n_root]

    tmp = TermGraph(defs, g.root, _validate=False)
    new_defs = {}
    for name, body in defs.items():
        if name in g.defs and x in fvs.get(name, frozenset()):
            new_defs[name] = subst_in_body(tmp, body, x, replacement)
        else:
            new_defs[name] = body
    return TermGraph(new_defs, g.root).pruned()
