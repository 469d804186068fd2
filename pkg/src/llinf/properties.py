"""Randomised property suites shared by the bench command and the tests.

Each suite draws seeded random terms from the per-system generators and
checks one dynamic law: preservation of well-formation under single
steps, the weight/duplicability laws of the 4S fragment, the diamond
property of level-by-level reduction, and joinability of independent
admissible strategies.
"""

import random

from .terms import TermGraph, canonical_string, equal_at_depth, project_depth
from . import generate, metrics, reduction, wellform


def random_single_step(g, rng, height=32):
    """Contract one uniformly chosen redex within the height bound."""
    redexes = reduction.find_redexes(g, height_bound=height)
    if not redexes:
        return None, None
    r = rng.choice(redexes)
    return reduction.contract(g, r), r


def subject_reduction_case(system, env, g, rng):
    """One random step preserves well-formation (for the 4S system, up
    to replacing ind-one patterns by duplicable ones)."""
    stepped, r = random_single_step(g, rng)
    if stepped is None:
        return None
    if system == "llinf":
        return bool(wellform.check(system, env, stepped))
    return any(bool(wellform.check_ll4s(d, stepped))
               for d in wellform.preceding_variants(env))


def weight_laws_case(g, rng, max_depth=3):
    """One random step obeys the decrease laws: twei strictly drops at
    the step depth, is untouched below it, and df never increases."""
    redexes = [r for r in reduction.redexes_within_depth(g, max_depth)
               if r.depth <= max_depth]
    if not redexes:
        return None
    r = rng.choice(redexes)
    n = r.depth
    before_t = [metrics.twei(g, m) for m in range(max_depth + 1)]
    before_d = [metrics.df(g, m) for m in range(max_depth + 1)]
    stepped = reduction.contract(g, r)
    after_t = [metrics.twei(stepped, m) for m in range(max_depth + 1)]
    after_d = [metrics.df(stepped, m) for m in range(max_depth + 1)]
    if not after_t[n] < before_t[n]:
        return False
    if after_t[:n] != before_t[:n]:
        return False
    if any(a > b for a, b in zip(after_d, before_d)):
        return False
    return True


def oracle_agreement_case(g, max_depth=3):
    """Projection-based metrics agree exactly with the graph-fixpoint
    oracle."""
    for m in range(max_depth + 1):
        if metrics.size_at(g, m) != metrics.size_at_oracle(g, m):
            return False
        if metrics.df(g, m) != metrics.df_oracle(g, m):
            return False
        if metrics.twei(g, m) != metrics.twei_oracle(g, m):
            return False
        n = metrics.df(g, m)
        if metrics.wei(g, n, m) != metrics.wei_oracle(g, n, m):
            return False
    return True


def _admissible_at(g, depth):
    redexes = reduction.redexes_within_depth(g, depth)
    return [r for r in reduction._admissible(redexes) if r.depth <= depth]


def lbl_diamond_case(g, rng, depth=2):
    """Two distinct admissible redexes join in at most one further
    admissible step on each side."""
    adm = _admissible_at(g, depth)
    if len(adm) < 2:
        return None
    r1, r2 = rng.sample(adm, 2)
    g1 = reduction.contract(g, r1)
    g2 = reduction.contract(g, r2)
    side1 = [g1] + [reduction.contract(g1, r) for r in _admissible_at(g1, depth)]
    side2 = [g2] + [reduction.contract(g2, r) for r in _admissible_at(g2, depth)]
    probe = depth + 2
    keys1 = {canonical_string(project_depth(h, probe)) for h in side1}
    keys2 = {canonical_string(project_depth(h, probe)) for h in side2}
    return bool(keys1 & keys2)


def randomized_normalize(g, depth, rng, fuel=5000):
    """Normalise depths 0..depth firing uniformly random admissible
    redexes; any such strategy is admissible level-by-level."""
    for d in range(depth + 1):
        spent = 0
        while True:
            redexes = reduction.redexes_within_depth(g, d)
            if not redexes:
                break
            adm = reduction._admissible(redexes)
            r = rng.choice(adm)
            g = reduction.contract(g, r)
            spent += 1
            if spent > fuel:
                raise RuntimeError("randomized strategy exceeded its fuel")
    return g


def joinability_case(g, rng, depth=2):
    """Two independent randomized admissible strategies agree on the
    depth projection (strong confluence at desk scale)."""
    r1 = random.Random(rng.random())
    r2 = random.Random(rng.random())
    h1 = randomized_normalize(g, depth, r1)
    h2 = randomized_normalize(g, depth, r2)
    return equal_at_depth(h1, h2, depth)


def bounded_join_search(g1: TermGraph, g2: TermGraph, steps=6, cmp_depth=3,
                        cap=4000):
    """Breadth-first search for a common reduct.

    Only redexes at depth <= cmp_depth are fired (deeper steps cannot
    change the compared projection).  Returns True when some reduct of
    each side agrees at the comparison depth.
    """
    def close(g, budget):
        seen = {}
        frontier = [g]
        key0 = canonical_string(project_depth(g, cmp_depth + 2))
        seen[key0] = g
        for _ in range(budget):
            nxt = []
            for h in frontier:
                for r in reduction.redexes_within_depth(h, cmp_depth):
                    h2 = reduction.contract(h, r)
                    key = canonical_string(project_depth(h2, cmp_depth + 2))
                    if key not in seen:
                        seen[key] = h2
                        nxt.append(h2)
                if len(seen) > cap:
                    return seen
            frontier = nxt
            if not frontier:
                break
        return seen

    side1 = close(g1, steps)
    side2 = close(g2, steps)
    obs1 = {canonical_string(project_depth(h, cmp_depth)) for h in side1.values()}
    obs2 = {canonical_string(project_depth(h, cmp_depth)) for h in side2.values()}
    return bool(obs1 & obs2)


def nonconf_joinability_expected_failure(steps=6, cmp_depth=3):
    """The bounded join search on the non-confluence targets must fail."""
    from . import encodings
    ex = encodings.counterexamples()
    joined = bounded_join_search(ex["nonconf_L"], ex["nonconf_P"],
                                 steps=steps, cmp_depth=cmp_depth)
    return "unexpected-join" if joined else "expected-failure"


def run_suites(seed=1, count=50, system="4s", size=26):
    """Run every applicable suite; returns name -> (passed, failed, notes)."""
    results = {}

    def suite(name, fn, n=count):
        passed = failed = 0
        notes = []
        for i in range(n):
            rng = random.Random(str((seed, name, i)))
            try:
                ok = fn(i, rng)
            except Exception as exc:  # a crash is a failure with a note
                ok = False
                notes.append(f"case {i} raised {type(exc).__name__}: {exc}")
            if ok is None:
                continue
            if ok:
                passed += 1
            else:
                failed += 1
                if len(notes) < 5:
                    notes.append(f"case {i} failed (seed {seed})")
        results[name] = (passed, failed, notes)

    def sr_case(i, rng):
        env, g = generate.random_term((seed, "sr", i), system, size,
                                      require_redex=True)
        return subject_reduction_case(system, env, g, rng)

    suite("subject-reduction", sr_case)

    if system == "4s":
        def wl_case(i, rng):
            env, g = generate.random_term((seed, "wl", i), system, size,
                                          require_redex=True)
            return weight_laws_case(g, rng)

        suite("weight-decrease", wl_case)

        def or_case(i, rng):
            _, g = generate.random_term((seed, "or", i), system, size)
            return oracle_agreement_case(g)

        suite("metrics-oracle", or_case)

        def join_case(i, rng):
            _, g = generate.random_term((seed, "join", i), system, size,
                                        require_redex=True)
            return joinability_case(g, rng)

        suite("joinability", join_case)

    def dia_case(i, rng):
        _, g = generate.random_term((seed, "dia", i), system, size,
                                    require_redex=True)
        return lbl_diamond_case(g, rng)

    suite("lbl-diamond", dia_case)

    return results
