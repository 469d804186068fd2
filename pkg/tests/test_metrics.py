import pytest
from hypothesis import given, settings, strategies as st

from llinf import generate, properties, reduction
from llinf.errors import MetricsUndefinedError
from llinf.metrics import (
    df, df_oracle, size_at, size_at_oracle, twei, twei_oracle, wei,
    wei_oracle, weight_trace,
)
from conftest import parse


# frozen values, each computed by hand from the depth-indexed equations

def test_size_values(identity):
    assert size_at(identity, 0) == 2
    boxed = parse("def B = #(\\x. x) ; root B")
    assert size_at(boxed, 0) == 0
    assert size_at(boxed, 1) == 2
    assert size_at(parse("def B = !(\\x. x) ; root B"), 0) == 3
    assert size_at(parse("def A = (\\x. x) y ; root A"), 0) == 4


def test_wei_values(identity):
    assert wei(identity, 5, 0) == 2
    assert wei(parse("def B = !(\\x. x) ; root B"), 3, 0) == 6
    assert wei(parse("def B = #(\\x. x) ; root B"), 7, 0) == 0
    # application adds no weight, unlike size
    assert wei(parse("def A = x y ; root A"), 2, 0) == 2


def test_df_values(identity):
    assert df(identity, 0) == 1
    three = parse("def T = \\!x. u x x x ; root T")
    assert df(three, 0) == 3
    assert df(parse("def B = #(\\!x. u x x x) ; root B"), 0) == 1
    assert df(parse("def B = #(\\!x. u x x x) ; root B"), 1) == 3


def test_twei_values(identity):
    assert twei(identity, 0) == 2
    assert twei(parse("def B = #(\\x. x) ; root B"), 0) == 0
    assert twei(parse("def B = \\!x. !x ; root B"), 0) == 2


def test_twei_uses_df_as_multiplier():
    g = parse("def T = (\\!x. u x x x) (!(\\w. w)) ; root T")
    assert df(g, 0) == 3
    # function side (1+1+1+1)+1 = 5, boxed argument 3*(1+1) = 6
    assert wei(g, 3, 0) == 11
    assert twei(g, 0) == 11


def test_metrics_on_cyclic(cyclic_term):
    # y #M: sizes 2 at every depth, weight 1 (the application is free)
    for m in range(4):
        assert size_at(cyclic_term, m) == 2
        assert twei(cyclic_term, m) == 1


def test_oracle_agreement_examples(ex, identity, cyclic_term):
    graphs = [identity, cyclic_term, ex["nonconf"], ex["nonNF"],
              parse("def B = \\!x. !x ; root B")]
    for g in graphs:
        for m in range(4):
            assert size_at(g, m) == size_at_oracle(g, m)
            assert df(g, m) == df_oracle(g, m)
            assert twei(g, m) == twei_oracle(g, m)
            assert wei(g, 3, m) == wei_oracle(g, 3, m)


def test_oracle_rejects_unguarded(rho):
    with pytest.raises(MetricsUndefinedError):
        size_at_oracle(rho, 0)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_oracle_agreement_random(seed):
    _, g = generate.random_term(seed, "4s", 26)
    assert properties.oracle_agreement_case(g)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_weight_laws_random(seed):
    import random
    _, g = generate.random_term(seed, "4s", 26, require_redex=True)
    got = properties.weight_laws_case(g, random.Random(str(seed)))
    assert got is None or got is True


def test_step_count_bound_exhaustive():
    """All reduction orders at depth n terminate within twei_n steps
    (brute force over every order on small terms)."""
    small = [
        "def A = (\\x. x) ((\\y. y) z) ; root A",
        "def A = (\\!x. u x x) (!((\\w. w) v)) ; root A",
        "def A = (\\#x. \\y. y) (#q) ((\\z. z) r) ; root A",
        "def A = (\\!x. u) (!((\\w. w) v)) ; root A",
    ]
    for text in small:
        g = parse(text)
        bound = twei(g, 0)
        longest = _longest_depth0_sequence(g, limit=bound + 2)
        assert longest <= bound, (text, longest, bound)


def _longest_depth0_sequence(g, limit):
    best = 0
    stack = [(g, 0)]
    while stack:
        cur, n = stack.pop()
        assert n <= limit, "reduction ran past the weight bound"
        best = max(best, n)
        for r in reduction.redexes_within_depth(cur, 0):
            stack.append((reduction.contract(cur, r), n + 1))
    return best


def test_weight_trace_fixpoint_run():
    from llinf import encodings
    from llinf.terms import App, Box, Ref, TermGraph, import_defs, COIND
    defs = {}
    x = import_defs(defs, encodings.guarded_fixpoint())
    n = import_defs(defs, parse("def N = \\#w. \\z. z ; root N"))
    defs["run"] = App(App(Ref(x), Ref(n)), Box(COIND, Ref(n)))
    g = TermGraph(defs, "run").pruned()
    trace = weight_trace(g, 2)
    assert trace.verdict == "pass", trace.detail
    assert trace.steps  # the unrolling actually stepped


def test_weight_trace_normal_form(identity):
    trace = weight_trace(identity, 2)
    assert trace.verdict == "pass"
    assert trace.steps == []


def test_weight_trace_not_applicable(ex):
    trace = weight_trace(ex["omega_ind"], 1)
    assert trace.verdict == "not-applicable"


def test_df_never_increases_on_examples():
    g = parse("def T = (\\!x. u x x x) (!(\\w. w)) ; root T")
    stepped = reduction.contract(g, reduction.find_redexes(g)[0])
    for m in range(3):
        assert df(stepped, m) <= df(g, m)
