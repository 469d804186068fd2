import math

import pytest
from hypothesis import given, settings, strategies as st

from llinf import generate, reduction
from llinf.encodings import bit_flip, fixpoint, guarded_fixpoint
from llinf.terms import App, Box, Lam, Ref, TermGraph
from llinf.wellform import (
    check, check_ll4s, check_llinf, env_precedes, infer_env, occurrences,
    preceding_variants,
)
from llinf.terms import substitute
from conftest import parse


# ----- the running examples -------------------------------------------------

def test_accepts_basic_cyclic_term(cyclic_term):
    rep = check_llinf({"y": "ind"}, cyclic_term)
    assert rep.accepted
    assert rep.states >= 3
    assert rep.loops  # the cycle is justified by a coinductive crossing


def test_rejects_unguarded(rho):
    rep = check_llinf({}, rho)
    assert not rep.accepted
    assert "inductive loop" in rep.reason
    assert rep.cycle  # the loop is reported


def test_axiom():
    assert check_llinf({"x": "lin"}, parse("def V = x ; root V")).accepted


def test_linear_variable_must_be_used():
    rep = check_llinf({"x": "lin"}, parse("def V = \\w. w ; root V"))
    assert not rep.accepted


def test_linear_variable_single_use():
    rep = check_llinf({"x": "lin"}, parse("def V = x x ; root V"))
    assert not rep.accepted
    assert "both sides" in rep.reason


def test_linear_variable_not_under_box():
    rep = check_llinf({"x": "lin"}, parse("def V = !x ; root V"))
    assert not rep.accepted
    assert "box" in rep.reason


def test_unbound_variable_rejected():
    assert not check_llinf({}, parse("def V = x ; root V")).accepted


def test_ind_and_coind_are_permissive_llinf():
    g = parse("def V = x (!x) (#x) ; root V")
    assert check_llinf({"x": "ind"}, g).accepted
    assert check_llinf({"x": "coind"}, g).accepted


def test_4s_guarded_fixpoint_accepted():
    assert check_ll4s({}, guarded_fixpoint()).accepted


def test_4s_rejects_coinductive_k():
    # \#x. \#y. x uses its coinductively bound variable outside any box
    k = parse("def K = \\#x. \\#y. x ; root K")
    rep = check_ll4s({}, k)
    assert not rep.accepted
    assert "coinductive" in rep.reason
    assert check_llinf({}, k).accepted


def test_4s_rejects_mixed_inductive_binding():
    g = parse("def A = \\!x. x !x ; root A")
    rep = check_ll4s({}, g)
    assert not rep.accepted
    assert check_llinf({}, g).accepted


def test_4s_fixpoints():
    assert check_llinf({}, fixpoint(0)).accepted
    assert check_llinf({}, fixpoint(1)).accepted
    assert not check_ll4s({}, fixpoint(0)).accepted
    assert check_ll4s({}, bit_flip()).accepted


def test_4s_dup_variable_not_under_box():
    g = parse("def A = \\!x. !(x) ; root A")
    # single boxed occurrence: ind-one, accepted
    assert check_ll4s({}, g).accepted
    g2 = parse("def A = \\!x. u x !(x) ; root A")
    rep = check_ll4s({"u": "dup"}, g2)
    assert not rep.accepted


def test_4s_ind1_exactly_once():
    g = parse("def A = \\!x. u !(x) !(x) ; root A")
    assert not check_ll4s({"u": "dup"}, g).accepted


def test_4s_ind1_not_under_two_boxes():
    g = parse("def A = \\!x. !(!(x)) ; root A")
    assert not check_ll4s({}, g).accepted


def test_bad_pattern_kinds_raise():
    with pytest.raises(ValueError):
        check_llinf({"x": "dup"}, parse("def V = x ; root V"))


def test_weakening_unused_nonlinear_ok(cyclic_term, identity):
    assert check_llinf({"y": "ind", "unused": "coind"}, cyclic_term).accepted
    assert check_ll4s({"unused": "dup", "u2": "any"}, identity).accepted


# ----- occurrences -----------------------------------------------------------

def test_occurrences_cyclic(cyclic_term):
    occ = occurrences(cyclic_term, "y")
    # the head occurrence is linear; all deeper ones sit under coinductive
    # boxes, and the cycle pumps infinitely many of them
    assert occ.linear == 1
    assert occ.ind_one == 0
    assert occ.under_coind
    assert occ.infinite
    assert occ.coind == math.inf


def test_occurrences_lambda_body(identity):
    occ = occurrences(identity, "x", identity.root_body().body)
    assert (occ.linear, occ.ind_one, occ.under_coind, occ.infinite) == \
        (1, 0, False, False)


def test_occurrences_mixed():
    g = parse("def B = x !x ; root B")
    occ = occurrences(g, "x")
    assert (occ.linear, occ.ind_one, occ.under_coind, occ.infinite) == \
        (1, 1, False, False)


def test_occurrences_shadowing():
    g = parse("def B = x (\\x. x) ; root B")
    occ = occurrences(g, "x")
    assert occ.total == 1


def test_occurrences_deeper_ind():
    g = parse("def B = !(!(x)) ; root B")
    occ = occurrences(g, "x")
    assert occ.deeper_ind == 1 and occ.total == 1


# ----- inference and the environment order ----------------------------------

def test_infer_env_examples(cyclic_term, identity):
    assert infer_env("llinf", cyclic_term) == {"y": "ind"}
    assert infer_env("llinf", identity) == {}
    assert infer_env("4s", identity) == {}
    assert infer_env("4s", parse("def C = x z ; root C")) == \
        {"x": "lin", "z": "lin"}
    assert infer_env("llinf", parse("def N = N (\\x. x) ; root N")) is None


def test_infer_env_4s_kinds():
    assert infer_env("4s", parse("def A = x x ; root A")) == {"x": "dup"}
    assert infer_env("4s", parse("def A = !x ; root A")) == {"x": "ind1"}
    assert infer_env("4s", parse("def A = #(x x) ; root A")) == {"x": "coind"}
    assert infer_env("4s", parse("def A = x !x ; root A")) == {"x": "any"}


def test_env_precedes():
    assert env_precedes({"x": "ind1"}, {"x": "dup"})
    assert env_precedes({"x": "ind1", "y": "lin"}, {"x": "ind1", "y": "lin"})
    assert not env_precedes({"x": "lin"}, {"x": "dup"})
    assert not env_precedes({"x": "dup"}, {"x": "ind1"})
    assert not env_precedes({"x": "ind1"}, {"y": "dup"})
    variants = list(preceding_variants({"x": "ind1", "y": "coind"}))
    assert {"x": "dup", "y": "coind"} in variants
    assert len(variants) == 2


# ----- stability properties ---------------------------------------------------

def _unfold_once(g):
    def go(node):
        match node:
            case Ref(name):
                return g.defs[name]
            case App(f, a):
                return App(go(f), go(a))
            case Lam(k, x, b):
                return Lam(k, x, go(b))
            case Box(k, b):
                return Box(k, go(b))
            case _:
                return node

    return TermGraph({**g.defs, "_u": go(g.root_body())}, "_u",
                     _validate=False).pruned()


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(["llinf", "4s"]))
def test_acceptance_stable_under_unfolding(seed, system):
    env, g = generate.random_term(seed, system, 20)
    assert check(system, env, g).accepted
    assert check(system, env, _unfold_once(g)).accepted


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(["llinf", "4s"]))
def test_wellformed_projection_stays_finite(seed, system):
    _, g = generate.random_term(seed, system, 24)
    from llinf.terms import project_depth
    for d in range(5):
        project_depth(g, d)  # must not hit the budget


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(["llinf", "4s"]))
def test_subject_reduction_random(seed, system):
    env, g = generate.random_term(seed, system, 24, require_redex=True)
    redexes = reduction.find_redexes(g, 32)
    stepped = reduction.contract(g, redexes[seed % len(redexes)])
    if system == "llinf":
        assert check_llinf(env, stepped).accepted
    else:
        assert any(check_ll4s(d, stepped).accepted
                   for d in preceding_variants(env))


# ----- substitution lemmas as executable properties ---------------------------

def _gen_under(seed, system, kinds, size=14):
    gen = generate.TermGen(seed, system)
    env = {v: generate._Entry(k, k not in ("lin", "ind1"))
           for v, k in kinds.items()}
    body = gen.gen(env, size)
    defs = dict(gen.defs)
    if isinstance(body, Ref):
        body = defs[body.name]
    defs["H"] = body
    return TermGraph(defs, "H").pruned()


@pytest.mark.parametrize("seed", range(6))
def test_substitution_lemma_linear_llinf(seed):
    # judgments Gamma,x,!Theta,#Xi |- M and Delta,!Theta,#Xi |- N give
    # Gamma,Delta,!Theta,#Xi |- M[x := N]
    m = _gen_under((seed, "m"), "llinf",
                   {"x": "lin", "g1": "lin", "t": "ind", "c": "coind"})
    n = _gen_under((seed, "n"), "llinf", {"d1": "lin", "t": "ind", "c": "coind"})
    assert check_llinf({"x": "lin", "g1": "lin", "t": "ind", "c": "coind"}, m).accepted
    assert check_llinf({"d1": "lin", "t": "ind", "c": "coind"}, n).accepted
    out = substitute(m, "x", n)
    assert check_llinf({"g1": "lin", "d1": "lin", "t": "ind", "c": "coind"},
                       out).accepted


@pytest.mark.parametrize("seed", range(6))
def test_substitution_lemma_inductive_llinf(seed):
    m = _gen_under((seed, "m"), "llinf", {"x": "ind", "g1": "lin", "t": "ind"})
    n = _gen_under((seed, "n"), "llinf", {"t": "ind"})
    out = substitute(m, "x", n)
    assert check_llinf({"g1": "lin", "t": "ind"}, out).accepted


@pytest.mark.parametrize("seed", range(6))
def test_substitution_lemma_coinductive_llinf(seed):
    # the boxed variable of M is substituted by a term whose variables
    # are all coinductively bound
    m = _gen_under((seed, "m"), "llinf", {"x": "ind", "g1": "lin", "c": "coind"})
    n = _gen_under((seed, "n"), "llinf", {"c": "coind"})
    out = substitute(m, "x", n)
    assert check_llinf({"g1": "lin", "c": "coind"}, out).accepted


@pytest.mark.parametrize("seed", range(6))
def test_substitution_lemma_linear_4s(seed):
    kinds_m = {"x": "lin", "u1": "ind1", "t": "dup", "c": "coind", "a": "any"}
    kinds_n = {"p1": "lin", "t": "dup", "c": "coind", "a": "any"}
    m = _gen_under((seed, "m"), "4s", kinds_m)
    n = _gen_under((seed, "n"), "4s", kinds_n)
    out = substitute(m, "x", n)
    rep = check_ll4s({"u1": "ind1", "p1": "lin", "t": "dup", "c": "coind",
                      "a": "any"}, out)
    assert rep.accepted, rep.reason


@pytest.mark.parametrize("seed", range(6))
def test_substitution_lemma_dup_4s(seed):
    # a duplicable variable substituted by N turns N's linear variables
    # duplicable in the conclusion
    m = _gen_under((seed, "m"), "4s", {"x": "dup", "t": "dup", "c": "coind"})
    n = _gen_under((seed, "n"), "4s", {"f1": "lin", "c": "coind"})
    out = substitute(m, "x", n)
    rep = check_ll4s({"t": "dup", "f1": "dup", "c": "coind"}, out)
    assert rep.accepted, rep.reason


@pytest.mark.parametrize("seed", range(6))
def test_substitution_lemma_ind1_4s(seed):
    m = _gen_under((seed, "m"), "4s", {"x": "ind1", "t": "dup", "c": "coind"})
    n = _gen_under((seed, "n"), "4s", {"f1": "lin", "c": "coind"})
    out = substitute(m, "x", n)
    rep = check_ll4s({"t": "dup", "f1": "ind1", "c": "coind"}, out)
    assert rep.accepted, rep.reason


@pytest.mark.parametrize("seed", range(6))
def test_substitution_lemma_coind_4s(seed):
    m = _gen_under((seed, "m"), "4s", {"x": "coind", "c": "coind", "a": "any"})
    n = _gen_under((seed, "n"), "4s", {"c": "any", "a": "any"})
    out = substitute(m, "x", n)
    rep = check_ll4s({"c": "coind", "a": "any"}, out)
    assert rep.accepted, rep.reason


@pytest.mark.parametrize("seed", range(6))
def test_substitution_lemma_any_4s(seed):
    m = _gen_under((seed, "m"), "4s", {"x": "any", "a": "any", "t": "dup"})
    n = _gen_under((seed, "n"), "4s", {"a": "any"})
    out = substitute(m, "x", n)
    rep = check_ll4s({"a": "any", "t": "dup"}, out)
    assert rep.accepted, rep.reason
