import pytest
from hypothesis import given, settings, strategies as st

from llinf import generate
from llinf.errors import DefinitionError, SurfaceSyntaxError
from llinf.surface import (
    format_environment, format_graph, format_node, parse_environment,
    parse_lambda_program, parse_program, parse_term,
)
from llinf.terms import App, Box, Lam, Var, graph_bisimilar


def test_application_left_associative():
    g = parse_term("x y z")
    assert g.root_body() == App(App(Var("x"), Var("y")), Var("z"))


def test_lambda_body_extends_right():
    g = parse_term("\\x. x y")
    assert g.root_body() == Lam("lin", "x", App(Var("x"), Var("y")))


def test_box_binds_one_atom():
    g = parse_term("! x y")
    assert g.root_body() == App(Box("ind", Var("x")), Var("y"))
    g2 = parse_term("!(x y)")
    assert g2.root_body() == Box("ind", App(Var("x"), Var("y")))


def test_marked_abstractions():
    g = parse_term("\\!x. \\#y. x")
    assert g.root_body() == Lam("ind", "x", Lam("coind", "y", Var("x")))


def test_syntax_error_position():
    with pytest.raises(SurfaceSyntaxError) as err:
        parse_program("def M = (x ; root M")
    assert err.value.line == 1
    assert err.value.col is not None


def test_duplicate_definition():
    with pytest.raises(SurfaceSyntaxError):
        parse_program("def M = x ; def M = y ; root M")


def test_missing_root():
    with pytest.raises(DefinitionError):
        parse_program("def M = x ; root K")


def test_root_semicolon_optional():
    assert parse_program("def M = x ; root M").root == "M"
    assert parse_program("def M = x ; root M ;").root == "M"


def test_cut_rendering(cyclic_term):
    from llinf.terms import project_depth
    assert format_node(project_depth(cyclic_term, 0)) == "y #<cut>"


def test_environment_syntax():
    env = parse_environment("x, !y, #z, ^w, *v", "4s")
    assert env == {"x": "lin", "y": "ind1", "z": "coind", "w": "dup", "v": "any"}
    assert parse_environment("!y", "llinf") == {"y": "ind"}
    assert parse_environment("", "llinf") == {}
    with pytest.raises(SurfaceSyntaxError):
        parse_environment("x, x", "llinf")


def test_environment_round_trip():
    env = {"a": "lin", "b": "coind", "c": "dup"}
    assert parse_environment(format_environment(env), "4s") == env


def test_lambda_program_flags():
    g, flags = parse_lambda_program("def T = \\x. x ; root T ; flags 001 ;")
    assert flags == (0, 0, 1)
    with pytest.raises(SurfaceSyntaxError):
        parse_lambda_program("def T = \\!x. x ; root T")


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(["llinf", "4s"]))
def test_print_parse_round_trip(seed, system):
    _, g = generate.random_term(seed, system, 24)
    reparsed = parse_program(format_graph(g))
    assert graph_bisimilar(g, reparsed)


def test_print_parse_round_trip_examples(ex):
    for name, g in ex.items():
        assert graph_bisimilar(g, parse_program(format_graph(g))), name
