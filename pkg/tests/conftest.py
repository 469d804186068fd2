import pytest

from llinf import encodings, surface


@pytest.fixture(scope="session")
def ex():
    return encodings.counterexamples()


def parse(text):
    return surface.parse_program(text)


@pytest.fixture
def cyclic_term():
    return parse("def M = y #M ; root M")


@pytest.fixture
def rho():
    return parse("def N = N (\\x. x) ; root N")


@pytest.fixture
def identity():
    return parse("def I = \\x. x ; root I")
