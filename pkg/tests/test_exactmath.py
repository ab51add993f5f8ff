from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, strategies as st

from confalg.errors import ContextError, FormatError
from confalg.exactmath import (LAM, VARS, D, ExtFieldElem, FieldContext, MultiPoly, X, divmod_in, extfield_arith,
                               monic, parse_poly, substitute_affine)

import oracles

coeffs = st.fractions(min_value=-5, max_value=5, max_denominator=4)
exps = st.tuples(*[st.integers(0, 2)] * len(VARS))


@st.composite
def polys(draw, max_terms=4):
    terms = draw(st.dictionaries(exps, coeffs, max_size=max_terms))
    return MultiPoly(terms)


affine = st.builds(lambda a, b, c, d: MultiPoly.const(a) + b * D + c * LAM + d * X,
                   st.integers(-2, 2), st.integers(-2, 2), st.integers(-2, 2), st.integers(-2, 2))


@given(polys(), polys(), polys())
def test_ring_axioms(p, q, r):
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r
    assert p * q == q * p
    assert p + q == q + p
    assert p - p == MultiPoly()


@given(polys(), polys())
def test_products_match_sympy(p, q):
    assert oracles.to_sym(p * q) == sp.expand(oracles.to_sym(p) * oracles.to_sym(q))


@given(polys(), polys(), affine, affine)
def test_substitution_is_a_ring_homomorphism(p, q, a, b):
    sub = {"D": a, "l": b}
    assert substitute_affine(p * q, sub) == substitute_affine(p, sub) * substitute_affine(q, sub)
    assert substitute_affine(p + q, sub) == substitute_affine(p, sub) + substitute_affine(q, sub)


@given(polys(), affine, affine)
def test_substitution_is_simultaneous(p, a, b):
    got = oracles.to_sym(p.substitute({"D": a, "x": b}))
    want = oracles.to_sym(p).subs({oracles.D: oracles.to_sym(a), oracles.x: oracles.to_sym(b)}, simultaneous=True)
    assert got == sp.expand(want)


@given(polys(), st.sampled_from(VARS), st.booleans())
def test_coefficients_round_trip(p, v, divided):
    cs = p.coefficients_in(v, divided=divided)
    var = MultiPoly.var(v)
    rebuilt = MultiPoly()
    for i, c in enumerate(cs):
        rebuilt = rebuilt + (c * Fraction(1, sp.factorial(i)) if divided else c) * var ** i
    assert rebuilt == p


@given(polys())
def test_print_parse_round_trip(p):
    assert parse_poly(str(p)) == p


def test_printing_is_canonical():
    assert str(D + 2 * LAM) == "D + 2*l"
    assert str(X ** 2 + LAM * X) == "x^2 + l*x"
    assert str(MultiPoly.const(Fraction(-1, 2)) * LAM ** 2) == "-1/2*l^2"
    assert str(MultiPoly()) == "0"


@pytest.mark.parametrize("bad", ["", "D +", "y", "D ** x", "2 ** -1", "D.x"])
def test_parse_rejects_malformed(bad):
    with pytest.raises(FormatError):
        parse_poly(bad)


def test_non_affine_substitution_rejected():
    with pytest.raises(FormatError):
        substitute_affine(D, {"D": D * D})


@given(polys(), st.integers(1, 3), st.lists(st.integers(-3, 3), min_size=1, max_size=3))
def test_division_identity(p, deg, tail):
    q = MultiPoly.var("D", deg) + sum((c * D ** i for i, c in enumerate(tail[:deg])), MultiPoly())
    quo, rem = divmod_in(p, q, "D")
    assert quo * q + rem == p
    assert rem.degree("D") < deg


def test_monic():
    p, lc = monic(3 * D ** 2 + 6, "D")
    assert lc == 3 and p == D ** 2 + 2


# -- number fields ---------------------------------------------------------------------------------

FIELDS = [FieldContext([1, 0, 1], "i"), FieldContext([-2, 0, 1], "r"), FieldContext([-2, 0, 0, 1], "c")]
field = st.sampled_from(FIELDS)


@st.composite
def ext_elems(draw, ctx=None):
    ctx = ctx or draw(field)
    return ctx.element(draw(st.lists(coeffs, min_size=ctx.degree, max_size=ctx.degree)))


@st.composite
def ext_triples(draw):
    ctx = draw(field)
    return tuple(draw(ext_elems(ctx)) for _ in range(3))


@given(ext_triples())
def test_field_axioms(abc):
    a, b, c = abc
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert a + (-a) == a.ctx.element([0])


@given(ext_triples())
def test_ext_mul_matches_sympy(abc):
    a, b, _ = abc
    assert list((a * b).coords) == oracles.ext_mul(a.coords, b.coords, a.ctx.minpoly)


def test_inverse_on_100_random_elements():
    import random
    rng = random.Random(7)
    checked = 0
    while checked < 100:
        ctx = FIELDS[checked % 3]
        a = ctx.element([Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(ctx.degree)])
        if not a:
            continue
        assert a * a.inverse() == ctx.one()
        checked += 1


def test_mixing_fields_is_an_error():
    i, r = FIELDS[0].gen(), FIELDS[1].gen()
    with pytest.raises(ContextError):
        i + r
    with pytest.raises(ContextError):
        extfield_arith(i, r, "mul")


def test_gen_satisfies_minpoly():
    i = FIELDS[0].gen()
    assert i * i == FIELDS[0].element([-1])
    c = FIELDS[2].gen()
    assert c ** 3 == FIELDS[2].element([2])
    assert str(i * 2 + 1) == "1 + 2*i"


def test_zero_has_no_inverse():
    with pytest.raises(ZeroDivisionError):
        FIELDS[0].element([0]).inverse()


def test_polys_over_extension():
    i = FIELDS[0].gen()
    p = MultiPoly.const(i) * D + 1
    q = MultiPoly.const(-i) * D + 1
    assert p * q == D ** 2 + 1
