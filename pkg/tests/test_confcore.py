import random
from itertools import product
from math import factorial

import pytest
import sympy as sp
from hypothesis import given, strategies as st

from confalg import builtins as bi
from confalg.confcore import (ConfAlgebra, ConfElement, braced_at, braced_lambda, braced_product, check_associativity,
                              check_axioms, check_lie, commutator_algebra, derived_series, element, find_unit,
                              growth_profile, is_unit, lambda_product, locality, n_product, opposite_algebra,
                              product_at)
from confalg.errors import BasisError, FormatError, PreconditionError
from confalg.exactmath import LAM, MU, D, MultiPoly

import oracles

REGISTRY = bi.builtin_algebras()
ASSOCIATIVE = ["curr_q", "curr_dual", "curr_m2", "split_null", "diff_x3_x2d"]
LIE = ["virasoro", "curr_gl2", "curr_sl2", "curr_solv2", "solv_xy"]


def rand_element(C, rng, degree=2):
    return ConfElement({b: sum((rng.randint(-2, 2) * D ** k for k in range(degree + 1)), MultiPoly())
                        for b in C.basis})


# -- products against the D-rule oracle -------------------------------------------------------------


@pytest.mark.parametrize("name", ASSOCIATIVE + LIE)
def test_lambda_product_matches_n_product_rules(name):
    C = REGISTRY[name]()
    rng = random.Random(name)
    for _ in range(4):
        a, b = rand_element(C, rng), rand_element(C, rng)
        assert oracles.as_dict(lambda_product(C, a, b)) == oracles.lprod(C, a, b)


@pytest.mark.parametrize("name", ASSOCIATIVE + LIE)
def test_braced_matches_series_formula(name):
    C = REGISTRY[name]()
    for a, b in product(C.basis, repeat=2):
        for n in range(4):
            want = {}
            for s in range(8):
                for k, v in oracles.nprod(C, C.gen(a), C.gen(b), n + s).items():
                    want[k] = want.get(k, 0) + sp.Integer(-1) ** (n + s) / factorial(s) * oracles.D ** s * v
            assert oracles.as_dict(braced_product(C, a, b, n)) == oracles.from_dict(want)


@pytest.mark.parametrize("name", ASSOCIATIVE + LIE)
def test_braced_lambda_is_substituted_product(name):
    C = REGISTRY[name]()
    for a, b in product(C.basis, repeat=2):
        assert braced_lambda(C, a, b) == lambda_product(C, a, b).substitute({"l": -D - LAM})


def test_sesquilinearity_on_50_random_elements():
    rng = random.Random(1)
    names = ASSOCIATIVE + LIE
    for i in range(50):
        C = REGISTRY[names[i % len(names)]]()
        a, b = rand_element(C, rng), rand_element(C, rng)
        assert lambda_product(C, D * a, b) == -LAM * lambda_product(C, a, b)
        assert lambda_product(C, a, D * b) == (D + LAM) * lambda_product(C, a, b)


@given(st.sampled_from(ASSOCIATIVE + LIE), st.integers(0, 10 ** 6))
def test_sesquilinearity_property(name, seed):
    C = REGISTRY[name]()
    rng = random.Random(seed)
    a, b = rand_element(C, rng), rand_element(C, rng)
    f = rand_element(ConfAlgebra("lie", ("u",)), rng)["u"]
    lp = lambda_product(C, a, b)
    assert lambda_product(C, f * a, b) == f.substitute({"D": -LAM}) * lp
    assert lambda_product(C, a, f * b) == f.substitute({"D": D + LAM}) * lp


def test_virasoro_values():
    V = REGISTRY["virasoro"]()
    assert str(lambda_product(V, "x", "x")) == "(D + 2*l)*x"
    assert str(n_product(V, "x", "x", 0)) == "D*x"
    assert str(n_product(V, "x", "x", 1)) == "2*x"
    assert n_product(V, "x", "x", 2).is_zero()
    assert str(braced_product(V, "x", "x", 0)) == "-D*x"
    assert locality(V, "x", "x") == 2


# -- identities of associative algebras ------------------------------------------------------------


@pytest.mark.parametrize("name", ASSOCIATIVE)
def test_braced_identities_on_basis_triples(name):
    C = REGISTRY[name]()
    assert check_associativity(C).passed
    for a, b, c in product([C.gen(s) for s in C.basis], repeat=3):
        lhs = product_at(C, a, braced_at(C, b, c, MU), LAM)
        assert lhs == braced_at(C, product_at(C, a, b, LAM), c, MU)
        lhs = braced_at(C, a, product_at(C, b, c, MU), LAM)
        assert lhs == braced_at(C, braced_at(C, a, b, MU), c, LAM - MU)
        lhs = braced_at(C, a, braced_at(C, b, c, MU), LAM)
        assert lhs == braced_at(C, braced_at(C, a, b, LAM - MU), c, MU)
        lhs = product_at(C, braced_at(C, a, b, LAM), c, MU)
        assert lhs == product_at(C, a, product_at(C, b, c, LAM), MU - LAM)


@pytest.mark.parametrize("name", ASSOCIATIVE)
def test_commutator_is_lie(name):
    assert check_lie(commutator_algebra(REGISTRY[name]())).passed


@pytest.mark.parametrize("name", ASSOCIATIVE)
def test_opposite_is_an_involution(name):
    C = REGISTRY[name]()
    assert opposite_algebra(opposite_algebra(C)).table == C.table


def test_opposite_product():
    C = REGISTRY["split_null"]()
    Cop = opposite_algebra(C)
    for a, b in product(C.basis, repeat=2):
        assert lambda_product(Cop, a, b) == lambda_product(C, b, a).substitute({"l": -D - LAM})


def test_axiom_failures_carry_witnesses():
    C = ConfAlgebra("associative", ("e",), {("e", "e"): {"e": D}})
    r = check_associativity(C)
    assert not r.passed
    assert r.witnesses == [{"triple": ["e", "e", "e"], "residual": "(D^2 + 2*l*D + m*D)*e"}]
    bad = ConfAlgebra("lie", ("x",), {("x", "x"): {"x": D + 2 * LAM + LAM * LAM}})
    assert not check_lie(bad).passed
    assert str(check_axioms(REGISTRY["virasoro"]())) == "lie: pass"


def test_empty_algebra_passes_vacuously():
    E = ConfAlgebra("lie", (), {})
    assert check_axioms(E).passed
    assert derived_series(E)[1]
    E = ConfAlgebra("associative", (), {})
    assert check_axioms(E).passed
    assert find_unit(E) is None


def test_malformed_tables():
    with pytest.raises(FormatError):
        ConfAlgebra("jordan", ("a",), {})
    with pytest.raises(BasisError):
        ConfAlgebra("lie", ("a",), {("a", "b"): {"a": 1}})
    with pytest.raises(FormatError):
        ConfAlgebra("lie", ("a",), {("a", "a"): {"a": MultiPoly.var("x")}})
    with pytest.raises(BasisError):
        element("z", ("a",))


# -- units ------------------------------------------------------------------------------------------


def test_units():
    ex = REGISTRY["split_null"]()
    assert str(find_unit(ex, "left")) == "one"
    assert find_unit(ex, "right") is None
    m2 = REGISTRY["curr_m2"]()
    e = find_unit(m2, "two-sided")
    assert str(e) == "E11 + E22"
    assert is_unit(m2, e, "left") and is_unit(m2, e, "right")
    dual = REGISTRY["curr_dual"]()
    assert str(find_unit(dual, "two-sided")) == "u"
    with pytest.raises(PreconditionError):
        find_unit(REGISTRY["virasoro"](), "left")


# -- derived series ---------------------------------------------------------------------------------


@pytest.mark.parametrize("name,solvable", [("virasoro", False), ("curr_sl2", False), ("curr_solv2", True),
                                           ("solv_xy", True), ("curr_gl2", False)])
def test_derived_series(name, solvable):
    series, ok = derived_series(REGISTRY[name]())
    assert ok == solvable
    for big, small in zip(series, series[1:]):
        assert big.contains_module(small)


def test_solv_xy_series_ranks():
    series, ok = derived_series(REGISTRY["solv_xy"]())
    assert [S.module_rank for S in series] == [2, 1, 0]


# -- growth -----------------------------------------------------------------------------------------


def test_growth_of_finite_algebras():
    assert growth_profile(REGISTRY["virasoro"](), ["x"], 4) == [1, 1, 1, 1]
    assert growth_profile(REGISTRY["curr_m2"](), ["E12", "E21"], 3) == [2, 4, 4]
    assert growth_profile(REGISTRY["solv_xy"](), ["x"], 3) == [1, 1, 1]
