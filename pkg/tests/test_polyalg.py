"""Exact polynomial and matrix algebra."""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pmilift.polyalg import (
    BiForm,
    MatPoly,
    Poly,
    basis_exponents,
    degree_block,
    exact_div,
    frac_matrix,
    is_psd_exact,
    is_symmetric,
    lex_lead,
    lex_reduce,
    neg_hessian_biform,
)

from conftest import P, quartic_matrix


# -- construction ----------------------------------------------------------

def test_constructor_drops_zero_terms():
    p = Poly(2, {(1, 0): Fraction(1), (0, 1): Fraction(0)})
    assert p == P(2, {(1, 0): 1})
    assert (0, 1) not in p.terms


def test_constructor_rejects_floats():
    with pytest.raises(TypeError):
        Poly(1, {(1,): 0.5})


def test_constructor_rejects_bad_exponents():
    with pytest.raises(ValueError):
        Poly(2, {(1,): Fraction(1)})
    with pytest.raises(ValueError):
        Poly(2, {(-1, 0): Fraction(1)})
    with pytest.raises(ValueError):
        Poly(0, {})


def test_classmethod_constructors():
    assert Poly.zero(3).degree() == -1
    assert Poly.const(2, Fraction(5, 3)).coeff((0, 0)) == Fraction(5, 3)
    assert Poly.var(2, 1) == P(2, {(0, 1): 1})
    assert Poly.monomial(2, (2, 1), 3) == P(2, {(2, 1): 3})
    with pytest.raises(ValueError):
        Poly.var(2, 2)


def test_accepts_int_and_string_coefficients():
    assert Poly(1, {(0,): 2}) == Poly(1, {(0,): Fraction(2)})
    assert Poly(1, {(1,): "3/4"}).coeff((1,)) == Fraction(3, 4)


# -- bases and orders ------------------------------------------------------

def test_basis_exponents_graded_golden():
    assert basis_exponents(2, 2) == [
        (0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2),
    ]
    assert basis_exponents(3, 1) == [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)]


def test_degree_block_lex_descending():
    block = list(degree_block(3, 2))
    assert block[0] == (2, 0, 0)
    assert block[-1] == (0, 0, 2)
    assert all(sum(e) == 2 for e in block)
    assert block == sorted(block, reverse=True)
    assert len(block) == 6


def test_basis_size_binomial():
    # |basis(n, d)| = C(n + d, d)
    assert len(basis_exponents(4, 3)) == 35
    assert len(basis_exponents(1, 5)) == 6


# -- arithmetic ------------------------------------------------------------

def test_product_difference_of_squares():
    x1, x2 = Poly.var(2, 0), Poly.var(2, 1)
    assert (x1 + x2) * (x1 - x2) == x1 * x1 - x2 * x2


def test_pow_matches_repeated_multiplication():
    p = P(2, {(1, 0): 1, (0, 1): -2, (0, 0): 1})
    assert p ** 3 == p * p * p
    assert p ** 0 == Poly.const(2, 1)
    with pytest.raises(ValueError):
        p ** -1


def test_ring_mismatch_rejected():
    with pytest.raises(ValueError):
        Poly.var(2, 0) + Poly.var(3, 0)


def test_degree_and_degree_in():
    p = P(3, {(2, 1, 0): 1, (0, 0, 2): 1})
    assert p.degree() == 3
    assert p.degree_in([0]) == 2
    assert p.degree_in([2]) == 2
    assert p.degree_in([1, 2]) == 2


def test_diff():
    p = P(2, {(2, 1): 1, (0, 1): 5})
    assert p.diff(0) == P(2, {(1, 1): 2})
    assert p.diff(1) == P(2, {(2, 0): 1, (0, 0): 5})
    assert Poly.const(2, 3).diff(0) == Poly.zero(2)


def test_eval_exact_rational():
    p = P(2, {(2, 0): 1, (1, 1): -3, (0, 0): 2})
    v = p.eval((Fraction(1, 2), Fraction(1, 3)))
    assert v == Fraction(1, 4) - Fraction(1, 2) + 2
    assert isinstance(v, Fraction)
    assert isinstance(p.eval((0.5, 0.25)), float)
    with pytest.raises(ValueError):
        p.eval((1,))


def test_remap_embedding():
    p = P(2, {(2, 1): 7})
    q = p.remap(4, (1, 3))  # x1 -> x2, x2 -> x4
    assert q == P(4, {(0, 2, 0, 1): 7})
    with pytest.raises(ValueError):
        p.remap(4, (1, 1))
    with pytest.raises(ValueError):
        p.remap(2, (0, 3))


def test_str_formatting():
    assert str(Poly.zero(2)) == "0"
    assert str(P(2, {(0, 0): 1, (2, 0): 1})) == "1 + x1^2"
    assert str(P(2, {(1, 0): 1, (0, 1): -2})) == "x1 - 2*x2"
    assert str(P(2, {(1, 1): -1})) == "-x1*x2"


# -- lex order, division ---------------------------------------------------

def test_lex_lead_pure_lex_not_graded():
    # x1 beats x2^3 under pure lex even though its total degree is lower
    assert lex_lead(P(2, {(1, 0): 1, (0, 3): 5})) == (1, 0)
    assert lex_lead(P(3, {(1, 2, 0): 1, (1, 1, 9): 1})) == (1, 2, 0)
    with pytest.raises(ValueError):
        lex_lead(Poly.zero(2))


def test_lex_reduce_division_identity():
    f = P(2, {(3, 1): 2, (1, 2): 1, (0, 1): -4, (0, 0): 1})
    p = P(2, {(1, 1): 1, (0, 0): -1})
    q, r = lex_reduce(f, p)
    assert q * p + r == f
    lead = lex_lead(p)
    assert all(any(e[i] < lead[i] for i in range(2)) for e in r.terms)


def test_lex_reduce_by_zero_raises():
    with pytest.raises(ValueError):
        lex_reduce(P(2, {(1, 0): 1}), Poly.zero(2))


def test_exact_div_roundtrip():
    f = P(2, {(2, 0): 1, (0, 2): 1})
    g = P(2, {(1, 1): 3, (0, 0): -2})
    assert exact_div(f * g, g) == f
    with pytest.raises(ValueError):
        exact_div(P(2, {(1, 0): 1, (0, 0): 1}), P(2, {(1, 0): 1}))


# -- exact matrices ---------------------------------------------------------

def test_frac_matrix_and_symmetry():
    m = frac_matrix([[1, "1/2"], ["1/2", 3]])
    assert m.dtype == object and m[0, 1] == Fraction(1, 2)
    assert is_symmetric(m)
    assert not is_symmetric(frac_matrix([[1, 2], [3, 4]]))
    assert not is_symmetric(frac_matrix([[1, 2, 3], [4, 5, 6]]))
    with pytest.raises(ValueError):
        frac_matrix([[1, 2], [3]])


def test_is_psd_exact_golden_cases():
    assert is_psd_exact(frac_matrix([[1, 0], [0, 1]]))
    assert is_psd_exact(frac_matrix([[2, 1], [1, 1]]))
    assert is_psd_exact(frac_matrix([[4, 6], [6, 9]]))  # rank one
    assert is_psd_exact(frac_matrix([[0, 0], [0, 0]]))
    assert is_psd_exact(frac_matrix([["1/2", "1/3"], ["1/3", "2/9"]]))
    assert not is_psd_exact(frac_matrix([[1, 2], [2, 1]]))
    assert not is_psd_exact(frac_matrix([[0, 1], [1, 0]]))
    assert not is_psd_exact(frac_matrix([[-1]]))
    with pytest.raises(ValueError):
        is_psd_exact(frac_matrix([[1, 2], [3, 4]]))


# -- matrix polynomials ------------------------------------------------------

def test_from_entries_requires_symmetry():
    x1 = Poly.var(2, 0)
    with pytest.raises(ValueError):
        MatPoly.from_entries([[x1, x1], [Poly.zero(2), x1]])


def test_entry_and_coeff_roundtrip():
    G = quartic_matrix()
    assert G.entry(0, 1) == P(2, {(0, 0): 3, (3, 1): -1, (1, 3): -1})
    c = G.coeff((2, 2))
    assert c[0, 0] == Fraction(-4) and c[1, 1] == Fraction(-4)
    # absent exponent gives a zero block; returned arrays are copies
    assert not G.coeff((1, 0)).any()
    c[0, 0] = Fraction(99)
    assert G.coeff((2, 2))[0, 0] == Fraction(-4)


def test_matpoly_arithmetic():
    G = quartic_matrix()
    Z = G - G
    assert all(not Z.entry(i, j) for i in range(2) for j in range(2))
    assert (G + G) == G * 2
    H = G * Poly.var(2, 0)
    assert H.entry(0, 1) == G.entry(0, 1) * Poly.var(2, 0)
    assert H.degree() == G.degree() + 1
    with pytest.raises(TypeError):
        G * G


def test_matpoly_eval_exact_and_float():
    G = quartic_matrix()
    ex = G.eval((Fraction(1, 2), Fraction(0)))
    assert ex.dtype == object
    assert ex[0, 0] == 2 - 2 * Fraction(1, 16)
    fl = G.eval((0.5, 0.0))
    assert fl.dtype == np.float64
    assert abs(fl[0, 0] - float(ex[0, 0])) < 1e-15


def test_quadform_golden():
    G = MatPoly.from_entries([
        [Poly.var(2, 0), Poly.const(2, 1)],
        [Poly.const(2, 1), -Poly.var(2, 1)],
    ])
    # ring order is (x1, x2, xi1, xi2)
    assert G.quadform() == P(4, {(1, 0, 2, 0): 1, (0, 0, 1, 1): 2, (0, 1, 0, 2): -1})


# -- curvature forms ---------------------------------------------------------

def test_neg_hessian_biform_golden():
    # G = [[x1^2 * x2]]: xi' G xi = x1^2 x2 xi^2, so the negated Hessian is
    # [[-2 x2 xi^2, -2 x1 xi^2], [., 0]] over the ring (x1, x2, xi1).
    G = MatPoly.from_entries([[P(2, {(2, 1): 1})]])
    H = neg_hessian_biform(G)
    assert H.entry(0, 0) == P(3, {(0, 1, 2): -2})
    assert H.entry(0, 1) == P(3, {(1, 0, 2): -2})
    assert H.entry(1, 1) == Poly.zero(3)


def test_biform_contract_and_eval():
    G = MatPoly.from_entries([[P(2, {(2, 1): 1})]])
    H = neg_hessian_biform(G)
    C = H.contract((Fraction(1),))
    assert C.entry(0, 0) == P(2, {(0, 1): -2})
    assert C.entry(0, 1) == P(2, {(1, 0): -2})
    val = H.eval((Fraction(1), Fraction(2)), (Fraction(3),))
    assert val[0, 0] == Fraction(-2) * 2 * 9
    assert val[0, 1] == Fraction(-2) * 1 * 9
    with pytest.raises(ValueError):
        H.contract((1, 2))


def test_biform_requires_quadratic_xi():
    # entries must be homogeneous of degree 2 in the xi block
    with pytest.raises(ValueError):
        BiForm(1, 1, [[P(2, {(0, 1): 1})]])


def test_biform_as_matpoly_symmetric():
    H = neg_hessian_biform(quartic_matrix())
    M = H.as_matpoly()
    assert M.size == 2
    assert M.entry(0, 1) == M.entry(1, 0)


# -- serialization ------------------------------------------------------------

def test_obj_roundtrip_golden():
    p = P(2, {(2, 0): "1/3", (0, 0): -2})
    obj = p.to_obj()
    assert obj == [
        {"exp": [0, 0], "coef": "-2"},
        {"exp": [2, 0], "coef": "1/3"},
    ]
    assert Poly.from_obj(2, obj) == p


# -- properties ----------------------------------------------------------------

frac_st = st.fractions(min_value=-4, max_value=4, max_denominator=8)
exp_st = st.tuples(st.integers(0, 3), st.integers(0, 3))
poly_st = st.dictionaries(exp_st, frac_st, max_size=5).map(lambda d: Poly(2, d))


@settings(max_examples=60, deadline=None)
@given(poly_st, poly_st, poly_st)
def test_distributivity(f, g, h):
    assert (f + g) * h == f * h + g * h


@settings(max_examples=60, deadline=None)
@given(poly_st, poly_st)
def test_lex_reduce_property(f, p):
    if not p.terms:
        return
    q, r = lex_reduce(f, p)
    assert q * p + r == f
    lead = lex_lead(p)
    assert all(any(e[i] < lead[i] for i in range(2)) for e in r.terms)


@settings(max_examples=60, deadline=None)
@given(poly_st)
def test_obj_roundtrip_property(f):
    assert Poly.from_obj(2, f.to_obj()) == f


@settings(max_examples=40, deadline=None)
@given(poly_st, st.tuples(frac_st, frac_st))
def test_eval_is_ring_homomorphism(f, pt):
    g = P(2, {(1, 1): 2, (0, 0): -1})
    assert (f * g).eval(pt) == f.eval(pt) * g.eval(pt)
    assert (f + g).eval(pt) == f.eval(pt) + g.eval(pt)
