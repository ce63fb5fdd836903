"""Rational liftings: index sets, denominator splitting, pencil assembly."""

from fractions import Fraction

import pytest

from pmilift.momlift import canonical_lifting
from pmilift.polyalg import MatPoly, Poly, lex_lead
from pmilift.ratlift import (
    IndexEscape,
    RationalMatFn,
    qmod_index_sets,
    qmod_lift,
    split_localizer,
    split_rational_matrix,
)

from conftest import P, orthant_rational, plane_rational


# -- the rational container ----------------------------------------------------

def test_rational_validation():
    num = MatPoly.from_entries([[Poly.var(2, 0)]])
    with pytest.raises(ValueError):
        RationalMatFn(num, Poly.zero(2))
    with pytest.raises(ValueError):
        RationalMatFn(num, Poly.var(3, 0))
    with pytest.raises(ValueError):
        RationalMatFn(num, Poly.var(2, 1), q=Poly.var(3, 0))


def test_q_defaults_to_denominator_squared():
    R, _ = orthant_rational()
    assert R.q_or_default() == R.denom * R.denom
    explicit = RationalMatFn(R.numerator, R.denom, q=R.denom)
    assert explicit.q_or_default() == R.denom


def test_degree_and_shape():
    R, _ = orthant_rational()
    assert R.nvars == 2 and R.size == 2
    assert R.degree() == 3  # numerator degree wins over the quadratic denominator


def test_eval_exact_and_pole():
    R, _ = orthant_rational()
    val = R.eval((Fraction(1), Fraction(2)))
    # entry (1,1): (11 - x2) - x2/(x1 x2) = 9 - 1 = 8 at (1,2)
    assert val[1, 1] == Fraction(8)
    assert val[0, 1] == val[1, 0]
    with pytest.raises(ZeroDivisionError):
        R.eval((Fraction(0), Fraction(1)))


# -- index sets ------------------------------------------------------------------

def test_index_sets_orthant_golden():
    y_idx, z_idx = qmod_index_sets(P(2, {(1, 1): 1}), 2)
    assert z_idx == [(0, 0), (1, 0), (0, 1), (2, 0), (0, 2),
                     (3, 0), (0, 3), (4, 0), (0, 4)]
    assert set(y_idx) == {(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)}


def test_index_sets_plane_golden():
    y_idx, z_idx = qmod_index_sets(P(2, {(2, 0): 1, (0, 2): 1}), 2)
    assert z_idx == [(0, 0), (1, 0), (0, 1), (1, 1), (0, 2),
                     (1, 2), (0, 3), (1, 3), (0, 4)]
    assert set(y_idx) == {(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)}


def test_index_set_invariants():
    p = P(3, {(2, 1, 0): 1, (0, 0, 2): -1})
    le = lex_lead(p)
    y_idx, z_idx = qmod_index_sets(p, 3)
    wt = sum(le)
    assert all(sum(a) + wt <= 6 for a in y_idx)
    assert all(any(b[i] < le[i] for i in range(3)) for b in z_idx)
    assert (0, 0, 0) in y_idx and (0, 0, 0) in z_idx


# -- splitting -------------------------------------------------------------------

def test_split_matrix_reconstructs_entries():
    R, _ = orthant_rational()
    y_mats, z_mats = split_rational_matrix(R, 2)
    p = R.denom
    for i in range(2):
        for j in range(2):
            quo = Poly(2, {a: m[i][j] for a, m in y_mats.items()})
            rem = Poly(2, {b: m[i][j] for b, m in z_mats.items()})
            assert quo * p + rem == R.numerator.entry(i, j)


def test_split_localizer_reconstructs_products():
    g = Poly.var(2, 0)
    p = P(2, {(1, 1): 1})
    y_mats, z_mats, size = split_localizer(g, p, 2)
    assert size == 3
    from pmilift.polyalg import basis_exponents
    basis = basis_exponents(2, 1)
    for i, bi in enumerate(basis):
        for j, bj in enumerate(basis):
            quo = Poly(2, {a: m[i][j] for a, m in y_mats.items()})
            rem = Poly(2, {b: m[i][j] for b, m in z_mats.items()})
            target = g * Poly.monomial(2, (bi[0] + bj[0], bi[1] + bj[1]))
            assert quo * p + rem == target


def test_split_localizer_errors():
    p = P(2, {(1, 1): 1})
    with pytest.raises(ValueError):
        split_localizer(Poly.zero(2), p, 2)
    with pytest.raises(ValueError):
        split_localizer(P(2, {(3, 3): 1}), p, 2)


# -- full lifting -----------------------------------------------------------------

def test_orthant_lift_printed_pencils():
    R, gs = orthant_rational()
    lmi = qmod_lift(R, gs, 2)
    F = Fraction
    assert [(pc.label, pc.size) for pc in lmi.pencils] == [
        ("matrix", 2), ("moment", 6), ("localizer g1", 3), ("localizer g2", 3),
    ]
    assert lmi.n_free() == 12
    mat = next(pc for pc in lmi.pencils if pc.label == "matrix")
    assert mat.constant[0][0] == F(7)
    assert mat.coeffs[("y", (1, 0))][0][0] == F(-1)
    assert mat.coeffs[("y", (0, 1))][0][0] == F(2)
    assert mat.coeffs[("z", (1, 0))][0][0] == F(-1)
    assert mat.coeffs[("z", (0, 3))][0][0] == F(-1)
    assert mat.constant[0][1] == F(5) and mat.coeffs[("z", (0, 2))][0][1] == F(-1)
    assert mat.constant[1][1] == F(11) and mat.coeffs[("z", (0, 1))][1][1] == F(-1)
    mom = next(pc for pc in lmi.pencils if pc.label == "moment")
    assert mom.size == 6
    assert mom.constant[0][4] == F(1)
    assert mom.coeffs[("z", (0, 0))][0][0] == F(1)
    assert mom.coeffs[("z", (2, 0))][0][3] == F(1)
    assert mom.coeffs[("z", (3, 0))][1][3] == F(1)
    assert mom.coeffs[("z", (4, 0))][3][3] == F(1)
    assert mom.coeffs[("z", (0, 4))][5][5] == F(1)
    assert mom.coeffs[("y", (2, 0))][3][4] == F(1)
    loc1 = next(pc for pc in lmi.pencils if pc.label == "localizer g1")
    assert loc1.size == 3
    assert loc1.coeffs[("z", (1, 0))][0][0] == F(1)
    assert loc1.coeffs[("z", (3, 0))][1][1] == F(1)
    assert loc1.constant[0][2] == F(1)
    assert loc1.coeffs[("y", (0, 1))][2][2] == F(1)
    loc2 = next(pc for pc in lmi.pencils if pc.label == "localizer g2")
    assert loc2.coeffs[("z", (0, 1))][0][0] == F(1)
    assert loc2.coeffs[("z", (0, 3))][2][2] == F(1)
    assert loc2.constant[0][1] == F(1)
    assert loc2.coeffs[("y", (0, 1))][1][2] == F(1)


def test_plane_lift_printed_pencils():
    R = plane_rational()
    lmi = qmod_lift(R, [], 2)
    F = Fraction
    assert lmi.n_free() == 12
    mat = next(pc for pc in lmi.pencils if pc.label == "matrix")
    assert mat.constant[0][0] == F(1)
    assert mat.coeffs[("y", (2, 0))][0][0] == F(-2)
    assert mat.coeffs[("y", (1, 1))][0][0] == F(-2)
    assert mat.coeffs[("y", (0, 2))][0][0] == F(-1)
    assert mat.coeffs[("z", (0, 4))][0][0] == F(-1)
    assert mat.coeffs[("y", (2, 0))][0][1] == F(1)
    assert mat.coeffs[("z", (0, 4))][0][1] == F(1)
    assert mat.coeffs[("y", (2, 0))][1][1] == F(-1)
    assert mat.coeffs[("z", (0, 4))][1][1] == F(-1)
    mom = next(pc for pc in lmi.pencils if pc.label == "moment")
    assert mom.size == 6
    assert mom.coeffs[("y", (2, 0))][3][3] == F(1)
    assert mom.coeffs[("y", (0, 2))][3][3] == F(-1)
    assert mom.coeffs[("z", (0, 4))][3][3] == F(1)
    assert mom.constant[1][1] == F(1) and mom.coeffs[("z", (0, 2))][1][1] == F(-1)
    assert mom.coeffs[("z", (1, 1))][0][4] == F(1)
    assert mom.coeffs[("z", (0, 2))][0][3] == F(-1)
    assert mom.coeffs[("z", (1, 3))][3][4] == F(-1)


def test_half_degree_floor_enforced():
    R, gs = orthant_rational()
    with pytest.raises(ValueError, match="half-degree 1 below required 2"):
        qmod_lift(R, gs, 1)


def test_pins_must_stay_inside_y_index():
    # a denominator of lex-lead weight 4 leaves no room for degree-1 pins
    p = P(2, {(4, 0): 1, (0, 4): 1})
    R = RationalMatFn(MatPoly.from_entries([[Poly.const(2, 1)]]), p)
    with pytest.raises(ValueError, match="pinned exponents"):
        qmod_lift(R, [], 2)


def test_index_escape_is_loud():
    # lex-lead x1 of a denominator whose trailing term x2^2 has higher
    # degree: quotients climb in x2 and leave the index sets
    p = P(2, {(1, 0): 1, (0, 2): -1})
    R = RationalMatFn(MatPoly.from_entries([[P(2, {(2, 0): 1})]]), p)
    with pytest.raises(IndexEscape, match=r"matrix entry \(0,0\)"):
        qmod_lift(R, [], 1)
    with pytest.raises(IndexEscape, match=r"quotient monomial"):
        qmod_lift(R, [], 2)


def test_canonical_lifting_divides_by_denominator():
    R, gs = orthant_rational()
    lmi = qmod_lift(R, gs, 2)
    w = canonical_lifting(lmi, (Fraction(1), Fraction(2)))
    assert w[("z", (0, 0))] == Fraction(1, 2)
    assert w[("z", (3, 0))] == Fraction(1, 2)
    assert w[("z", (0, 3))] == Fraction(8, 2)
    assert w[("y", (1, 1))] == Fraction(2)
    with pytest.raises(ZeroDivisionError):
        canonical_lifting(lmi, (Fraction(0), Fraction(1)))
