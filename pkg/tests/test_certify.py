"""Sum-of-squares certificates and exact identity verification."""

from fractions import Fraction

import pytest

from pmilift.certify import (
    linearization_gap_poly,
    matrix_identity_residual,
    matrix_sos_check,
    pointwise_sos_concavity,
    qmod_certificate_search,
    sigma_to_poly,
    uniform_sos_concavity,
    verify_identity,
)
from pmilift.polyalg import MatPoly, Poly

from conftest import P, choi_matrix, hyperbola_matrix, orthant_rational, quartic_matrix


# -- sos feasibility of matrix polynomials ---------------------------------------

def test_perfect_square_is_sos():
    H = MatPoly.from_entries([[P(2, {(2, 0): 1, (1, 1): 2, (0, 2): 1})]])
    cert = matrix_sos_check(H)
    assert cert.feasible
    assert cert.gram_blocks
    if cert.exact_grams:
        assert cert.residual == Fraction(0)
        assert "exact rational Gram" in cert.detail


def test_zero_matrix_is_sos():
    cert = matrix_sos_check(MatPoly.from_entries([[Poly.zero(2)]]))
    assert cert.status == "Feasible"
    assert "zero matrix" in cert.detail


def test_odd_degree_refused_syntactically():
    cert = matrix_sos_check(MatPoly.from_entries([[Poly.var(2, 0)]]))
    assert cert.status == "Infeasible"
    assert "odd total degree" in cert.detail
    assert cert.dual


def test_unreachable_support_refused():
    # x1*x2 alone: no square support can produce it
    cert = matrix_sos_check(MatPoly.from_entries([[P(2, {(1, 1): 1})]]))
    assert cert.status == "Infeasible"
    assert cert.dual


def test_motzkin_not_sos():
    motzkin = P(2, {(4, 2): 1, (2, 4): 1, (2, 2): -3, (0, 0): 1})
    cert = matrix_sos_check(MatPoly.from_entries([[motzkin]]))
    assert cert.status == "Infeasible"
    assert cert.dual


# -- concavity certificates --------------------------------------------------------

def test_uniform_concavity_quartic_feasible():
    cert = uniform_sos_concavity(quartic_matrix())
    assert cert.status == "Feasible"
    assert cert.residual is not None and float(cert.residual) <= 1e-6
    text = cert.to_text()
    assert text.startswith("kind: UniformMatrixSOS\nstatus: Feasible")
    assert "block " in text and "gram:" in text


def test_uniform_concavity_choi_infeasible():
    cert = uniform_sos_concavity(choi_matrix())
    assert cert.status == "Infeasible"
    assert cert.dual


def test_uniform_concavity_hyperbola_infeasible():
    Q, _ = hyperbola_matrix()
    cert = uniform_sos_concavity(Q)
    assert cert.status == "Infeasible"


def test_uniform_concavity_affine_trivial():
    G = MatPoly.from_entries([[P(2, {(0, 0): 1, (1, 0): 1})]])
    cert = uniform_sos_concavity(G)
    assert cert.status == "Feasible"
    assert "zero hessian" in cert.detail


def test_pointwise_concavity_choi_direction():
    cert = pointwise_sos_concavity(choi_matrix(), [1, 1, 1])
    assert cert.status == "Feasible"
    assert cert.exact_grams is not None
    assert cert.residual == Fraction(0)


def test_pointwise_concavity_hyperbola_direction():
    Q, _ = hyperbola_matrix()
    cert = pointwise_sos_concavity(Q, [1, 0, 0])
    assert cert.status == "Infeasible"


def test_pointwise_requires_nonzero_direction():
    with pytest.raises(ValueError):
        pointwise_sos_concavity(choi_matrix(), [0, 0, 0])


# -- sigma specifications ------------------------------------------------------------

def test_sigma_forms_agree():
    x1, x2 = Poly.var(2, 0), Poly.var(2, 1)
    direct = (x1 + x2 * 2) * (x1 + x2 * 2)
    assert sigma_to_poly(2, direct) == direct
    assert sigma_to_poly(2, ("squares", [(1, x1 + x2 * 2)])) == direct
    gram = ("gram", [[1, 2], [2, 4]], [(1, 0), (0, 1)])
    assert sigma_to_poly(2, gram) == direct
    with pytest.raises(ValueError):
        sigma_to_poly(2, ("mystery", None))


def test_verify_identity_closure():
    # x1 (x1+x2)^2 + x2 (x1-x2)^2 decomposes against itself
    x1, x2 = Poly.var(2, 0), Poly.var(2, 1)
    one = Poly.const(2, 1)
    lhs = x1 * (x1 + x2) * (x1 + x2) + x2 * (x1 - x2) * (x1 - x2)
    residual = verify_identity(lhs, [
        (x1, one, ("squares", [(1, x1 + x2)])),
        (x2, one, ("squares", [(1, x1 - x2)])),
    ])
    assert not residual
    wrong = verify_identity(lhs, [(x1, one, ("squares", [(1, x1 + x2)]))])
    assert wrong  # residual polynomial is nonzero


def test_matrix_identity_residual():
    G = quartic_matrix()
    Z = matrix_identity_residual(G, [G])
    assert all(not Z.entry(i, j) for i in range(2) for j in range(2))
    NZ = matrix_identity_residual(G, [G, G])
    assert NZ.entry(0, 0)


# -- linearization gap ----------------------------------------------------------------

def test_linearization_gap_vanishes_on_diagonal():
    R, _ = orthant_rational()
    gap = linearization_gap_poly(R, R.denom, R.q_or_default())
    assert gap.nvars == 6  # (x1, x2, u1, u2, xi1, xi2)
    for x1, x2 in ((Fraction(1), Fraction(2)), (Fraction(1, 3), Fraction(5))):
        for xi in ((Fraction(1), Fraction(0)), (Fraction(2), Fraction(-1))):
            assert gap.eval((x1, x2, x1, x2, *xi)) == 0


def test_linearization_gap_needs_clearing():
    R, _ = orthant_rational()
    one = Poly.const(2, 1)
    with pytest.raises(ValueError):
        linearization_gap_poly(R, one, one)


# -- certificate search: cheap deterministic paths --------------------------------------

def test_qmod_search_validates_inputs():
    R, gs = orthant_rational()
    with pytest.raises(ValueError):
        qmod_certificate_search(R, gs, R.denom, R.q_or_default(), t=0)
    with pytest.raises(ValueError):
        qmod_certificate_search(R, gs, Poly.zero(2), R.q_or_default(), t=1)


def test_qmod_search_zero_gap_short_circuits():
    p = P(2, {(1, 1): 1})
    num = MatPoly.from_entries([
        [p, Poly.zero(2)],
        [Poly.zero(2), p * 2],
    ])
    from pmilift.ratlift import RationalMatFn
    R = RationalMatFn(num, p)
    cert = qmod_certificate_search(R, [], p, R.q_or_default(), t=1)
    assert cert.status == "Feasible"
    assert "identically zero" in cert.detail


def test_qmod_search_degree_reach_refusal():
    R, gs = orthant_rational()
    cert = qmod_certificate_search(R, gs, R.denom, R.q_or_default(), t=1)
    assert cert.status == "InfeasibleByDegree"
    assert "exceeds the reach" in cert.detail
