"""Moment and localizer pencils, polynomial-matrix liftings."""

import json
from fractions import Fraction

import numpy as np
import pytest

from pmilift.momlift import (
    LiftedLMI,
    LinearPencil,
    canonical_lifting,
    localizer_coeff_matrices,
    moment_coeff_matrices,
    moment_lift,
    putinar_lift,
    standard_pins,
)
from pmilift.polyalg import MatPoly, Poly, basis_exponents, frac_matrix, is_psd_exact

from conftest import P, choi_matrix, quartic_matrix


def pencil(lmi, label):
    return next(pc for pc in lmi.pencils if pc.label == label)


# -- coefficient matrices ----------------------------------------------------

def test_moment_matrices_univariate_golden():
    m = moment_coeff_matrices(1, 1)
    assert set(m) == {(0,), (1,), (2,)}
    assert (m[(0,)] == [[1, 0], [0, 0]]).all()
    assert (m[(1,)] == [[0, 1], [1, 0]]).all()
    assert (m[(2,)] == [[0, 0], [0, 1]]).all()


def test_moment_matrices_three_vars_golden():
    m = moment_coeff_matrices(3, 1)
    zero = m[(0, 0, 0)]
    assert zero[0, 0] == 1 and zero.sum() == 1
    e1 = m[(1, 0, 0)]
    assert e1[0, 1] == 1 and e1[1, 0] == 1 and e1.sum() == 2


def test_moment_matrices_pair_sum_golden():
    basis = basis_exponents(2, 2)
    m = moment_coeff_matrices(2, 2)
    a22 = m[(2, 2)]
    for i, bi in enumerate(basis):
        for j, bj in enumerate(basis):
            want = 1 if (bi[0] + bj[0], bi[1] + bj[1]) == (2, 2) else 0
            assert a22[i, j] == want


def test_moment_reconstruction_identity():
    # sum_alpha x^alpha A_alpha == [x]_d [x]_d^T, checked entrywise
    basis = basis_exponents(2, 2)
    m = moment_coeff_matrices(2, 2)
    for i, bi in enumerate(basis):
        for j, bj in enumerate(basis):
            rebuilt = Poly(2, {a: Fraction(int(m[a][i, j])) for a in m})
            assert rebuilt == Poly.monomial(2, (bi[0] + bj[0], bi[1] + bj[1]))


def test_localizer_with_unit_constraint_is_moment():
    one = Poly.const(2, 1)
    loc = localizer_coeff_matrices(one, 2)
    mom = moment_coeff_matrices(2, 2)
    assert set(loc) == set(mom)
    assert all((loc[a] == mom[a]).all() for a in loc)


def test_localizer_linear_constraint_golden():
    loc = localizer_coeff_matrices(Poly.var(2, 0), 1)
    # e = 1 - ceil(1/2) = 0: a single 1x1 block carrying g itself
    assert set(loc) == {(1, 0)}
    assert (loc[(1, 0)] == [[1]]).all()


def test_localizer_reconstruction_identity():
    g = P(2, {(1, 0): 2, (0, 1): -1, (0, 0): 3})
    loc = localizer_coeff_matrices(g, 2)
    basis = basis_exponents(2, 1)
    for i, bi in enumerate(basis):
        for j, bj in enumerate(basis):
            rebuilt = Poly(2, {b: Fraction(int(loc[b][i, j])) for b in loc})
            assert rebuilt == g * Poly.monomial(2, (bi[0] + bj[0], bi[1] + bj[1]))


def test_localizer_errors():
    with pytest.raises(ValueError):
        localizer_coeff_matrices(Poly.zero(2), 1)
    with pytest.raises(ValueError):
        localizer_coeff_matrices(P(2, {(2, 2): 1}), 1)


# -- pencils -----------------------------------------------------------------

def test_pencil_validation():
    sym = frac_matrix([[0, 1], [1, 0]])
    with pytest.raises(ValueError):
        LinearPencil(2, frac_matrix([[0, 1], [0, 0]]), {}, "bad")
    with pytest.raises(ValueError):
        LinearPencil(2, sym, {("w", (1, 0)): sym}, "bad kind")
    with pytest.raises(ValueError):
        LinearPencil(2, sym, {("y", (1, 0)): frac_matrix([[0, 1], [2, 0]])}, "asym")


def test_pencil_eval_exact_and_linear():
    lmi = moment_lift(choi_matrix())
    mom = pencil(lmi, "moment")
    rng = np.random.default_rng(3)

    def draw():
        return {k: Fraction(int(rng.integers(-4, 5)), int(rng.integers(1, 4)))
                for k in mom.coeffs}

    for _ in range(5):
        a, b = draw(), draw()
        lam = Fraction(1, 3)
        mix = {k: lam * a[k] + (1 - lam) * b[k] for k in a}
        lhs = mom.eval(mix)
        rhs = lam * mom.eval(a) + (1 - lam) * mom.eval(b)
        assert (lhs == rhs).all()
        assert all(isinstance(v, Fraction) for v in lhs.flat)


# -- moment lifting -----------------------------------------------------------

def test_standard_pins_golden():
    assert standard_pins(2) == {(0, 0): "1", (1, 0): "x1", (0, 1): "x2"}


def test_moment_lift_choi_structure():
    lmi = moment_lift(choi_matrix())
    assert [(pc.label, pc.size) for pc in lmi.pencils] == [("matrix", 3), ("moment", 4)]
    assert lmi.n_free() == 6
    assert lmi.summary() == "2 pencils (3x3, 4x4), 6 free lifting variables"
    free = lmi.free_keys()
    assert all(kind == "y" and sum(e) == 2 for kind, e in free)
    mat = pencil(lmi, "matrix")
    F = Fraction
    assert mat.constant[0][0] == F(2)
    assert mat.coeffs[("y", (2, 0, 0))][0][0] == F(-1)
    assert mat.coeffs[("y", (0, 0, 2))][0][0] == F(-2)
    assert mat.constant[0][1] == F(1) and mat.coeffs[("y", (1, 1, 0))][0][1] == F(1)
    assert mat.coeffs[("y", (1, 0, 1))][0][2] == F(1) and mat.constant[0][2] == 0
    assert mat.coeffs[("y", (0, 2, 0))][1][1] == F(-1)
    assert mat.coeffs[("y", (2, 0, 0))][1][1] == F(-2)
    assert mat.coeffs[("y", (0, 0, 2))][2][2] == F(-1)
    assert mat.coeffs[("y", (0, 2, 0))][2][2] == F(-2)
    mom = pencil(lmi, "moment")
    assert mom.size == 4 and mom.constant[0][0] == F(1)
    assert mom.coeffs[("y", (1, 0, 0))][0][1] == F(1)
    assert mom.coeffs[("y", (0, 1, 0))][0][2] == F(1)
    assert mom.coeffs[("y", (0, 0, 1))][0][3] == F(1)
    assert mom.coeffs[("y", (2, 0, 0))][1][1] == F(1)
    assert mom.coeffs[("y", (1, 1, 0))][1][2] == F(1)
    assert mom.coeffs[("y", (0, 1, 1))][2][3] == F(1)


def test_moment_lift_constant_matrix_keeps_order_one():
    G = MatPoly.from_entries([[Poly.const(2, 1)]])
    lmi = moment_lift(G)
    assert [pc.size for pc in lmi.pencils] == [1, 3]
    assert set(lmi.pins) == {(0, 0), (1, 0), (0, 1)}


def test_moment_lift_zero_matrix_rejected():
    with pytest.raises(ValueError):
        moment_lift(MatPoly.from_entries([[Poly.zero(2)]]))


# -- putinar lifting -----------------------------------------------------------

def test_putinar_ball_constraint_golden():
    gs = [P(3, {(0, 0, 0): 9, (2, 0, 0): -1, (0, 2, 0): -1, (0, 0, 2): -1})]
    lmi = putinar_lift(choi_matrix(), gs, 1)
    labels = [pc.label for pc in lmi.pencils]
    assert labels == ["matrix", "moment", "localizer g1"]
    loc = pencil(lmi, "localizer g1")
    assert loc.size == 1
    assert loc.constant[0][0] == Fraction(9)
    for e in ((2, 0, 0), (0, 2, 0), (0, 0, 2)):
        assert loc.coeffs[("y", e)][0][0] == Fraction(-1)


def test_putinar_without_domain_matches_moment_lift():
    G = choi_matrix()
    a, b = moment_lift(G), putinar_lift(G, [], 1)
    assert a.y_index == b.y_index
    assert a.pins == b.pins
    assert list(a.pencils) == list(b.pencils)


def test_putinar_order_nesting():
    Q, gs = P(2, {(1, 1): 1, (0, 0): -2}), [Poly.var(2, 0)]
    G = MatPoly.from_entries([[Q]])
    small = putinar_lift(G, gs, 1)
    big = putinar_lift(G, gs, 2)
    assert set(small.y_index) <= set(big.y_index)
    # graded bases nest, so the small moment pencil is the leading block
    ms, mb = pencil(small, "moment"), pencil(big, "moment")
    assert (mb.constant[: ms.size, : ms.size] == ms.constant).all()
    for key, block in ms.coeffs.items():
        assert (mb.coeffs[key][: ms.size, : ms.size] == block).all()


def test_putinar_errors():
    with pytest.raises(ValueError):
        putinar_lift(quartic_matrix(), [], 1)  # quartic needs order >= 2
    with pytest.raises(ValueError):
        putinar_lift(choi_matrix(), [Poly.var(2, 0)], 1)  # ring mismatch


# -- lifted LMI container -------------------------------------------------------

def test_free_keys_excludes_pins_and_orders_graded():
    lmi = moment_lift(quartic_matrix())
    free = lmi.free_keys()
    assert len(free) == lmi.n_free() == 12
    assert ("y", (0, 0)) not in free and ("y", (1, 0)) not in free
    degs = [sum(e) for _, e in free]
    assert degs == sorted(degs)


def test_pin_values():
    lmi = moment_lift(quartic_matrix())
    vals = lmi.pin_values((Fraction(1, 2), Fraction(3)))
    assert vals[("y", (0, 0))] == 1
    assert vals[("y", (1, 0))] == Fraction(1, 2)
    assert vals[("y", (0, 1))] == Fraction(3)
    with pytest.raises(ValueError):
        lmi.pin_values((1,))


def test_lifted_lmi_rejects_unknown_references():
    lmi = moment_lift(quartic_matrix())
    stray = LinearPencil(
        1, frac_matrix([[0]]), {("y", (9, 9)): frac_matrix([[1]])}, "stray"
    )
    with pytest.raises(ValueError):
        LiftedLMI(lmi.nvars, lmi.y_index, lmi.z_index, lmi.pins,
                  lmi.pencils + (stray,))


def test_json_roundtrip():
    for lmi in (moment_lift(choi_matrix()), moment_lift(quartic_matrix())):
        text = lmi.to_json()
        back = LiftedLMI.from_json(text)
        assert back == lmi
        assert back.to_json() == text
        obj = json.loads(text)
        assert obj["nvars"] == lmi.nvars


# -- canonical lifting ------------------------------------------------------------

def test_canonical_lifting_exact_powers():
    lmi = moment_lift(quartic_matrix())
    w = canonical_lifting(lmi, (Fraction(1, 2), Fraction(-1, 3)))
    assert w[("y", (2, 0))] == Fraction(1, 4)
    assert w[("y", (1, 1))] == Fraction(-1, 6)
    assert w[("y", (0, 4))] == Fraction(1, 81)
    with pytest.raises(ValueError):
        canonical_lifting(lmi, (1,))


def test_canonical_lifting_soundness_on_members():
    # direct membership at a rational point forces every pencil PSD, exactly
    G = quartic_matrix()
    lmi = moment_lift(G)
    rng = np.random.default_rng(11)
    checked = 0
    while checked < 8:
        x = (Fraction(int(rng.integers(-12, 13)), 16),
             Fraction(int(rng.integers(-12, 13)), 16))
        if not is_psd_exact(G.eval(x)):
            continue
        w = canonical_lifting(lmi, x)
        for pc in lmi.pencils:
            assert is_psd_exact(pc.eval(w)), (x, pc.label)
        checked += 1
